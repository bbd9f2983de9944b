//! Source coding with escort distributions and Rényi entropy bounds.
//!
//! The crate provides
//!
//! - finite distributions and the escort transform ([`prob`]),
//! - Shannon, Rényi and normalized Tsallis entropies ([`entropy`]),
//! - the expected, Campbell, escort-mean and hybrid length measures together
//!   with their entropy lower bounds ([`lengths`]),
//! - Kraft-McMillan checks, D-ary Huffman codes, Huffman codes on escort
//!   distributions and a brute-force optimality oracle ([`coder`]),
//! - an encoder/decoder with a self-describing container ([`codec`]),
//! - randomized bound checks ([`trials`]) and the `escort` CLI ([`cli`]).
//!
//! ```
//! use escort_coding::{escort_huffman, escort_mean_length, make_distribution, LogBase};
//!
//! let p = make_distribution(&[0.48, 0.3, 0.1, 0.05, 0.05, 0.01, 0.01], false, 1e-9).unwrap();
//! let book = escort_huffman(&p, 0.4, LogBase::BINARY).unwrap();
//! assert_eq!(book.lengths(), vec![2, 2, 3, 3, 3, 4, 4]);
//! let m = escort_mean_length(&p, &book.length_vector(), 0.4).unwrap();
//! assert!(m > 2.6 && m < 2.61);
//! ```

pub mod cli;
pub mod codec;
pub mod coder;
pub mod entropy;
pub mod error;
pub mod lengths;
mod numeric;
pub mod prob;
pub mod reference;
pub mod trials;

pub use codec::{decode, encode, EncodedStream};
pub use coder::{
    code_from_lengths, escort_huffman, exhaustive_optimal, huffman, kraft_feasible, kraft_sum, Codebook,
};
pub use entropy::{
    q_exp, q_log, renyi_entropy, shannon_entropy, tsallis_entropy_normalized, EntropyOrder, LogBase,
};
pub use error::{Error, Result};
pub use lengths::{
    campbell_length, escort_mean_length, expected_length, ideal_lengths_campbell, ideal_lengths_shannon,
    new_length_measure, verify_bounds, BoundReport, LengthVector,
};
pub use prob::{escort, make_distribution, Distribution};

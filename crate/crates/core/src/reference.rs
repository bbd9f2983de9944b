//! A published binary example: Huffman codes built on escorts of a
//! seven-symbol source for `q = 1, 0.7, 0.4`, used as a regression target.

use crate::coder::escort_huffman;
use crate::entropy::LogBase;
use crate::error::Result;
use crate::lengths::{escort_mean_length, LengthVector};
use crate::prob::{make_distribution, Distribution, CONSTRUCTION_TOLERANCE};

pub const REFERENCE_PROBS: [f64; 7] = [0.48, 0.3, 0.1, 0.05, 0.05, 0.01, 0.01];

/// Published codewords per order.
pub const REFERENCE_CODES: [(f64, [&str; 7]); 3] = [
    (1.0, ["0", "10", "110", "1110", "11110", "111110", "111111"]),
    (0.7, ["0", "10", "1100", "1101", "1110", "11110", "11111"]),
    (0.4, ["00", "01", "100", "101", "110", "1110", "1111"]),
];

/// Values of `M_q` may differ from the published lengths' by at most this.
pub const MEAN_TOLERANCE: f64 = 1e-12;

pub fn reference_distribution() -> Distribution {
    make_distribution(&REFERENCE_PROBS, false, CONSTRUCTION_TOLERANCE).expect("sums to one")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnReport {
    pub q: f64,
    pub codewords: Vec<String>,
    pub lengths: Vec<u32>,
    pub reference_lengths: Vec<u32>,
    pub multiset_match: bool,
    pub codewords_match: bool,
    pub mean_produced: f64,
    pub mean_reference: f64,
}

impl ColumnReport {
    /// Same length multiset, or an escort mean equal to the reference one.
    pub fn passed(&self) -> bool {
        self.multiset_match || (self.mean_produced - self.mean_reference).abs() <= MEAN_TOLERANCE
    }
}

/// Builds the escort Huffman code for each published column and compares.
pub fn reproduce() -> Result<Vec<ColumnReport>> {
    let p = reference_distribution();
    let base = LogBase::BINARY;
    REFERENCE_CODES
        .iter()
        .map(|&(q, words)| {
            let book = escort_huffman(&p, q, base)?;
            let lengths = book.lengths();
            let codewords: Vec<String> = (0..book.len()).map(|i| book.codeword_string(i)).collect();
            let reference_lengths: Vec<u32> = words.iter().map(|w| w.len() as u32).collect();
            let mut a = lengths.clone();
            let mut b = reference_lengths.clone();
            a.sort_unstable();
            b.sort_unstable();
            Ok(ColumnReport {
                q,
                codewords_match: codewords.iter().zip(words).all(|(x, y)| x == y),
                multiset_match: a == b,
                mean_produced: escort_mean_length(&p, &book.length_vector(), q)?,
                mean_reference: escort_mean_length(&p, &LengthVector::from_integers(&reference_lengths), q)?,
                codewords,
                lengths,
                reference_lengths,
            })
        })
        .collect()
}

use escort_coding::codec::decode_counting;
use escort_coding::lengths::{renyi_entropy_nats, JENSEN};
use escort_coding::{
    campbell_length, code_from_lengths, decode, encode, escort, escort_huffman, escort_mean_length,
    expected_length, huffman, ideal_lengths_campbell, kraft_sum, make_distribution, new_length_measure,
    renyi_entropy, shannon_entropy, verify_bounds, Codebook, Distribution, EncodedStream, EntropyOrder,
    LengthVector, LogBase,
};
use proptest::prelude::*;

fn distribution(min_n: usize, max_n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(1e-3f64..1.0, min_n..=max_n)
        .prop_map(|v| make_distribution(&v, true, 1e-9).unwrap())
}

fn base() -> impl Strategy<Value = LogBase> {
    (2u32..=5).prop_map(|d| LogBase::new(d).unwrap())
}

/// Distribution with the lengths of a Huffman code built for an unrelated
/// source of the same size.
fn instance() -> impl Strategy<Value = (Distribution, LengthVector)> {
    (2usize..=10)
        .prop_flat_map(|n| (distribution(n, n), distribution(n, n)))
        .prop_map(|(p, other)| {
            let l = huffman(&other, LogBase::BINARY).unwrap().length_vector();
            (p, l)
        })
}

fn is_prefix_free(book: &Codebook) -> bool {
    let words = book.codewords();
    words
        .iter()
        .enumerate()
        .all(|(i, a)| words.iter().enumerate().all(|(j, b)| i == j || !b.starts_with(a)))
}

fn h(p: &Distribution, q: f64, d: u32) -> f64 {
    renyi_entropy(p, EntropyOrder::new(q, d).unwrap())
}

proptest! {
    #[test]
    fn escort_of_order_one_is_identity(p in distribution(1, 12)) {
        let e = escort(&p, 1.0).unwrap();
        for (a, b) in e.probs().iter().zip(p.probs()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn escort_duality(p in distribution(1, 12), q in 0.05f64..20.0) {
        let back = escort(&escort(&p, q).unwrap(), 1.0 / q).unwrap();
        prop_assert!(back.approx_eq(&p, 1e-12), "{:?} vs {:?}", back.probs(), p.probs());
    }

    #[test]
    fn escort_sums_to_one(p in distribution(1, 12), q in 0.0f64..10.0) {
        let s: f64 = escort(&p, q).unwrap().probs().iter().sum();
        prop_assert!((s - 1.0).abs() <= 1e-15, "{s}");
    }

    #[test]
    fn escort_sharpens_or_flattens(p in distribution(2, 12), q in 0.05f64..5.0) {
        let ratio = |d: &Distribution| {
            let max = d.probs().iter().copied().fold(0.0, f64::max);
            let min = d.probs().iter().copied().fold(1.0, f64::min);
            max / min
        };
        let e = escort(&p, q).unwrap();
        if q > 1.0 {
            let mut sorted = p.probs().to_vec();
            sorted.sort_by(|a, b| b.total_cmp(a));
            prop_assume!(sorted[0] > sorted[1] * (1.0 + 1e-9));
            prop_assert_eq!(e.argmax(), p.argmax());
        } else if q < 1.0 {
            prop_assume!(ratio(&p) > 1.0 + 1e-9);
            prop_assert!(ratio(&e) < ratio(&p));
        }
    }

    #[test]
    fn renyi_is_non_increasing_in_order(p in distribution(1, 12), d in 2u32..=10) {
        let grid = [0.0, 0.2, 0.5, 0.9, 1.0, 1.1, 2.0, 3.5, 10.0, 100.0];
        for w in grid.windows(2) {
            prop_assert!(h(&p, w[0], d) >= h(&p, w[1], d) - 1e-12, "{:?}", w);
        }
    }

    #[test]
    fn renyi_is_bounded_by_log_support(p in distribution(1, 12), a in 0.0f64..10.0, d in 2u32..=10) {
        let x = h(&p, a, d);
        prop_assert!(x >= 0.0);
        prop_assert!(x <= (p.len() as f64).ln() / (d as f64).ln() + 1e-12);
    }

    #[test]
    fn renyi_is_continuous_at_one(p in distribution(1, 12)) {
        let h1 = shannon_entropy(&p, LogBase::BINARY);
        for a in [1.0 - 1e-8, 1.0 + 1e-8, 1.0 - 1e-7, 1.0 + 1e-6] {
            prop_assert!((h(&p, a, 2) - h1).abs() < 1e-6);
        }
    }

    #[test]
    fn renyi_duality(p in distribution(1, 12), q in 0.1f64..10.0) {
        let e = escort(&p, q).unwrap();
        let lhs = renyi_entropy_nats(&e, 1.0 / q);
        let rhs = renyi_entropy_nats(&p, q);
        prop_assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn bounds_hold_up_to_order_one((p, l) in instance(), q in 0.0f64..=1.0) {
        for r in verify_bounds(&p, &l, q, LogBase::BINARY, 1e-9).unwrap() {
            prop_assert!(r.satisfied, "{r}");
        }
    }

    #[test]
    fn lower_bounds_hold_above_order_one((p, l) in instance(), q in 1.0f64..20.0) {
        for r in verify_bounds(&p, &l, q, LogBase::BINARY, 1e-9).unwrap() {
            if r.inequality() == JENSEN {
                continue;
            }
            prop_assert!(r.satisfied, "{r}");
        }
    }

    #[test]
    fn escort_mean_and_new_measure_order_flips_at_one((p, l) in instance()) {
        let distinct = l.as_slice().iter().any(|&x| x != l.as_slice()[0]);
        prop_assume!(distinct);
        let gap = |q: f64| {
            escort_mean_length(&p, &l, q).unwrap() - new_length_measure(&p, &l, q, LogBase::BINARY).unwrap()
        };
        prop_assert!(gap(0.5) > 0.0);
        prop_assert!(gap(2.0) < 0.0);
        prop_assert_eq!(gap(1.0), 0.0);
    }

    #[test]
    fn new_measure_on_escort_is_campbell((p, l) in instance(), q in 0.05f64..0.95) {
        let big_p = escort(&p, q).unwrap();
        let lhs = new_length_measure(&big_p, &l, 1.0 / q, LogBase::BINARY).unwrap();
        let rhs = campbell_length(&p, &l, (1.0 - q) / q, LogBase::BINARY).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn campbell_ideal_lengths_closed_form(p in distribution(1, 12), q in 0.05f64..3.0, b in base()) {
        let l = ideal_lengths_campbell(&p, q, b, false).unwrap();
        let hq = renyi_entropy(&p, EntropyOrder::with_base(q, b).unwrap());
        for (&li, &pi) in l.as_slice().iter().zip(p.probs()) {
            let expected = -q * pi.ln() / b.ln() + (1.0 - q) * hq;
            prop_assert!((li - expected).abs() < 1e-12, "{li} vs {expected}");
        }
    }

    #[test]
    fn huffman_is_prefix_free_and_kraft_feasible(p in distribution(1, 16), b in base(), q in 0.0f64..4.0) {
        for book in [huffman(&p, b).unwrap(), escort_huffman(&p, q, b).unwrap()] {
            prop_assert_eq!(book.len(), p.len());
            prop_assert!(is_prefix_free(&book));
            prop_assert!(kraft_sum(&book.length_vector(), b) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn canonical_code_keeps_length_multiset(p in distribution(1, 16), b in base()) {
        let lengths = huffman(&p, b).unwrap().length_vector();
        let book = code_from_lengths(&lengths, b).unwrap();
        prop_assert!(is_prefix_free(&book));
        prop_assert_eq!(book.length_vector(), lengths);
    }

    #[test]
    fn shannon_sandwich(p in distribution(2, 16), b in base()) {
        let mean = expected_length(&p, &huffman(&p, b).unwrap().length_vector()).unwrap();
        let h1 = shannon_entropy(&p, b);
        prop_assert!(h1 <= mean + 1e-12 && mean - 1.0 < h1, "{h1} {mean}");
    }

    #[test]
    fn escort_sandwich(p in distribution(2, 16), q in 0.0f64..5.0) {
        let b = LogBase::BINARY;
        let m = escort_mean_length(&p, &escort_huffman(&p, q, b).unwrap().length_vector(), q).unwrap();
        let h1 = shannon_entropy(&escort(&p, q).unwrap(), b);
        prop_assert!(h1 <= m + 1e-12 && m - 1.0 < h1, "{h1} {m}");
    }

    #[test]
    fn codec_round_trip(
        p in distribution(1, 20),
        b in base(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 0..300),
    ) {
        let book = huffman(&p, b).unwrap();
        let symbols: Vec<usize> = picks.iter().map(|i| i.index(book.len())).collect();
        let bytes = encode(&symbols, &book).unwrap().to_bytes();
        let stream = EncodedStream::from_bytes(&bytes).unwrap();
        let (decoded, digits) = decode_counting(&stream).unwrap();
        prop_assert_eq!(&decoded, &symbols);
        let lengths = book.lengths();
        let expected: u64 = symbols.iter().map(|&s| lengths[s] as u64).sum();
        prop_assert_eq!(digits, expected);
    }

    #[test]
    fn tampered_containers_never_panic(
        p in distribution(1, 8),
        len in 0usize..50,
        at in any::<prop::sample::Index>(),
        byte in any::<u8>(),
        cut in any::<prop::sample::Index>(),
    ) {
        let book = huffman(&p, LogBase::BINARY).unwrap();
        let symbols: Vec<usize> = (0..len).map(|i| i % book.len()).collect();
        let mut bytes = encode(&symbols, &book).unwrap().to_bytes();
        let i = at.index(bytes.len());
        bytes[i] = byte;
        for slice in [&bytes[..], &bytes[..cut.index(bytes.len())]] {
            if let Ok(stream) = EncodedStream::from_bytes(slice) {
                let _ = decode(&stream);
            }
        }
    }
}

// A lone symbol still needs one digit, so the upper bound is met with equality.
#[test]
fn single_symbol_code_sits_on_the_upper_bound() {
    let p = make_distribution(&[1.0], false, 1e-9).unwrap();
    let book = huffman(&p, LogBase::BINARY).unwrap();
    assert_eq!(book.lengths(), vec![1]);
    assert_eq!(
        shannon_entropy(&p, LogBase::BINARY) + 1.0,
        expected_length(&p, &book.length_vector()).unwrap()
    );
}

//! Realizable prefix codes: Kraft-McMillan feasibility, D-ary Huffman
//! construction, Huffman on an escort distribution, canonical codeword
//! assignment and a brute-force optimality oracle.
//!
//! Feeding a plain Huffman coder with the escort `P = escort(p, q)` instead
//! of `p` minimizes the escort mean length `M_q`, and with it Campbell's
//! exponential length for `q = 1/(1+β)`. No dedicated algorithm is needed.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use crate::entropy::LogBase;
use crate::error::{Error, Result};
use crate::lengths::LengthVector;
use crate::numeric::compensated_sum;
use crate::prob::{escort, Distribution};

/// `Σ D^{-l_i}`.
pub fn kraft_sum(l: &LengthVector, base: LogBase) -> f64 {
    let d = base.get() as f64;
    compensated_sum(l.as_slice().iter().map(|&li| d.powf(-li)))
}

/// Whether `Σ D^{-l_i} ≤ 1 + tolerance`.
pub fn kraft_feasible(l: &LengthVector, base: LogBase, tolerance: f64) -> bool {
    kraft_sum(l, base) <= 1.0 + tolerance
}

/// A prefix-free code over a `D`-letter alphabet, one codeword per symbol.
///
/// Codeword digits are stored as values in `0..D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    alphabet_size: u32,
    codewords: Vec<Vec<u8>>,
    labels: Vec<String>,
}

impl Codebook {
    /// Validates and builds a codebook. Labels default to symbol indices.
    pub fn new(base: LogBase, codewords: Vec<Vec<u8>>, labels: Option<Vec<String>>) -> Result<Self> {
        let d = base.get();
        for (index, word) in codewords.iter().enumerate() {
            if word.is_empty() {
                return Err(Error::EmptyCodeword { index });
            }
            if let Some(&digit) = word.iter().find(|&&x| x as u32 >= d) {
                return Err(Error::InvalidDigit {
                    index,
                    digit: digit as u32,
                    alphabet_size: d,
                });
            }
        }
        check_prefix_free(&codewords)?;
        let labels = match labels {
            Some(labels) => {
                if labels.len() != codewords.len() {
                    return Err(Error::CardinalityMismatch {
                        expected: codewords.len(),
                        found: labels.len(),
                    });
                }
                labels
            }
            None => (0..codewords.len()).map(|i| i.to_string()).collect(),
        };
        Ok(Codebook {
            alphabet_size: d,
            codewords,
            labels,
        })
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn base(&self) -> LogBase {
        LogBase::new(self.alphabet_size).expect("validated at construction")
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codewords(&self) -> &[Vec<u8>] {
        &self.codewords
    }

    pub fn codeword(&self, symbol: usize) -> Option<&[u8]> {
        self.codewords.get(symbol).map(Vec::as_slice)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Replaces the labels, e.g. with those of the source distribution.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.codewords.len() {
            return Err(Error::CardinalityMismatch {
                expected: self.codewords.len(),
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn lengths(&self) -> Vec<u32> {
        self.codewords.iter().map(|w| w.len() as u32).collect()
    }

    pub fn length_vector(&self) -> LengthVector {
        LengthVector::from_integers(&self.lengths())
    }

    /// Codeword of `symbol` rendered with the digits `0-9a-z`.
    pub fn codeword_string(&self, symbol: usize) -> String {
        self.codewords[symbol].iter().map(|&d| digit_char(d)).collect()
    }

    /// Text form: a `#D=<alphabet_size>` header, then `label<TAB>codeword` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#D={}\n", self.alphabet_size);
        for i in 0..self.len() {
            let _ = writeln!(out, "{}\t{}", self.labels[i], self.codeword_string(i));
        }
        out
    }

    /// Parses the text form written by [`Codebook::to_tsv`].
    ///
    /// The first non-blank line must be the `#D=` header; later `#` lines
    /// are comments.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut base = None;
        let mut codewords = Vec::new();
        let mut labels = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if base.is_none() {
                let d = line
                    .strip_prefix("#D=")
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: "missing `#D=<alphabet_size>` header".into(),
                    })?
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse {
                        line: line_no,
                        message: "cannot parse alphabet size".into(),
                    })?;
                base = Some(LogBase::new(d).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let (label, word) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected `label<TAB>codeword`".into(),
            })?;
            let d = base.unwrap().get();
            let word = word
                .trim()
                .chars()
                .map(|c| match c.to_digit(36) {
                    Some(v) if v < d => Ok(v as u8),
                    _ => Err(Error::Parse {
                        line: line_no,
                        message: format!("invalid digit {c:?} for alphabet size {d}"),
                    }),
                })
                .collect::<Result<Vec<u8>>>()?;
            labels.push(label.trim().to_string());
            codewords.push(word);
        }
        let base = base.ok_or(Error::Parse {
            line: 1,
            message: "missing `#D=<alphabet_size>` header".into(),
        })?;
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Parse {
                line: 0,
                message: format!("duplicate label {dup:?}"),
            });
        }
        Codebook::new(base, codewords, Some(labels))
    }
}

fn digit_char(d: u8) -> char {
    std::char::from_digit(d as u32, 36).expect("digit below 36")
}

/// Fails if any codeword is a prefix of (or equal to) another.
///
/// After sorting, a prefix relation can only occur between neighbours.
fn check_prefix_free(codewords: &[Vec<u8>]) -> Result<()> {
    let mut order: Vec<usize> = (0..codewords.len()).collect();
    order.sort_by(|&a, &b| codewords[a].cmp(&codewords[b]).then(a.cmp(&b)));
    for pair in order.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if codewords[b].starts_with(&codewords[a]) {
            return Err(Error::NonPrefixCodebook { prefix: a, other: b });
        }
    }
    Ok(())
}

/// Heap entry ordered by `(weight, smallest contained symbol index)`.
#[derive(Debug, Clone, Copy)]
struct Node {
    weight: f64,
    key: usize,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.key.cmp(&other.key))
    }
}

/// D-ary Huffman codeword lengths for non-negative `weights`.
///
/// Zero-weight dummies pad the leaf count so that every merge takes exactly
/// `D` nodes. Ties are broken by the smallest original index a node contains.
/// Finally the length multiset is reassigned so that lengths are
/// non-decreasing in `(weight desc, index asc)`; this only permutes lengths
/// among equal weights and keeps `Σ w_i l_i` unchanged.
pub fn huffman_lengths(weights: &[f64], base: LogBase) -> Vec<u32> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![1];
    }
    let d = base.get() as usize;
    let dummies = (d - 1 - (n - 1) % (d - 1)) % (d - 1);
    let leaves = n + dummies;

    let mut parent = vec![usize::MAX; leaves];
    let mut heap = BinaryHeap::with_capacity(leaves);
    let padded = weights.iter().copied().chain(std::iter::repeat_n(0.0, dummies));
    for (id, weight) in padded.enumerate() {
        heap.push(Reverse(Node { weight, key: id, id }));
    }
    while heap.len() > 1 {
        let id = parent.len();
        parent.push(usize::MAX);
        let mut weight = 0.0;
        let mut key = usize::MAX;
        for _ in 0..d {
            let Reverse(child) = heap.pop().expect("padded leaf count");
            parent[child.id] = id;
            weight += child.weight;
            key = key.min(child.key);
        }
        heap.push(Reverse(Node { weight, key, id }));
    }

    // Parents are created after their children, so a reverse sweep fills depths.
    let mut depth = vec![0u32; parent.len()];
    for id in (0..parent.len()).rev() {
        if parent[id] != usize::MAX {
            depth[id] = depth[parent[id]] + 1;
        }
    }
    let mut multiset: Vec<u32> = depth[..n].to_vec();
    multiset.sort_unstable();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut lengths = vec![0u32; n];
    for (rank, &symbol) in order.iter().enumerate() {
        lengths[symbol] = multiset[rank];
    }
    lengths
}

/// Huffman code for `p`, minimizing `Σ p_i l_i` over prefix codes.
///
/// Codewords are assigned canonically from the Huffman lengths, and
/// zero-probability symbols end up with the longest words. A single-symbol
/// source gets one codeword of length 1.
pub fn huffman(p: &Distribution, base: LogBase) -> Result<Codebook> {
    if p.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let lengths = huffman_lengths(p.probs(), base);
    code_from_lengths(&LengthVector::from_integers(&lengths), base)?.with_labels(p.label_list())
}

/// Huffman code built on the escort of order `q`; minimizes `M_q`.
pub fn escort_huffman(p: &Distribution, q: f64, base: LogBase) -> Result<Codebook> {
    let weights = escort(p, q)?;
    huffman(&weights, base)
}

/// Canonical prefix code with the given integer lengths.
///
/// Symbols are visited in `(length, index)` order and receive successive
/// base-`D` numerals, each left-justified to its length. This succeeds
/// exactly when the lengths satisfy the Kraft-McMillan inequality.
pub fn code_from_lengths(l: &LengthVector, base: LogBase) -> Result<Codebook> {
    let lengths = l.to_integers()?;
    if let Some(index) = lengths.iter().position(|&x| x == 0) {
        return Err(Error::InvalidLength { index, value: 0.0 });
    }
    let d = base.get() as u8;
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));

    let mut codewords = vec![Vec::new(); lengths.len()];
    let mut current: Vec<u8> = Vec::new();
    for (rank, &symbol) in order.iter().enumerate() {
        let len = lengths[symbol] as usize;
        if rank > 0 && !increment(&mut current, d) {
            return Err(Error::KraftViolation {
                sum: kraft_sum(l, base),
            });
        }
        current.resize(len, 0);
        codewords[symbol] = current.clone();
    }
    Codebook::new(base, codewords, None)
}

/// Adds one to a base-`d` numeral in place; false on overflow.
fn increment(digits: &mut [u8], d: u8) -> bool {
    for digit in digits.iter_mut().rev() {
        if *digit + 1 < d {
            *digit += 1;
            return true;
        }
        *digit = 0;
    }
    false
}

/// Largest alphabet size for [`exhaustive_optimal`].
pub const EXHAUSTIVE_MAX_SYMBOLS: usize = 8;
/// Largest codeword length for [`exhaustive_optimal`].
pub const EXHAUSTIVE_MAX_LENGTH: u32 = 12;

/// Brute-force minimum of `M_q` over all integer prefix-code lengths with
/// entries at most `max_len`.
///
/// Every non-decreasing length sequence satisfying the Kraft-McMillan
/// inequality (checked in exact integer arithmetic) is enumerated; the
/// shortest lengths go to the largest escort weights. Returns the minimizing
/// lengths in symbol order and the minimal `M_q`.
pub fn exhaustive_optimal(
    p: &Distribution,
    q: f64,
    base: LogBase,
    max_len: u32,
) -> Result<(LengthVector, f64)> {
    let n = p.len();
    if n > EXHAUSTIVE_MAX_SYMBOLS || max_len > EXHAUSTIVE_MAX_LENGTH {
        return Err(Error::InstanceTooLarge(format!(
            "{n} symbols, max length {max_len} (limits {EXHAUSTIVE_MAX_SYMBOLS}, {EXHAUSTIVE_MAX_LENGTH})"
        )));
    }
    if max_len == 0 {
        return Err(Error::InstanceTooLarge("max length must be at least 1".into()));
    }
    let weights = escort(p, q)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights.probs()[b].total_cmp(&weights.probs()[a]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| weights.probs()[i]).collect();

    let d = base.get() as u128;
    let budget = d.pow(max_len);
    let mut search = Search {
        weights: &sorted,
        d,
        max_len,
        budget,
        current: Vec::with_capacity(n),
        best: None,
    };
    search.extend(1, 0);
    let (best_lengths, best_value) = search.best.ok_or_else(|| {
        Error::InstanceTooLarge(format!("no prefix code of {n} words fits in length {max_len}"))
    })?;
    let mut lengths = vec![0u32; n];
    for (rank, &symbol) in order.iter().enumerate() {
        lengths[symbol] = best_lengths[rank];
    }
    Ok((LengthVector::from_integers(&lengths), best_value))
}

struct Search<'a> {
    weights: &'a [f64],
    d: u128,
    max_len: u32,
    budget: u128,
    current: Vec<u32>,
    best: Option<(Vec<u32>, f64)>,
}

impl Search<'_> {
    /// `used` is `Σ D^{max_len - l_i}` over the lengths chosen so far.
    fn extend(&mut self, min_len: u32, used: u128) {
        if self.current.len() == self.weights.len() {
            let value: f64 = self
                .weights
                .iter()
                .zip(&self.current)
                .map(|(w, &l)| w * l as f64)
                .sum();
            if self.best.as_ref().is_none_or(|(_, b)| value < *b) {
                self.best = Some((self.current.clone(), value));
            }
            return;
        }
        let remaining = (self.weights.len() - self.current.len()) as u128;
        for len in min_len..=self.max_len {
            let cost = self.d.pow(self.max_len - len);
            // Every later word costs at least 1 (length max_len).
            if used + cost + (remaining - 1) > self.budget {
                continue;
            }
            self.current.push(len);
            self.extend(len, used + cost);
            self.current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengths::escort_mean_length;
    use crate::prob::make_distribution;

    const TABLE: [f64; 7] = [0.48, 0.3, 0.1, 0.05, 0.05, 0.01, 0.01];
    const B: LogBase = LogBase::BINARY;

    fn dist(v: &[f64]) -> Distribution {
        make_distribution(v, false, 1e-9).unwrap()
    }

    fn words(book: &Codebook) -> Vec<String> {
        (0..book.len()).map(|i| book.codeword_string(i)).collect()
    }

    #[test]
    fn kraft_examples() {
        let l = LengthVector::from_integers(&[1, 2, 2]);
        assert_eq!(kraft_sum(&l, B), 1.0);
        assert!(kraft_feasible(&l, B, 0.0));
        let l = LengthVector::from_integers(&[1, 1, 2]);
        assert_eq!(kraft_sum(&l, B), 1.25);
        assert!(!kraft_feasible(&l, B, 1e-9));
        let l = LengthVector::from_integers(&[1, 2, 3, 4, 5, 6, 6]);
        assert_eq!(kraft_sum(&l, B), 1.0);
    }

    #[test]
    fn huffman_examples() {
        let book = huffman(&dist(&[0.5, 0.25, 0.25]), B).unwrap();
        assert_eq!(book.lengths(), vec![1, 2, 2]);
        let book = huffman(&dist(&TABLE), B).unwrap();
        assert_eq!(book.lengths(), vec![1, 2, 3, 4, 5, 6, 6]);
        let book = huffman(&dist(&[1.0]), B).unwrap();
        assert_eq!(words(&book), vec!["0"]);
    }

    #[test]
    fn escort_huffman_reproduces_reference_codes() {
        let p = dist(&TABLE);
        let cases: [(f64, [&str; 7]); 3] = [
            (1.0, ["0", "10", "110", "1110", "11110", "111110", "111111"]),
            (0.7, ["0", "10", "1100", "1101", "1110", "11110", "11111"]),
            (0.4, ["00", "01", "100", "101", "110", "1110", "1111"]),
        ];
        for (q, expected) in cases {
            let book = escort_huffman(&p, q, B).unwrap();
            assert_eq!(words(&book), expected, "q = {q}");
        }
    }

    #[test]
    fn escort_huffman_at_one_is_huffman() {
        let p = dist(&[0.2, 0.1, 0.4, 0.3]);
        for d in [2, 3, 5] {
            let base = LogBase::new(d).unwrap();
            assert_eq!(escort_huffman(&p, 1.0, base).unwrap(), huffman(&p, base).unwrap());
        }
    }

    #[test]
    fn ternary_huffman_pads_with_dummies() {
        // 4 symbols, D = 3: one dummy so that (5 - 1) % 2 == 0.
        let p = dist(&[0.4, 0.3, 0.2, 0.1]);
        let base = LogBase::new(3).unwrap();
        let book = huffman(&p, base).unwrap();
        assert_eq!(book.lengths(), vec![1, 1, 2, 2]);
        assert_eq!(words(&book), vec!["0", "1", "20", "21"]);
    }

    #[test]
    fn zero_probability_symbols_get_longest_words() {
        let p = dist(&[0.0, 0.5, 0.5, 0.0]);
        let book = huffman(&p, B).unwrap();
        let l = book.lengths();
        assert!(l[0] >= l[1] && l[3] >= l[2]);
        assert!(l[0] > 1);
    }

    #[test]
    fn canonical_assignment() {
        let book = code_from_lengths(&LengthVector::from_integers(&[1, 2, 2]), B).unwrap();
        assert_eq!(words(&book), vec!["0", "10", "11"]);
        let book = code_from_lengths(&LengthVector::from_integers(&[2, 2, 2, 2]), B).unwrap();
        assert_eq!(words(&book), vec!["00", "01", "10", "11"]);
        let book = code_from_lengths(&LengthVector::from_integers(&[6, 5, 4, 3, 2, 1, 6]), B).unwrap();
        assert_eq!(book.lengths(), vec![6, 5, 4, 3, 2, 1, 6]);
        // pairwise prefix check, independent of the sorted-neighbour test
        let w = book.codewords();
        for i in 0..w.len() {
            for j in 0..w.len() {
                if i != j {
                    assert!(!w[j].starts_with(&w[i]));
                }
            }
        }
    }

    #[test]
    fn canonical_assignment_errors() {
        assert!(matches!(
            code_from_lengths(&LengthVector::from_integers(&[1, 1, 2]), B),
            Err(Error::KraftViolation { sum }) if sum == 1.25
        ));
        let l = LengthVector::new(vec![1.0, 1.5]).unwrap();
        assert!(matches!(
            code_from_lengths(&l, B),
            Err(Error::NonIntegerLength { index: 1, .. })
        ));
    }

    #[test]
    fn codebook_validation() {
        assert!(matches!(
            Codebook::new(B, vec![vec![0], vec![0, 1]], None),
            Err(Error::NonPrefixCodebook { prefix: 0, other: 1 })
        ));
        assert!(matches!(
            Codebook::new(B, vec![vec![1], vec![1]], None),
            Err(Error::NonPrefixCodebook { .. })
        ));
        assert!(matches!(
            Codebook::new(B, vec![vec![], vec![1]], None),
            Err(Error::EmptyCodeword { index: 0 })
        ));
        assert!(matches!(
            Codebook::new(B, vec![vec![2]], None),
            Err(Error::InvalidDigit { digit: 2, .. })
        ));
        assert!(Codebook::new(B, vec![], None).unwrap().is_empty());
    }

    #[test]
    fn codebook_text_format() {
        let book = escort_huffman(&dist(&TABLE), 0.7, B).unwrap();
        let text = book.to_tsv();
        assert!(text.starts_with("#D=2\n0\t0\n1\t10\n2\t1100\n"));
        assert_eq!(Codebook::parse_tsv(&text).unwrap(), book);

        let base = LogBase::new(12).unwrap();
        let book = Codebook::new(
            base,
            vec![vec![11], vec![10, 3]],
            Some(vec!["x".into(), "y".into()]),
        )
        .unwrap();
        assert_eq!(book.to_tsv(), "#D=12\nx\tb\ny\ta3\n");
        assert_eq!(Codebook::parse_tsv(&book.to_tsv()).unwrap(), book);

        assert!(matches!(
            Codebook::parse_tsv("a\t0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Codebook::parse_tsv("#D=2\na\t02\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Codebook::parse_tsv("#D=2\na\t0\nb\t01\n"),
            Err(Error::NonPrefixCodebook { .. })
        ));
    }

    #[test]
    fn exhaustive_examples() {
        let (l, m) = exhaustive_optimal(&dist(&[0.5, 0.25, 0.25]), 1.0, B, 8).unwrap();
        assert_eq!(l.as_slice(), &[1.0, 2.0, 2.0]);
        assert_eq!(m, 1.5);
        for q in [0.3, 1.0, 4.0] {
            let (l, _) = exhaustive_optimal(&dist(&[0.9, 0.1]), q, B, 8).unwrap();
            assert_eq!(l.as_slice(), &[1.0, 1.0]);
        }
    }

    #[test]
    fn exhaustive_agrees_with_escort_huffman_on_reference() {
        let p = dist(&TABLE);
        for q in [0.4, 0.7, 1.0] {
            let book = escort_huffman(&p, q, B).unwrap();
            let m = escort_mean_length(&p, &book.length_vector(), q).unwrap();
            let (_, best) = exhaustive_optimal(&p, q, B, 8).unwrap();
            assert!((m - best).abs() < 1e-12, "q={q}: {m} vs {best}");
        }
    }

    #[test]
    fn exhaustive_guards() {
        let p = Distribution::uniform(9).unwrap();
        assert!(matches!(
            exhaustive_optimal(&p, 1.0, B, 8),
            Err(Error::InstanceTooLarge(_))
        ));
        let p = Distribution::uniform(3).unwrap();
        assert!(matches!(
            exhaustive_optimal(&p, 1.0, B, 13),
            Err(Error::InstanceTooLarge(_))
        ));
        // 5 words cannot fit in binary length 2
        let p = Distribution::uniform(5).unwrap();
        assert!(exhaustive_optimal(&p, 1.0, B, 2).is_err());
    }
}

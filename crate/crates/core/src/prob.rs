//! Finite probability distributions and the escort transform.
//!
//! The escort of order `q` reweights a distribution `p` as
//! `P_i = p_i^q / Σ_j p_j^q`. For `q > 1` the dominant symbols are
//! amplified, for `q < 1` the distribution is flattened, and `q = 1` is the
//! identity. The transform with order `1/q` maps the escort back to `p`.
//!
//! Entropy order and escort index are historically distinct parameters; this
//! crate uses a single `q` for both, as every bound it checks ties them
//! together.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, log_sum_exp};

/// Default tolerance on `|Σ p_i − 1|` when constructing without normalization.
pub const CONSTRUCTION_TOLERANCE: f64 = 1e-9;

/// Default tolerance for comparing two probability vectors.
pub const COMPARISON_TOLERANCE: f64 = 1e-12;

/// A probability vector over symbols `0..N`, with optional symbol labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Distribution {
    /// Builds a distribution from raw values.
    ///
    /// With `normalize` set the values are divided by their sum; otherwise the
    /// sum must already be within `tolerance` of one and the values are kept
    /// as given.
    pub fn new(values: Vec<f64>, normalize: bool, tolerance: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for (index, &value) in values.iter().enumerate() {
            if value.is_nan() || value.is_infinite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let sum = compensated_sum(values.iter().copied());
        if sum <= 0.0 {
            return Err(Error::NotNormalized { sum });
        }
        let probs = if normalize {
            values.into_iter().map(|v| v / sum).collect()
        } else {
            if (sum - 1.0).abs() > tolerance {
                return Err(Error::NotNormalized { sum });
            }
            values
        };
        Ok(Distribution { probs, labels: None })
    }

    /// Uniform distribution over `n` symbols.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDistribution);
        }
        Self::new(vec![1.0 / n as f64; n], true, CONSTRUCTION_TOLERANCE)
    }

    /// Attaches symbol labels. Labels must be unique and free of tabs and newlines.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.probs.len() {
            return Err(Error::CardinalityMismatch {
                expected: self.probs.len(),
                found: labels.len(),
            });
        }
        validate_labels(&labels)?;
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of symbol `i`, falling back to its 0-based index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => i.to_string(),
        }
    }

    /// Labels for every symbol, with index names where none were given.
    pub fn label_list(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    /// Number of symbols with non-zero probability.
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn has_full_support(&self) -> bool {
        self.support_size() == self.len()
    }

    /// Index of the most probable symbol; the smallest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    /// Whether the maximum probability is attained by exactly one symbol.
    pub fn has_unique_max(&self) -> bool {
        let k = self.argmax();
        let max = self.probs[k];
        self.probs.iter().filter(|&&p| p == max).count() == 1
    }

    /// Natural-log escort weights `ln P_i` (`-inf` off the support).
    pub(crate) fn escort_log_weights(&self, q: f64) -> Result<Vec<f64>> {
        check_order(q)?;
        let support = self.support_size() as f64;
        let raw: Vec<f64> = self
            .probs
            .iter()
            .map(|&p| {
                if p == 0.0 {
                    f64::NEG_INFINITY
                } else if q == 0.0 {
                    0.0
                } else {
                    q * p.ln()
                }
            })
            .collect();
        let norm = if q == 0.0 { support.ln() } else { log_sum_exp(&raw) };
        Ok(raw.into_iter().map(|w| w - norm).collect())
    }

    /// Escort distribution of order `q` (see [`escort`]).
    pub fn escort(&self, q: f64) -> Result<Distribution> {
        escort(self, q)
    }

    /// Element-wise comparison within `tolerance`.
    pub fn approx_eq(&self, other: &Distribution, tolerance: f64) -> bool {
        self.len() == other.len()
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(a, b)| (a - b).abs() <= tolerance)
    }

    /// Writes the distribution as `label<TAB>probability` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.probs.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", self.label(i), p);
        }
        out
    }
}

pub(crate) fn check_order(q: f64) -> Result<()> {
    if q.is_finite() && q >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(q))
    }
}

fn validate_labels(labels: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for (i, label) in labels.iter().enumerate() {
        if label.is_empty() || label.contains(['\t', '\n', '\r']) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("invalid symbol label {label:?}"),
            });
        }
        if !seen.insert(label.as_str()) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate symbol label {label:?}"),
            });
        }
    }
    Ok(())
}

/// Validates raw values and wraps them in a [`Distribution`].
pub fn make_distribution(values: &[f64], normalize: bool, tolerance: f64) -> Result<Distribution> {
    Distribution::new(values.to_vec(), normalize, tolerance)
}

/// Escort distribution `P_i = p_i^q / Σ_j p_j^q`.
///
/// Zero-probability symbols stay at zero for every `q`. At `q = 0` the
/// convention `0^0 = 0` makes the escort uniform over the support of `p`.
/// Powers are evaluated in the log domain so that large `q` does not
/// underflow, and the result is renormalized as the last step.
pub fn escort(p: &Distribution, q: f64) -> Result<Distribution> {
    check_order(q)?;
    if q == 1.0 {
        return Ok(p.clone());
    }
    let log_weights = p.escort_log_weights(q)?;
    let raw: Vec<f64> = log_weights.iter().map(|w| w.exp()).collect();
    let sum = compensated_sum(raw.iter().copied());
    let probs = raw.into_iter().map(|w| w / sum).collect();
    Ok(Distribution {
        probs,
        labels: p.labels.clone(),
    })
}

/// Parses the distribution text format.
///
/// One record per line: `label<TAB>probability` or a bare probability.
/// Blank lines and lines starting with `#` are skipped. Unlabelled records
/// are named by their 0-based index.
pub fn parse_distribution(text: &str, normalize: bool, tolerance: f64) -> Result<Distribution> {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut any_label = false;
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, value) = match line.split_once('\t') {
            Some((label, value)) => {
                any_label = true;
                (Some(label.trim().to_string()), value.trim())
            }
            None => (None, line.trim()),
        };
        let value: f64 = value.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("cannot parse probability {value:?}"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite probability {value}"),
            });
        }
        if value < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("negative probability {value}"),
            });
        }
        labels.push(label.unwrap_or_else(|| values.len().to_string()));
        values.push(value);
        lines.push(line_no);
    }
    let dist = Distribution::new(values, normalize, tolerance)?;
    if !any_label {
        return Ok(dist);
    }
    dist.with_labels(labels).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line: lines[line - 1],
            message,
        },
        other => other,
    })
}

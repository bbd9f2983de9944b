//! Codeword-length measures, bound-achieving ideal lengths, and the
//! bound-verification engine.
//!
//! Four measures of the "average" length of a code with lengths `l_i` under
//! a source `p` are provided:
//!
//! | Measure | Definition |
//! |---------|------------|
//! | [`expected_length`] | `L̄ = Σ p_i l_i` |
//! | [`campbell_length`] | `C_β = (1/β) log_D Σ p_i D^{β l_i}` |
//! | [`escort_mean_length`] | `M_q = Σ P_i l_i`, `P` the escort of order `q` |
//! | [`new_length_measure`] | `L_q = (1/(q-1)) log_D Σ P_i D^{(q-1) l_i}` |
//!
//! For lengths satisfying the Kraft-McMillan inequality each measure is
//! bounded below by an entropy: `L̄ ≥ H_1(p)`, `C_β ≥ H_{1/(1+β)}(p)`,
//! `M_q ≥ H_1(P)` and `L_q ≥ H_q(p)`. [`verify_bounds`] evaluates all of
//! them on a given instance.
//!
//! Lengths are real-valued here. Integrality only matters for realizable
//! codes, which live in [`crate::coder`].

use std::fmt;

use crate::coder::kraft_sum;
use crate::entropy::{q_exp, renyi_nats, shannon_nats, tsallis_entropy_normalized, EntropyOrder, LogBase};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, log_sum_exp};
use crate::prob::{check_order, escort, Distribution};

/// Default slack tolerance for bound checks.
pub const SLACK_TOLERANCE: f64 = 1e-9;

/// Per-symbol codeword lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthVector(Vec<f64>);

impl LengthVector {
    /// Lengths must be finite and non-negative. Zero only arises as the ideal
    /// length of a certain symbol.
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        for (index, &value) in lengths.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidLength { index, value });
            }
        }
        Ok(LengthVector(lengths))
    }

    pub fn from_integers(lengths: &[u32]) -> Self {
        LengthVector(lengths.iter().map(|&l| l as f64).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|l| l.fract() == 0.0)
    }

    /// Integer lengths, failing on the first non-integer entry.
    pub fn to_integers(&self) -> Result<Vec<u32>> {
        self.0
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                if value.fract() != 0.0 || value > u32::MAX as f64 {
                    Err(Error::NonIntegerLength { index, value })
                } else {
                    Ok(value as u32)
                }
            })
            .collect()
    }

    /// Sorted copy, for comparing length multisets.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

fn check_cardinality(p: &Distribution, l: &LengthVector) -> Result<()> {
    if p.len() == l.len() {
        Ok(())
    } else {
        Err(Error::CardinalityMismatch {
            expected: p.len(),
            found: l.len(),
        })
    }
}

/// `Σ p_i l_i`.
pub fn expected_length(p: &Distribution, l: &LengthVector) -> Result<f64> {
    check_cardinality(p, l)?;
    Ok(compensated_sum(
        p.probs().iter().zip(l.as_slice()).map(|(p, l)| p * l),
    ))
}

/// Campbell's exponential mean `(1/β) log_D Σ p_i D^{β l_i}`, `β > 0`.
pub fn campbell_length(p: &Distribution, l: &LengthVector, beta: f64, base: LogBase) -> Result<f64> {
    check_cardinality(p, l)?;
    if beta.is_nan() || beta <= 0.0 || beta.is_infinite() {
        return Err(Error::InvalidOrder(beta));
    }
    let ln_d = base.ln();
    let terms: Vec<f64> = p
        .probs()
        .iter()
        .zip(l.as_slice())
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &l)| p.ln() + beta * l * ln_d)
        .collect();
    Ok(log_sum_exp(&terms) / (beta * ln_d))
}

/// Escort-weighted mean `Σ P_i l_i` with `P = escort(p, q)`.
pub fn escort_mean_length(p: &Distribution, l: &LengthVector, q: f64) -> Result<f64> {
    check_cardinality(p, l)?;
    let weights = escort(p, q)?;
    expected_length(&weights, l)
}

/// `L_q = (1/(q-1)) log_D Σ P_i D^{(q-1) l_i}` with escort weights `P`.
///
/// At `q = 1` this is [`expected_length`]. At `q = 0` it reduces to
/// `log_D |support| − log_D Σ_{support} D^{-l_i}`.
pub fn new_length_measure(p: &Distribution, l: &LengthVector, q: f64, base: LogBase) -> Result<f64> {
    check_cardinality(p, l)?;
    check_order(q)?;
    if q == 1.0 {
        return expected_length(p, l);
    }
    let log_weights = p.escort_log_weights(q)?;
    let ln_d = base.ln();
    let k = (q - 1.0) * ln_d;
    if (k * l.max()).abs() < 1.0 {
        // Small exponents: Σ P_i expm1(k l_i) keeps precision as q → 1.
        let excess = compensated_sum(
            log_weights
                .iter()
                .zip(l.as_slice())
                .filter(|(w, _)| w.is_finite())
                .map(|(w, &l)| w.exp() * (k * l).exp_m1()),
        );
        return Ok(excess.ln_1p() / k);
    }
    let terms: Vec<f64> = log_weights
        .iter()
        .zip(l.as_slice())
        .filter(|(w, _)| w.is_finite())
        .map(|(w, &l)| w + k * l)
        .collect();
    Ok(log_sum_exp(&terms) / k)
}

/// Shannon bit-numbers `-log_D p_i`, optionally rounded up to integers.
pub fn ideal_lengths_shannon(
    p: &Distribution,
    base: LogBase,
    integer_rounding: bool,
) -> Result<LengthVector> {
    bit_numbers(p, base, integer_rounding)
}

/// Lengths `-log_D P_i` with `P = escort(p, q)`, which attain `C_β = H_q(p)`
/// for `q = 1/(1+β)` and `M_q = H_1(P)`. Equivalently
/// `l_i = -q log_D p_i + (1-q) H_q(p)`.
pub fn ideal_lengths_campbell(
    p: &Distribution,
    q: f64,
    base: LogBase,
    integer_rounding: bool,
) -> Result<LengthVector> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidOrder(q));
    }
    if let Some(index) = p.probs().iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroProbability { index });
    }
    bit_numbers(&escort(p, q)?, base, integer_rounding)
}

fn bit_numbers(p: &Distribution, base: LogBase, integer_rounding: bool) -> Result<LengthVector> {
    let mut out = Vec::with_capacity(p.len());
    for (index, &x) in p.probs().iter().enumerate() {
        if x == 0.0 {
            return Err(Error::ZeroProbability { index });
        }
        let l = (-base.log(x)).max(0.0);
        out.push(if integer_rounding {
            // Snap values within rounding noise of an integer before taking
            // the ceiling, so dyadic inputs stay exact.
            let r = l.round();
            if (l - r).abs() < 1e-12 {
                r.max(1.0)
            } else {
                l.ceil().max(1.0)
            }
        } else {
            l
        });
    }
    LengthVector::new(out)
}

/// Outcome of checking one inequality `measure ≥ bound`.
///
/// For a report that does not apply to the given order (`applicable` false)
/// both values are NaN and `satisfied` is vacuously true.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub measure_name: String,
    pub measure_value: f64,
    pub bound_name: String,
    pub bound_value: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub equality_within_tolerance: bool,
    pub applicable: bool,
}

impl BoundReport {
    fn new(
        measure_name: &str,
        measure_value: f64,
        bound_name: &str,
        bound_value: f64,
        tolerance: f64,
    ) -> Self {
        let slack = measure_value - bound_value;
        BoundReport {
            measure_name: measure_name.to_string(),
            measure_value,
            bound_name: bound_name.to_string(),
            bound_value,
            slack,
            satisfied: slack >= -tolerance,
            equality_within_tolerance: slack.abs() <= tolerance,
            applicable: true,
        }
    }

    fn not_applicable(measure_name: &str, bound_name: &str) -> Self {
        BoundReport {
            measure_name: measure_name.to_string(),
            measure_value: f64::NAN,
            bound_name: bound_name.to_string(),
            bound_value: f64::NAN,
            slack: f64::NAN,
            satisfied: true,
            equality_within_tolerance: false,
            applicable: false,
        }
    }

    /// Short identifier such as `"L_q >= H_q(p)"`.
    pub fn inequality(&self) -> String {
        format!("{} >= {}", self.measure_name, self.bound_name)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.applicable {
            return write!(f, "{}: not applicable", self.inequality());
        }
        write!(
            f,
            "{}: {} >= {} (slack {}){}",
            self.inequality(),
            self.measure_value,
            self.bound_value,
            self.slack,
            if self.satisfied { "" } else { " VIOLATED" }
        )
    }
}

pub const SHANNON: &str = "Lbar >= H_1(p)";
pub const CAMPBELL: &str = "C_beta >= H_q(p)";
pub const ESCORT_MEAN: &str = "M_q >= H_1(P)";
pub const NEW_MEASURE: &str = "L_q >= H_q(p)";
pub const JENSEN: &str = "M_q >= L_q";
pub const TSALLIS: &str = "M_q >= S_q(p)";

/// Inequalities that are reported but do not count as violations.
pub const REPORTED_ONLY: [&str; 1] = [TSALLIS];

/// Names of every inequality emitted by [`verify_bounds`], in report order.
pub const INEQUALITIES: [&str; 6] = [SHANNON, CAMPBELL, ESCORT_MEAN, NEW_MEASURE, JENSEN, TSALLIS];

/// Evaluates every entropy lower bound on `(p, l)` at order `q`.
///
/// The lengths must satisfy the Kraft-McMillan inequality in base `D`, the
/// shared hypothesis of the bounds. Reports are returned in the order of
/// [`INEQUALITIES`]:
///
/// 1. `L̄ ≥ H_1(p)`.
/// 2. `C_β ≥ H_q(p)` with `β = (1-q)/q`; applicable for `0 < q < 1` only.
/// 3. `M_q ≥ H_1(P)` for the escort `P`.
/// 4. `L_q ≥ H_q(p)`.
/// 5. `M_q ≥ L_q`. This holds for `q ≤ 1`; for `q > 1` Jensen's inequality
///    runs the other way and the report is expected to fail on non-constant
///    lengths.
/// 6. `M_q ≥ S_q(p)` (nats), applicable only when `Σ exp_q(-l_i) ≤ 1`,
///    with `exp_q` cut off to zero outside its domain.
pub fn verify_bounds(
    p: &Distribution,
    l: &LengthVector,
    q: f64,
    base: LogBase,
    tolerance: f64,
) -> Result<Vec<BoundReport>> {
    check_cardinality(p, l)?;
    check_order(q)?;
    let kraft = kraft_sum(l, base);
    if kraft > 1.0 + tolerance {
        return Err(Error::KraftViolation { sum: kraft });
    }
    let ln_d = base.ln();
    let order = EntropyOrder::with_base(q, base)?;
    let h_q = crate::entropy::renyi_entropy(p, order);
    let escort_p = escort(p, q)?;

    let mean = expected_length(p, l)?;
    let m_q = expected_length(&escort_p, l)?;
    let l_q = new_length_measure(p, l, q, base)?;

    let mut reports = Vec::with_capacity(INEQUALITIES.len());
    reports.push(BoundReport::new(
        "Lbar",
        mean,
        "H_1(p)",
        shannon_nats(p) / ln_d,
        tolerance,
    ));

    if q > 0.0 && q < 1.0 {
        let beta = (1.0 - q) / q;
        let c = campbell_length(p, l, beta, base)?;
        reports.push(BoundReport::new("C_beta", c, "H_q(p)", h_q, tolerance));
    } else {
        reports.push(BoundReport::not_applicable("C_beta", "H_q(p)"));
    }

    reports.push(BoundReport::new(
        "M_q",
        m_q,
        "H_1(P)",
        shannon_nats(&escort_p) / ln_d,
        tolerance,
    ));
    reports.push(BoundReport::new("L_q", l_q, "H_q(p)", h_q, tolerance));
    reports.push(BoundReport::new("M_q", m_q, "L_q", l_q, tolerance));

    let q_kraft = compensated_sum(l.as_slice().iter().map(|&li| q_exp(-li, q).unwrap_or(0.0)));
    if q_kraft <= 1.0 + tolerance {
        let s_q = tsallis_entropy_normalized(p, q)?;
        reports.push(BoundReport::new("M_q", m_q, "S_q(p)", s_q, tolerance));
    } else {
        reports.push(BoundReport::not_applicable("M_q", "S_q(p)"));
    }
    Ok(reports)
}

/// Rényi entropy in nats; exposed for the limit formulas in tests and tools.
pub fn renyi_entropy_nats(p: &Distribution, q: f64) -> f64 {
    renyi_nats(p, q)
}

/// Large-`q` limit of [`new_length_measure`]:
/// `max_i (l_i + log_D p_i) − log_D p_k` with `k` the most probable symbol.
///
/// This equals `l_k` exactly when `p_k D^{l_k} ≥ p_i D^{l_i}` for all `i`,
/// e.g. for the bit-numbers `l_i = -log_D p_i`.
pub fn new_length_measure_limit(p: &Distribution, l: &LengthVector, base: LogBase) -> Result<f64> {
    check_cardinality(p, l)?;
    let k = p.argmax();
    let peak = p
        .probs()
        .iter()
        .zip(l.as_slice())
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &l)| l + base.log(p))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(peak - base.log(p.probs()[k]))
}

//! Shannon, Rényi and normalized Tsallis entropies, plus the q-deformed
//! logarithm and exponential.
//!
//! Everything is computed in nats internally and converted to base `D` at
//! the boundary, where `D` is the size of the code alphabet.

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, log_sum_exp};
use crate::prob::{check_order, Distribution};

/// Orders closer than this to one are evaluated as Shannon entropy.
pub const SHANNON_SWITCH: f64 = 1e-9;

/// Logarithm base, equal to the code alphabet size `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LogBase(u32);

impl LogBase {
    /// Largest supported alphabet; codewords are written with the digits `0-9a-z`.
    pub const MAX: u32 = 36;
    pub const BINARY: LogBase = LogBase(2);

    pub fn new(d: u32) -> Result<Self> {
        if (2..=Self::MAX).contains(&d) {
            Ok(LogBase(d))
        } else {
            Err(Error::InvalidBase(d))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn ln(self) -> f64 {
        (self.0 as f64).ln()
    }

    pub(crate) fn log(self, x: f64) -> f64 {
        x.ln() / self.ln()
    }
}

/// Entropy order together with the logarithm base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOrder {
    order: f64,
    base: LogBase,
}

impl EntropyOrder {
    pub fn new(order: f64, base: u32) -> Result<Self> {
        check_order(order)?;
        Ok(EntropyOrder {
            order,
            base: LogBase::new(base)?,
        })
    }

    pub fn with_base(order: f64, base: LogBase) -> Result<Self> {
        check_order(order)?;
        Ok(EntropyOrder { order, base })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn base(&self) -> LogBase {
        self.base
    }
}

pub(crate) fn shannon_nats(p: &Distribution) -> f64 {
    -compensated_sum(p.probs().iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()))
}

/// `-Σ p_i log_D p_i`, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &Distribution, base: LogBase) -> f64 {
    (shannon_nats(p) / base.ln()).max(0.0)
}

/// `ln Σ_{p_i > 0} p_i^α`.
///
/// Near `α = 1` the sum is rewritten as `1 + Σ p_i (p_i^{α-1} - 1)` and
/// evaluated with `expm1`/`ln_1p`, which keeps full relative precision as
/// the sum approaches one. Large orders go through log-sum-exp.
pub(crate) fn log_power_sum(p: &Distribution, alpha: f64) -> f64 {
    let support = p.probs().iter().copied().filter(|&x| x > 0.0);
    if alpha <= 2.0 {
        let excess = compensated_sum(support.map(|x| x * ((alpha - 1.0) * x.ln()).exp_m1()));
        excess.ln_1p()
    } else {
        let logs: Vec<f64> = support.map(|x| alpha * x.ln()).collect();
        log_sum_exp(&logs)
    }
}

pub(crate) fn renyi_nats(p: &Distribution, alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < SHANNON_SWITCH {
        return shannon_nats(p);
    }
    log_power_sum(p, alpha) / (1.0 - alpha)
}

/// Rényi entropy `(1/(1-α)) log_D Σ p_i^α`; Shannon entropy at `α = 1`.
///
/// The result is clamped to `[0, log_D |support|]` to absorb rounding.
pub fn renyi_entropy(p: &Distribution, ord: EntropyOrder) -> f64 {
    let max = (p.support_size() as f64).ln();
    renyi_nats(p, ord.order).clamp(0.0, max) / ord.base.ln()
}

/// Normalized Tsallis entropy, in nats:
/// `S_q(p) = (1/Σ p_i^q − 1) / (q − 1)`.
///
/// This is `-Σ_i P_i ln_q(p_i)` with `P` the escort of order `q`, so the
/// escort mean of the lengths `l_i = -ln_q(p_i)` equals `S_q(p)`. It
/// reduces to Shannon entropy in nats as `q → 1`.
pub fn tsallis_entropy_normalized(p: &Distribution, q: f64) -> Result<f64> {
    check_order(q)?;
    if (q - 1.0).abs() < SHANNON_SWITCH {
        return Ok(shannon_nats(p));
    }
    // 1/Z - 1 = expm1(-ln Z)
    let log_z = log_power_sum(p, q);
    Ok((-log_z).exp_m1() / (q - 1.0))
}

/// q-deformed logarithm `ln_q(x) = (x^{1-q} - 1) / (1 - q)`; `ln x` at `q = 1`.
pub fn q_log(x: f64, q: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || !q.is_finite() {
        return Err(Error::DomainError(x));
    }
    if q == 1.0 {
        return Ok(x.ln());
    }
    let k = 1.0 - q;
    Ok((k * x.ln()).exp_m1() / k)
}

/// q-deformed exponential `exp_q(x) = (1 + (1-q) x)^{1/(1-q)}`, the inverse of
/// [`q_log`]. Fails where `1 + (1-q) x ≤ 0`.
pub fn q_exp(x: f64, q: f64) -> Result<f64> {
    if !x.is_finite() || !q.is_finite() {
        return Err(Error::DomainError(x));
    }
    if q == 1.0 {
        return Ok(x.exp());
    }
    let k = 1.0 - q;
    let base = 1.0 + k * x;
    if base <= 0.0 {
        return Err(Error::DomainError(x));
    }
    Ok(((k * x).ln_1p() / k).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::make_distribution;

    fn dist(v: &[f64]) -> Distribution {
        make_distribution(v, false, 1e-9).unwrap()
    }

    fn order(a: f64) -> EntropyOrder {
        EntropyOrder::new(a, 2).unwrap()
    }

    #[test]
    fn base_and_order_validation() {
        assert_eq!(LogBase::new(1), Err(Error::InvalidBase(1)));
        assert_eq!(LogBase::new(37), Err(Error::InvalidBase(37)));
        assert!(EntropyOrder::new(-1.0, 2).is_err());
        assert!(EntropyOrder::new(0.0, 10).is_ok());
    }

    #[test]
    fn renyi_examples() {
        let u = dist(&[0.5, 0.5]);
        assert!((renyi_entropy(&u, order(2.0)) - 1.0).abs() < 1e-15);
        let sure = dist(&[1.0, 0.0]);
        for a in [0.0, 0.5, 1.0, 3.0] {
            for d in [2, 3, 10] {
                let h = renyi_entropy(&sure, EntropyOrder::new(a, d).unwrap());
                assert_eq!(h, 0.0);
            }
        }
        // -log2(0.68), 40-digit reference
        let h = renyi_entropy(&dist(&[0.8, 0.2]), order(2.0));
        assert!((h - 0.556_393_348_524_385_3).abs() < 1e-15);
    }

    #[test]
    fn shannon_examples() {
        let b = LogBase::BINARY;
        assert_eq!(shannon_entropy(&dist(&[0.5, 0.5]), b), 1.0);
        assert_eq!(shannon_entropy(&dist(&[1.0]), b), 0.0);
        assert_eq!(shannon_entropy(&dist(&[0.5, 0.25, 0.25]), b), 1.5);
    }

    #[test]
    fn renyi_of_reference_distribution() {
        let p = dist(&[0.48, 0.3, 0.1, 0.05, 0.05, 0.01, 0.01]);
        assert!((renyi_entropy(&p, order(0.7)) - 2.118_518_369_220_649_5).abs() < 1e-14);
        assert!((renyi_entropy(&p, order(0.4)) - 2.372_081_781_293_58).abs() < 1e-14);
        assert!((renyi_entropy(&p, order(1.0)) - 1.926_621_391_768_541_7).abs() < 1e-14);
    }

    #[test]
    fn renyi_large_order_approaches_min_entropy() {
        let p = dist(&[0.3, 0.2, 0.5]);
        let h = renyi_entropy(&p, order(1e4));
        let h_inf = -(0.5f64).log2();
        assert!((h - h_inf).abs() < 1e-3);
    }

    #[test]
    fn renyi_order_zero_is_log_support() {
        let p = dist(&[0.6, 0.0, 0.2, 0.2]);
        let h = renyi_entropy(&p, EntropyOrder::new(0.0, 3).unwrap());
        assert!((h - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tsallis_examples() {
        let p = dist(&[0.3, 0.7]);
        let s = tsallis_entropy_normalized(&p, 1.0).unwrap();
        assert!((s - shannon_nats(&p)).abs() < 1e-15);
        // uniform-2 at q = 2: Σp² = 1/2, (2 - 1)/(2 - 1) = 1
        let u = dist(&[0.5, 0.5]);
        assert!((tsallis_entropy_normalized(&u, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(tsallis_entropy_normalized(&dist(&[1.0]), 2.0).unwrap(), 0.0);
        assert!(tsallis_entropy_normalized(&u, -1.0).is_err());
    }

    #[test]
    fn tsallis_closed_form_matches_escort_mean_of_q_log_lengths() {
        // Candidate forms: (1/Z - 1)/(q - 1) and (1 - 1/Z)/(q - 1).
        // Only the first equals Σ P_i (-ln_q p_i).
        let p = dist(&[0.5, 0.5]);
        let q = 2.0;
        let z: f64 = p.probs().iter().map(|x| x.powf(q)).sum();
        let escort_mean: f64 = p
            .probs()
            .iter()
            .map(|&x| x.powf(q) / z * -q_log(x, q).unwrap())
            .sum();
        let first = (1.0 / z - 1.0) / (q - 1.0);
        let second = (1.0 - 1.0 / z) / (q - 1.0);
        assert!((escort_mean - first).abs() < 1e-15);
        assert!((escort_mean - second).abs() > 1.0);
        assert!((tsallis_entropy_normalized(&p, q).unwrap() - first).abs() < 1e-15);
    }

    #[test]
    fn tsallis_near_one_is_continuous() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        let h = shannon_nats(&p);
        for eps in [1e-8, 1e-7, 1e-5, -1e-6] {
            let s = tsallis_entropy_normalized(&p, 1.0 + eps).unwrap();
            assert!((s - h).abs() < 10.0 * eps.abs(), "{eps}: {s} vs {h}");
        }
    }

    #[test]
    fn q_log_and_exp() {
        assert_eq!(q_log(1.0, 0.3).unwrap(), 0.0);
        assert_eq!(q_log(1.0, 2.5).unwrap(), 0.0);
        assert_eq!(q_log(2.0, 1.0).unwrap(), 2f64.ln());
        let y = q_log(0.3, 0.5).unwrap();
        assert!((q_exp(y, 0.5).unwrap() - 0.3).abs() < 1e-12);
        assert!(q_log(0.0, 0.5).is_err());
        // 1 + (1 - 0.5)(-3) < 0
        assert_eq!(q_exp(-3.0, 0.5), Err(Error::DomainError(-3.0)));
        assert!((q_exp(0.7, 1.0).unwrap() - 0.7f64.exp()).abs() < 1e-15);
    }
}

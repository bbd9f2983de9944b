//! Randomized checks of the entropy bounds.
//!
//! Each trial draws a random distribution and random Kraft-feasible integer
//! lengths from an RNG seeded by `(seed, trial index)` alone, so the summary
//! does not depend on the order in which trials run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};

use crate::coder::kraft_sum;
use crate::entropy::LogBase;
use crate::error::Result;
use crate::lengths::{verify_bounds, LengthVector, INEQUALITIES, REPORTED_ONLY, SLACK_TOLERANCE};
use crate::prob::Distribution;

/// Orders checked by default.
pub const DEFAULT_Q_GRID: [f64; 8] = [0.0, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 5.0];

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    pub min_symbols: usize,
    pub max_symbols: usize,
    pub q_grid: Vec<f64>,
    pub base: LogBase,
    pub tolerance: f64,
    /// Use uniform distributions with equal-length codes instead of random draws.
    pub uniform: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 10_000,
            seed: 42,
            min_symbols: 2,
            max_symbols: 12,
            q_grid: DEFAULT_Q_GRID.to_vec(),
            base: LogBase::BINARY,
            tolerance: SLACK_TOLERANCE,
            uniform: false,
        }
    }
}

/// Per-inequality counts over a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct Tally {
    pub inequality: &'static str,
    pub checked: u64,
    pub not_applicable: u64,
    pub equalities: u64,
    pub violations: u64,
    /// Smallest slack seen (most negative is worst).
    pub worst_slack: f64,
    /// Violation counts per entry of the q grid.
    pub violations_by_q: Vec<u64>,
}

impl Tally {
    fn new(inequality: &'static str, grid: usize) -> Self {
        Tally {
            inequality,
            checked: 0,
            not_applicable: 0,
            equalities: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
            violations_by_q: vec![0; grid],
        }
    }

    pub fn passed(&self) -> u64 {
        self.checked - self.violations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub trials: u64,
    pub q_grid: Vec<f64>,
    pub tallies: Vec<Tally>,
}

impl SuiteSummary {
    /// Violations of the asserted inequalities; see [`REPORTED_ONLY`].
    pub fn total_violations(&self) -> u64 {
        self.tallies
            .iter()
            .filter(|t| !REPORTED_ONLY.contains(&t.inequality))
            .map(|t| t.violations)
            .sum()
    }

    pub fn tally(&self, inequality: &str) -> Option<&Tally> {
        self.tallies.iter().find(|t| t.inequality == inequality)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// RNG for one trial, derived from the suite seed and the trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(trial)))
}

/// Random full-support distribution over `n` symbols.
///
/// Weights are `E^s` with `E ~ Exp(1)` and a random skew `s ∈ [0.25, 4]`,
/// which spans near-uniform to very peaked sources.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    let skew = rng.random_range(0.25..=4.0);
    let weights: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            e.powf(skew).max(1e-300)
        })
        .collect();
    Distribution::new(weights, true, 0.0).expect("positive finite weights")
}

/// Random integer lengths satisfying `Σ D^{-l_i} ≤ 1`.
///
/// Lengths start uniform in `1..=⌈log_D n⌉ + 4`; random entries are then
/// lengthened until the Kraft-McMillan inequality holds. Both complete and
/// incomplete codes occur.
pub fn random_kraft_lengths<R: Rng + ?Sized>(rng: &mut R, n: usize, base: LogBase) -> LengthVector {
    let d = base.get() as usize;
    let mut depth = 0u32;
    while d.pow(depth) < n {
        depth += 1;
    }
    let max_len = depth + 4;
    let mut lengths: Vec<u32> = (0..n).map(|_| rng.random_range(1..=max_len)).collect();
    while kraft_sum(&LengthVector::from_integers(&lengths), base) > 1.0 {
        let i = rng.random_range(0..n);
        lengths[i] += 1;
    }
    LengthVector::from_integers(&lengths)
}

/// Uniform source with equal lengths `⌈log_D n⌉`.
fn uniform_instance(n: usize, base: LogBase) -> (Distribution, LengthVector) {
    let d = base.get() as usize;
    let mut depth = 1u32;
    while d.pow(depth) < n {
        depth += 1;
    }
    (
        Distribution::uniform(n).expect("n >= 1"),
        LengthVector::from_integers(&vec![depth; n]),
    )
}

/// Draws the instance used by trial `trial`.
pub fn draw_instance(config: &SuiteConfig, trial: u64) -> (Distribution, LengthVector) {
    let mut rng = trial_rng(config.seed, trial);
    let n = rng.random_range(config.min_symbols.max(1)..=config.max_symbols.max(config.min_symbols.max(1)));
    if config.uniform {
        return uniform_instance(n, config.base);
    }
    let p = random_distribution(&mut rng, n);
    let l = random_kraft_lengths(&mut rng, n, config.base);
    (p, l)
}

/// Runs [`verify_bounds`] on every trial and every order in the grid.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteSummary> {
    let grid = config.q_grid.len();
    let mut tallies: Vec<Tally> = INEQUALITIES.iter().map(|&name| Tally::new(name, grid)).collect();
    for trial in 0..config.trials {
        let (p, l) = draw_instance(config, trial);
        for (qi, &q) in config.q_grid.iter().enumerate() {
            let reports = verify_bounds(&p, &l, q, config.base, config.tolerance)?;
            for (tally, report) in tallies.iter_mut().zip(&reports) {
                if !report.applicable {
                    tally.not_applicable += 1;
                    continue;
                }
                tally.checked += 1;
                tally.worst_slack = tally.worst_slack.min(report.slack);
                if report.equality_within_tolerance {
                    tally.equalities += 1;
                }
                if !report.satisfied {
                    tally.violations += 1;
                    tally.violations_by_q[qi] += 1;
                }
            }
        }
    }
    Ok(SuiteSummary {
        trials: config.trials,
        q_grid: config.q_grid.clone(),
        tallies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengths::{CAMPBELL, ESCORT_MEAN, JENSEN, NEW_MEASURE, SHANNON, TSALLIS};

    #[test]
    fn instances_are_deterministic_and_kraft_feasible() {
        let config = SuiteConfig::default();
        for trial in 0..200 {
            let (p, l) = draw_instance(&config, trial);
            let (p2, l2) = draw_instance(&config, trial);
            assert_eq!(p, p2);
            assert_eq!(l, l2);
            assert!((2..=12).contains(&p.len()));
            assert!(kraft_sum(&l, config.base) <= 1.0);
            assert!(p.has_full_support());
        }
    }

    #[test]
    fn uniform_two_symbol_trial_is_all_equalities() {
        let config = SuiteConfig {
            trials: 1,
            min_symbols: 2,
            max_symbols: 2,
            uniform: true,
            ..SuiteConfig::default()
        };
        let summary = run_suite(&config).unwrap();
        assert_eq!(summary.total_violations(), 0);
        // The q-deformed bound is in nats and not tight for binary lengths.
        for t in summary.tallies.iter().filter(|t| t.inequality != TSALLIS) {
            assert_eq!(t.equalities, t.checked, "{}", t.inequality);
        }
    }

    #[test]
    fn small_suite_satisfies_theorems_below_order_one() {
        let config = SuiteConfig {
            trials: 300,
            q_grid: vec![0.0, 0.3, 0.5, 0.7, 1.0],
            ..SuiteConfig::default()
        };
        let summary = run_suite(&config).unwrap();
        assert_eq!(summary.total_violations(), 0);
        for name in [SHANNON, CAMPBELL, ESCORT_MEAN, NEW_MEASURE, JENSEN] {
            assert!(summary.tally(name).unwrap().checked > 0, "{name}");
        }
    }

    #[test]
    fn reported_only_bounds_are_not_counted() {
        let mut tallies: Vec<Tally> = INEQUALITIES.iter().map(|&name| Tally::new(name, 1)).collect();
        for t in &mut tallies {
            if t.inequality == TSALLIS {
                t.violations = 3;
            }
        }
        let mut summary = SuiteSummary {
            trials: 1,
            q_grid: vec![1.0],
            tallies,
        };
        assert_eq!(summary.total_violations(), 0);
        summary.tallies[0].violations = 2;
        assert_eq!(summary.total_violations(), 2);
    }

    #[test]
    fn ternary_instances_are_kraft_feasible() {
        let config = SuiteConfig {
            base: LogBase::new(3).unwrap(),
            ..SuiteConfig::default()
        };
        for trial in 0..100 {
            let (_, l) = draw_instance(&config, trial);
            assert!(kraft_sum(&l, config.base) <= 1.0 + 1e-12);
        }
    }
}

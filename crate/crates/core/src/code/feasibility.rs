use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use super::{achieved_rates, AchievedRate, CodeError, Executor, NetworkCode};
use crate::graph::{NetworkInstance, RateVector};
use crate::rational::{message_size_for_rate, Rational};

/// Default bound on the number of message tuples in exhaustive mode.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 20;

const MAX_LISTED_FAILURES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive { limit: u64 },
    Sampled { trials: u64, seed: u64 },
}

impl CheckMode {
    pub fn exhaustive() -> Self {
        CheckMode::Exhaustive {
            limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityTarget {
    /// When present, the code's message sizes must equal `floor(2^(R_i N n))`.
    pub rates: Option<RateVector>,
    pub epsilon: Rational,
}

impl FeasibilityTarget {
    pub fn zero_error() -> Self {
        FeasibilityTarget {
            rates: None,
            epsilon: Rational::zero(),
        }
    }

    pub fn with_epsilon(epsilon: Rational) -> Self {
        FeasibilityTarget {
            rates: None,
            epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub mode: String,
    pub epsilon: Rational,
    pub rates: Option<Vec<Rational>>,
    pub achieved_rates: Vec<AchievedRate>,
    pub inner_blocklength: u64,
    pub outer_blocklength: usize,
    pub message_sizes: Vec<u64>,
    pub trials: u64,
    pub failures: u64,
    /// Exact in exhaustive mode; the sample frequency in sampled mode.
    pub measured_error: Rational,
    /// Clopper–Pearson 95% interval (sampled mode), rounded outward to 1e-6.
    pub confidence_interval: Option<[Rational; 2]>,
    pub seed: Option<u64>,
    pub failing_tuples: Vec<Vec<u64>>,
    pub failing_tuples_truncated: bool,
    pub pass: bool,
    pub note: Option<String>,
}

/// Row-major enumeration of message tuples: the first source varies slowest.
#[derive(Debug, Clone)]
pub struct MessageTuples {
    sizes: Vec<u64>,
    total: u64,
}

impl MessageTuples {
    pub fn new(sizes: &[u64], limit: u64) -> Result<Self, CodeError> {
        let total: BigUint = sizes.iter().map(|&s| BigUint::from(s)).product();
        if total > BigUint::from(limit) {
            return Err(CodeError::EnumerationTooLarge {
                size: total.to_string(),
                limit,
            });
        }
        Ok(MessageTuples {
            sizes: sizes.to_vec(),
            total: sizes.iter().product(),
        })
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn tuple(&self, mut index: u64) -> Vec<u64> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &size) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = index % size;
            index /= size;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.total).map(|i| self.tuple(i))
    }
}

fn evaluate(exec: &Executor<'_>, tuples: &[Vec<u64>]) -> Result<Vec<bool>, CodeError> {
    let results: Vec<Result<bool, CodeError>> = tuples
        .par_iter()
        .map(|w| {
            let out = exec.outputs(w)?;
            Ok(!exec.failures(w, &out).is_empty())
        })
        .collect();
    results.into_iter().collect()
}

/// Every failing message tuple, in enumeration order.
pub fn exhaustive_failing_set(
    code: &dyn NetworkCode,
    inst: &NetworkInstance,
    limit: u64,
) -> Result<(u64, Vec<Vec<u64>>), CodeError> {
    let exec = Executor::new(code, inst)?;
    let space = MessageTuples::new(code.message_sizes(), limit)?;
    let tuples: Vec<Vec<u64>> = space.iter().collect();
    let failed = evaluate(&exec, &tuples)?;
    let failing = tuples
        .into_iter()
        .zip(failed)
        .filter_map(|(w, f)| f.then_some(w))
        .collect();
    Ok((space.len(), failing))
}

fn clopper_pearson(failures: u64, trials: u64) -> [Rational; 2] {
    let alpha = 0.05;
    let (x, n) = (failures as f64, trials as f64);
    let lower = if failures == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0)
            .map(|b| b.inverse_cdf(alpha / 2.0))
            .unwrap_or(0.0)
    };
    let upper = if failures == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x)
            .map(|b| b.inverse_cdf(1.0 - alpha / 2.0))
            .unwrap_or(1.0)
    };
    [
        Rational::from_f64_rounded(lower.max(0.0), 6, false),
        Rational::from_f64_rounded(upper.min(1.0), 6, true),
    ]
}

/// Measures the error probability of `code` on `inst` over uniform messages and
/// compares it with the target `epsilon`.
///
/// Exhaustive mode is exact. Sampled mode reports the empirical frequency and a
/// confidence interval; it never certifies a zero-error claim.
pub fn check_feasibility(
    code: &dyn NetworkCode,
    inst: &NetworkInstance,
    target: &FeasibilityTarget,
    mode: CheckMode,
) -> Result<FeasibilityReport, CodeError> {
    let exec = Executor::new(code, inst)?;
    let sizes = code.message_sizes();
    if let Some(rates) = &target.rates {
        let expected: Vec<BigUint> = rates
            .rates()
            .iter()
            .map(|r| {
                message_size_for_rate(r, code.inner_blocklength(), code.outer_blocklength() as u64)
            })
            .collect();
        let matches = expected.len() == sizes.len()
            && expected.iter().zip(sizes).all(|(e, &s)| *e == BigUint::from(s));
        if !matches {
            return Err(CodeError::RateMismatch {
                code: sizes.to_vec(),
                expected: expected.iter().map(|e| e.to_string()).collect(),
            });
        }
    }
    let (mode_name, tuples, seed) = match mode {
        CheckMode::Exhaustive { limit } => {
            let space = MessageTuples::new(sizes, limit)?;
            ("exhaustive", space.iter().collect::<Vec<_>>(), None)
        }
        CheckMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tuples = (0..trials)
                .map(|_| sizes.iter().map(|&s| rng.gen_range(0..s)).collect())
                .collect();
            ("sampled", tuples, Some(seed))
        }
    };
    let failed = evaluate(&exec, &tuples)?;
    let failing: Vec<Vec<u64>> = tuples
        .iter()
        .zip(&failed)
        .filter(|(_, &f)| f)
        .map(|(w, _)| w.clone())
        .collect();
    let trials = tuples.len() as u64;
    let failures = failing.len() as u64;
    let measured_error = if trials == 0 {
        Rational::zero()
    } else {
        crate::rational::ratio(failures, trials)
    };
    let mut pass = measured_error <= target.epsilon;
    let mut note = None;
    let mut confidence_interval = None;
    if seed.is_some() {
        confidence_interval = Some(clopper_pearson(failures, trials));
        if target.epsilon.is_zero() {
            pass = false;
            note = Some("zero-error claims require exhaustive mode".to_string());
        }
    }
    Ok(FeasibilityReport {
        mode: mode_name.to_string(),
        epsilon: target.epsilon.clone(),
        rates: target.rates.as_ref().map(|r| r.rates().to_vec()),
        achieved_rates: achieved_rates(code),
        inner_blocklength: code.inner_blocklength(),
        outer_blocklength: code.outer_blocklength(),
        message_sizes: sizes.to_vec(),
        trials,
        failures,
        measured_error,
        confidence_interval,
        seed,
        failing_tuples_truncated: failing.len() > MAX_LISTED_FAILURES,
        failing_tuples: failing.into_iter().take(MAX_LISTED_FAILURES).collect(),
        pass,
        note,
    })
}

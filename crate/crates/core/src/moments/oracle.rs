//! Moments `M_{k,m} = (1/k) E tr B^m` of the `k×k` hollow Gaussian
//! ensembles.
//!
//! Over ℝ and ℂ the expectation is evaluated exactly by enumerating every
//! closed index walk `(i_1, …, i_m) ∈ [k]^m` and scoring the cyclic product
//! `b_{i_1 i_2} ⋯ b_{i_m i_1}` with Wick's rule. Over ℍ the entries do not
//! commute and the value is estimated by sampling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::DivisionAlgebra;
use crate::ensembles::{sample_hollow, HollowParams};
use crate::error::{Error, Result};
use crate::spectra::eigensolve;

/// Largest number of index tuples the exact oracle will enumerate.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    WickExact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleValue {
    Exact(BigRational),
    Estimate { mean: f64, stderr: f64, trials: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub k: usize,
    pub m: u32,
    pub algebra: DivisionAlgebra,
    pub value: OracleValue,
    pub method: OracleMethod,
}

impl OracleResult {
    pub fn as_f64(&self) -> f64 {
        match &self.value {
            OracleValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            OracleValue::Estimate { mean, .. } => *mean,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match &self.value {
            OracleValue::Exact(r) => Some(r),
            OracleValue::Estimate { .. } => None,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self.value {
            OracleValue::Exact(_) => 0.0,
            OracleValue::Estimate { stderr, .. } => stderr,
        }
    }
}

/// Settings for the sampling estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloOptions {
    pub trials: usize,
    pub seed: u64,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
        }
    }
}

/// Exact value over ℝ/ℂ, sampling estimate over ℍ (default options).
pub fn hollow_moment_oracle(k: usize, m: u32, algebra: DivisionAlgebra) -> Result<OracleResult> {
    hollow_moment_oracle_with(k, m, algebra, &MonteCarloOptions::default())
}

pub fn hollow_moment_oracle_with(
    k: usize,
    m: u32,
    algebra: DivisionAlgebra,
    mc: &MonteCarloOptions,
) -> Result<OracleResult> {
    match algebra {
        DivisionAlgebra::Real | DivisionAlgebra::Complex => wick_moment(k, m, algebra),
        DivisionAlgebra::Quaternion => monte_carlo_moment(k, m, algebra, mc),
    }
}

/// Exact `M_{k,m}` by Wick enumeration.
pub fn wick_moment(k: usize, m: u32, algebra: DivisionAlgebra) -> Result<OracleResult> {
    if k == 0 {
        return Err(Error::param("hollow ensemble dimension k must be positive"));
    }
    if algebra == DivisionAlgebra::Quaternion {
        return Err(Error::AlgebraMismatch {
            expected: DivisionAlgebra::Complex,
            found: algebra,
        });
    }
    let tuples = (k as u128).checked_pow(m);
    if tuples.is_none_or(|t| t > u128::from(ENUMERATION_BUDGET)) {
        return Err(Error::Budget {
            k,
            m: m as usize,
            budget: ENUMERATION_BUDGET,
        });
    }
    let total: u128 = if m == 0 {
        k as u128
    } else {
        (0..k * k)
            .into_par_iter()
            .map(|prefix| {
                let mut walk = Walk::new(k, m as usize, algebra);
                walk.run(prefix / k, prefix % k)
            })
            .try_reduce(|| 0, |a, b| a.checked_add(b).ok_or(()))
            .map_err(|()| Error::Numerical("Wick sum overflowed u128".into()))?
    };
    let value = BigRational::new(BigInt::from(total), BigInt::from(k));
    Ok(OracleResult {
        k,
        m,
        algebra,
        value: OracleValue::Exact(value),
        method: OracleMethod::WickExact,
    })
}

/// Depth-first enumeration of closed walks with no repeated adjacent index,
/// keeping directed edge counts incrementally.
struct Walk {
    k: usize,
    len: usize,
    algebra: DivisionAlgebra,
    /// `counts[a * k + b]` = number of steps `a → b` so far.
    counts: Vec<u32>,
    path: Vec<usize>,
}

impl Walk {
    fn new(k: usize, len: usize, algebra: DivisionAlgebra) -> Self {
        Self {
            k,
            len,
            algebra,
            counts: vec![0; k * k],
            path: Vec::with_capacity(len),
        }
    }

    /// Sum over walks starting `first, second, …`.
    fn run(&mut self, first: usize, second: usize) -> Result<u128, ()> {
        if self.len == 1 {
            // b_{ii} = 0
            return Ok(0);
        }
        if first == second {
            return Ok(0);
        }
        self.path.push(first);
        self.step(first, second);
        let r = self.extend(second);
        self.unstep(first, second);
        self.path.pop();
        r
    }

    fn step(&mut self, a: usize, b: usize) {
        self.counts[a * self.k + b] += 1;
    }

    fn unstep(&mut self, a: usize, b: usize) {
        self.counts[a * self.k + b] -= 1;
    }

    fn extend(&mut self, current: usize) -> Result<u128, ()> {
        self.path.push(current);
        let result = if self.path.len() == self.len {
            let first = self.path[0];
            if current == first {
                Ok(0)
            } else {
                self.step(current, first);
                let score = self.score();
                self.unstep(current, first);
                Ok(score)
            }
        } else {
            let mut acc: u128 = 0;
            for next in 0..self.k {
                if next == current {
                    continue;
                }
                self.step(current, next);
                let r = self.extend(next);
                self.unstep(current, next);
                acc = acc.checked_add(r?).ok_or(())?;
            }
            Ok(acc)
        };
        self.path.pop();
        result
    }

    /// `E[Π b_e]` for the current closed walk.
    fn score(&self) -> u128 {
        let k = self.k;
        let mut prod: u128 = 1;
        for a in 0..k {
            for b in (a + 1)..k {
                let p = self.counts[a * k + b];
                let q = self.counts[b * k + a];
                let factor = match self.algebra {
                    // real symmetric: b_ab = b_ba, E[g^c] = (c − 1)!!
                    DivisionAlgebra::Real => double_factorial_moment(p + q),
                    // complex: b_ba = conj(b_ab), E[z^p z̄^q] = δ_pq p!
                    _ => {
                        if p == q {
                            (1..=u128::from(p)).product()
                        } else {
                            0
                        }
                    }
                };
                if factor == 0 {
                    return 0;
                }
                prod *= factor;
            }
        }
        prod
    }
}

fn double_factorial_moment(c: u32) -> u128 {
    if c % 2 == 1 {
        0
    } else {
        (1..u128::from(c)).step_by(2).product()
    }
}

/// Sampling estimate of `M_{k,m}` from `tr B^m = Σ λ^m` over hollow samples.
pub fn monte_carlo_moment(
    k: usize,
    m: u32,
    algebra: DivisionAlgebra,
    mc: &MonteCarloOptions,
) -> Result<OracleResult> {
    if mc.trials < 2 {
        return Err(Error::param("Monte Carlo oracle needs at least 2 trials"));
    }
    let params = HollowParams::new(k, algebra).with_seed(mc.seed);
    params.validate()?;
    let samples = (0..mc.trials as u64)
        .into_par_iter()
        .map(|t| {
            let b = sample_hollow::<f64>(&params, t)?;
            Ok(eigensolve(&b)?.power_sum(m as i32) / k as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stderr) = mean_and_stderr(&samples);
    Ok(OracleResult {
        k,
        m,
        algebra,
        value: OracleValue::Estimate {
            mean,
            stderr,
            trials: mc.trials,
        },
        method: OracleMethod::MonteCarlo,
    })
}

pub(crate) fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Whether an exact oracle value is zero.
pub fn is_exact_zero(r: &OracleResult) -> bool {
    r.exact().is_some_and(Zero::is_zero)
}

//! Empirical and exact moments.

pub mod exact;
pub mod oracle;
pub mod trace;

use num_traits::ToPrimitive;
use serde::Serialize;

pub use exact::{catalan, combinatorial_identity, semicircle_moment, semicircle_radius};
pub use oracle::{
    hollow_moment_oracle, hollow_moment_oracle_with, monte_carlo_moment, wick_moment,
    MonteCarloOptions, OracleMethod, OracleResult, OracleValue,
};
pub use trace::{trace_expansion_blip_moment, trace_expansion_blip_moment_with, Accumulation};

use crate::algebra::DivisionAlgebra;
use crate::error::{Error, Result};
use crate::scalar::{count, Real};
use crate::spectra::AtomicMeasure;

/// Highest moment order [`measure_moments`] will compute.
pub const MAX_MOMENT_ORDER: u32 = 32;

/// Moments `m = 0..=M` of a measure, optionally with standard errors across
/// the trials it averages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentVector<T> {
    pub values: Vec<T>,
    pub standard_errors: Option<Vec<T>>,
    /// Point the moments are taken about, if not the origin.
    pub center: Option<T>,
}

impl<T: Real> MomentVector<T> {
    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_centered(&self) -> bool {
        self.center.is_some()
    }

    pub fn stderr(&self, m: usize) -> Option<T> {
        self.standard_errors.as_ref().map(|s| s[m])
    }
}

/// `values[m] = Σ w_i (x_i − c)^m`.
///
/// When the measure is an average over several trials, each trial's own
/// moment is recovered and the spread gives the standard error of the mean.
pub fn measure_moments<T: Real>(
    measure: &AtomicMeasure<T>,
    max_m: u32,
    center: Option<T>,
) -> Result<MomentVector<T>> {
    if max_m > MAX_MOMENT_ORDER {
        return Err(Error::param(format!(
            "moment order {max_m} exceeds the cap {MAX_MOMENT_ORDER}"
        )));
    }
    let c = center.unwrap_or_else(T::zero);
    let orders = max_m as usize + 1;
    let groups = measure.trial_groups();
    let g = groups.len();
    let scale = count::<T>(g);
    let per_trial: Vec<Vec<T>> = groups
        .iter()
        .map(|atoms| {
            let mut acc = vec![T::zero(); orders];
            for a in *atoms {
                let d = a.location - c;
                let mut p = a.weight * scale;
                for slot in acc.iter_mut() {
                    *slot += p;
                    p *= d;
                }
            }
            acc
        })
        .collect();
    let values: Vec<T> = (0..orders)
        .map(|m| per_trial.iter().fold(T::zero(), |a, t| a + t[m]) / scale)
        .collect();
    let standard_errors = (g > 1).then(|| {
        (0..orders)
            .map(|m| {
                let ss = per_trial
                    .iter()
                    .fold(T::zero(), |a, t| a + (t[m] - values[m]) * (t[m] - values[m]));
                (ss / (count::<T>(g - 1) * scale)).sqrt()
            })
            .collect()
    });
    Ok(MomentVector {
        values,
        standard_errors,
        center,
    })
}

/// Limiting blip moment of the `k`-checkerboard ensemble.
///
/// Centered about the mean `k − 1` this is `M_{k,m}`; uncentered it is
/// `Σ_{j} C(m,j) (k − 1)^{m−j} M_{k,j}`.
pub fn blip_limit_moment(
    k: usize,
    m: u32,
    algebra: DivisionAlgebra,
    centered: bool,
    mc: &MonteCarloOptions,
) -> Result<f64> {
    if centered {
        return Ok(hollow_moment_oracle_with(k, m, algebra, mc)?.as_f64());
    }
    let shift = k as f64 - 1.0;
    let mut acc = 0.0;
    for j in 0..=m {
        let c = exact::binomial(u64::from(m), u64::from(j)).to_f64().unwrap_or(f64::NAN);
        let mkj = hollow_moment_oracle_with(k, j, algebra, mc)?.as_f64();
        acc += c * shift.powi((m - j) as i32) * mkj;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Atom;

    fn measure(atoms: &[(f64, f64)]) -> AtomicMeasure<f64> {
        AtomicMeasure::new(
            atoms.iter().map(|&(location, weight)| Atom { location, weight }).collect(),
            "",
        )
        .unwrap()
    }

    #[test]
    fn single_atom_powers() {
        let mv = measure_moments(&measure(&[(3.0, 1.0)]), 5, None).unwrap();
        assert_eq!(mv.values, vec![1.0, 3.0, 9.0, 27.0, 81.0, 243.0]);
        assert!(mv.standard_errors.is_none());
        assert!(!mv.is_centered());
    }

    #[test]
    fn symmetric_pair() {
        let mv = measure_moments(&measure(&[(-1.0, 0.5), (1.0, 0.5)]), 8, None).unwrap();
        for (m, v) in mv.values.iter().enumerate() {
            assert_eq!(*v, if m % 2 == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn centering() {
        let mv = measure_moments(&measure(&[(2.0, 0.5), (4.0, 0.5)]), 2, Some(3.0)).unwrap();
        assert_eq!(mv.values, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(measure_moments(&measure(&[(0.0, 1.0)]), 33, None).is_err());
        assert!(measure_moments(&measure(&[(0.0, 1.0)]), 32, None).is_ok());
    }

    #[test]
    fn averaged_measure_has_standard_errors() {
        let a = measure(&[(1.0, 1.0)]);
        let b = measure(&[(3.0, 1.0)]);
        let avg = AtomicMeasure::average(&[a, b]).unwrap();
        let mv = measure_moments(&avg, 1, None).unwrap();
        assert_eq!(mv.values, vec![1.0, 2.0]);
        let se = mv.standard_errors.unwrap();
        assert_eq!(se[0], 0.0);
        // per-trial values 1 and 3: sd √2, stderr 1
        assert!((se[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn limit_moments_closed_forms() {
        let mc = MonteCarloOptions::default();
        for k in 2..=5 {
            let mean = blip_limit_moment(k, 1, DivisionAlgebra::Real, false, &mc).unwrap();
            assert_eq!(mean, k as f64 - 1.0);
            let var = blip_limit_moment(k, 2, DivisionAlgebra::Real, true, &mc).unwrap();
            assert_eq!(var, k as f64 - 1.0);
        }
        assert_eq!(blip_limit_moment(2, 2, DivisionAlgebra::Real, true, &mc).unwrap(), 1.0);
        assert_eq!(blip_limit_moment(2, 4, DivisionAlgebra::Real, true, &mc).unwrap(), 3.0);
    }

    #[test]
    fn centering_the_uncentered_limit_recovers_oracle() {
        // Σ_j C(m,j) (−(k−1))^{m−j} U_j = M_{k,m}
        let mc = MonteCarloOptions::default();
        for k in 2..=4usize {
            for m in 0..=6u32 {
                let mut centered = 0.0;
                for j in 0..=m {
                    let c = exact::binomial(u64::from(m), u64::from(j)).to_f64().unwrap();
                    let u = blip_limit_moment(k, j, DivisionAlgebra::Real, false, &mc).unwrap();
                    centered += c * (-(k as f64 - 1.0)).powi((m - j) as i32) * u;
                }
                let direct = blip_limit_moment(k, m, DivisionAlgebra::Real, true, &mc).unwrap();
                assert!((centered - direct).abs() < 1e-9 * direct.abs().max(1.0), "k={k} m={m}");
            }
        }
    }
}

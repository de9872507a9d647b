//! Blip moments of a single matrix through traces of its powers.
//!
//! Expanding `f_n(kλ/N)(λ − N/k)^m` binomially and summing over eigenvalues
//! gives, for every fixed matrix `A`,
//!
//! ```text
//! (1/k)(k/N)^{2n} Σ_{j=0}^{2n} C(2n,j) Σ_{i=0}^{m+j} C(m+j,i) (−N/k)^{m−i} tr A^{2n+i}
//! ```
//!
//! The alternating sum cancels catastrophically in floating point, so the
//! default path evaluates it exactly: every `f64` entry is a dyadic rational,
//! and the traces are computed with big integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::algebra::{DivisionAlgebra, HermitianMatrix};
use crate::error::{Error, Result};
use crate::moments::exact::binomial;
use crate::scalar::Real;
use crate::spectra::BlipConfig;

/// Largest matrix dimension accepted by the trace expansion.
pub const MAX_DIMENSION: usize = 16;
/// Largest weight half-degree accepted by the trace expansion.
pub const MAX_HALF_DEGREE: u32 = 3;
/// Largest moment order accepted by the trace expansion.
pub const MAX_ORDER: u32 = 8;
/// Floating accumulation fails once `max |term| / |result|` exceeds this.
pub const CANCELLATION_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Accumulation {
    /// Big-integer traces and rational combination.
    #[default]
    Exact,
    /// Plain `f64`, guarded by the cancellation detector.
    Float,
}

pub fn trace_expansion_blip_moment<T: Real>(
    a: &HermitianMatrix<T>,
    k: usize,
    cfg: &BlipConfig,
    m: u32,
) -> Result<f64> {
    trace_expansion_blip_moment_with(a, k, cfg, m, Accumulation::Exact)
}

pub fn trace_expansion_blip_moment_with<T: Real>(
    a: &HermitianMatrix<T>,
    k: usize,
    cfg: &BlipConfig,
    m: u32,
    accumulation: Accumulation,
) -> Result<f64> {
    cfg.validate()?;
    if cfg.dimension != a.dim() || cfg.k != k {
        return Err(Error::param("blip config does not match the matrix"));
    }
    if a.dim() > MAX_DIMENSION || cfg.n > MAX_HALF_DEGREE || m > MAX_ORDER {
        return Err(Error::param(format!(
            "trace expansion is limited to N <= {MAX_DIMENSION}, n <= {MAX_HALF_DEGREE}, \
             m <= {MAX_ORDER}"
        )));
    }
    let (real, multiplicity) = real_representation(a)?;
    let max_power = 4 * cfg.n + m;
    match accumulation {
        Accumulation::Exact => {
            let traces = exact_traces(&real, max_power)?;
            let traces: Vec<BigRational> = traces
                .into_iter()
                .map(|t| t / BigInt::from(multiplicity))
                .collect();
            Ok(combine_exact(&traces, a.dim(), k, cfg.n, m)
                .to_f64()
                .unwrap_or(f64::NAN))
        }
        Accumulation::Float => {
            let traces: Vec<f64> = float_traces(&real, max_power)
                .into_iter()
                .map(|t| t / multiplicity as f64)
                .collect();
            combine_float(&traces, a.dim(), k, cfg.n, m)
        }
    }
}

/// Symmetric real matrix with the same power traces as `a`, up to the
/// returned multiplicity.
fn real_representation<T: Real>(a: &HermitianMatrix<T>) -> Result<(Vec<Vec<f64>>, usize)> {
    let complex = match a.algebra() {
        DivisionAlgebra::Real => {
            let n = a.dim();
            let rows = (0..n).map(|i| (0..n).map(|j| a.get(i, j).re.as_f64()).collect()).collect();
            return Ok((rows, 1));
        }
        DivisionAlgebra::Complex => a.clone(),
        DivisionAlgebra::Quaternion => a.complex_embed()?,
    };
    // X + iY ↦ [[X, −Y], [Y, X]]
    let n = complex.dim();
    let mut rows = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = complex.get(i, j);
            let (x, y) = (z.re.as_f64(), z.i.as_f64());
            rows[i][j] = x;
            rows[i + n][j + n] = x;
            rows[i][j + n] = -y;
            rows[i + n][j] = y;
        }
    }
    let multiplicity = if a.algebra() == DivisionAlgebra::Complex { 2 } else { 4 };
    Ok((rows, multiplicity))
}

/// Splits a finite `f64` into `(mantissa, exponent)` with `x = mantissa·2^exponent`.
fn dyadic(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & 0x000f_ffff_ffff_ffff) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | 0x0010_0000_0000_0000), exp - 1075)
    }
}

/// `tr R^p` for `p = 0..=max_power`, exactly.
fn exact_traces(rows: &[Vec<f64>], max_power: u32) -> Result<Vec<BigRational>> {
    let dim = rows.len();
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let parts: Vec<Vec<(i64, i32)>> = rows.iter().map(|r| r.iter().map(|&x| dyadic(x)).collect()).collect();
    let base_exp = parts
        .iter()
        .flatten()
        .filter(|(mant, _)| *mant != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    // R = 2^base_exp · ints
    let ints: Vec<Vec<BigInt>> = parts
        .iter()
        .map(|r| {
            r.iter()
                .map(|&(mant, e)| BigInt::from(mant) << ((e - base_exp) as usize))
                .collect()
        })
        .collect();
    let mut traces = Vec::with_capacity(max_power as usize + 1);
    traces.push(BigRational::from_integer(BigInt::from(dim)));
    let mut power = ints.clone();
    for p in 1..=max_power {
        if p > 1 {
            power = mat_mul(&power, &ints);
        }
        let t: BigInt = (0..dim).map(|i| &power[i][i]).sum();
        let scale = i64::from(base_exp) * i64::from(p);
        traces.push(scale_pow2(t, scale));
    }
    Ok(traces)
}

fn scale_pow2(t: BigInt, exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(t << (exp as usize))
    } else {
        BigRational::new(t, BigInt::one() << ((-exp) as usize))
    }
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

fn combine_exact(traces: &[BigRational], dim: usize, k: usize, n: u32, m: u32) -> BigRational {
    let shift = BigRational::new(BigInt::from(dim), BigInt::from(k));
    let neg_shift = -shift.clone();
    let inv_neg_shift = BigRational::one() / &neg_shift;
    let mut acc = BigRational::zero();
    for j in 0..=2 * n {
        let outer = BigInt::from(binomial(u64::from(2 * n), u64::from(j)));
        let mut inner = BigRational::zero();
        for i in 0..=(m + j) {
            let c = BigInt::from(binomial(u64::from(m + j), u64::from(i)));
            let factor = if i <= m {
                Pow::pow(neg_shift.clone(), m - i)
            } else {
                Pow::pow(inv_neg_shift.clone(), i - m)
            };
            inner += factor * c * &traces[(2 * n + i) as usize];
        }
        acc += inner * outer;
    }
    let prefactor = Pow::pow(BigRational::one() / shift, 2 * n) / BigInt::from(k);
    acc * prefactor
}

fn float_traces(rows: &[Vec<f64>], max_power: u32) -> Vec<f64> {
    let dim = rows.len();
    let mut traces = vec![dim as f64];
    let mut power = rows.to_vec();
    for p in 1..=max_power {
        if p > 1 {
            let mut next = vec![vec![0.0; dim]; dim];
            for i in 0..dim {
                for l in 0..dim {
                    for j in 0..dim {
                        next[i][j] += power[i][l] * rows[l][j];
                    }
                }
            }
            power = next;
        }
        traces.push((0..dim).map(|i| power[i][i]).sum());
    }
    traces
}

fn combine_float(traces: &[f64], dim: usize, k: usize, n: u32, m: u32) -> Result<f64> {
    let shift = dim as f64 / k as f64;
    let prefactor = shift.powi(-(2 * n as i32)) / k as f64;
    let mut acc = 0.0;
    let mut largest = 0.0f64;
    for j in 0..=2 * n {
        let outer = binomial(u64::from(2 * n), u64::from(j)).to_f64().unwrap_or(f64::NAN);
        for i in 0..=(m + j) {
            let c = binomial(u64::from(m + j), u64::from(i)).to_f64().unwrap_or(f64::NAN);
            let term = prefactor * outer * c * (-shift).powi(m as i32 - i as i32) * traces[(2 * n + i) as usize];
            largest = largest.max(term.abs());
            acc += term;
        }
    }
    let ratio = largest / acc.abs();
    if ratio > CANCELLATION_LIMIT || (largest > 0.0 && acc == 0.0) {
        return Err(Error::PrecisionLoss {
            ratio,
            limit: CANCELLATION_LIMIT,
        });
    }
    Ok(acc)
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_checkerboard, structured_matrix, CheckerboardParams};
    use crate::moments::measure_moments;
    use crate::spectra::{blip_measure, eigensolve};

    fn direct(a: &HermitianMatrix<f64>, k: usize, cfg: &BlipConfig, m: u32) -> f64 {
        let mu = blip_measure(&eigensolve(a).unwrap(), k, cfg).unwrap();
        measure_moments(&mu, m, None).unwrap().values[m as usize]
    }

    #[test]
    fn dyadic_roundtrip() {
        for x in [1.0, -0.375, 3.1e-9, 1e300, f64::MIN_POSITIVE / 8.0, -7.25e5] {
            let (mant, e) = dyadic(x);
            assert_eq!(mant as f64 * 2f64.powi(e), x);
        }
    }

    #[test]
    fn zeroth_moment_is_blip_mass() {
        let a: HermitianMatrix<f64> =
            sample_checkerboard(&CheckerboardParams::new(8, 2).with_seed(2), 0).unwrap();
        let cfg = BlipConfig::new(8, 2).with_n(1);
        let mu = blip_measure(&eigensolve(&a).unwrap(), 2, &cfg).unwrap();
        let t = trace_expansion_blip_moment(&a, 2, &cfg, 0).unwrap();
        assert!(relative_difference(t, mu.total_mass()) < 1e-9);
    }

    #[test]
    fn structured_first_moment_vanishes() {
        let z: HermitianMatrix<f64> = structured_matrix(4, 2, 1.0).unwrap();
        let cfg = BlipConfig::new(4, 2).with_n(1);
        assert_eq!(trace_expansion_blip_moment(&z, 2, &cfg, 1).unwrap(), 0.0);
        // the float path cannot certify an exact zero
        assert!(matches!(
            trace_expansion_blip_moment_with(&z, 2, &cfg, 1, Accumulation::Float),
            Err(Error::PrecisionLoss { .. }) | Ok(_)
        ));
    }

    #[test]
    fn matches_direct_moment_on_random_matrices() {
        let cfg = BlipConfig::new(8, 2).with_n(2);
        for trial in 0..10 {
            let a: HermitianMatrix<f64> =
                sample_checkerboard(&CheckerboardParams::new(8, 2).with_seed(77), trial).unwrap();
            for m in 0..=3 {
                let t = trace_expansion_blip_moment(&a, 2, &cfg, m).unwrap();
                let d = direct(&a, 2, &cfg, m);
                assert!(relative_difference(t, d) < 1e-9, "trial {trial} m {m}: {t} vs {d}");
            }
        }
    }

    #[test]
    fn complex_and_quaternion_inputs() {
        for algebra in [DivisionAlgebra::Complex, DivisionAlgebra::Quaternion] {
            let p = CheckerboardParams::new(6, 3).with_algebra(algebra).with_seed(5);
            let a: HermitianMatrix<f64> = sample_checkerboard(&p, 0).unwrap();
            let cfg = BlipConfig::new(6, 3).with_n(1);
            for m in 0..=2 {
                let t = trace_expansion_blip_moment(&a, 3, &cfg, m).unwrap();
                let d = direct(&a, 3, &cfg, m);
                assert!(relative_difference(t, d) < 1e-9, "{algebra} m {m}: {t} vs {d}");
            }
        }
    }

    #[test]
    fn float_accumulation_detects_cancellation() {
        let z: HermitianMatrix<f64> = structured_matrix(16, 2, 1.0).unwrap();
        let cfg = BlipConfig::new(16, 2).with_n(3);
        let r = trace_expansion_blip_moment_with(&z, 2, &cfg, 1, Accumulation::Float);
        assert!(matches!(r, Err(Error::PrecisionLoss { .. })), "{r:?}");
    }

    #[test]
    fn limits_are_enforced() {
        let a = HermitianMatrix::<f64>::identity(17);
        assert!(trace_expansion_blip_moment(&a, 1, &BlipConfig::new(17, 1).with_n(1), 0).is_err());
        let a = HermitianMatrix::<f64>::identity(4);
        assert!(trace_expansion_blip_moment(&a, 1, &BlipConfig::new(4, 1).with_n(4), 0).is_err());
    }
}

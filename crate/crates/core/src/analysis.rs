//! Statistical verification: regime splitting, Weyl perturbation bounds,
//! growth and decay of bulk moments, and blip-versus-hollow comparison.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{DivisionAlgebra, HermitianMatrix};
use crate::ensembles::{sample_hollow, CheckerboardParams, HollowParams};
use crate::error::{Error, Result};
use crate::moments::oracle::mean_and_stderr;
use crate::scalar::{count, Real};
use crate::spectra::{blip_measure, eigensolve, sample_spectra, Atom, BlipConfig, Spectrum};

/// Default exponent `e` of the splitting threshold `N^e`.
pub const DEFAULT_SPLIT_EXPONENT: f64 = 0.65;
/// Absolute slack allowed by [`weyl_check`].
pub const WEYL_TOLERANCE: f64 = 1e-8;
/// Minimum trials before [`variance_decay_probe`] stops warning.
pub const MIN_VARIANCE_TRIALS: usize = 20;

/// Spectrum partitioned into `k` eigenvalues near `Nw/k` and the bulk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeSplit<T> {
    pub blip_eigenvalues: Vec<T>,
    pub bulk_eigenvalues: Vec<T>,
    pub threshold: T,
    pub target: T,
}

/// Classifies each eigenvalue as blip (`|λ − Nw/k| < N^e`) or bulk
/// (`|λ| < N^e`). An eigenvalue matching neither or both classes is a
/// regime-overlap error.
pub fn split_regimes<T: Real>(s: &Spectrum<T>, k: usize, w: f64, exponent: f64) -> Result<RegimeSplit<T>> {
    if !(exponent > 0.5 && exponent < 1.0) {
        return Err(Error::param(format!("split exponent {exponent} must lie in (0.5, 1)")));
    }
    if k == 0 {
        return Err(Error::param("k must be positive"));
    }
    let n = s.dimension();
    let threshold = T::of((n as f64).powf(exponent));
    let target = T::of(n as f64 * w / k as f64);
    let mut split = RegimeSplit {
        blip_eigenvalues: Vec::new(),
        bulk_eigenvalues: Vec::new(),
        threshold,
        target,
    };
    for &l in s.eigenvalues() {
        let blip = (l - target).abs() < threshold;
        let bulk = l.abs() < threshold;
        match (blip, bulk) {
            (true, false) => split.blip_eigenvalues.push(l),
            (false, true) => split.bulk_eigenvalues.push(l),
            (both, _) => {
                return Err(Error::RegimeOverlap {
                    eigenvalue: l.as_f64(),
                    threshold: threshold.as_f64(),
                    kind: if both { "in both regimes" } else { "in neither regime" },
                })
            }
        }
    }
    if n <= k {
        // no bulk can exist; every eigenvalue sits in the overlap
        return Err(Error::RegimeOverlap {
            eigenvalue: target.as_f64(),
            threshold: threshold.as_f64(),
            kind: "without a bulk (N <= k)",
        });
    }
    Ok(split)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylReport {
    pub satisfied: bool,
    /// `max_j |λ_j(H + P) − λ_j(H)|`.
    pub max_deviation: f64,
    /// `‖P‖_op`, the largest eigenvalue magnitude of `P`.
    pub operator_norm: f64,
    /// `‖P‖_op − max_deviation`; negative when the bound fails.
    pub slack: f64,
}

/// Checks `|λ_j(H + P) − λ_j(H)| ≤ ‖P‖_op` for every `j` (ascending order).
pub fn weyl_check<T: Real>(h: &HermitianMatrix<T>, p: &HermitianMatrix<T>) -> Result<WeylReport> {
    if h.dim() != p.dim() {
        return Err(Error::param(format!(
            "Weyl check needs equal dimensions, got {} and {}",
            h.dim(),
            p.dim()
        )));
    }
    let sum = eigensolve(&h.add(p)?)?;
    let base = eigensolve(h)?;
    let norm = eigensolve(p)?.spectral_radius().as_f64();
    let max_deviation = sum
        .eigenvalues()
        .iter()
        .zip(base.eigenvalues())
        .map(|(a, b)| (*a - *b).abs().as_f64())
        .fold(0.0, f64::max);
    Ok(WeylReport {
        satisfied: max_deviation <= norm + WEYL_TOLERANCE,
        max_deviation,
        operator_norm: norm,
        slack: norm - max_deviation,
    })
}

/// Least-squares fit of `ln y = slope·ln x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual-based standard error; `None` with fewer than three points.
    pub slope_stderr: Option<f64>,
}

impl SlopeFit {
    /// `slope ± 2·stderr`.
    pub fn interval(&self) -> Option<(f64, f64)> {
        self.slope_stderr
            .map(|se| (self.slope - 2.0 * se, self.slope + 2.0 * se))
    }
}

pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = (lx.len() > 2).then(|| {
        let rss: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    });
    Some(SlopeFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// `ν^{(ℓ)} = (1/N) Σ (λ/√N)^ℓ`, the ℓ-th moment of the bulk measure.
pub fn bulk_moment<T: Real>(s: &Spectrum<T>, l: u32) -> f64 {
    let n = s.dimension() as f64;
    let sum: f64 = s.eigenvalues().iter().map(|x| x.as_f64().powi(l as i32)).sum();
    sum / n.powf(f64::from(l) / 2.0 + 1.0)
}

/// Settings shared by the bulk probes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSettings {
    pub k: usize,
    pub w: f64,
    pub algebra: DivisionAlgebra,
    pub trials: usize,
    pub seed: u64,
}

impl ProbeSettings {
    pub fn new(k: usize, w: f64, trials: usize) -> Self {
        Self {
            k,
            w,
            algebra: DivisionAlgebra::Real,
            trials,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn params(&self, n: usize) -> CheckerboardParams {
        CheckerboardParams::new(n, self.k)
            .with_w(self.w)
            .with_algebra(self.algebra)
            .with_seed(self.seed)
    }

    fn bulk_moments(&self, n: usize, l: u32) -> Result<Vec<f64>> {
        let spectra = sample_spectra::<f64>(&self.params(n), 0..self.trials as u64)?;
        Ok(spectra.iter().map(|s| bulk_moment(s, l)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeStatistic {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub variance: f64,
}

fn size_statistic(n: usize, samples: &[f64]) -> SizeStatistic {
    let (mean, stderr) = mean_and_stderr(samples);
    let variance = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64
    } else {
        0.0
    };
    SizeStatistic {
        n,
        mean,
        stderr,
        variance,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub l: u32,
    pub sizes: Vec<SizeStatistic>,
    pub fit: Option<SlopeFit>,
    /// Growth exponent `ℓ/2 − 1` expected when `w ≠ 0`.
    pub expected_slope: f64,
}

/// Estimates `E ν^{(ℓ)}` at each size and fits its log-log growth rate.
/// With `w ≠ 0` the expected moments grow like `N^{ℓ/2 − 1}`.
pub fn bulk_divergence_probe(settings: &ProbeSettings, l: u32, sizes: &[usize]) -> Result<GrowthReport> {
    if l < 4 || l % 2 == 1 {
        return Err(Error::param(format!(
            "divergence probe needs an even moment order >= 4, got {l}"
        )));
    }
    if sizes.len() < 2 {
        return Err(Error::param("divergence probe needs at least two sizes"));
    }
    if settings.trials < 2 {
        return Err(Error::param("divergence probe needs at least two trials per size"));
    }
    let sizes = sizes
        .iter()
        .map(|&n| Ok(size_statistic(n, &settings.bulk_moments(n, l)?)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = sizes.iter().map(|s| s.n as f64).collect();
    let ys: Vec<f64> = sizes.iter().map(|s| s.mean).collect();
    Ok(GrowthReport {
        l,
        fit: fit_loglog(&xs, &ys),
        sizes,
        expected_slope: f64::from(l) / 2.0 - 1.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub l: u32,
    pub sizes: Vec<SizeStatistic>,
    /// Log-log slope of the variance; `None` when a variance vanishes.
    pub fit: Option<SlopeFit>,
    /// Variance at the smallest size over variance at the largest.
    pub variance_ratio: Option<f64>,
    pub warning: Option<String>,
}

/// Sample variance of `ν^{(ℓ)}` for the `(k, w)` ensemble at each size.
/// For `w = 0` it decays like `N^{-2}`.
pub fn variance_decay_probe(settings: &ProbeSettings, l: u32, sizes: &[usize]) -> Result<DecayReport> {
    if sizes.is_empty() {
        return Err(Error::param("variance probe needs at least one size"));
    }
    if settings.trials < 2 {
        return Err(Error::param("variance probe needs at least two trials per size"));
    }
    let warning = (settings.trials < MIN_VARIANCE_TRIALS).then(|| {
        format!(
            "only {} trials per size; variance estimates below {MIN_VARIANCE_TRIALS} trials \
             have little statistical power",
            settings.trials
        )
    });
    let sizes = sizes
        .iter()
        .map(|&n| Ok(size_statistic(n, &settings.bulk_moments(n, l)?)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = sizes.iter().map(|s| s.n as f64).collect();
    let vs: Vec<f64> = sizes.iter().map(|s| s.variance).collect();
    let last = vs[vs.len() - 1];
    Ok(DecayReport {
        l,
        fit: fit_loglog(&xs, &vs),
        variance_ratio: (last > 0.0).then(|| vs[0] / last),
        sizes,
        warning,
    })
}

/// Two-sample Kolmogorov–Smirnov distance between weighted samples, each
/// normalized to unit mass.
pub fn weighted_ks<T: Real>(a: &[Atom<T>], b: &[Atom<T>]) -> Result<f64> {
    let prep = |atoms: &[Atom<T>]| -> Result<(Vec<(f64, f64)>, f64)> {
        let mut v: Vec<(f64, f64)> = atoms.iter().map(|x| (x.location.as_f64(), x.weight.as_f64())).collect();
        let total: f64 = v.iter().map(|x| x.1).sum();
        if v.is_empty() || !(total > 0.0) {
            return Err(Error::param("KS statistic needs a sample with positive mass"));
        }
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok((v, total))
    };
    let (a, ta) = prep(a)?;
    let (b, tb) = prep(b)?;
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut d = 0.0f64;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => break,
        };
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        d = d.max((fa / ta - fb / tb).abs());
    }
    Ok(d.clamp(0.0, 1.0))
}

/// Highest moment order compared by [`compare_blip_to_hollow`].
pub const COMPARISON_ORDER: u32 = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `|m_blip − m_hollow|` for orders `1..=6` (index 0 is order 1).
    pub moment_distances: Vec<f64>,
    pub blip_moments: Vec<f64>,
    pub hollow_moments: Vec<f64>,
    pub ks_statistic: f64,
    /// Atom counts of the blip and hollow samples.
    pub sample_sizes: (usize, usize),
}

fn normalized_moments(atoms: &[(f64, f64)], max_m: u32) -> Vec<f64> {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    (1..=max_m)
        .map(|m| atoms.iter().map(|(x, w)| w * x.powi(m as i32)).sum::<f64>() / total)
        .collect()
}

/// Compares a centered weighted blip sample with the eigenvalues of fresh
/// `k×k` hollow-ensemble samples.
pub fn compare_blip_to_hollow<T: Real>(
    blip: &[Atom<T>],
    k: usize,
    algebra: DivisionAlgebra,
    hollow_trials: usize,
    seed: u64,
) -> Result<ComparisonReport> {
    if hollow_trials == 0 {
        return Err(Error::param("hollow comparison needs at least one trial"));
    }
    let params = HollowParams::new(k, algebra).with_seed(seed);
    params.validate()?;
    let hollow: Vec<Atom<f64>> = (0..hollow_trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = eigensolve(&sample_hollow::<f64>(&params, t)?)?;
            Ok(s.eigenvalues()
                .iter()
                .map(|&location| Atom { location, weight: 1.0 })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    compare_samples(blip, &hollow)
}

/// Moment distances and KS statistic between two weighted samples.
pub fn compare_samples<T: Real, U: Real>(a: &[Atom<T>], b: &[Atom<U>]) -> Result<ComparisonReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("comparison needs two nonempty samples"));
    }
    let to64 = |v: &[Atom<T>]| -> Vec<Atom<f64>> {
        v.iter()
            .map(|x| Atom { location: x.location.as_f64(), weight: x.weight.as_f64() })
            .collect()
    };
    let a64 = to64(a);
    let b64: Vec<Atom<f64>> = b
        .iter()
        .map(|x| Atom { location: x.location.as_f64(), weight: x.weight.as_f64() })
        .collect();
    let ks = weighted_ks(&a64, &b64)?;
    let pa: Vec<(f64, f64)> = a64.iter().map(|x| (x.location, x.weight)).collect();
    let pb: Vec<(f64, f64)> = b64.iter().map(|x| (x.location, x.weight)).collect();
    let blip_moments = normalized_moments(&pa, COMPARISON_ORDER);
    let hollow_moments = normalized_moments(&pb, COMPARISON_ORDER);
    Ok(ComparisonReport {
        moment_distances: blip_moments
            .iter()
            .zip(&hollow_moments)
            .map(|(x, y)| (x - y).abs())
            .collect(),
        blip_moments,
        hollow_moments,
        ks_statistic: ks,
        sample_sizes: (a.len(), b.len()),
    })
}

/// Centered averaged blip atoms of `g` independent `(k, w)`-checkerboard
/// matrices, shifted by the limiting mean `k − 1`.
pub fn centered_blip_sample<T: Real>(params: &CheckerboardParams, g: usize, cfg: &BlipConfig) -> Result<Vec<Atom<T>>> {
    let spectra = sample_spectra::<T>(params, 0..g as u64)?;
    let center = count::<T>(params.k) - T::one();
    let scale = T::one() / count::<T>(g);
    let mut atoms = Vec::with_capacity(g * params.n);
    for s in &spectra {
        for a in blip_measure(s, params.k, cfg)?.atoms() {
            atoms.push(Atom {
                location: a.location - center,
                weight: a.weight * scale,
            });
        }
    }
    Ok(atoms)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluctuationStatistic {
    pub n: usize,
    /// Sample `r`-th central moment of the per-matrix blip moment.
    pub central_moment: f64,
}

/// Sample `r`-th central moments of the per-matrix `m`-th blip moment at
/// each size. These should stay bounded as `N` grows.
pub fn blip_fluctuation_probe(
    settings: &ProbeSettings,
    m: u32,
    r: u32,
    sizes: &[usize],
) -> Result<Vec<FluctuationStatistic>> {
    if settings.trials < 2 {
        return Err(Error::param("fluctuation probe needs at least two trials"));
    }
    sizes
        .iter()
        .map(|&n| {
            let params = settings.params(n);
            let cfg = BlipConfig::new(n, settings.k);
            let spectra = sample_spectra::<f64>(&params, 0..settings.trials as u64)?;
            let xs = spectra
                .iter()
                .map(|s| {
                    let mu = blip_measure(s, settings.k, &cfg)?;
                    Ok(mu.atoms().iter().map(|a| a.weight * a.location.powi(m as i32)).sum::<f64>())
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let central_moment = xs.iter().map(|x| (x - mean).powi(r as i32)).sum::<f64>() / xs.len() as f64;
            Ok(FluctuationStatistic { n, central_moment })
        })
        .collect()
}

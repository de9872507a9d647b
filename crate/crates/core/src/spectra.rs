//! Eigensolution and the empirical spectral measures built from it.
//!
//! * bulk measure: atoms at `λ/√N` with weight `1/N`;
//! * blip measure: atoms at `λ − N/k` with weight `f_n(kλ/N)/k`, where
//!   `f_n(x) = x^{2n}(x − 2)^{2n}` is close to one near the blip and vanishes
//!   on the bulk;
//! * averaged blip measure: the mean of blip measures of independent matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{DivisionAlgebra, HermitianMatrix};
use crate::ensembles::{sample_checkerboard, CheckerboardParams};
use crate::error::{Error, Result};
use crate::scalar::{count, Real};

/// Relative agreement required between the two copies of each eigenvalue of
/// a complex-embedded quaternion matrix.
pub const KRAMERS_TOLERANCE: f64 = 1e-8;

/// Ascending eigenvalues of a self-adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    eigenvalues: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts the given values ascending.
    pub fn from_values(mut eigenvalues: Vec<T>) -> Result<Self> {
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("non-finite eigenvalue".into()));
        }
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn trace(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Largest eigenvalue magnitude, i.e. the operator norm of the source.
    pub fn spectral_radius(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
    }

    /// `Σ λ^p`, which equals `tr A^p`.
    pub fn power_sum(&self, p: i32) -> T {
        self.eigenvalues.iter().fold(T::zero(), |a, &b| a + b.powi(p))
    }
}

/// Eigenvalues of a self-adjoint matrix. Quaternion input is diagonalized
/// through its complex embedding and the Kramers pairs are collapsed.
pub fn eigensolve<T: Real>(m: &HermitianMatrix<T>) -> Result<Spectrum<T>> {
    let values: Vec<T> = match m.algebra() {
        DivisionAlgebra::Real => m.to_real_matrix()?.symmetric_eigenvalues().iter().copied().collect(),
        DivisionAlgebra::Complex => m
            .to_complex_matrix()?
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect(),
        DivisionAlgebra::Quaternion => {
            let doubled = eigensolve(&m.complex_embed()?)?;
            return deduplicate_kramers(&doubled);
        }
    };
    Spectrum::from_values(values).map_err(|e| match e {
        Error::Numerical(msg) => Error::Numerical(format!(
            "{msg} in {0}x{0} {1} matrix (trace {2})",
            m.dim(),
            m.algebra(),
            m.trace()
        )),
        e => e,
    })
}

/// Keeps every second eigenvalue of a spectrum whose values come in equal
/// pairs, failing if a pair disagrees beyond [`KRAMERS_TOLERANCE`].
pub fn deduplicate_kramers<T: Real>(doubled: &Spectrum<T>) -> Result<Spectrum<T>> {
    let values = doubled.eigenvalues();
    if !values.len().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "embedded spectrum has odd length {}",
            values.len()
        )));
    }
    let rel = T::of(KRAMERS_TOLERANCE).max(T::default_epsilon() * T::of(100.0));
    let scale = doubled.spectral_radius();
    let mut out = Vec::with_capacity(values.len() / 2);
    for (index, pair) in values.chunks_exact(2).enumerate() {
        if (pair[1] - pair[0]).abs() > rel * scale {
            return Err(Error::Degeneracy {
                index,
                lower: pair[0].as_f64(),
                upper: pair[1].as_f64(),
            });
        }
        out.push(pair[0]);
    }
    Ok(Spectrum { eigenvalues: out })
}

/// Eigensolves trials `trials` of a checkerboard ensemble in parallel; the
/// output order follows the trial index.
pub fn sample_spectra<T: Real>(
    params: &CheckerboardParams,
    trials: std::ops::Range<u64>,
) -> Result<Vec<Spectrum<T>>> {
    params.validate()?;
    trials
        .into_par_iter()
        .map(|t| {
            sample_checkerboard::<T>(params, t)
                .and_then(|m| eigensolve(&m))
                .map_err(|e| e.in_trial(params.seed, t))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom<T> {
    pub location: T,
    pub weight: T,
}

/// Finite sum of weighted point masses.
///
/// A measure obtained by averaging over independent trials remembers where
/// each trial's atoms start, so moment estimates can carry standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure<T> {
    atoms: Vec<Atom<T>>,
    note: String,
    /// Start offsets of the per-trial groups; a single group when empty.
    groups: Vec<usize>,
}

impl<T: Real> AtomicMeasure<T> {
    pub fn new(atoms: Vec<Atom<T>>, note: impl Into<String>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| !(a.weight >= T::zero()) || !a.location.is_finite()) {
            return Err(Error::Invariant(format!(
                "atom at {} has invalid weight {}",
                a.location, a.weight
            )));
        }
        Ok(Self {
            atoms,
            note: note.into(),
            groups: Vec::new(),
        })
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    pub fn total_mass(&self) -> T {
        self.atoms.iter().fold(T::zero(), |a, b| a + b.weight)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Number of independent trials averaged into this measure.
    pub fn trial_count(&self) -> usize {
        self.groups.len().max(1)
    }

    /// Atoms contributed by each trial. Weights are those of the average, so
    /// a single trial's own measure is `trial_count()` times larger.
    pub fn trial_groups(&self) -> Vec<&[Atom<T>]> {
        if self.groups.is_empty() {
            return vec![&self.atoms];
        }
        let mut out = Vec::with_capacity(self.groups.len());
        for (g, &start) in self.groups.iter().enumerate() {
            let end = self.groups.get(g + 1).copied().unwrap_or(self.atoms.len());
            out.push(&self.atoms[start..end]);
        }
        out
    }

    /// Arithmetic mean of the given measures.
    pub fn average(measures: &[AtomicMeasure<T>]) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::param("cannot average zero measures"));
        }
        let g = count::<T>(measures.len());
        let mut atoms = Vec::with_capacity(measures.iter().map(|m| m.len()).sum());
        let mut groups = Vec::with_capacity(measures.len());
        for m in measures {
            groups.push(atoms.len());
            atoms.extend(m.atoms.iter().map(|a| Atom {
                location: a.location,
                weight: a.weight / g,
            }));
        }
        Ok(Self {
            atoms,
            note: format!("mean of {} measures: {}", measures.len(), measures[0].note),
            groups,
        })
    }

    /// Translates every atom by `-by`.
    pub fn shifted(&self, by: T) -> Self {
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.location -= by;
        }
        out
    }
}

/// Atoms at `λ_i/√N` with weight `1/N`.
pub fn bulk_measure<T: Real>(s: &Spectrum<T>) -> Result<AtomicMeasure<T>> {
    if s.dimension() == 0 {
        return Err(Error::param("bulk measure of an empty spectrum"));
    }
    let n = count::<T>(s.dimension());
    let root = n.sqrt();
    let weight = T::one() / n;
    let atoms = s
        .eigenvalues()
        .iter()
        .map(|&l| Atom {
            location: l / root,
            weight,
        })
        .collect();
    AtomicMeasure::new(atoms, "bulk: eigenvalues / sqrt(N), weight 1/N")
}

/// `f_n(x) = x^{2n}(x − 2)^{2n}`, evaluated in log space so that large `n`
/// underflows cleanly to zero.
pub fn weight_fn<T: Real>(x: T, n: u32) -> T {
    let two = T::of(2.0);
    if x.is_zero() || x == two {
        return T::zero();
    }
    let d = x - T::one();
    let d2 = d * d;
    // x(x − 2) = (x − 1)² − 1; use log1p where that is well conditioned
    let log_abs = if d2 < T::of(0.5) {
        (-d2).ln_1p()
    } else {
        x.abs().ln() + (x - two).abs().ln()
    };
    (T::of(2.0 * f64::from(n)) * log_abs).exp()
}

/// Parameters of the blip weighting for `N×N` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlipConfig {
    pub dimension: usize,
    pub k: usize,
    /// Half-degree of the weight polynomial.
    pub n: u32,
}

impl BlipConfig {
    /// Default half-degree `⌈√N⌉`.
    pub fn new(dimension: usize, k: usize) -> Self {
        Self {
            dimension,
            k,
            n: default_half_degree(dimension),
        }
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = n;
        self
    }

    /// `N/k`, the unperturbed blip location.
    pub fn shift(&self) -> f64 {
        self.dimension as f64 / self.k as f64
    }

    /// `k/N`.
    pub fn scale(&self) -> f64 {
        self.k as f64 / self.dimension as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("blip half-degree n must be at least 1"));
        }
        if self.k == 0 || self.k > self.dimension {
            return Err(Error::param(format!(
                "blip config needs 1 <= k <= N, got k = {}, N = {}",
                self.k, self.dimension
            )));
        }
        Ok(())
    }
}

pub fn default_half_degree(dimension: usize) -> u32 {
    (dimension as f64).sqrt().ceil().max(1.0) as u32
}

/// Default number of matrices averaged in blip experiments,
/// `max(8, ⌈N^{1/4}⌉)`.
pub fn default_blip_trials(dimension: usize) -> usize {
    ((dimension as f64).powf(0.25).ceil() as usize).max(8)
}

/// Atoms at `λ − N/k` with weight `f_n(kλ/N)/k`.
pub fn blip_measure<T: Real>(s: &Spectrum<T>, k: usize, cfg: &BlipConfig) -> Result<AtomicMeasure<T>> {
    cfg.validate()?;
    if cfg.dimension != s.dimension() || cfg.k != k {
        return Err(Error::param(format!(
            "blip config (N = {}, k = {}) does not match spectrum (N = {}, k = {k})",
            cfg.dimension,
            cfg.k,
            s.dimension()
        )));
    }
    let shift = count::<T>(cfg.dimension) / count::<T>(k);
    let kk = count::<T>(k);
    let atoms = s
        .eigenvalues()
        .iter()
        .map(|&l| Atom {
            location: l - shift,
            weight: weight_fn(l / shift, cfg.n) / kk,
        })
        .collect();
    AtomicMeasure::new(atoms, format!("blip: lambda - N/k, weight f_{}(k lambda/N)/k", cfg.n))
}

/// Mean of the blip measures of `matrices`; eigensolves run in parallel.
pub fn averaged_blip_measure<T: Real>(
    matrices: &[HermitianMatrix<T>],
    k: usize,
    cfg: &BlipConfig,
) -> Result<AtomicMeasure<T>> {
    let Some(first) = matrices.first() else {
        return Err(Error::param("averaged blip measure needs at least one matrix"));
    };
    if matrices.iter().any(|m| m.dim() != first.dim()) {
        return Err(Error::param("averaged blip measure needs matrices of one dimension"));
    }
    let measures = matrices
        .par_iter()
        .map(|m| blip_measure(&eigensolve(m)?, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    AtomicMeasure::average(&measures)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

/// Binned density table whose integral equals the measure's mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn integral(&self) -> f64 {
        self.bins.iter().map(|b| b.density * (b.hi - b.lo)).sum()
    }
}

/// Atoms lighter than this fraction of the total mass do not stretch the
/// default histogram range.
const NEGLIGIBLE_MASS: f64 = 1e-6;

/// Accumulates atom weights into `bins` equal-width bins over `range`.
///
/// Without an explicit range the table spans the significant atoms padded by
/// 5% on each side. The densities are rescaled so the table integrates to the
/// measure's total mass.
pub fn histogram<T: Real>(
    measure: &AtomicMeasure<T>,
    bins: usize,
    range: Option<(f64, f64)>,
) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::param("histogram needs at least one bin"));
    }
    let total = measure.total_mass().as_f64();
    let (lo, hi) = match range {
        Some((lo, hi)) if !(lo < hi) => {
            return Err(Error::param(format!("histogram range [{lo}, {hi}] is empty")));
        }
        Some(r) => r,
        None => default_range(measure, total),
    };
    let width = (hi - lo) / bins as f64;
    let mut mass = vec![0.0f64; bins];
    for a in measure.atoms() {
        let x = a.location.as_f64();
        if x < lo || x > hi {
            continue;
        }
        let b = (((x - lo) / width) as usize).min(bins - 1);
        mass[b] += a.weight.as_f64();
    }
    let captured: f64 = mass.iter().sum();
    let rescale = if captured > 0.0 { total / captured } else { 0.0 };
    let bins = mass
        .iter()
        .enumerate()
        .map(|(b, m)| HistogramBin {
            lo: lo + width * b as f64,
            hi: if b + 1 == bins { hi } else { lo + width * (b + 1) as f64 },
            density: m * rescale / width,
        })
        .collect();
    Ok(Histogram { bins })
}

fn default_range<T: Real>(measure: &AtomicMeasure<T>, total: f64) -> (f64, f64) {
    let cutoff = NEGLIGIBLE_MASS * total;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for a in measure.atoms() {
        if a.weight.as_f64() > cutoff {
            lo = lo.min(a.location.as_f64());
            hi = hi.max(a.location.as_f64());
        }
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    (lo - pad, hi + pad)
}

/// Default range for centered blip histograms, wide enough for the `k×k`
/// hollow ensemble spectrum.
pub fn blip_histogram_range(k: usize) -> (f64, f64) {
    let mean = k as f64 - 1.0;
    let spread = 6.0 * mean.max(1.0).sqrt();
    (-mean - spread, mean + spread)
}

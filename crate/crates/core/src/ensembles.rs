//! Samplers for checkerboard and hollow Gaussian ensembles.

use serde::{Deserialize, Serialize};

use crate::algebra::{DivisionAlgebra, HermitianMatrix, Quaternion};
use crate::error::{Error, Result};
use crate::rng::{Domain, EntryDistribution, TrialStream};
use crate::scalar::Real;

/// An `N×N` (k,w)-checkerboard ensemble: entry `(i, j)` is the constant `w`
/// when `i ≡ j (mod k)` (0-based) and an i.i.d. random entry otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckerboardParams {
    pub n: usize,
    pub k: usize,
    pub w: f64,
    pub algebra: DivisionAlgebra,
    pub distribution: EntryDistribution,
    pub seed: u64,
}

impl CheckerboardParams {
    /// Real `k`-checkerboard (`w = 1`) with Gaussian entries.
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            w: 1.0,
            algebra: DivisionAlgebra::Real,
            distribution: EntryDistribution::Normal,
            seed: 0,
        }
    }

    pub fn with_w(mut self, w: f64) -> Self {
        self.w = w;
        self
    }

    pub fn with_algebra(mut self, algebra: DivisionAlgebra) -> Self {
        self.algebra = algebra;
        self
    }

    pub fn with_distribution(mut self, distribution: EntryDistribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("N must be positive"));
        }
        if self.k == 0 {
            return Err(Error::param("k must be positive"));
        }
        if self.k > self.n {
            return Err(Error::param(format!("k = {} exceeds N = {}", self.k, self.n)));
        }
        if !self.w.is_finite() {
            return Err(Error::param("w must be finite"));
        }
        Ok(())
    }

    pub fn is_congruent(&self, i: usize, j: usize) -> bool {
        i % self.k == j % self.k
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HollowParams {
    pub k: usize,
    pub algebra: DivisionAlgebra,
    pub seed: u64,
}

impl HollowParams {
    pub fn new(k: usize, algebra: DivisionAlgebra) -> Self {
        Self { k, algebra, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("hollow ensemble dimension k must be positive"));
        }
        Ok(())
    }
}

/// Unit second-moment random entry over `algebra`: i.i.d. components divided
/// by 1, √2 or 2.
fn random_entry<T: Real>(
    stream: &TrialStream,
    i: usize,
    j: usize,
    algebra: DivisionAlgebra,
    dist: EntryDistribution,
) -> Quaternion<T> {
    let mut rng = stream.entry(i, j);
    let scale = 1.0 / algebra.normalization();
    let mut c = [0.0f64; 4];
    for slot in c.iter_mut().take(algebra.components()) {
        *slot = dist.draw(&mut rng) * scale;
    }
    Quaternion::new(T::of(c[0]), T::of(c[1]), T::of(c[2]), T::of(c[3]))
}

/// Draws trial `trial` of the checkerboard ensemble. The same
/// `(params, trial)` always yields the same matrix.
pub fn sample_checkerboard<T: Real>(
    params: &CheckerboardParams,
    trial: u64,
) -> Result<HermitianMatrix<T>> {
    params.validate()?;
    let stream = TrialStream::new(params.seed, Domain::Checkerboard, trial);
    let w = Quaternion::real(T::of(params.w));
    HermitianMatrix::from_upper(params.n, params.algebra, |i, j| {
        if params.is_congruent(i, j) {
            w
        } else {
            random_entry(&stream, i, j, params.algebra, params.distribution)
        }
    })
}

/// Draws trial `trial` of the `k×k` hollow GOE/GUE/GSE: zero diagonal and
/// standard Gaussian off-diagonal entries over the algebra.
pub fn sample_hollow<T: Real>(params: &HollowParams, trial: u64) -> Result<HermitianMatrix<T>> {
    params.validate()?;
    let stream = TrialStream::new(params.seed, Domain::Hollow, trial);
    HermitianMatrix::from_upper(params.k, params.algebra, |i, j| {
        if i == j {
            Quaternion::zero()
        } else {
            random_entry(&stream, i, j, params.algebra, EntryDistribution::Normal)
        }
    })
}

/// The deterministic matrix `Z_ij = w·[i ≡ j mod k]`. When `k | N` its
/// spectrum is `Nw/k` with multiplicity `k` and `0` otherwise.
pub fn structured_matrix<T: Real>(n: usize, k: usize, w: f64) -> Result<HermitianMatrix<T>> {
    CheckerboardParams::new(n, k).with_w(w).validate()?;
    let w = T::of(w);
    HermitianMatrix::from_upper(n, DivisionAlgebra::Real, |i, j| {
        Quaternion::real(if i % k == j % k { w } else { T::zero() })
    })
}

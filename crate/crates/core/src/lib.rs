//! Simulation and verification toolkit for `(k, w)`-checkerboard random
//! matrix ensembles over the reals, complexes and quaternions.
//!
//! The core is generic over the float type `T` ([`Real`], implemented for
//! `f32` and `f64`). Exact quantities use big rationals. The aliases below
//! fix `T = f64`.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod analysis;
pub mod cli;
pub mod ensembles;
pub mod error;
pub mod moments;
pub mod rng;
pub mod scalar;
pub mod spectra;

pub use algebra::{DenseMatrix, DivisionAlgebra, HermitianMatrix, Quaternion};
pub use ensembles::{sample_checkerboard, sample_hollow, structured_matrix, CheckerboardParams, HollowParams};
pub use error::{Error, Result};
pub use rng::EntryDistribution;
pub use scalar::Real;
pub use spectra::{
    blip_measure, bulk_measure, eigensolve, histogram, Atom, AtomicMeasure, BlipConfig, Histogram, Spectrum,
};

pub type Matrix = HermitianMatrix<f64>;
pub type Matrix32 = HermitianMatrix<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Measure = AtomicMeasure<f64>;
pub type Moments = moments::MomentVector<f64>;
pub type Quaternion64 = Quaternion<f64>;

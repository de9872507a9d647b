use thiserror::Error;

use crate::algebra::DivisionAlgebra;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("algebra mismatch: expected {expected}, found {found}")]
    AlgebraMismatch {
        expected: DivisionAlgebra,
        found: DivisionAlgebra,
    },

    #[error("construction invariant violated: {0}")]
    Invariant(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("numerical degeneracy: Kramers pair {index} disagrees ({lower} vs {upper})")]
    Degeneracy { index: usize, lower: f64, upper: f64 },

    #[error(
        "regime overlap: eigenvalue {eigenvalue} is {kind} at threshold {threshold} \
         (N too small for the chosen exponent?)"
    )]
    RegimeOverlap {
        eigenvalue: f64,
        threshold: f64,
        kind: &'static str,
    },

    #[error(
        "enumeration budget exceeded: k^m = {k}^{m} tuples > {budget}; \
         use the Monte Carlo estimator instead"
    )]
    Budget { k: usize, m: usize, budget: u64 },

    #[error("precision loss: cancellation ratio {ratio:.3e} exceeds {limit:.0e}")]
    PrecisionLoss { ratio: f64, limit: f64 },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("trial {trial} (seed {seed}): {source}")]
    Trial {
        seed: u64,
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Attaches reproduction coordinates to an error raised inside a trial.
    pub fn in_trial(self, seed: u64, trial: u64) -> Self {
        match self {
            e @ Error::Trial { .. } => e,
            e => Error::Trial {
                seed,
                trial,
                source: Box::new(e),
            },
        }
    }
}

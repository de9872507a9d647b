use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::algebra::DivisionAlgebra;
use crate::analysis::DEFAULT_SPLIT_EXPONENT;
use crate::error::{Error, Result};
use crate::rng::EntryDistribution;
use crate::spectra::{default_blip_trials, default_half_degree};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Full spectra of checkerboard matrices.
    Sample,
    /// Bulk measure moments and histogram.
    Bulk,
    /// Averaged blip measure moments and histogram.
    Blip,
    /// Spectra of hollow Gaussian ensembles.
    Hollow,
    /// Limiting hollow-ensemble moments.
    Oracle,
    /// Two-regime split of checkerboard spectra.
    VerifySplit,
    /// Alternating binomial power-sum identities.
    VerifyIdentities,
    /// Blip sample against hollow-ensemble sample.
    Compare,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Bulk => "bulk",
            Command::Blip => "blip",
            Command::Hollow => "hollow",
            Command::Oracle => "oracle",
            Command::VerifySplit => "verify-split",
            Command::VerifyIdentities => "verify-identities",
            Command::Compare => "compare",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgebraArg {
    Real,
    Complex,
    Quaternion,
}

impl From<AlgebraArg> for DivisionAlgebra {
    fn from(a: AlgebraArg) -> Self {
        match a {
            AlgebraArg::Real => DivisionAlgebra::Real,
            AlgebraArg::Complex => DivisionAlgebra::Complex,
            AlgebraArg::Quaternion => DivisionAlgebra::Quaternion,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Normal,
    Rademacher,
}

impl From<DistArg> for EntryDistribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Normal => EntryDistribution::Normal,
            DistArg::Rademacher => EntryDistribution::Rademacher,
        }
    }
}

/// Checkerboard random matrix experiments.
#[derive(Debug, Parser)]
#[command(name = "checkerboard", version)]
pub struct Args {
    /// Experiment to run; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Checkerboard period.
    #[arg(long)]
    pub k: Option<usize>,
    /// Matrix dimension.
    #[arg(long = "N")]
    pub dimension: Option<usize>,
    /// Value on the congruent positions.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<f64>,
    #[arg(long, value_enum)]
    pub algebra: Option<AlgebraArg>,
    #[arg(long, value_enum)]
    pub dist: Option<DistArg>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Matrices averaged into the blip measure.
    #[arg(long)]
    pub g: Option<usize>,
    /// Half-degree of the blip weight function.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long = "max-m")]
    pub max_m: Option<u32>,
    /// Single moment order (oracle only).
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub exponent: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Partial configuration as read from a file. Manifests written by the tool
/// parse as config files.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub tool_version: Option<String>,
    pub command: Option<Command>,
    #[serde(rename = "N")]
    pub dimension: Option<usize>,
    pub k: Option<usize>,
    pub w: Option<f64>,
    pub algebra: Option<DivisionAlgebra>,
    pub dist: Option<EntryDistribution>,
    pub trials: Option<usize>,
    pub g: Option<usize>,
    pub n: Option<u32>,
    pub max_m: Option<u32>,
    pub m: Option<u32>,
    pub bins: Option<usize>,
    pub exponent: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::param(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| Error::param(format!("invalid config {}: {e}", path.display())))?;
        if let Some(v) = cfg.schema_version {
            if v != SCHEMA_VERSION {
                return Err(Error::param(format!(
                    "config schema version {v} is not supported (expected {SCHEMA_VERSION})"
                )));
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved experiment configuration, echoed into every manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(rename = "N")]
    pub dimension: usize,
    pub k: usize,
    pub w: f64,
    pub algebra: DivisionAlgebra,
    pub dist: EntryDistribution,
    pub trials: usize,
    pub g: usize,
    pub n: u32,
    pub max_m: u32,
    pub m: Option<u32>,
    pub bins: usize,
    pub exponent: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

struct Defaults {
    dimension: usize,
    k: usize,
    w: f64,
    trials: usize,
}

fn defaults(c: Command) -> Defaults {
    let d = |dimension, k, w, trials| Defaults { dimension, k, w, trials };
    match c {
        Command::Sample => d(100, 2, 1.0, 500),
        Command::Bulk => d(400, 2, 0.0, 40),
        Command::Blip => d(600, 2, 1.0, 1),
        Command::Hollow => d(2, 2, 1.0, 32_000),
        Command::Oracle => d(3, 3, 1.0, 10_000),
        Command::VerifySplit => d(300, 3, 1.0, 20),
        Command::VerifyIdentities => d(1, 1, 1.0, 1),
        Command::Compare => d(600, 2, 1.0, 5_000),
    }
}

impl ExperimentConfig {
    /// Flags override the config file, which overrides built-in defaults.
    pub fn resolve(args: &Args) -> Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let command = args
            .command
            .or(file.command)
            .ok_or_else(|| Error::param("no command given on the command line or in the config file"))?;
        let d = defaults(command);
        let dimension = args.dimension.or(file.dimension).unwrap_or(d.dimension);
        let max_m = args.max_m.or(file.max_m).unwrap_or(match command {
            Command::VerifyIdentities => 12,
            _ => 6,
        });
        let cfg = Self {
            command,
            dimension,
            k: args.k.or(file.k).unwrap_or(d.k),
            w: args.w.or(file.w).unwrap_or(d.w),
            algebra: args.algebra.map(Into::into).or(file.algebra).unwrap_or(DivisionAlgebra::Real),
            dist: args.dist.map(Into::into).or(file.dist).unwrap_or_default(),
            trials: args.trials.or(file.trials).unwrap_or(d.trials),
            g: args.g.or(file.g).unwrap_or_else(|| default_blip_trials(dimension)),
            n: args.n.or(file.n).unwrap_or_else(|| default_half_degree(dimension)),
            max_m,
            m: args.m.or(file.m),
            bins: args.bins.or(file.bins).unwrap_or(100),
            exponent: args.exponent.or(file.exponent).unwrap_or(DEFAULT_SPLIT_EXPONENT),
            seed: args.seed.or(file.seed).unwrap_or(0),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            format: args.format.or(file.format).unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::param(msg));
        if self.k == 0 {
            return fail("--k must be positive".into());
        }
        if !self.w.is_finite() {
            return fail(format!("--w must be finite, got {}", self.w));
        }
        if self.bins == 0 {
            return fail("--bins must be positive".into());
        }
        if self.max_m > crate::moments::MAX_MOMENT_ORDER {
            return fail(format!(
                "--max-m {} exceeds the cap {}",
                self.max_m,
                crate::moments::MAX_MOMENT_ORDER
            ));
        }
        let uses_checkerboard = matches!(
            self.command,
            Command::Sample | Command::Bulk | Command::Blip | Command::VerifySplit | Command::Compare
        );
        if uses_checkerboard {
            if self.dimension == 0 {
                return fail("--N must be positive".into());
            }
            if self.k > self.dimension {
                return fail(format!("--k {} must not exceed --N {}", self.k, self.dimension));
            }
        }
        if matches!(self.command, Command::Blip | Command::Compare) {
            if self.g == 0 {
                return fail("--g must be positive".into());
            }
            if self.n == 0 {
                return fail("--n must be positive".into());
            }
        }
        if self.trials == 0 && !matches!(self.command, Command::Oracle | Command::VerifyIdentities | Command::Blip) {
            return fail("--trials must be positive".into());
        }
        if self.command == Command::Oracle && self.trials < 2 {
            return fail("--trials must be at least 2 for the sampling oracle".into());
        }
        if self.command == Command::VerifySplit && !(self.exponent > 0.5 && self.exponent < 1.0) {
            return fail(format!("--exponent {} must lie in (0.5, 1)", self.exponent));
        }
        if self.command == Command::VerifySplit && self.dimension <= self.k {
            return fail(format!("--N {} must exceed --k {} to have a bulk", self.dimension, self.k));
        }
        if self.m.is_some_and(|m| m > crate::moments::MAX_MOMENT_ORDER) {
            return fail(format!("--m exceeds the cap {}", crate::moments::MAX_MOMENT_ORDER));
        }
        Ok(())
    }
}

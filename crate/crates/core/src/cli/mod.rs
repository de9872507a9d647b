//! Command-line front end: configuration, experiment pipelines and artifact
//! emission.

mod config;
mod output;

use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

pub use config::{AlgebraArg, Args, Command, ConfigFile, DistArg, ExperimentConfig, Format, SCHEMA_VERSION};
pub use output::{emit_histogram_bundle, manifest, Artifacts, Cell, Table, CSV_HEADER, MANIFEST};

use crate::analysis::{centered_blip_sample, compare_blip_to_hollow, split_regimes, weyl_check};
use crate::ensembles::{sample_checkerboard, sample_hollow, structured_matrix, CheckerboardParams, HollowParams};
use crate::error::{Error, Result};
use crate::moments::exact::factorial;
use crate::moments::{
    blip_limit_moment, combinatorial_identity, hollow_moment_oracle_with, measure_moments, semicircle_moment,
    MonteCarloOptions, OracleMethod,
};
use crate::spectra::{
    blip_histogram_range, blip_measure, bulk_measure, eigensolve, sample_spectra, Atom, AtomicMeasure, BlipConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Result of a pipeline before anything touches the disk.
#[derive(Debug)]
pub struct Outcome {
    pub artifacts: Artifacts,
    pub summary: String,
    /// `false` when a verification command found a violation.
    pub verified: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            EXIT_OK
        } else {
            EXIT_VERIFICATION_FAILED
        }
    }
}

/// Exit status for an error raised before or during a run.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::Budget { .. } => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

/// Runs the configured pipeline and returns its artifacts, manifest included.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = match cfg.command {
        Command::Sample => run_sample(cfg),
        Command::Bulk => run_bulk(cfg),
        Command::Blip => run_blip(cfg),
        Command::Hollow => run_hollow(cfg),
        Command::Oracle => run_oracle(cfg),
        Command::VerifySplit => run_verify_split(cfg),
        Command::VerifyIdentities => run_verify_identities(cfg),
        Command::Compare => run_compare(cfg),
    }?;
    out.artifacts.add(MANIFEST, manifest(cfg));
    Ok(out)
}

/// Executes and writes the artifacts into `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = execute(cfg)?;
    out.artifacts.commit(&cfg.out)?;
    Ok(out)
}

fn checkerboard_params(cfg: &ExperimentConfig) -> CheckerboardParams {
    CheckerboardParams::new(cfg.dimension, cfg.k)
        .with_w(cfg.w)
        .with_algebra(cfg.algebra)
        .with_distribution(cfg.dist)
        .with_seed(cfg.seed)
}

fn eigenvalue_table(spectra: &[Vec<f64>]) -> Table {
    let mut t = Table::new(&["trial", "index", "eigenvalue"]);
    for (trial, s) in spectra.iter().enumerate() {
        for (i, &l) in s.iter().enumerate() {
            t.push(vec![trial.into(), i.into(), l.into()]);
        }
    }
    t
}

fn uniform_measure(spectra: &[Vec<f64>], note: String) -> Result<AtomicMeasure<f64>> {
    let total: usize = spectra.iter().map(Vec::len).sum();
    let weight = 1.0 / total as f64;
    let atoms = spectra
        .iter()
        .flatten()
        .map(|&location| Atom { location, weight })
        .collect();
    AtomicMeasure::new(atoms, note)
}

fn run_sample(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = checkerboard_params(cfg);
    let spectra: Vec<Vec<f64>> = sample_spectra::<f64>(&params, 0..cfg.trials as u64)?
        .into_iter()
        .map(|s| s.eigenvalues().to_vec())
        .collect();
    let mut artifacts = Artifacts::default();
    artifacts.table("eigenvalues", &eigenvalue_table(&spectra), cfg.format);
    let note = format!("eigenvalues of {} ({},{})-checkerboard matrices", cfg.trials, cfg.k, cfg.w);
    emit_histogram_bundle(&mut artifacts, "spectrum", &uniform_measure(&spectra, note)?, cfg, None, "eigenvalue")?;
    let top = spectra.iter().map(|s| s[s.len() - 1]).sum::<f64>() / spectra.len() as f64;
    Ok(Outcome {
        artifacts,
        summary: format!(
            "sampled {} spectra of size {}; mean top eigenvalue {top:.4} (Nw/k = {:.4})\n",
            cfg.trials,
            cfg.dimension,
            cfg.dimension as f64 * cfg.w / cfg.k as f64
        ),
        verified: true,
    })
}

fn run_bulk(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = checkerboard_params(cfg);
    let measures = sample_spectra::<f64>(&params, 0..cfg.trials as u64)?
        .iter()
        .map(bulk_measure)
        .collect::<Result<Vec<_>>>()?;
    let avg = AtomicMeasure::average(&measures)?;
    let mv = measure_moments(&avg, cfg.max_m, None)?;
    let mut t = Table::new(&["m", "moment", "stderr", "semicircle"]);
    let mut summary = String::from("m  moment  stderr  semicircle\n");
    for (m, v) in mv.values.iter().enumerate() {
        let target = semicircle_moment(m as u32, cfg.k).to_f64().unwrap_or(f64::NAN);
        let se = mv.stderr(m);
        t.push(vec![m.into(), (*v).into(), se.into(), target.into()]);
        let _ = writeln!(summary, "{m}  {v:.5}  {:.5}  {target:.5}", se.unwrap_or(f64::NAN));
    }
    let mut artifacts = Artifacts::default();
    artifacts.table("moments", &t, cfg.format);
    emit_histogram_bundle(&mut artifacts, "bulk", &avg, cfg, None, "eigenvalue / sqrt(N)")?;
    Ok(Outcome {
        artifacts,
        summary,
        verified: true,
    })
}

fn limit_or_empty(k: usize, m: u32, cfg: &ExperimentConfig, mc: &MonteCarloOptions) -> Result<Option<f64>> {
    match blip_limit_moment(k, m, cfg.algebra, true, mc) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Budget { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_blip(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = checkerboard_params(cfg);
    let blip = BlipConfig::new(cfg.dimension, cfg.k).with_n(cfg.n);
    let measures = sample_spectra::<f64>(&params, 0..cfg.g as u64)?
        .iter()
        .map(|s| blip_measure(s, cfg.k, &blip))
        .collect::<Result<Vec<_>>>()?;
    let avg = AtomicMeasure::average(&measures)?;
    let center = cfg.k as f64 - 1.0;
    let centered = measure_moments(&avg, cfg.max_m, Some(center))?;
    let raw = measure_moments(&avg, cfg.max_m, None)?;
    let mc = MonteCarloOptions {
        seed: cfg.seed,
        ..MonteCarloOptions::default()
    };
    let mut t = Table::new(&["m", "centered", "centered_stderr", "uncentered", "uncentered_stderr", "limit"]);
    let mut summary = format!("centered about k-1 = {center}\nm  centered  stderr  limit\n");
    for m in 0..=cfg.max_m as usize {
        let limit = limit_or_empty(cfg.k, m as u32, cfg, &mc)?;
        t.push(vec![
            m.into(),
            centered.values[m].into(),
            centered.stderr(m).into(),
            raw.values[m].into(),
            raw.stderr(m).into(),
            limit.into(),
        ]);
        let _ = writeln!(
            summary,
            "{m}  {:.5}  {:.5}  {}",
            centered.values[m],
            centered.stderr(m).unwrap_or(f64::NAN),
            limit.map_or("-".to_owned(), |l| format!("{l:.5}"))
        );
    }
    let mut artifacts = Artifacts::default();
    artifacts.table("moments", &t, cfg.format);
    emit_histogram_bundle(
        &mut artifacts,
        "blip",
        &avg.shifted(center),
        cfg,
        Some(blip_histogram_range(cfg.k)),
        "eigenvalue - N/k - (k - 1)",
    )?;
    Ok(Outcome {
        artifacts,
        summary,
        verified: true,
    })
}

fn run_hollow(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = HollowParams::new(cfg.k, cfg.algebra).with_seed(cfg.seed);
    params.validate()?;
    let spectra: Vec<Vec<f64>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = eigensolve(&sample_hollow::<f64>(&params, t)?).map_err(|e| e.in_trial(cfg.seed, t))?;
            Ok(s.eigenvalues().to_vec())
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["m", "moment", "stderr", "oracle"]);
    let mut summary = String::from("m  moment  stderr  oracle\n");
    let n = spectra.len() as f64;
    for m in 0..=cfg.max_m {
        let per: Vec<f64> = spectra
            .iter()
            .map(|s| s.iter().map(|x| x.powi(m as i32)).sum::<f64>() / cfg.k as f64)
            .collect();
        let mean = per.iter().sum::<f64>() / n;
        let se = (per.len() > 1)
            .then(|| (per.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt());
        let oracle = if cfg.algebra == crate::algebra::DivisionAlgebra::Quaternion {
            None
        } else {
            match hollow_moment_oracle_with(cfg.k, m, cfg.algebra, &MonteCarloOptions::default()) {
                Ok(r) => Some(r.as_f64()),
                Err(Error::Budget { .. }) => None,
                Err(e) => return Err(e),
            }
        };
        t.push(vec![m.into(), mean.into(), se.into(), oracle.into()]);
        let _ = writeln!(
            summary,
            "{m}  {mean:.5}  {:.5}  {}",
            se.unwrap_or(f64::NAN),
            oracle.map_or("-".to_owned(), |o| format!("{o:.5}"))
        );
    }
    let mut artifacts = Artifacts::default();
    artifacts.table("eigenvalues", &eigenvalue_table(&spectra), cfg.format);
    artifacts.table("moments", &t, cfg.format);
    let note = format!("eigenvalues of {} {}x{} hollow {} matrices", cfg.trials, cfg.k, cfg.k, cfg.algebra);
    emit_histogram_bundle(&mut artifacts, "hollow", &uniform_measure(&spectra, note)?, cfg, None, "eigenvalue")?;
    Ok(Outcome {
        artifacts,
        summary,
        verified: true,
    })
}

fn run_oracle(cfg: &ExperimentConfig) -> Result<Outcome> {
    let orders: Vec<u32> = match cfg.m {
        Some(m) => vec![m],
        None => (0..=cfg.max_m).collect(),
    };
    let mc = MonteCarloOptions {
        trials: cfg.trials,
        seed: cfg.seed,
    };
    let mut t = Table::new(&["k", "m", "algebra", "value", "exact", "stderr", "method"]);
    let mut summary = String::new();
    for m in orders {
        let r = hollow_moment_oracle_with(cfg.k, m, cfg.algebra, &mc)?;
        let exact = r.exact().map(|q| q.to_string());
        let method = match r.method {
            OracleMethod::WickExact => "wick",
            OracleMethod::MonteCarlo => "monte-carlo",
        };
        match &exact {
            Some(q) => {
                let _ = writeln!(summary, "M[k={}, m={m}, {}] = {q}", cfg.k, cfg.algebra);
            }
            None => {
                let _ = writeln!(
                    summary,
                    "M[k={}, m={m}, {}] ~ {:.6} +/- {:.6}",
                    cfg.k,
                    cfg.algebra,
                    r.as_f64(),
                    r.stderr()
                );
            }
        }
        let se = if exact.is_some() { None } else { Some(r.stderr()) };
        t.push(vec![
            cfg.k.into(),
            m.into(),
            cfg.algebra.as_str().into(),
            r.as_f64().into(),
            exact.into(),
            se.into(),
            method.into(),
        ]);
    }
    let mut artifacts = Artifacts::default();
    artifacts.table("oracle", &t, cfg.format);
    Ok(Outcome {
        artifacts,
        summary,
        verified: true,
    })
}

fn run_verify_split(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = checkerboard_params(cfg);
    let base = params.clone().with_w(0.0);
    let z = structured_matrix::<f64>(cfg.dimension, cfg.k, cfg.w)?;
    let rows = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let with_w = sample_checkerboard::<f64>(&params, t)?;
            let split = split_regimes(&eigensolve(&with_w)?, cfg.k, cfg.w, cfg.exponent);
            // the w = 0 matrix with the same seed differs from the sampled one by Z exactly
            let h = sample_checkerboard::<f64>(&base, t)?;
            let weyl = weyl_check(&h, &z)?;
            Ok((split, weyl))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "trial",
        "status",
        "blip_count",
        "bulk_count",
        "max_blip_deviation",
        "max_bulk_magnitude",
        "threshold",
        "weyl_max_deviation",
        "weyl_operator_norm",
        "weyl_satisfied",
    ]);
    let mut failures = 0usize;
    for (trial, (split, weyl)) in rows.into_iter().enumerate() {
        let (status, cells): (String, [Cell; 5]) = match split {
            Ok(s) => {
                let dev = s.blip_eigenvalues.iter().map(|x| (x - s.target).abs()).fold(0.0, f64::max);
                let mag = s.bulk_eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
                let status = if s.blip_eigenvalues.len() == cfg.k { "ok" } else { "wrong-count" };
                (
                    status.to_owned(),
                    [
                        s.blip_eigenvalues.len().into(),
                        s.bulk_eigenvalues.len().into(),
                        dev.into(),
                        mag.into(),
                        s.threshold.into(),
                    ],
                )
            }
            Err(Error::RegimeOverlap { .. }) => (
                "overlap".to_owned(),
                [Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty],
            ),
            Err(e) => return Err(e.in_trial(cfg.seed, trial as u64)),
        };
        if status != "ok" || !weyl.satisfied {
            failures += 1;
        }
        let mut row = vec![trial.into(), status.into()];
        row.extend(cells);
        row.extend([weyl.max_deviation.into(), weyl.operator_norm.into(), weyl.satisfied.into()]);
        t.push(row);
    }
    let mut artifacts = Artifacts::default();
    artifacts.table("split", &t, cfg.format);
    Ok(Outcome {
        artifacts,
        summary: format!(
            "{} of {} trials split into {} blip and {} bulk eigenvalues with Weyl bound satisfied\n",
            cfg.trials - failures,
            cfg.trials,
            cfg.k,
            cfg.dimension - cfg.k
        ),
        verified: failures == 0,
    })
}

fn run_verify_identities(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut t = Table::new(&["m", "p", "value", "expected", "pass"]);
    let mut failures = 0usize;
    let mut checks = 0usize;
    for m in 0..=cfg.max_m {
        for p in 0..=m {
            let value = combinatorial_identity(m, p);
            let expected = if p < m {
                num_bigint::BigInt::zero()
            } else {
                let f = num_bigint::BigInt::from(factorial(m));
                if m % 2 == 0 {
                    f
                } else {
                    -f
                }
            };
            let pass = value == expected;
            checks += 1;
            if !pass {
                failures += 1;
            }
            t.push(vec![m.into(), p.into(), value.to_string().into(), expected.to_string().into(), pass.into()]);
        }
    }
    let mut artifacts = Artifacts::default();
    artifacts.table("identities", &t, cfg.format);
    Ok(Outcome {
        artifacts,
        summary: format!("{} of {checks} identities hold for m <= {}\n", checks - failures, cfg.max_m),
        verified: failures == 0,
    })
}

fn run_compare(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = checkerboard_params(cfg);
    let blip = BlipConfig::new(cfg.dimension, cfg.k).with_n(cfg.n);
    let atoms = centered_blip_sample::<f64>(&params, cfg.g, &blip)?;
    let r = compare_blip_to_hollow(&atoms, cfg.k, cfg.algebra, cfg.trials, cfg.seed)?;
    let mut t = Table::new(&["m", "blip", "hollow", "distance"]);
    let mut summary = String::from("m  blip  hollow  distance\n");
    for (i, d) in r.moment_distances.iter().enumerate() {
        t.push(vec![(i + 1).into(), r.blip_moments[i].into(), r.hollow_moments[i].into(), (*d).into()]);
        let _ = writeln!(
            summary,
            "{}  {:.5}  {:.5}  {d:.5}",
            i + 1,
            r.blip_moments[i],
            r.hollow_moments[i]
        );
    }
    let _ = writeln!(summary, "KS statistic {:.5}", r.ks_statistic);
    let mut s = Table::new(&["statistic", "value"]);
    s.push(vec!["ks_statistic".into(), r.ks_statistic.into()]);
    s.push(vec!["blip_atoms".into(), r.sample_sizes.0.into()]);
    s.push(vec!["hollow_atoms".into(), r.sample_sizes.1.into()]);
    let mut artifacts = Artifacts::default();
    artifacts.table("comparison", &t, cfg.format);
    artifacts.table("comparison_summary", &s, cfg.format);
    Ok(Outcome {
        artifacts,
        summary,
        verified: true,
    })
}

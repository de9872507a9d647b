use std::process::ExitCode;

use clap::Parser;

use checkerboard_rmt::cli::{error_exit_code, run, Args, ExperimentConfig, EXIT_USAGE};

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CHECKERBOARD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CHECKERBOARD_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let result = ExperimentConfig::resolve(&args).and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, outcome)) => {
            print!("{}", outcome.summary);
            println!("wrote {} files to {}", outcome.artifacts.names().count(), cfg.out.display());
            if !outcome.verified {
                eprintln!("verification failed");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}

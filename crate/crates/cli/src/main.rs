use std::process::ExitCode;

use btps_cli::{resolve, run, Args, CliError};
use clap::Parser;

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BTPS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config("BTPS_THREADS", format!("expected a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config("BTPS_THREADS", e.to_string()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = init_threads().and_then(|_| resolve(&args)).and_then(|cfg| run(&cfg).map(|s| s.to_line(&cfg)));
    match outcome {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("btps: {e}");
            println!("{}", btps_cli::run::error_line(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

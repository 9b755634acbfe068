//! Command-line front end of gpscav: configuration, subcommands and
//! output files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

pub use commands::{execute, Command, Report};
pub use config::RunConfig;
pub use error::CliError;

/// Worker count: `GPSCAV_THREADS` wins over `run.threads`; 0 means all
/// cores.
pub fn thread_count(cfg: &RunConfig) -> Result<usize, CliError> {
    match std::env::var("GPSCAV_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("GPSCAV_THREADS: `{v}` is not a non-negative integer"))),
        Err(_) => Ok(cfg.run.threads),
    }
}

/// Loads the config, runs `cmd` and writes its outputs into `output`
/// (default `run.output_dir`). Nothing is written unless the command
/// succeeds.
pub fn run(cmd: Command, config: &Path, output: Option<&Path>) -> Result<(Vec<PathBuf>, Vec<String>), CliError> {
    let cfg = RunConfig::load(config)?;
    let threads = thread_count(&cfg)?;
    if threads > 0 {
        // Fails harmlessly when a pool already exists in this process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let report = execute(cmd, &cfg)?;
    let dir = output.map(Path::to_path_buf).unwrap_or_else(|| cfg.run.output_dir.clone());
    let written = report.outputs.write(&dir)?;
    Ok((written, report.lines))
}

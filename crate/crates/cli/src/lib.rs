//! The `bispec` command-line front end.
//!
//! Each command resolves its arguments into [`Params`], runs, and writes a
//! [`RunManifest`] next to its outputs. `bispec replay <manifest>` re-runs
//! the recorded parameters and rewrites byte-identical files.
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 numerical
//! failure.

pub mod args;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod specfile;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

pub use args::{Cli, Command};
pub use commands::Params;
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;

/// Runs one parsed invocation. `argv` is recorded in the manifest.
pub fn run(cli: Cli, argv: Vec<String>) -> CliResult<RunManifest> {
    match cli.threads {
        Some(0) => Err(CliError::invalid("invalid parameter `threads`: must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))?
            .install(|| dispatch(cli.command, argv)),
        None => dispatch(cli.command, argv),
    }
}

fn dispatch(command: Command, argv: Vec<String>) -> CliResult<RunManifest> {
    let (params, args) = match &command {
        Command::Simulate(a) => (Params::simulate(a)?, argv),
        Command::Estimate(a) => (Params::estimate(a)?, argv),
        Command::Average(a) => (Params::average(a)?, argv),
        Command::BiasStudy(a) => (Params::bias_study(a)?, argv),
        Command::Section5(a) => (Params::section5(a)?, argv),
        Command::Replay(a) => {
            let recorded = RunManifest::read(&a.manifest)?;
            (recorded.params, recorded.args)
        }
    };
    let start = Instant::now();
    let outputs = params.execute()?;
    let manifest = RunManifest {
        command: params.name().to_string(),
        args,
        seed: params.seed(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
        duration_secs: start.elapsed().as_secs_f64(),
        params,
    };
    manifest.write(&manifest.params.manifest_path())?;
    Ok(manifest)
}

/// Parses `argv` (program name first), runs, reports errors on stderr and
/// returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let recorded = argv.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect();
    match run(cli, recorded) {
        Ok(m) => {
            for out in &m.outputs {
                println!("{}", out.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

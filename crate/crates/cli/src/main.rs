//! `bergkern`: weighted Bergman kernels from the command line.
//!
//! Exit status 0 on success, 2 for an invalid configuration, 3 when the
//! computation fails (the error name goes to stderr).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{run, CliError, Command, Options};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "bergkern", version, about = "Weighted Bergman kernels on the disk and annulus")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write an SVG heatmap (zeros).
    #[arg(long)]
    svg: bool,
    /// Print the validated configuration and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kernel values at point pairs.
    Eval(Common),
    /// Closed-form expression of the kernel.
    Formula(Common),
    /// Reproducing-property residuals by quadrature.
    Verify(Common),
    /// Transform kernel against the Gram-matrix kernel.
    OracleCompare(Common),
    /// Zeros of a kernel slice.
    Zeros(Common),
    /// Kernel ratio along centers approaching the boundary.
    Ratio(Common),
    /// Zero tracking under deflation near the boundary.
    Track(Common),
    /// Non-Lu-Qi-keng certificate for a Hartogs domain.
    Hartogs(Common),
}

fn split(cmd: Cmd) -> (Command, Common) {
    match cmd {
        Cmd::Eval(c) => (Command::Eval, c),
        Cmd::Formula(c) => (Command::Formula, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::OracleCompare(c) => (Command::OracleCompare, c),
        Cmd::Zeros(c) => (Command::Zeros, c),
        Cmd::Ratio(c) => (Command::Ratio, c),
        Cmd::Track(c) => (Command::Track, c),
        Cmd::Hartogs(c) => (Command::Hartogs, c),
    }
}

fn main() -> ExitCode {
    let (command, common) = split(Cli::parse().command);
    let result = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))
        .and_then(|text| RunConfig::from_json(&text).map_err(CliError::Config))
        .and_then(|cfg| {
            if common.dump_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            let opts = Options {
                out: common.out,
                seed: common.seed,
                svg: common.svg,
            };
            run(command, &cfg, &opts)
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

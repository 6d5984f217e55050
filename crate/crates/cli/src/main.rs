use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixedderiv::{cmd_list_equations, cmd_simulate, cmd_spectral_error, cmd_verify};
use mixedderiv_core::spectral::{DEFAULT_NODES, DEFAULT_SAMPLES};

#[derive(Parser)]
#[command(name = "mixedderiv", version, about = "Periodic PDEs with a mixed derivative (u_t + g)_x = f")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured simulation; writes states.csv, monitors.csv and manifest.json.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate relative errors of operator pairs against the exact band integral.
    SpectralError {
        /// Comma-separated labels, or stencil JSON (inline or a .json file).
        #[arg(long)]
        ops: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Run invariant suites: pseudoinverse, reformulation, conservation, equivalence, spectral or all.
    Verify {
        suite: String,
        #[arg(long, default_value = "results.json")]
        out: PathBuf,
    },
    /// Print the equation catalog.
    ListEquations,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
        Command::SpectralError { ops, out, nodes, samples } => cmd_spectral_error(ops.as_deref(), &out, nodes, samples),
        Command::Verify { suite, out } => cmd_verify(&suite, &out),
        Command::ListEquations => cmd_list_equations(),
    };
    ExitCode::from(code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mdl_reconcile::cli::{cmd_check, cmd_solve};
use mdl_reconcile::{OutputFormat, SolverConfig};

#[derive(Parser)]
#[command(name = "mdlsolve", version, about = "Reconcile component interfaces of a process network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the constraints induced by a netlist.
    Solve {
        netlist: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        max_iterations: u64,
        /// Print a per-constraint trace to stderr.
        #[arg(long)]
        trace: bool,
        /// Write the final assertion set in DIMACS form.
        #[arg(long)]
        dimacs: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Re-verify a solution report against a netlist.
    Check { netlist: PathBuf, solution: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let code = match cli.command {
        Command::Solve {
            netlist,
            max_iterations,
            trace,
            dimacs,
            format,
        } => {
            let config = SolverConfig {
                max_iterations: max_iterations as usize,
                trace,
                dimacs_path: dimacs,
                output_format: match format {
                    Format::Json => OutputFormat::Json,
                    Format::Text => OutputFormat::Text,
                },
            };
            cmd_solve(&netlist, &config, &mut out, &mut err)
        }
        Command::Check { netlist, solution } => cmd_check(&netlist, &solution, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}

//! `qsd`: command-line front end for the QSD toolkit.
//!
//! Exit codes: 0 when every bound check passes, 1 when one fails, 2 for
//! usage or input errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qsd",
    version,
    about = "Exact small-scale experiments around Quantum State Distinguishability"
)]
struct Cli {
    /// Print `key=value` lines instead of the human-readable report.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace distance and fidelity of the states two circuits prepare.
    Dist { q0: PathBuf, q1: PathBuf },
    /// Polarize a circuit pair and optionally write the result.
    Polarize {
        q0: PathBuf,
        q1: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Directory for r0.qc and r1.qc.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the distance or closeness protocol exactly.
    Protocol {
        #[arg(value_enum)]
        kind: ProtocolArg,
        q0: PathBuf,
        q1: PathBuf,
        /// honest, random:<seed> or file:<kraus file>.
        #[arg(long, default_value = "honest")]
        prover: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Also report the acceptance rate of this many sampled runs.
        #[arg(long)]
        shots: Option<u64>,
        /// Seed for sampled runs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Turn a proof-system description into a QSD instance.
    Reduce {
        system: PathBuf,
        /// Directory for q0.qc and q1.qc.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Bound on the maximum acceptance to use in the gap check, instead
        /// of computing it (needed for more than two messages).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Trace norm of a matrix file to 2^-k.
    Tna {
        matrix: PathBuf,
        #[arg(short = 'k', long = "bits")]
        k: u32,
        #[arg(long, value_enum, default_value = "charpoly")]
        method: MethodArg,
    },
}

#[derive(Args, Clone, Debug, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Distance,
    Closeness,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Charpoly,
    Eig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::iter::once("qsd".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    let outcome = match cli.command {
        Command::Dist { q0, q1 } => commands::dist(&echo, &q0, &q1),
        Command::Polarize {
            q0,
            q1,
            params,
            out,
        } => commands::polarize(&echo, &q0, &q1, &params, out.as_deref()),
        Command::Protocol {
            kind,
            q0,
            q1,
            prover,
            params,
            shots,
            seed,
        } => {
            let kind = match kind {
                ProtocolArg::Distance => qsd_core::protocols::ProtocolKind::Distance,
                ProtocolArg::Closeness => qsd_core::protocols::ProtocolKind::Closeness,
            };
            commands::protocol(&echo, kind, &q0, &q1, &prover, &params, shots, seed)
        }
        Command::Reduce {
            system,
            out,
            epsilon,
        } => commands::reduce(&echo, &system, out.as_deref(), epsilon),
        Command::Tna { matrix, k, method } => {
            let method = match method {
                MethodArg::Charpoly => qsd_core::tna::TnaMethod::CharPoly,
                MethodArg::Eig => qsd_core::tna::TnaMethod::Eig,
            };
            commands::tna(&echo, &matrix, k, method)
        }
    };
    match outcome {
        Ok(report) => {
            print!("{}", report.render(cli.machine));
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

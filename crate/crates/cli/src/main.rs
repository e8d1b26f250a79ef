mod commands;
mod report;

use clap::{Parser, Subcommand};
use commands::Opts;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qclif", version, about = "Weyl-Heisenberg and Clifford group structures of qudit systems")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks and random circuits.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on closure sizes (default 10^4 for dense closures, 10^6 for Sp closures).
    #[arg(long, global = true)]
    max_closure: Option<usize>,
    /// Cap on the brute-force Sp search space (default 2^24).
    #[arg(long, global = true)]
    max_enum: Option<u128>,
    /// Per-dimension tolerance of dense comparisons (matrices of size N use tol·N).
    #[arg(long, global = true, env = "QC_TOL")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cardinalities of P_N, SL(2,Z_N) and P_N ⋊ SL(2,Z_N).
    Orders {
        #[arg(long, default_value_t = 8)]
        max: u64,
    },
    /// Single-system invariant suite for 2 <= N <= 8.
    VerifySingle { n: u64 },
    /// Generator checks for a composite system, e.g. `verify-multi 2 3`.
    VerifyMulti {
        #[arg(required = true, num_args = 1..)]
        dims: Vec<u64>,
    },
    /// Elementary divisor decomposition of Sp_[dims].
    Decompose {
        #[arg(required = true, num_args = 1..)]
        dims: Vec<u64>,
    },
    /// Shortest S/D word for the matrix [[a, b], [c, d]] mod N.
    Lift { n: u64, a: u64, b: u64, c: u64, d: u64 },
    /// Size of Sp_[dims] generated by S, D and R_ij, or with --finite the dense closure of S_N, D_N.
    Closure {
        #[arg(num_args = 0.., required_unless_present = "finite", conflicts_with = "finite")]
        dims: Vec<u64>,
        #[arg(long)]
        finite: Option<u64>,
    },
    /// Clifford circuit simulation.
    Sim {
        #[command(subcommand)]
        action: SimAction,
    },
}

#[derive(Subcommand)]
enum SimAction {
    /// Simulate a circuit file and print the tableau.
    Run { circuit: PathBuf },
    /// Compare the simulator with the dense oracle (total dimension <= 36).
    Verify { circuit: PathBuf },
    /// Time a random circuit.
    Bench {
        /// `3x50` for fifty qutrits, or a list such as `2,3,4`.
        #[arg(long, default_value = "3x50")]
        dims: String,
        #[arg(long, default_value_t = 10_000)]
        gates: usize,
    },
}

fn dims(v: Vec<u64>) -> anyhow::Result<qudit_clifford::multipartite::DimList> {
    Ok(qudit_clifford::multipartite::DimList::new(v)?)
}

fn run(cli: Cli) -> anyhow::Result<report::Report> {
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            anyhow::bail!("tolerance must be positive, got {tol}");
        }
        qudit_clifford::dense::set_tolerance_per_dim(tol);
    }
    let opts = Opts { seed: cli.seed, max_closure: cli.max_closure, max_enum: cli.max_enum };
    match cli.command {
        Command::Orders { max } => commands::orders(max),
        Command::VerifySingle { n } => commands::verify_single(n, &opts),
        Command::VerifyMulti { dims: d } => commands::verify_multi(&dims(d)?, &opts),
        Command::Decompose { dims: d } => commands::decompose(&dims(d)?, &opts),
        Command::Lift { n, a, b, c, d } => commands::lift(n, a, b, c, d),
        Command::Closure { finite: Some(n), .. } => commands::closure_finite(n, &opts),
        Command::Closure { dims: d, finite: None } => commands::closure_sp(&dims(d)?, &opts),
        Command::Sim { action } => match action {
            SimAction::Run { circuit } => commands::sim_run(&circuit),
            SimAction::Verify { circuit } => commands::sim_verify(&circuit),
            SimAction::Bench { dims, gates } => commands::sim_bench(&commands::parse_dims(&dims)?, gates, opts.seed),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(rep) => {
            let text = if json { rep.render_json() + "\n" } else { rep.render_text() };
            // a closed pipe (e.g. `| head`) is not an error of the command
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if rep.all_pass() {
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

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geoadapt::adapt::Algorithm;
use geoadapt::eigen::DEFAULT_SEED;
use geoadapt::fermion::{MoleculeSpec, PoolOptions};
use geoadapt_cli::commands::{self, FciMethod, Overrides};
use geoadapt_cli::fixtures;
use geoadapt_cli::CliError;

#[derive(Parser)]
#[command(name = "geoadapt", version, about = "Geometry-aware adaptive VQE on exact statevectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization and write trace, summary and plots.
    Run {
        /// TOML config file.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Ground-state energy of a Hamiltonian.
    Fci {
        /// Hamiltonian file or built-in fixture name.
        hamiltonian: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// List the excitation pool for a system.
    Pool {
        #[arg(long, conflicts_with = "hamiltonian")]
        n_qubits: Option<usize>,
        #[arg(long)]
        n_electrons: Option<usize>,
        /// Hamiltonian file or fixture supplying the system size.
        #[arg(long)]
        hamiltonian: Option<String>,
        /// Include spin-flipping excitations.
        #[arg(long)]
        no_spin_filter: bool,
    },
    /// Plot one or more trace CSVs.
    Plot {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(short, long, default_value = commands::DEFAULT_OUT_DIR)]
        out_dir: PathBuf,
        /// Draws a reference line at this parameter count.
        #[arg(long)]
        uccsd_params: Option<usize>,
    },
    /// Run the grid in the config's [sweep] section.
    Sweep {
        #[arg(short, long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Check a Hamiltonian file and/or a config.
    Validate {
        #[arg(long)]
        hamiltonian: Option<String>,
        #[arg(short, long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    hamiltonian: Option<String>,
    #[arg(short, long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long)]
    max_outer: Option<usize>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            hamiltonian: a.hamiltonian,
            out_dir: a.out_dir,
            seed: a.seed,
            algorithm: a.algorithm,
            eps: a.eps,
            eta: a.eta,
            kappa: a.kappa,
            max_outer: a.max_outer,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Lanczos,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).map_err(|e| e.to_string())
}

fn pool_spec(
    n_qubits: Option<usize>,
    n_electrons: Option<usize>,
    hamiltonian: Option<String>,
) -> Result<MoleculeSpec, CliError> {
    if let Some(h) = hamiltonian {
        return fixtures::load(&h, None, DEFAULT_SEED)?.spec(n_electrons);
    }
    match (n_qubits, n_electrons) {
        (Some(q), Some(e)) => Ok(MoleculeSpec::new(q, e, "")?),
        _ => Err(CliError::Validation("pool needs --hamiltonian or both --n-qubits and --n-electrons".into())),
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, overrides } => {
            commands::cmd_run(config.as_deref(), &overrides.into(), out)?;
        }
        Command::Fci { hamiltonian, method, seed } => {
            let m = match method {
                MethodArg::Auto => FciMethod::Auto,
                MethodArg::Dense => FciMethod::Dense,
                MethodArg::Lanczos => FciMethod::Lanczos,
            };
            commands::cmd_fci(&hamiltonian, seed, m, out)?;
        }
        Command::Pool { n_qubits, n_electrons, hamiltonian, no_spin_filter } => {
            let spec = pool_spec(n_qubits, n_electrons, hamiltonian)?;
            let opts = PoolOptions { spin_conserving: !no_spin_filter };
            commands::cmd_pool(&spec, &opts, out)?;
        }
        Command::Plot { traces, out_dir, uccsd_params } => commands::cmd_plot(&traces, &out_dir, uccsd_params, out)?,
        Command::Sweep { config, overrides } => {
            commands::cmd_sweep(&config, &overrides.into(), out)?;
        }
        Command::Validate { hamiltonian, config } => {
            commands::cmd_validate(hamiltonian.as_deref(), config.as_deref(), out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

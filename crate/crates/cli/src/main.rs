//! `kicktop`: batch driver for the dissipative kicked-top simulations.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::FileConfig;
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "kicktop",
    version,
    about = "Dissipative kicked top: mean-field maps and quantum trajectories"
)]
struct Cli {
    /// JSON file with parameter values; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "KICKTOP_THREADS")]
    threads: Option<usize>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

/// Parameters shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Transverse field h.
    #[arg(long)]
    pub h: Option<f64>,
    /// Driving period τ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Mean-field RK4 step.
    #[arg(long = "dt-mf")]
    pub dt_mf: Option<f64>,
    /// Quantum-jump time step δt.
    #[arg(long = "dt-q")]
    pub dt_q: Option<f64>,
    /// Base RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialArg {
    /// Polarized for γ > 0, random coherent states for γ = 0.
    Auto,
    Polarized,
    RandomCoherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    WaitingTime,
    PerStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeArg {
    Mz,
    Sre,
    Ee,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitArg {
    /// `y = A N^α`
    Power,
    /// `y = α + β ln(N + 1)`
    Log,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stroboscopic mean-field orbits from random initial conditions.
    Poincare {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "K")]
        kick: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Number of random initial conditions [default: 300].
        #[arg(long = "n-init")]
        n_init: Option<usize>,
        /// Periods per orbit [default: 1000].
        #[arg(long = "n-periods")]
        n_periods: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Largest Lyapunov exponent over a (K, γ) grid.
    LyapunovMap {
        #[command(flatten)]
        model: ModelArgs,
        /// Kick range `lo:hi` [default: 0:10].
        #[arg(long = "K-range")]
        k_range: Option<String>,
        /// Decay range `lo:hi` [default: 0:1].
        #[arg(long = "gamma-range")]
        gamma_range: Option<String>,
        /// Grid size, `n` or `nK x nγ` [default: 50].
        #[arg(long)]
        grid: Option<String>,
        /// Periods in the exponent sum [default: 1000].
        #[arg(long = "n-periods")]
        n_periods: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Late-time values of one magnetization component versus K.
    Bifurcation {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        gamma: Option<f64>,
        /// Kick range `lo:hi` [default: 0:10].
        #[arg(long = "K-range")]
        k_range: Option<String>,
        /// Number of kick values [default: 200].
        #[arg(long = "n-K")]
        n_k: Option<usize>,
        /// Periods per run [default: 10000].
        #[arg(long = "n-periods")]
        n_periods: Option<usize>,
        /// Final periods kept [default: 250].
        #[arg(long)]
        keep: Option<usize>,
        #[arg(long, value_enum, default_value_t = ComponentArg::Y)]
        component: ComponentArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Box-counting dimension of the stroboscopic point set.
    Hausdorff {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "K")]
        kick: Option<f64>,
        /// Comma-separated decay rates [default: 0.5].
        #[arg(long)]
        gamma: Option<String>,
        /// Random initial conditions [default: 500].
        #[arg(long = "n-init")]
        n_init: Option<usize>,
        /// Periods per orbit [default: 1000].
        #[arg(long = "n-periods")]
        n_periods: Option<usize>,
        /// Leading periods of each orbit left out [default: 0].
        #[arg(long)]
        transient: Option<usize>,
        /// Comma-separated box sizes [default: 2^-1 … 2^-10].
        #[arg(long)]
        epsilons: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trajectory-averaged observables per period.
    Evolve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "N")]
        n_spins: Option<usize>,
        /// Comma-separated probes out of mz, sre, ee.
        #[arg(long, default_value = "mz")]
        probes: String,
        /// First recorded period.
        #[arg(long = "record-from", default_value_t = 1)]
        record_from: usize,
        /// Record every stride-th period.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Block size for the entanglement entropy [default: N/2].
        #[arg(long = "n-a")]
        n_a: Option<usize>,
        /// Also write per-trajectory m_z (trajectory_id, n, mz) to this file.
        #[arg(long)]
        raw: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plateau values across sizes and a scaling fit.
    Scaling {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated sizes.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, value_enum)]
        probe: ProbeArg,
        #[arg(long, value_enum)]
        fit: FitArg,
        /// Recorded periods dropped before the plateau average
        /// [default: 50 for sre, 500 otherwise].
        #[arg(long)]
        k0: Option<usize>,
        /// Fit plateau values read from a CSV (N, mean, stderr) instead of simulating.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Trajectory-ensemble settings.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "K")]
    pub kick: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Trajectories [default: 1024].
    #[arg(long = "n-traj")]
    pub n_traj: Option<usize>,
    /// Periods per trajectory [default: 1000; 100 for `scaling --probe sre`].
    #[arg(long = "n-periods")]
    pub n_periods: Option<usize>,
    #[arg(long, value_enum, default_value_t = InitialArg::Auto)]
    pub initial: InitialArg,
    #[arg(long, value_enum, default_value_t = SchemeArg::WaitingTime)]
    pub scheme: SchemeArg,
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads(cli.threads)?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let force = cli.force;
    match cli.command {
        Command::Poincare {
            model,
            kick,
            gamma,
            n_init,
            n_periods,
            out,
        } => commands::poincare(&file, &model, kick, gamma, n_init, n_periods, &out, force),
        Command::LyapunovMap {
            model,
            k_range,
            gamma_range,
            grid,
            n_periods,
            out,
        } => commands::lyapunov_map(
            &file,
            &model,
            k_range,
            gamma_range,
            grid,
            n_periods,
            &out,
            force,
        ),
        Command::Bifurcation {
            model,
            gamma,
            k_range,
            n_k,
            n_periods,
            keep,
            component,
            out,
        } => commands::bifurcation(
            &file, &model, gamma, k_range, n_k, n_periods, keep, component, &out, force,
        ),
        Command::Hausdorff {
            model,
            kick,
            gamma,
            n_init,
            n_periods,
            transient,
            epsilons,
            out,
        } => {
            let args = commands::HausdorffArgs {
                kick,
                gamma,
                n_init,
                n_periods,
                transient,
                epsilons,
            };
            commands::hausdorff(&file, &model, &args, &out, force)
        }
        Command::Evolve {
            run,
            n_spins,
            probes,
            record_from,
            stride,
            n_a,
            raw,
            out,
        } => {
            let args = commands::EvolveArgs {
                n_spins,
                probes,
                record_from,
                stride,
                n_a,
                raw,
            };
            commands::evolve(&file, &run, &args, &out, force)
        }
        Command::Scaling {
            run,
            sweep,
            probe,
            fit,
            k0,
            input,
            out,
        } => {
            let args = commands::ScalingArgs {
                sweep,
                probe,
                fit,
                k0,
                input,
            };
            commands::scaling(&file, &run, &args, &out, force)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kicktop: {e}");
            e.exit_code()
        }
    }
}

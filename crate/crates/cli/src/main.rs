//! `blockade`: configuration-driven scenario runner producing machine-readable
//! CSV tables for the photon-blockade cavity toolkit.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

mod config;
mod output;
mod preset;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scenarios::RunContext;

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numeric(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "blockade",
    version,
    about = "Driven-dissipative cavity scenarios: transmission, photon statistics, cascades, and linewidths"
)]
struct Cli {
    #[command(subcommand)]
    scenario: Scenario,

    /// TOML configuration file; command-line flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path (side tables and the manifest derive from it).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for grid-parallel scenarios (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Fock-space cutoff override for master-equation scenarios.
    #[arg(long, global = true)]
    fock_cutoff: Option<usize>,

    /// Named physical preset ("rb87-d1") supplying laboratory parameters.
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Scenario {
    /// Resonance pull and one-photon absorption vs. working-point position.
    RatesLinear {
        /// Half-width of the scanned offset range (kappa units).
        #[arg(long)]
        span: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Kerr coefficient and two-photon absorption vs. the 3<->4 detuning.
    RatesNonlinear {
        #[arg(long)]
        span: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Steady-state transmission, mean photon number, and g2(0) vs. detuning.
    SpectrumG2 {
        /// Probe amplitude in sqrt(kappa) units.
        #[arg(long)]
        eps_p: Option<f64>,
    },
    /// Delayed second-order correlation of the resonantly driven cavity.
    G2Tau {
        #[arg(long)]
        eps_p: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Fock statistics of the cascaded source-target pair.
    CascadeFock {
        /// Two-photon absorption rate of the target cavity.
        #[arg(long)]
        kappa_nl: Option<f64>,
        /// Mean photon number the incident field is calibrated to.
        #[arg(long)]
        nbar: Option<f64>,
        /// Fock cutoff used for both modes.
        #[arg(long)]
        dim: Option<usize>,
        /// Derive the target rates from the resolved atomic constants.
        #[arg(long)]
        rates_from_ensemble: bool,
    },
    /// Rate panels vs. detuning plus the classical narrowed linewidth.
    Linewidth {
        /// Medium path per round trip (meters).
        #[arg(long)]
        medium_path: Option<f64>,
    },
    /// Weak-drive scan of the one-atom full model with the spectroscopic fit.
    Oracle {
        /// Half-width of the detuning scan (kappa units).
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
}

impl Scenario {
    fn default_out(&self) -> &'static str {
        match self {
            Scenario::RatesLinear { .. } => "rates_linear.csv",
            Scenario::RatesNonlinear { .. } => "rates_nonlinear.csv",
            Scenario::SpectrumG2 { .. } => "spectrum_g2.csv",
            Scenario::G2Tau { .. } => "g2_tau.csv",
            Scenario::CascadeFock { .. } => "cascade_fock.csv",
            Scenario::Linewidth { .. } => "linewidth.csv",
            Scenario::Oracle { .. } => "oracle.csv",
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(RunError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Config(format!("worker pool: {e}")))?;
    }

    let file = config::load(cli.config.as_deref()).map_err(RunError::Config)?;
    let preset_name = cli
        .preset
        .clone()
        .or_else(|| file.preset.as_ref().and_then(|p| p.name.clone()));
    let preset = match preset_name.as_deref() {
        None => None,
        Some(name) => Some(
            preset::by_name(name)
                .ok_or_else(|| RunError::Config(format!("unknown preset '{name}'")))?,
        ),
    };

    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(cli.scenario.default_out()));
    let ctx = RunContext {
        file,
        preset,
        fock_cutoff: cli.fock_cutoff,
        out,
    };

    match cli.scenario {
        Scenario::RatesLinear { span, points } => scenarios::rates_linear(&ctx, span, points),
        Scenario::RatesNonlinear { span, points } => scenarios::rates_nonlinear(&ctx, span, points),
        Scenario::SpectrumG2 { eps_p } => scenarios::spectrum_g2(&ctx, eps_p),
        Scenario::G2Tau {
            eps_p,
            tau_max,
            points,
        } => scenarios::g2_tau(&ctx, eps_p, tau_max, points),
        Scenario::CascadeFock {
            kappa_nl,
            nbar,
            dim,
            rates_from_ensemble,
        } => scenarios::cascade_fock(&ctx, kappa_nl, nbar, dim, rates_from_ensemble),
        Scenario::Linewidth { medium_path } => scenarios::linewidth(&ctx, medium_path),
        Scenario::Oracle { window, points } => scenarios::oracle(&ctx, window, points),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit code 0
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

//! Batch command-line driver for the experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use btl_bounds::experiment::{
    run_bcrb, run_ha_sweeps, run_hcrb, run_it_bound, run_mse_vs_bounds, run_phase_transition,
    run_simulate, run_topology_sweep, ConfigError, ExperimentConfig, ExperimentKind, RunError,
    Table,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 1;

#[derive(Parser)]
#[command(
    name = "btl-bounds",
    version,
    about = "Bayesian BTL simulation, EM fitting and Bayes-risk lower bounds",
    long_about = "Bayesian BTL simulation, EM fitting and Bayes-risk lower bounds.\n\n\
        Every subcommand reads an optional JSON config (absent fields take the \
        subcommand's defaults), writes a CSV table with a header row and rows \
        sorted by their parameter columns, and exits with 0 on success, 2 on a \
        configuration error and 3 on a numerical failure. Floats are printed \
        with 17 significant digits. The leading columns of most tables are \
        topology,topology_seed,k,a,b,n."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (default: the config's out_path, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of trials (seeds per point for phase-transition).
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write a gnuplot script for the table.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample skills and outcomes.
    ///
    /// CSV: topology,topology_seed,k,a,b,n,seed,trial,i,j,n_ij,w_ij,w_ji,lambda_i,lambda_j
    /// with one row per compared pair (i < j), n and trial.
    Simulate(Common),
    /// EM mean squared error against the lower bounds (complete graph by default).
    ///
    /// CSV: topology,topology_seed,k,a,b,n,trials,seed,em_mse,em_mse_ci95,it_bound,cor1_bound,bcrb
    /// where em_mse is the mean over trials of Σ_i (λ_i - λ̂_i)², em_mse_ci95 its
    /// normal 95% half-width, it_bound the information-theoretic bound for the
    /// squared L2 error, cor1_bound its closed form for uniform priors and bcrb
    /// the trace of the inverse Bayesian information matrix.
    EmFit(Common),
    /// Information-theoretic bounds per topology and n.
    ///
    /// CSV: topology,topology_seed,k,a,b,n,e_btl,it_bound_l2sq,it_bound_l1,cor1_l2sq,cor1_l1
    ItBound(Common),
    /// Bayesian Cramér–Rao bound per topology and n.
    ///
    /// CSV: topology,topology_seed,k,a,b,n,bcrb
    Bcrb(Common),
    /// Hybrid Cramér–Rao bound of the home-field model per topology, n and θ.
    ///
    /// CSV: topology,topology_seed,k,a,b,n,home_fraction,theta,hcrb_total,hcrb_skills,hcrb_theta_known,bcrb_basic
    /// where hcrb_skills is the skill part of the trace with θ estimated,
    /// hcrb_theta_known the trace for known θ and bcrb_basic the basic-model
    /// bound of the induced budget.
    Hcrb(Common),
    /// Bounds across comparison-graph topologies (experiment topology-it or topology-bcrb).
    ///
    /// CSV: topology,topology_seed,k,a,b,n,it_bound[,bcrb]
    SweepTopology(Common),
    /// Erdős–Rényi sweep at fixed total budget over normalized p = p k / ln k.
    ///
    /// CSV: k,a,b,n,p_normalized,p,seeds,seed,mean_edges,connected_fraction,it_bound,bcrb
    /// with all values averaged over the random graphs of each point.
    PhaseTransition(Common),
    /// Home-field sweep over θ (experiment ha-it or ha-hcrb).
    ///
    /// CSV (ha-it): topology,topology_seed,k,a,b,n,home_fraction,theta,it_bound,it_bound_basic
    /// CSV (ha-hcrb): topology,topology_seed,k,a,b,n,home_fraction,theta,hcrb_total,hcrb_skills,hcrb_theta_known,bcrb_basic
    HaSweep(Common),
}

struct Plan {
    common: Common,
    default_kind: ExperimentKind,
    run: fn(&ExperimentConfig) -> Result<Table, RunError>,
    plot: (
        &'static str,
        &'static [&'static str],
        Option<&'static str>,
        &'static str,
    ),
}

fn plan(command: Command) -> Plan {
    let p = |common, default_kind, run, plot| Plan {
        common,
        default_kind,
        run,
        plot,
    };
    match command {
        Command::Simulate(c) => p(
            c,
            ExperimentKind::MseVsBounds,
            run_simulate,
            ("lambda_i", &["lambda_j"][..], None, ""),
        ),
        Command::EmFit(c) => p(
            c,
            ExperimentKind::MseVsBounds,
            run_mse_vs_bounds,
            ("n", &["em_mse", "it_bound", "bcrb"][..], None, "xy"),
        ),
        Command::ItBound(c) => p(
            c,
            ExperimentKind::TopologyIt,
            run_it_bound,
            ("n", &["it_bound_l2sq"][..], Some("topology"), "xy"),
        ),
        Command::Bcrb(c) => p(
            c,
            ExperimentKind::TopologyBcrb,
            run_bcrb,
            ("n", &["bcrb"][..], Some("topology"), "xy"),
        ),
        Command::Hcrb(c) => p(
            c,
            ExperimentKind::HaHcrb,
            run_hcrb,
            ("theta", &["hcrb_skills"][..], None, "x"),
        ),
        Command::SweepTopology(c) => p(
            c,
            ExperimentKind::TopologyBcrb,
            run_topology_sweep,
            ("n", &["it_bound"][..], Some("topology"), "xy"),
        ),
        Command::PhaseTransition(c) => p(
            c,
            ExperimentKind::PhaseTransition,
            run_phase_transition,
            ("p_normalized", &["it_bound", "bcrb"][..], None, "y"),
        ),
        Command::HaSweep(c) => p(
            c,
            ExperimentKind::HaIt,
            run_ha_sweeps,
            ("theta", &["it_bound"][..], None, "x"),
        ),
    }
}

fn load_config(
    common: &Common,
    default_kind: ExperimentKind,
) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text, default_kind)?
        }
        None => ExperimentConfig::defaults(default_kind),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(out) = &common.out {
        cfg.out_path = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let plan = plan(Cli::parse().command);
    let cfg = match load_config(&plan.common, plan.default_kind) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = plan.common.threads {
        if threads == 0 {
            eprintln!("configuration error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        builder = builder.num_threads(threads);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("cannot start worker threads: {e}");
            return ExitCode::from(EXIT_IO);
        }
    };
    let table = match pool.install(|| (plan.run)(&cfg)) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(match e {
                RunError::Config(_) => EXIT_CONFIG,
                RunError::Numerical(_) => EXIT_NUMERICAL,
            });
        }
    };
    let csv = table.to_csv();
    let result = match &cfg.out_path {
        Some(path) => write(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    };
    let result = result.and_then(|()| match &plan.common.plot {
        Some(script) => {
            let data = cfg
                .out_path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "data.csv".into());
            let (x, ys, group, log) = plan.plot;
            write(script, &table.gnuplot_script(&data, x, ys, group, log))
        }
        None => Ok(()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

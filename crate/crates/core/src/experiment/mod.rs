//! Experiment harness: configuration, runs and CSV output.

pub mod config;
pub mod csv;
pub mod runs;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, PriorSpec, RateSpec};
pub use csv::{Cell, Table};
pub use runs::{
    mean_ci95, run_bcrb, run_ha_sweeps, run_hcrb, run_it_bound, run_mse_vs_bounds,
    run_phase_transition, run_simulate, run_topology_sweep, trial_rng, RunError, RunResult,
};

//! Experiment drivers producing CSV tables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ConfigError, ExperimentConfig, ExperimentKind};
use super::csv::{Cell, Table};
use crate::cramer_rao::{bcrb_trace, bim, hcrb_trace, him, skill_block_trace};
use crate::em::{em_fit_default, mse};
use crate::error::Error;
use crate::graph::{
    build_budget, connectivity_threshold, er_fixed_total_budget, is_connected, Topology,
};
use crate::info_bounds::{cor1_bound, e_btl, e_ha, it_lower_bound, BoundSpec, Cor1Kind, Norm};
use crate::model::{
    sample_outcome, sample_skills, ComparisonBudget, HomeBudget, PriorHyperParams, Theta,
};
use crate::special::QuadratureSpec;

/// Failure of an experiment run: bad configuration or failed numerics.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    Numerical(Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            RunError::Numerical(e)
        } else {
            RunError::Config(ConfigError(e.to_string()))
        }
    }
}

pub type RunResult = Result<Table, RunError>;

/// Independent stream `stream` of the run's seed.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn expect_kind(cfg: &ExperimentConfig, allowed: &[ExperimentKind]) -> Result<(), ConfigError> {
    if allowed.contains(&cfg.experiment) {
        Ok(())
    } else {
        Err(ConfigError(format!(
            "experiment {} cannot be run here (expected one of: {})",
            cfg.experiment.name(),
            allowed
                .iter()
                .map(|k| k.name())
                .collect::<Vec<_>>()
                .join(", ")
        )))
    }
}

fn resolved(cfg: &ExperimentConfig) -> Vec<Topology> {
    cfg.topologies_or_complete()
        .into_iter()
        .map(|t| {
            let seed = t.seed.unwrap_or(cfg.seed);
            t.with_seed(seed)
        })
        .collect()
}

fn l2_bound(budget: &ComparisonBudget, prior: &PriorHyperParams) -> Result<f64, Error> {
    it_lower_bound(
        e_btl(budget, prior)?,
        &BoundSpec::new(Norm::L2, 2.0, prior.k())?,
    )
}

fn bcrb(budget: &ComparisonBudget, prior: &PriorHyperParams) -> Result<f64, Error> {
    bcrb_trace(&bim(budget, prior)?)
}

fn param_cells(topo: &Topology, cfg: &ExperimentConfig, n: u64) -> Vec<Cell> {
    vec![
        topo.kind.name().into(),
        topo.seed.unwrap_or(0).into(),
        cfg.k.into(),
        cfg.prior.a.into(),
        cfg.prior.rate(cfg.k).into(),
        n.into(),
    ]
}

const PARAM_COLUMNS: [&str; 6] = ["topology", "topology_seed", "k", "a", "b", "n"];

fn columns(extra: &[&'static str]) -> Vec<&'static str> {
    PARAM_COLUMNS.iter().chain(extra).copied().collect()
}

/// Sample mean and normal-approximation 95% half-width.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1.0);
    (mean, 1.96 * (var / t).sqrt())
}

/// EM mean squared error against the IT, Cor. 1 and Cramér–Rao bounds for
/// each n in the grid. Each trial draws skills from the prior and outcomes
/// from the model and records the summed squared error of the EM estimate.
pub fn run_mse_vs_bounds(cfg: &ExperimentConfig) -> RunResult {
    let topos = resolved(cfg);
    if topos.len() != 1 {
        return Err(ConfigError("mse-vs-bounds takes exactly one topology".into()).into());
    }
    let topo = &topos[0];
    let prior = cfg.prior.build(cfg.k)?;
    let b = cfg.prior.rate(cfg.k);
    let mut table = Table::new(
        columns(&[
            "trials",
            "seed",
            "em_mse",
            "em_mse_ci95",
            "it_bound",
            "cor1_bound",
            "bcrb",
        ]),
        8,
    );
    for (ni, &n) in cfg.n_grid.iter().enumerate() {
        let budget = build_budget(topo, n)?;
        let errors = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(cfg.seed, ((ni as u64) << 32) | t as u64);
                let skills = sample_skills(&prior, &mut rng);
                let outcome = sample_outcome(&skills, &budget, &mut rng)?;
                let trace = em_fit_default(&prior, &outcome, &budget, &cfg.em)?;
                mse(&skills, trace.estimate())
            })
            .collect::<Result<Vec<f64>, Error>>()?;
        let (em_mse, ci) = mean_ci95(&errors);
        let bcrb = if cfg.prior.a > 2.0 {
            bcrb(&budget, &prior)?
        } else {
            f64::NAN
        };
        let mut row = param_cells(topo, cfg, n);
        row.extend([
            cfg.trials.into(),
            cfg.seed.into(),
            em_mse.into(),
            ci.into(),
            l2_bound(&budget, &prior)?.into(),
            cor1_bound(n, cfg.k, cfg.prior.a, b, Cor1Kind::L2Sq)?.into(),
            bcrb.into(),
        ]);
        table.push(row);
    }
    Ok(table)
}

/// IT bound (topology-it) or IT bound and BCRB (topology-bcrb) per topology and n.
pub fn run_topology_sweep(cfg: &ExperimentConfig) -> RunResult {
    expect_kind(
        cfg,
        &[ExperimentKind::TopologyIt, ExperimentKind::TopologyBcrb],
    )?;
    let with_bcrb = cfg.experiment == ExperimentKind::TopologyBcrb;
    if with_bcrb {
        cfg.require_cramer_rao()?;
    }
    let prior = cfg.prior.build(cfg.k)?;
    let mut table = Table::new(
        if with_bcrb {
            columns(&["it_bound", "bcrb"])
        } else {
            columns(&["it_bound"])
        },
        PARAM_COLUMNS.len(),
    );
    for topo in resolved(cfg) {
        for &n in &cfg.n_grid {
            let budget = build_budget(&topo, n)?;
            let mut row = param_cells(&topo, cfg, n);
            row.push(l2_bound(&budget, &prior)?.into());
            if with_bcrb {
                row.push(bcrb(&budget, &prior)?.into());
            }
            table.push(row);
        }
    }
    Ok(table)
}

/// Erdős–Rényi sweep at fixed total budget: per (k, n, normalized p) the IT
/// bound and BCRB averaged over `trials` random graphs.
pub fn run_phase_transition(cfg: &ExperimentConfig) -> RunResult {
    expect_kind(cfg, &[ExperimentKind::PhaseTransition])?;
    cfg.require_cramer_rao()?;
    let ks = cfg.k_list.clone().unwrap_or_else(|| vec![cfg.k]);
    let grid = cfg
        .p_grid
        .clone()
        .ok_or_else(|| ConfigError("p_grid is required".into()))?;
    let mut points = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        for (ni, &n) in cfg.n_grid.iter().enumerate() {
            for (pi, &pn) in grid.iter().enumerate() {
                let p = pn * connectivity_threshold(k);
                if p > 1.0 {
                    return Err(ConfigError(format!(
                        "normalized p = {pn} gives edge probability {p} > 1 at k = {k}"
                    ))
                    .into());
                }
                points.push((ki, k, ni, n, pi, pn, p));
            }
        }
    }
    let mut table = Table::new(
        vec![
            "k",
            "a",
            "b",
            "n",
            "p_normalized",
            "p",
            "seeds",
            "seed",
            "mean_edges",
            "connected_fraction",
            "it_bound",
            "bcrb",
        ],
        8,
    );
    for &(ki, k, ni, n, pi, pn, p) in &points {
        let prior = cfg.prior.build(k)?;
        let samples = (0..cfg.trials)
            .into_par_iter()
            .map(|s| {
                let stream =
                    ((ki as u64) << 48) | ((ni as u64) << 40) | ((pi as u64) << 24) | s as u64;
                let budget = er_fixed_total_budget(k, p, n, &mut trial_rng(cfg.seed, stream))?;
                Ok((
                    budget.edges().count() as f64,
                    f64::from(u8::from(is_connected(&budget))),
                    l2_bound(&budget, &prior)?,
                    bcrb(&budget, &prior)?,
                ))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let t = cfg.trials as f64;
        let avg = |f: fn(&(f64, f64, f64, f64)) -> f64| samples.iter().map(f).sum::<f64>() / t;
        table.push(vec![
            k.into(),
            cfg.prior.a.into(),
            cfg.prior.rate(k).into(),
            n.into(),
            pn.into(),
            p.into(),
            cfg.trials.into(),
            cfg.seed.into(),
            avg(|s| s.0).into(),
            avg(|s| s.1).into(),
            avg(|s| s.2).into(),
            avg(|s| s.3).into(),
        ]);
    }
    Ok(table)
}

fn home_budget(budget: &ComparisonBudget, alpha: f64) -> HomeBudget {
    HomeBudget::split(budget, |m| (alpha * m as f64).round() as u64)
}

/// Home-field sweeps over θ: the IT bound via E_HA (ha-it) or the HCRB
/// traces (ha-hcrb), next to the basic-model value for reference.
pub fn run_ha_sweeps(cfg: &ExperimentConfig) -> RunResult {
    expect_kind(cfg, &[ExperimentKind::HaIt, ExperimentKind::HaHcrb])?;
    let hcrb = cfg.experiment == ExperimentKind::HaHcrb;
    if hcrb {
        cfg.require_cramer_rao()?;
    }
    let thetas = cfg.theta_grid()?.to_vec();
    let prior = cfg.prior.build(cfg.k)?;
    let spec = QuadratureSpec::default();
    let mut table = Table::new(
        columns(&if hcrb {
            vec![
                "home_fraction",
                "theta",
                "hcrb_total",
                "hcrb_skills",
                "hcrb_theta_known",
                "bcrb_basic",
            ]
        } else {
            vec!["home_fraction", "theta", "it_bound", "it_bound_basic"]
        }),
        PARAM_COLUMNS.len() + 2,
    );
    for topo in resolved(cfg) {
        for &n in &cfg.n_grid {
            let budget = build_budget(&topo, n)?;
            let hb = home_budget(&budget, cfg.home_fraction);
            let basic = if hcrb {
                bcrb(&hb.induced(), &prior)?
            } else {
                l2_bound(&hb.induced(), &prior)?
            };
            let values = thetas
                .par_iter()
                .map(|&theta| -> Result<Vec<f64>, Error> {
                    if hcrb {
                        let h = him(&hb, &prior, theta, &spec)?;
                        let tr = hcrb_trace(&h)?;
                        Ok(vec![tr.total, tr.skills, skill_block_trace(&h)?])
                    } else {
                        let e = e_ha(&hb, &prior, &Theta::Point(theta), &spec)?;
                        Ok(vec![it_lower_bound(
                            e,
                            &BoundSpec::new(Norm::L2, 2.0, cfg.k)?,
                        )?])
                    }
                })
                .collect::<Result<Vec<_>, Error>>()?;
            for (&theta, v) in thetas.iter().zip(values) {
                let mut row = param_cells(&topo, cfg, n);
                row.push(cfg.home_fraction.into());
                row.push(theta.into());
                row.extend(v.into_iter().map(Cell::from));
                row.push(basic.into());
                table.push(row);
            }
        }
    }
    Ok(table)
}

/// Sampled skills and outcomes: one row per compared pair, n and trial.
pub fn run_simulate(cfg: &ExperimentConfig) -> RunResult {
    let prior = cfg.prior.build(cfg.k)?;
    let mut table = Table::new(
        columns(&[
            "seed", "trial", "i", "j", "n_ij", "w_ij", "w_ji", "lambda_i", "lambda_j",
        ]),
        10,
    );
    for (ti, topo) in resolved(cfg).iter().enumerate() {
        for (ni, &n) in cfg.n_grid.iter().enumerate() {
            let budget = build_budget(topo, n)?;
            let draws = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let stream = ((ti as u64) << 48) | ((ni as u64) << 32) | t as u64;
                    let mut rng = trial_rng(cfg.seed, stream);
                    let skills = sample_skills(&prior, &mut rng);
                    let outcome = sample_outcome(&skills, &budget, &mut rng)?;
                    Ok((skills, outcome))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            for (t, (skills, outcome)) in draws.iter().enumerate() {
                let l = skills.as_slice();
                for (i, j, nij) in budget.edges() {
                    let mut row = param_cells(topo, cfg, n);
                    row.extend([
                        cfg.seed.into(),
                        t.into(),
                        i.into(),
                        j.into(),
                        nij.into(),
                        outcome.get(i, j).into(),
                        outcome.get(j, i).into(),
                        l[i].into(),
                        l[j].into(),
                    ]);
                    table.push(row);
                }
            }
        }
    }
    Ok(table)
}

/// Exponent E_BTL with the IT bounds for both norms and their Cor. 1 forms.
pub fn run_it_bound(cfg: &ExperimentConfig) -> RunResult {
    let prior = cfg.prior.build(cfg.k)?;
    let b = cfg.prior.rate(cfg.k);
    let mut table = Table::new(
        columns(&[
            "e_btl",
            "it_bound_l2sq",
            "it_bound_l1",
            "cor1_l2sq",
            "cor1_l1",
        ]),
        PARAM_COLUMNS.len(),
    );
    for topo in resolved(cfg) {
        for &n in &cfg.n_grid {
            let budget = build_budget(&topo, n)?;
            let e = e_btl(&budget, &prior)?;
            let mut row = param_cells(&topo, cfg, n);
            row.extend([
                e.into(),
                it_lower_bound(e, &BoundSpec::new(Norm::L2, 2.0, cfg.k)?)?.into(),
                it_lower_bound(e, &BoundSpec::new(Norm::L1, 1.0, cfg.k)?)?.into(),
                cor1_bound(n, cfg.k, cfg.prior.a, b, Cor1Kind::L2Sq)?.into(),
                cor1_bound(n, cfg.k, cfg.prior.a, b, Cor1Kind::L1)?.into(),
            ]);
            table.push(row);
        }
    }
    Ok(table)
}

/// Trace of the inverse BIM per topology and n.
pub fn run_bcrb(cfg: &ExperimentConfig) -> RunResult {
    cfg.require_cramer_rao()?;
    let prior = cfg.prior.build(cfg.k)?;
    let mut table = Table::new(columns(&["bcrb"]), PARAM_COLUMNS.len());
    for topo in resolved(cfg) {
        for &n in &cfg.n_grid {
            let mut row = param_cells(&topo, cfg, n);
            row.push(bcrb(&build_budget(&topo, n)?, &prior)?.into());
            table.push(row);
        }
    }
    Ok(table)
}

/// HCRB traces per topology, n and θ.
pub fn run_hcrb(cfg: &ExperimentConfig) -> RunResult {
    let cfg = ExperimentConfig {
        experiment: ExperimentKind::HaHcrb,
        ..cfg.clone()
    };
    run_ha_sweeps(&cfg)
}

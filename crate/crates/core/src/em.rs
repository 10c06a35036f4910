//! EM / MM fitting of the skills under the Gamma prior.
//!
//! The E-step replaces each latent time ζ_ij by its conditional mean
//! n_ij / (λ_i + λ_j); the M-step takes the mode (or mean) of the resulting
//! Gamma conditional posterior of each λ_i.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    log_joint, ComparisonBudget, ComparisonOutcome, LatentTimes, PriorHyperParams, SkillVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    PosteriorMode,
    PosteriorMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmConfig {
    pub max_iters: usize,
    pub rel_change_tol: f64,
    pub estimator_kind: EstimatorKind,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            rel_change_tol: 1e-9,
            estimator_kind: EstimatorKind::PosteriorMode,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.rel_change_tol > 0.0) {
            return Err(Error::Invalid {
                what: "EM config",
                reason: format!("{self:?}: need max_iters >= 1 and rel_change_tol > 0"),
            });
        }
        Ok(())
    }
}

/// Iterates of one EM run.
#[derive(Debug, Clone, PartialEq)]
pub struct EmTrace {
    pub iterates: Vec<SkillVector>,
    /// log p(λ, W) at each iterate.
    pub log_posterior: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl EmTrace {
    /// Final iterate.
    pub fn estimate(&self) -> &SkillVector {
        self.iterates
            .last()
            .expect("trace always holds the initial point")
    }
}

/// Shape and rate of a Gamma distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

/// Conditional posterior of each λ_i given wins and latent times:
/// Gamma(a_i + w_i, b_i + z_i).
pub fn posterior_params(
    prior: &PriorHyperParams,
    outcome: &ComparisonOutcome,
    latent: &LatentTimes,
) -> Result<Vec<GammaParams>> {
    let k = prior.k();
    for found in [outcome.k(), latent.k()] {
        if found != k {
            return Err(Error::DimensionMismatch { expected: k, found });
        }
    }
    Ok((0..k)
        .map(|i| GammaParams {
            shape: prior.a()[i] + outcome.win_count(i) as f64,
            rate: prior.b()[i] + latent.row_sum(i),
        })
        .collect())
}

/// Run EM from the prior mean.
pub fn em_fit_default(
    prior: &PriorHyperParams,
    outcome: &ComparisonOutcome,
    budget: &ComparisonBudget,
    cfg: &EmConfig,
) -> Result<EmTrace> {
    em_fit(prior, outcome, budget, cfg, &SkillVector::prior_mean(prior))
}

/// Run EM from `init`.
///
/// In posterior-mode kind every iteration is checked to not decrease
/// log p(λ, W) beyond round-off.
pub fn em_fit(
    prior: &PriorHyperParams,
    outcome: &ComparisonOutcome,
    budget: &ComparisonBudget,
    cfg: &EmConfig,
    init: &SkillVector,
) -> Result<EmTrace> {
    cfg.validate()?;
    let k = prior.k();
    for found in [outcome.k(), budget.k(), init.len()] {
        if found != k {
            return Err(Error::DimensionMismatch { expected: k, found });
        }
    }
    let mode = cfg.estimator_kind == EstimatorKind::PosteriorMode;
    let numer: Vec<f64> = (0..k)
        .map(|i| prior.a()[i] + outcome.win_count(i) as f64 - if mode { 1.0 } else { 0.0 })
        .collect();
    if let Some(i) = numer.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::ShapeTooSmall {
            index: Some(i),
            shape: prior.a()[i] + outcome.win_count(i) as f64,
            min: 1.0,
        });
    }
    let edges: Vec<(usize, usize, f64)> =
        budget.edges().map(|(i, j, n)| (i, j, n as f64)).collect();

    let mut current = init.clone();
    let mut lp = log_joint(prior, budget, outcome, &current)?;
    let mut trace = EmTrace {
        iterates: vec![current.clone()],
        log_posterior: vec![lp],
        converged: false,
        iterations_used: 0,
    };
    let mut denom = vec![0.0; k];
    for iteration in 1..=cfg.max_iters {
        let l = current.as_slice();
        denom.copy_from_slice(prior.b());
        for &(i, j, n) in &edges {
            let e = n / (l[i] + l[j]);
            denom[i] += e;
            denom[j] += e;
        }
        let next: Vec<f64> = numer.iter().zip(&denom).map(|(a, d)| a / d).collect();
        if next.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::NonFinite { iteration });
        }
        let change = next
            .iter()
            .zip(l)
            .map(|(n, o)| ((n - o) / o).abs())
            .fold(0.0, f64::max);
        let next = SkillVector::new(next).map_err(|_| Error::NonFinite { iteration })?;
        let lp_next = log_joint(prior, budget, outcome, &next)?;
        if mode && lp_next < lp - 1e-10 * lp.abs().max(1.0) {
            return Err(Error::NotMonotone {
                iteration,
                before: lp,
                after: lp_next,
            });
        }
        lp = lp_next;
        trace.iterates.push(next.clone());
        trace.log_posterior.push(lp);
        trace.iterations_used = iteration;
        current = next;
        if change < cfg.rel_change_tol {
            trace.converged = true;
            break;
        }
    }
    Ok(trace)
}

/// Squared L2 error Σ (λ_i - λ̂_i)².
pub fn mse(truth: &SkillVector, estimate: &SkillVector) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: estimate.len(),
        });
    }
    Ok(truth
        .as_slice()
        .iter()
        .zip(estimate.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum())
}

//! Information-theoretic Bayes-risk lower bounds for the basic and
//! home-field-advantage models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComparisonBudget, HomeBudget, PriorHyperParams, Theta};
use crate::special::{
    digamma, hyp2f1, incomplete_beta, integrate, log_beta, log_gamma, QuadratureSpec,
};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Norm {
    L1,
    L2,
}

/// Distortion ‖λ - λ̂‖^r in dimension k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    pub norm: Norm,
    pub r: f64,
    pub k: usize,
}

impl BoundSpec {
    pub fn new(norm: Norm, r: f64, k: usize) -> Result<Self> {
        if !(r >= 1.0 && r.is_finite()) || k < 2 {
            return Err(Error::Invalid {
                what: "bound spec",
                reason: format!("need r >= 1 and k >= 2, got r={r}, k={k}"),
            });
        }
        Ok(Self { norm, r, k })
    }
}

/// Log-volume of the unit ball of the chosen norm in R^k.
pub fn log_unit_ball_volume(spec: &BoundSpec) -> Result<f64> {
    let k = spec.k as f64;
    match spec.norm {
        Norm::L2 => Ok(0.5 * k * std::f64::consts::PI.ln() - log_gamma(0.5 * k + 1.0)?),
        Norm::L1 => Ok(k * std::f64::consts::LN_2 - log_gamma(k + 1.0)?),
    }
}

fn check_prior(budget_k: usize, prior: &PriorHyperParams) -> Result<()> {
    if budget_k != prior.k() {
        return Err(Error::DimensionMismatch {
            expected: prior.k(),
            found: budget_k,
        });
    }
    Ok(())
}

/// Exponent shared by both models: (1/k) Σ_i [-½ln2π + ln b_i - ψ(a_i) + ½ln(a_i + load_i)].
fn exponent(prior: &PriorHyperParams, loads: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, load) in loads.iter().enumerate() {
        let (a, b) = (prior.a()[i], prior.b()[i]);
        total += -HALF_LN_2PI + b.ln() - digamma(a)? + 0.5 * (a + load).ln();
    }
    Ok(total / loads.len() as f64)
}

/// Exponent E_BTL of the basic model, driven by the node loads n_i.
pub fn e_btl(budget: &ComparisonBudget, prior: &PriorHyperParams) -> Result<f64> {
    check_prior(budget.k(), prior)?;
    exponent(prior, &budget.node_loads())
}

/// Natural log of the information-theoretic bound for exponent `e`.
pub fn log_it_lower_bound(e: f64, spec: &BoundSpec) -> Result<f64> {
    if !e.is_finite() {
        return Err(Error::Invalid {
            what: "exponent",
            reason: format!("{e} is not finite"),
        });
    }
    let k = spec.k as f64;
    let r = spec.r;
    let log_v = log_unit_ball_volume(spec)?;
    Ok(k.ln() - r.ln() - 1.0 - (r / k) * (log_v + log_gamma(1.0 + k / r)?) - r * e)
}

/// Information-theoretic lower bound on the Bayes risk for exponent `e`.
pub fn it_lower_bound(e: f64, spec: &BoundSpec) -> Result<f64> {
    log_it_lower_bound(e, spec).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cor1Kind {
    L1,
    L2Sq,
}

/// Closed-form bound for uniform priors after Jensen's inequality, with `n`
/// the total number of comparisons.
pub fn cor1_bound(n: u64, k: usize, a: f64, b: f64, which: Cor1Kind) -> Result<f64> {
    let kf = k as f64;
    let base = b.ln() - digamma(a)?;
    let denom = a / kf + n as f64;
    Ok(match which {
        Cor1Kind::L1 => {
            (std::f64::consts::PI / 2.0).sqrt() * (-(base + 1.0)).exp() * kf / denom.sqrt()
        }
        Cor1Kind::L2Sq => (-2.0 * base - 1.0).exp() * kf / denom,
    })
}

/// E[ΘΛ_i/(ΘΛ_i+Λ_j)] for Λ_i, Λ_j independent Gamma with common rate,
/// using Λ_i/(Λ_i+Λ_j) ~ Beta(a_i, a_j).
pub fn home_win_expectation(
    a_i: f64,
    a_j: f64,
    theta: &Theta,
    spec: &QuadratureSpec,
) -> Result<f64> {
    theta.validate()?;
    if !(a_i > 0.0 && a_j > 0.0) {
        return Err(Error::Invalid {
            what: "shapes",
            reason: format!("({a_i}, {a_j}) must be positive"),
        });
    }
    let lb = log_beta(a_i, a_j)?;
    let mut total = 0.0;
    for (t, p) in theta.atoms() {
        if p == 0.0 {
            continue;
        }
        let value = if t == 1.0 && a_i == a_j {
            0.5
        } else {
            let integrand = |x: f64| {
                if x <= 0.0 || x >= 1.0 {
                    return 0.0;
                }
                let dens = ((a_i - 1.0) * x.ln() + (a_j - 1.0) * (1.0 - x).ln() - lb).exp();
                t * x / (t * x + 1.0 - x) * dens
            };
            integrate(integrand, 0.0, 1.0, spec)?
        };
        total += p * value;
    }
    Ok(total)
}

/// F_ij = E[ΘΛ_i/(ΘΛ_i+Λ_j)] n^h_ij + E[Λ_i/(Λ_i+ΘΛ_j)] n^h_ji.
pub fn home_expectation_fij(
    nh_ij: u64,
    nh_ji: u64,
    a_i: f64,
    a_j: f64,
    theta: &Theta,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut f = 0.0;
    if nh_ij > 0 {
        f += home_win_expectation(a_i, a_j, theta, spec)? * nh_ij as f64;
    }
    if nh_ji > 0 {
        let away = 1.0 - home_win_expectation(a_j, a_i, theta, spec)?;
        f += away * nh_ji as f64;
    }
    Ok(f)
}

/// Closed form of E[θΛ_i/(θΛ_i+Λ_j)] for equal shapes `a` and θ > 1,
/// f(a, θ) = a (-1 + 1/θ)^{-2a} θ^{-a} B[1-θ, 2a, 1-a].
///
/// For integer 2a the incomplete beta is evaluated at its negative argument
/// directly. Otherwise the powers of the negative base cancel and the
/// equivalent real form (θ^a / 2) ₂F₁(2a, a; 2a+1; 1-θ) is used.
pub fn f_closed_form(a: f64, theta: f64) -> Result<f64> {
    if !(theta > 1.0 && theta.is_finite()) {
        return Err(Error::Domain {
            function: "f_closed_form",
            value: theta,
            reason: "requires theta > 1",
        });
    }
    if !(a > 0.0) {
        return Err(Error::Domain {
            function: "f_closed_form",
            value: a,
            reason: "requires a > 0",
        });
    }
    let two_a = 2.0 * a;
    if two_a == two_a.floor() && two_a <= i32::MAX as f64 {
        let base = -1.0 + 1.0 / theta;
        let prefactor = a * base.powi(-(two_a as i32)) * theta.powf(-a);
        Ok(prefactor * incomplete_beta(1.0 - theta, two_a, 1.0 - a)?)
    } else {
        Ok(0.5 * theta.powf(a) * hyp2f1(two_a, a, two_a + 1.0, 1.0 - theta)?)
    }
}

/// Exponent E_HA of the home-field model. All rates must be equal.
pub fn e_ha(
    home_budget: &HomeBudget,
    prior: &PriorHyperParams,
    theta: &Theta,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_prior(home_budget.k(), prior)?;
    prior.common_rate()?;
    theta.validate()?;
    let k = prior.k();
    let a = prior.a();
    let mut loads = vec![0.0; k];
    for (i, load) in loads.iter_mut().enumerate() {
        for j in 0..k {
            if i != j {
                *load += home_expectation_fij(
                    home_budget.get(i, j),
                    home_budget.get(j, i),
                    a[i],
                    a[j],
                    theta,
                    spec,
                )?;
            }
        }
    }
    exponent(prior, &loads)
}

//! Assembly of the Bayesian (BIM) and hybrid (HIM) information matrices and
//! the trace-of-inverse bounds they yield.

use std::collections::HashMap;

use super::expectations::{nu_shifted, t1, t2, t3};
use super::linalg::{Cholesky, SymMatrix};
use crate::error::{Error, Result};
use crate::model::{ComparisonBudget, HomeBudget, PriorHyperParams};
use crate::special::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherKind {
    /// k×k Bayesian information of the skills.
    Bim,
    /// (k+1)×(k+1) hybrid information; the last row and column belong to θ.
    Him,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    pub m: SymMatrix,
    pub kind: FisherKind,
}

impl FisherMatrix {
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// Number of skill parameters.
    pub fn skills(&self) -> usize {
        match self.kind {
            FisherKind::Bim => self.m.dim(),
            FisherKind::Him => self.m.dim() - 1,
        }
    }
}

fn with_item(index: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::ShapeTooSmall { shape, min, .. } => Error::ShapeTooSmall {
            index: Some(index),
            shape,
            min,
        },
        other => other,
    }
}

fn check_shapes(prior: &PriorHyperParams, k: usize) -> Result<()> {
    if k != prior.k() {
        return Err(Error::DimensionMismatch {
            expected: prior.k(),
            found: k,
        });
    }
    if let Some(i) = prior.a().iter().position(|&a| !(a > 2.0)) {
        return Err(Error::ShapeTooSmall {
            index: Some(i),
            shape: prior.a()[i],
            min: 2.0,
        });
    }
    Ok(())
}

/// Bayesian information matrix:
/// I_ii = (a_i - 1) T1(a_i, b_i) + Σ_j n_ij T2(a_i, a_j, b), I_ij = -n_ij T3(a_i, a_j, b).
///
/// Compared items must share a rate.
pub fn bim(budget: &ComparisonBudget, prior: &PriorHyperParams) -> Result<FisherMatrix> {
    let k = budget.k();
    check_shapes(prior, k)?;
    let (a, b) = (prior.a(), prior.b());
    let mut m = SymMatrix::zeros(k);
    for i in 0..k {
        m.set(i, i, (a[i] - 1.0) * t1(a[i], b[i]).map_err(with_item(i))?);
    }
    for (i, j, n) in budget.edges() {
        if b[i] != b[j] {
            return Err(Error::UnequalRates {
                i,
                j,
                bi: b[i],
                bj: b[j],
            });
        }
        let n = n as f64;
        m.add(i, i, n * t2(a[i], a[j], b[i]).map_err(with_item(i))?);
        m.add(j, j, n * t2(a[j], a[i], b[i]).map_err(with_item(j))?);
        m.set(i, j, -n * t3(a[i], a[j], b[i])?);
    }
    Ok(FisherMatrix {
        m,
        kind: FisherKind::Bim,
    })
}

/// Tr(I⁻¹), the Bayesian Cramér–Rao bound on the summed MSE.
pub fn bcrb_trace(fim: &FisherMatrix) -> Result<f64> {
    Ok(Cholesky::new(&fim.m)?.trace_inverse())
}

/// Per-pair expectations E[Λ_i^{t_i} Λ_j^{t_j}/(θΛ_i+Λ_j)²] needed by the HIM.
struct PairMoments {
    /// ν(-1, 1): home item's own curvature.
    home_own: f64,
    /// ν(1, -1): away item's own curvature.
    away_own: f64,
    /// ν(0, 0): skill cross term.
    cross: f64,
    /// ν(1, 1): θ curvature.
    theta: f64,
    /// ν(0, 1): home skill with θ.
    home_theta: f64,
    /// ν(1, 0): away skill with θ.
    away_theta: f64,
}

fn pair_moments(
    a_home: f64,
    a_away: f64,
    b: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<PairMoments> {
    let nu = |ti: f64, tj: f64| nu_shifted(a_home, a_away, b, ti, tj, theta, spec);
    Ok(PairMoments {
        home_own: nu(-1.0, 1.0)?,
        away_own: nu(1.0, -1.0)?,
        cross: nu(0.0, 0.0)?,
        theta: nu(1.0, 1.0)?,
        home_theta: nu(0.0, 1.0)?,
        away_theta: nu(1.0, 0.0)?,
    })
}

/// Hybrid information matrix of (λ, θ) for the home-field model with θ
/// deterministic. For n^h_ij games with i at home, writing ν_ij for
/// expectations under shapes (a_i, a_j):
///
/// - H_ii gains n^h_ij θ ν_ij(-1,1), H_jj gains n^h_ij θ ν_ij(1,-1),
/// - H_ij gains -n^h_ij θ ν_ij(0,0),
/// - H_θθ gains n^h_ij ν_ij(1,1)/θ,
/// - H_iθ gains n^h_ij ν_ij(0,1) and H_jθ gains -n^h_ij ν_ij(1,0),
///
/// on top of the prior term (a_i - 1) T1 on the skill diagonal.
pub fn him(
    home_budget: &HomeBudget,
    prior: &PriorHyperParams,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix> {
    let k = home_budget.k();
    check_shapes(prior, k)?;
    let b = prior.common_rate()?;
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Invalid {
            what: "theta",
            reason: format!("{theta} must be positive and finite"),
        });
    }
    let a = prior.a();
    let mut m = SymMatrix::zeros(k + 1);
    for i in 0..k {
        m.set(i, i, (a[i] - 1.0) * t1(a[i], b).map_err(with_item(i))?);
    }
    let mut cache: HashMap<(u64, u64), PairMoments> = HashMap::new();
    for i in 0..k {
        for j in 0..k {
            let n = home_budget.get(i, j);
            if i == j || n == 0 {
                continue;
            }
            let key = (a[i].to_bits(), a[j].to_bits());
            if !cache.contains_key(&key) {
                cache.insert(key, pair_moments(a[i], a[j], b, theta, spec)?);
            }
            let pm = &cache[&key];
            let n = n as f64;
            m.add(i, i, n * theta * pm.home_own);
            m.add(j, j, n * theta * pm.away_own);
            m.add(i, j, -n * theta * pm.cross);
            m.add(k, k, n * pm.theta / theta);
            m.add(i, k, n * pm.home_theta);
            m.add(j, k, -n * pm.away_theta);
        }
    }
    Ok(FisherMatrix {
        m,
        kind: FisherKind::Him,
    })
}

/// Trace of the inverse HIM: over all k+1 parameters and over the skills only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcrbTrace {
    pub total: f64,
    pub skills: f64,
}

pub fn hcrb_trace(fim: &FisherMatrix) -> Result<HcrbTrace> {
    let diag = Cholesky::new(&fim.m)?.inverse_diagonal();
    let skills = diag[..fim.skills()].iter().sum();
    Ok(HcrbTrace {
        total: diag.iter().sum(),
        skills,
    })
}

/// Tr((H^Λ)⁻¹) for the skill block alone, the bound when θ is known.
pub fn skill_block_trace(fim: &FisherMatrix) -> Result<f64> {
    let k = fim.skills();
    let mut block = SymMatrix::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            block.set(i, j, fim.m.get(i, j));
        }
    }
    Ok(Cholesky::new(&block)?.trace_inverse())
}

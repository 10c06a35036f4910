//! Gamma-ratio expectations entering the Bayesian and hybrid information
//! matrices. Λ_i ~ Gamma(a_i, b) and Λ_j ~ Gamma(a_j, b) are independent with a
//! common rate b.

use crate::error::{Error, Result};
use crate::special::{hyp2f1, integrate, log_beta, log_gamma, log_gamma_signed, QuadratureSpec};

fn shape_check(shape: f64, min: f64) -> Result<()> {
    if shape > min && shape.is_finite() {
        Ok(())
    } else {
        Err(Error::ShapeTooSmall {
            index: None,
            shape,
            min,
        })
    }
}

fn positive(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid {
            what,
            reason: format!("{x} must be positive and finite"),
        })
    }
}

/// T1 = E[Λ_i⁻²] = b² / ((a_i - 1)(a_i - 2)).
pub fn t1(a_i: f64, b: f64) -> Result<f64> {
    shape_check(a_i, 2.0)?;
    positive("rate", b)?;
    Ok(b * b / ((a_i - 1.0) * (a_i - 2.0)))
}

/// T2 = E[Λ_j / (Λ_i (Λ_i + Λ_j)²)]
///    = b²(a_i-2)Γ(a_i-2)/Γ(a_i) · [a_j/(A-2) - Γ(a_j+1)/((A-1)Γ(a_j))], A = a_i + a_j.
pub fn t2(a_i: f64, a_j: f64, b: f64) -> Result<f64> {
    shape_check(a_i, 2.0)?;
    positive("shape", a_j)?;
    positive("rate", b)?;
    let s = a_i + a_j;
    let lead = b * b * (a_i - 2.0) * (log_gamma(a_i - 2.0)? - log_gamma(a_i)?).exp();
    let ratio = (log_gamma(a_j + 1.0)? - log_gamma(a_j)?).exp();
    Ok(lead * (a_j / (s - 2.0) - ratio / (s - 1.0)))
}

/// T3 = E[(Λ_i + Λ_j)⁻²] = b² / ((A - 1)(A - 2)), A = a_i + a_j.
pub fn t3(a_i: f64, a_j: f64, b: f64) -> Result<f64> {
    positive("shape", a_i)?;
    positive("shape", a_j)?;
    shape_check(a_i + a_j, 2.0)?;
    positive("rate", b)?;
    let s = a_i + a_j;
    Ok(b * b / ((s - 1.0) * (s - 2.0)))
}

/// ∫₀¹ Beta(x; p, q) / (θx + 1 - x)^power dx.
fn beta_weighted(p: f64, q: f64, theta: f64, power: i32, spec: &QuadratureSpec) -> Result<f64> {
    let lb = log_beta(p, q)?;
    let f = |x: f64| {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        let dens = ((p - 1.0) * x.ln() + (q - 1.0) * (1.0 - x).ln() - lb).exp();
        dens / (theta * x + 1.0 - x).powi(power)
    };
    integrate(f, 0.0, 1.0, spec)
}

/// Shared reduction of E[Λ_i^{t_i} Λ_j^{t_j} / (θΛ_i + Λ_j)^power] to a Beta integral.
fn ratio_moment(
    a_i: f64,
    a_j: f64,
    b: f64,
    t_i: f64,
    t_j: f64,
    theta: f64,
    power: i32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    positive("shape", a_i)?;
    positive("shape", a_j)?;
    positive("rate", b)?;
    positive("theta", theta)?;
    let (p, q) = (a_i + t_i, a_j + t_j);
    shape_check(p, 0.0)?;
    shape_check(q, 0.0)?;
    let r = p + q - power as f64;
    shape_check(r, 0.0)?;
    let log_pref =
        -(t_i + t_j - power as f64) * b.ln() + log_gamma(r)? - log_gamma(a_i)? - log_gamma(a_j)?
            + log_beta(p, q)?;
    Ok(log_pref.exp() * beta_weighted(p, q, theta, power, spec)?)
}

/// μ(t_i, t_j) = E[Λ_i^{t_i} Λ_j^{t_j} / (θΛ_i + Λ_j)] by quadrature.
pub fn mu(
    a_i: f64,
    a_j: f64,
    b: f64,
    t_i: f64,
    t_j: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    ratio_moment(a_i, a_j, b, t_i, t_j, theta, 1, spec)
}

/// ν(t_i, t_j) = E[Λ_i^{t_i} Λ_j^{t_j} / (θΛ_i + Λ_j)²] by quadrature.
pub fn nu_shifted(
    a_i: f64,
    a_j: f64,
    b: f64,
    t_i: f64,
    t_j: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    ratio_moment(a_i, a_j, b, t_i, t_j, theta, 2, spec)
}

/// E[(θΛ_i + Λ_j)⁻²] via integration by parts in λ_j:
/// (a_j - 1) μ(0, -1) - b μ(0, 0). Requires a_j > 1.
pub fn nu(a_i: f64, a_j: f64, b: f64, theta: f64, spec: &QuadratureSpec) -> Result<f64> {
    shape_check(a_j, 1.0)?;
    Ok((a_j - 1.0) * mu(a_i, a_j, b, 0.0, -1.0, theta, spec)?
        - b * mu(a_i, a_j, b, 0.0, 0.0, theta, spec)?)
}

/// μ(t_i, t_j) from the hypergeometric closed form. Valid when a_j + t_j is a
/// positive integer and θ > 0.
///
/// With α = a_i + t_i - 1, β = a_j + t_j and s = α + β:
/// μ = b^{1-t_i-t_j} (-θ)^{β-1} / (Γ(a_i)Γ(a_j)) ·
///     [Γ(s)θ^{-s}/s · ₂F₁(s, s; s+1; (θ-1)/θ) + Σ_{m=1}^{β-1} (-θ)^{-m} (m-1)! Γ(s-m)].
pub fn mu_closed_form(a_i: f64, a_j: f64, b: f64, t_i: f64, t_j: f64, theta: f64) -> Result<f64> {
    positive("shape", a_i)?;
    positive("shape", a_j)?;
    positive("rate", b)?;
    positive("theta", theta)?;
    let beta = a_j + t_j;
    if !(beta >= 1.0 && beta == beta.floor()) {
        return Err(Error::Domain {
            function: "mu_closed_form",
            value: beta,
            reason: "a_j + t_j must be a positive integer",
        });
    }
    shape_check(a_i + t_i, 0.0)?;
    let alpha = a_i + t_i - 1.0;
    let s = alpha + beta;
    shape_check(s, 0.0)?;
    let nb = beta as i32;
    let f = hyp2f1(s, s, s + 1.0, (theta - 1.0) / theta)?;
    let mut bracket = (log_gamma(s)? - s * theta.ln()).exp() / s * f;
    let mut fact = 1.0;
    for m in 1..nb {
        if m > 1 {
            fact *= (m - 1) as f64;
        }
        let (lg, sg) = log_gamma_signed(s - m as f64)?;
        bracket += (-theta).powi(-m) * fact * sg * lg.exp();
    }
    let lead = (-(t_i + t_j - 1.0) * b.ln() - log_gamma(a_i)? - log_gamma(a_j)?).exp();
    Ok(lead * (-theta).powi(nb - 1) * bracket)
}

/// E[(θΛ_i + Λ_j)⁻²] from the integration-by-parts identity using the
/// closed-form μ. Requires a_j an integer greater than one.
pub fn nu_closed_form(a_i: f64, a_j: f64, b: f64, theta: f64) -> Result<f64> {
    shape_check(a_j, 1.0)?;
    Ok((a_j - 1.0) * mu_closed_form(a_i, a_j, b, 0.0, -1.0, theta)?
        - b * mu_closed_form(a_i, a_j, b, 0.0, 0.0, theta)?)
}

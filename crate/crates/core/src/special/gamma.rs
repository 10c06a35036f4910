//! Log-gamma and digamma on the positive real axis.
//!
//! Both functions shift the argument upward with the recurrence until an
//! asymptotic expansion is accurate to machine precision, then undo the shift.

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Threshold above which the Stirling series is used directly.
const STIRLING_MIN: f64 = 15.0;
/// Threshold above which the digamma asymptotic series is used directly.
const DIGAMMA_MIN: f64 = 10.0;

/// Coefficients B_{2m} / (2m (2m-1)) of the Stirling series.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// Coefficients B_{2m} / (2m) of the digamma asymptotic series.
const DIGAMMA: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for c in STIRLING.iter().rev() {
        corr = corr * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr * inv
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "log_gamma",
            value: x,
            reason: "requires a finite x > 0",
        });
    }
    if x >= STIRLING_MIN {
        return Ok(stirling(x));
    }
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < STIRLING_MIN {
        product *= shifted;
        shifted += 1.0;
    }
    Ok(stirling(shifted) - product.ln())
}

/// Log-gamma returning `(ln|Γ(x)|, sign Γ(x))` for any real `x` that is not a pole.
pub fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x > 0.0 {
        return Ok((log_gamma(x)?, 1.0));
    }
    if x == x.floor() {
        return Err(Error::Domain {
            function: "log_gamma_signed",
            value: x,
            reason: "gamma has a pole at nonpositive integers",
        });
    }
    // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
    let s = (std::f64::consts::PI * x).sin();
    let lg = log_gamma(1.0 - x)?;
    Ok((std::f64::consts::PI.ln() - s.abs().ln() - lg, s.signum()))
}

/// Logarithm of the complete beta function B(x, y) for positive arguments.
pub fn log_beta(x: f64, y: f64) -> Result<f64> {
    Ok(log_gamma(x)? + log_gamma(y)? - log_gamma(x + y)?)
}

/// Digamma function ψ(x) = Γ'(x)/Γ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "digamma",
            value: x,
            reason: "requires a finite x > 0",
        });
    }
    let mut shifted = x;
    let mut acc = 0.0;
    while shifted < DIGAMMA_MIN {
        acc -= 1.0 / shifted;
        shifted += 1.0;
    }
    let inv2 = 1.0 / (shifted * shifted);
    let mut series = 0.0;
    for c in DIGAMMA.iter().rev() {
        series = series * inv2 + c;
    }
    Ok(acc + shifted.ln() - 0.5 / shifted - series * inv2)
}

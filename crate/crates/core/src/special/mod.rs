//! Special functions and one-dimensional quadrature.

mod gamma;
mod hypergeometric;
mod quadrature;

pub use gamma::{digamma, log_beta, log_gamma, log_gamma_signed};
pub use hypergeometric::{hyp2f1, incomplete_beta};
pub use quadrature::{integrate, integrate_with_error, QuadratureSpec};

//! Cramér–Rao-type bounds: Bayesian information for the basic model and
//! hybrid information for the home-field model.

mod expectations;
mod fisher;
mod linalg;

pub use expectations::{mu, mu_closed_form, nu, nu_closed_form, nu_shifted, t1, t2, t3};
pub use fisher::{
    bcrb_trace, bim, hcrb_trace, him, skill_block_trace, FisherKind, FisherMatrix, HcrbTrace,
};
pub use linalg::{explicit_inverse, Cholesky, SymMatrix};

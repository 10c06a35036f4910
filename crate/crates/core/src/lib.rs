//! Bayesian Bradley–Terry–Luce ranking: simulation, EM fitting, and Bayes-risk
//! lower bounds over comparison graphs.

pub mod cramer_rao;
pub mod em;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod info_bounds;
pub mod model;
pub mod special;

pub use error::{Error, Result};

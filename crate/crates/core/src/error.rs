use thiserror::Error;

/// Errors raised by the numerical and modelling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} is outside the domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{function}: series did not converge within {terms} terms")]
    NonConvergence {
        function: &'static str,
        terms: usize,
    },

    #[error("quadrature tolerance not met: estimate {estimate:e}, error bound {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("shape parameter {shape} must exceed {min}{}", item_suffix(*.index))]
    ShapeTooSmall {
        index: Option<usize>,
        shape: f64,
        min: f64,
    },

    #[error("items {i} and {j} have different rates ({bi} vs {bj})")]
    UnequalRates {
        i: usize,
        j: usize,
        bi: f64,
        bj: f64,
    },

    #[error("matrix is not positive definite (failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("non-finite iterate at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("log-posterior decreased at iteration {iteration}: {before} -> {after}")]
    NotMonotone {
        iteration: usize,
        before: f64,
        after: f64,
    },

    #[error("budget {total} is smaller than the {edges} edges of the topology")]
    BudgetTooSmall { total: u64, edges: usize },

    #[error("node loads are not realizable: {0}")]
    InfeasibleLoads(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::NonConvergence { .. }
                | Error::ToleranceNotMet { .. }
                | Error::ShapeTooSmall { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::NonFinite { .. }
                | Error::NotMonotone { .. }
        )
    }
}

fn item_suffix(index: Option<usize>) -> String {
    index.map(|i| format!(" (item {i})")).unwrap_or_default()
}

pub type Result<T> = std::result::Result<T, Error>;

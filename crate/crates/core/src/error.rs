use thiserror::Error;

/// Errors produced by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}` = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what} did not converge within {terms} terms (last estimate {achieved:e})")]
    NonConvergence {
        what: &'static str,
        terms: usize,
        achieved: f64,
    },

    #[error("series budget of {terms} terms exhausted; tail bound reached {bound:e}")]
    BudgetExhausted { terms: usize, bound: f64 },

    #[error("point with |z| = {radius} is outside the region where {what} is defined")]
    OutsideDomain { what: &'static str, radius: f64 },

    #[error("operation `{0}` requires lambda > 0")]
    DegenerateLambda(&'static str),

    #[error("quadrature rule was built for alpha = {rule} but alpha = {requested} was requested")]
    AlphaMismatch { rule: f64, requested: f64 },

    #[error("evaluation failed at node {index}: {source}")]
    NodeEvaluation {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidArgument {
        name,
        value,
        reason,
    }
}

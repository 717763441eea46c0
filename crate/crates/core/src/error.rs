use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive definite (pivot {pivot} is not positive)")]
    NotPositiveDefinite { pivot: usize },

    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid model: {}", format_violations(.0))]
    InvalidModel(Vec<Violation>),

    #[error("operation requires a {required} radial law, got {actual}")]
    WrongRadialLaw { required: String, actual: String },

    #[error("no finite limit for c_{margin}: probe values {at_1e8:e} (u=1e8) and {at_1e12:e} (u=1e12)")]
    NoFiniteLimit { margin: usize, at_1e8: f64, at_1e12: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

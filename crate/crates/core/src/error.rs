use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("duplicate point at indices {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("point {0:?} lies outside every cube of the complex")]
    OutsideComplex(Vec<f64>),
    #[error("shifted vertex {0:?} is not a vertex of the complex")]
    MissingVertex(Vec<i64>),
    #[error("elements live over different host spaces")]
    MixedHosts,
    #[error("exact enumeration supports at most {cap} points, got {points}; use the bounds-only operations")]
    CapExceeded { points: usize, cap: usize },
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("decomposition does not evaluate to the target (max coordinate residual {0:e})")]
    Residual(f64),
    #[error("element is not in the span of the admissible molecules")]
    NotRepresentable,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

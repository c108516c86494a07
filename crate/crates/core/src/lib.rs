//! Lipschitz-free spaces over finite metric spaces and dyadic grids.

pub mod basis;
pub mod constants;
pub mod dyadic;
pub mod error;
pub mod free;
pub mod lambda;
pub mod metric;
pub mod retraction;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Metric = metric::PointedFiniteMetric<f64>;
pub type Metric32 = metric::PointedFiniteMetric<f32>;
pub type Complex = lambda::CubeComplex<f64>;
pub type Complex32 = lambda::CubeComplex<f32>;
pub type FreeElement64 = free::FreeElement<f64>;
pub type FreeElement32 = free::FreeElement<f32>;
pub type Decomposition64 = free::Decomposition<f64>;
pub type Decomposition32 = free::Decomposition<f32>;
pub type Retraction = retraction::RetractionContext<f64>;
pub type Retraction32 = retraction::RetractionContext<f32>;
/// Basis combinations with floating coefficients.
pub type Combination = basis::BasisCombination<f64>;
/// Basis combinations with exact coefficients in `2^-α`.
pub type ExactCombination = basis::BasisCombination<basis::AlphaPoly>;

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the metric, retraction and norm code is generic over.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    /// Relative tolerance used for rank decisions in elimination.
    fn rank_tol() -> Self;
    /// Tolerance for "this decomposition reproduces that element" checks.
    fn residual_tol() -> Self;

    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn rank_tol() -> Self {
        1e-10
    }
    fn residual_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn rank_tol() -> Self {
        1e-4
    }
    fn residual_tol() -> Self {
        1e-4
    }
}

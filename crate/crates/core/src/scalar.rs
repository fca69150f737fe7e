//! Scalar abstraction shared by every numerical module.
//!
//! All algebra in this crate is written against [`Real`], which is
//! implemented for `f32` and `f64`. Tolerances live on the trait so that
//! each precision carries thresholds it can actually meet.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Residual tolerance for polynomial roots, relative to the coefficient scale.
    fn root_tolerance() -> Self;

    /// Half-width of the band around `|z| = 1` inside which a root is
    /// treated as lying on the unit circle.
    fn circle_guard() -> Self;

    /// Bound on `|F+(z) F-(z) A(z) - 1|` accepted from a factorization.
    fn product_identity_tolerance() -> Self;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for the finite literals used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in a float")
    }
}

impl Real for f64 {
    fn root_tolerance() -> Self {
        1e-10
    }
    fn circle_guard() -> Self {
        1e-6
    }
    fn product_identity_tolerance() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn root_tolerance() -> Self {
        1e-4
    }
    fn circle_guard() -> Self {
        1e-3
    }
    fn product_identity_tolerance() -> Self {
        1e-3
    }
}

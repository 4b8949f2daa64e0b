use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating point scalar the numerical core is written against.
///
/// The associated tolerances are the precision-dependent checks applied at
/// construction time; the `f64` values are the ones the acceptance suite pins.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance for `π_i q_ij = π_j q_ji`.
    const BALANCE_TOL: f64;
    /// Absolute tolerance on `Σ π_i = 1`.
    const NORMALIZATION_TOL: f64;
    /// Absolute width at which Sturm bisection stops.
    const BISECTION_TOL: f64;

    /// Converts an `f64` literal. Panics only for values that do not fit,
    /// which never happens for the literals used in this crate.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("index representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const BALANCE_TOL: f64 = 1e-10;
    const NORMALIZATION_TOL: f64 = 1e-12;
    const BISECTION_TOL: f64 = 1e-15;
}

impl Scalar for f32 {
    const BALANCE_TOL: f64 = 1e-4;
    const NORMALIZATION_TOL: f64 = 1e-5;
    const BISECTION_TOL: f64 = 1e-6;
}

/// `max(a, b)` that never propagates a NaN from the second argument.
#[inline]
pub(crate) fn fmax<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

#[inline]
pub(crate) fn fmin<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the solvers are generic over.
///
/// Besides the arithmetic from [`Float`], each implementation carries the
/// numerical tolerances the LP and QP solvers work with. The `f64` values are
/// the reference ones; `f32` gets proportionally looser thresholds.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Smallest pivot magnitude the simplex accepts.
    fn pivot_tol() -> Self;
    /// Absolute feasibility tolerance for constraint residuals.
    fn feas_tol() -> Self;
    /// Reduced-cost threshold below which a column may enter the basis.
    fn opt_tol() -> Self;
    /// Magnitude below which a basic value is snapped to zero.
    fn zero_snap() -> Self;

    /// Converts an `f64` literal. Every value used in this crate is
    /// representable (possibly rounded) in both supported widths.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    /// `+1`, `-1` or `0`, unlike [`Float::signum`] which maps `0` to `1`.
    #[inline]
    fn sign(self) -> Self {
        if self > Self::zero() {
            Self::one()
        } else if self < Self::zero() {
            -Self::one()
        } else {
            Self::zero()
        }
    }
}

impl Real for f64 {
    fn pivot_tol() -> Self {
        1e-11
    }
    fn feas_tol() -> Self {
        1e-8
    }
    fn opt_tol() -> Self {
        1e-10
    }
    fn zero_snap() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn pivot_tol() -> Self {
        1e-5
    }
    fn feas_tol() -> Self {
        1e-3
    }
    fn opt_tol() -> Self {
        1e-5
    }
    fn zero_snap() -> Self {
        1e-6
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    a.iter().map(|&x| x * x).sum::<T>().sqrt()
}

pub(crate) fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(0.0f64.sign(), 0.0);
        assert_eq!((-3.0f64).sign(), -1.0);
        assert_eq!(2.0f32.sign(), 1.0);
    }

    #[test]
    fn tolerances_are_ordered() {
        assert!(f64::pivot_tol() < f64::feas_tol());
        assert!(f32::pivot_tol() < f32::feas_tol());
    }
}

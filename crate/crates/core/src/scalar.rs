//! Floating point scalars the numerical core is generic over.

use nalgebra as na;
use num_traits as nt;

/// Real scalar usable by every numerical routine in the crate.
pub trait Scalar:
    na::RealField + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive + Copy + Send + Sync
{
    /// Machine epsilon of the type.
    const EPS: Self;

    /// Converts an `f64` literal or intermediate.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        <Self as nt::FromPrimitive>::from_usize(x).expect("usize is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// `tol` when the type can resolve it, otherwise a small multiple of epsilon.
    #[inline]
    fn tol(tol: f64) -> Self {
        let floor = Self::EPS * Self::of(64.0);
        let t = Self::of(tol);
        if t > floor {
            t
        } else {
            floor
        }
    }

    /// Clamps to `[-1, 1]`, the domain of `acos`.
    #[inline]
    fn clamp_unit(self) -> Self {
        if self > Self::one() {
            Self::one()
        } else if self < -Self::one() {
            -Self::one()
        } else {
            self
        }
    }
}

impl Scalar for f32 {
    const EPS: Self = f32::EPSILON;
}

impl Scalar for f64 {
    const EPS: Self = f64::EPSILON;
}

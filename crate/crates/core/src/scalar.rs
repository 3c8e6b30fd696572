//! Real scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point type the kernels and dilations are computed in: `f32` or `f64`.
///
/// Tolerances that the algorithms need by default are exposed per type, so
/// that `f32` callers do not inherit thresholds that only make sense in
/// double precision.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Default relative tolerance for positivity and rank decisions.
    fn default_tol() -> Self;

    /// Tolerance used for structural identities (unitarity, reconstruction).
    fn identity_tol() -> Self;

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossless-enough constant conversion; panics only on non-representable literals.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-10
    }
    fn identity_tol() -> Self {
        1e-8
    }
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-5
    }
    fn identity_tol() -> Self {
        1e-3
    }
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

/// Complex entry type over a [`Real`] scalar.
pub type C<T> = Complex<T>;

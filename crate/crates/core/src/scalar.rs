//! Floating-point scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// A real floating-point scalar: `f32` or `f64`.
///
/// Every routine in this crate that does not need exact arithmetic is written
/// against this trait. Iteration stopping rules are expressed in units of
/// [`Float::epsilon`], so an `f32` instantiation converges to `f32` accuracy
/// rather than spinning on an `f64` tolerance.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `1/e`, the branch point of the Lambert function in the `rho` convention.
    #[inline]
    fn inv_e() -> Self {
        Self::E().recip()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `true` when both components are finite.
#[inline]
pub fn is_finite_c<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `e^{i theta}` with the sine and cosine snapped to exact values at multiples of
/// a quarter turn, so that rotations by `2 pi j / k` land exactly on the axes.
pub fn unit_phase<T: Real>(numer: usize, denom: usize) -> Complex<T> {
    let numer = numer % denom;
    if numer == 0 {
        return Complex::new(T::one(), T::zero());
    }
    if 2 * numer == denom {
        return Complex::new(-T::one(), T::zero());
    }
    if 4 * numer == denom {
        return Complex::new(T::zero(), T::one());
    }
    if 4 * numer == 3 * denom {
        return Complex::new(T::zero(), -T::one());
    }
    let angle = T::TAU() * T::from_count(numer) / T::from_count(denom);
    Complex::new(angle.cos(), angle.sin())
}

/// Angle `2 pi numer / denom` reduced to `(-pi, pi]`.
pub fn principal_turn<T: Real>(numer: usize, denom: usize) -> T {
    let numer = numer % denom;
    if 2 * numer <= denom {
        T::TAU() * T::from_count(numer) / T::from_count(denom)
    } else {
        -(T::TAU() * T::from_count(denom - numer) / T::from_count(denom))
    }
}

/// `theta cot theta` with the convention `0 cot 0 = 1`.
#[inline]
pub fn theta_cot_theta<T: Real>(theta: T) -> T {
    if theta.abs() < T::lit(1e-4) {
        // 1 - t^2/3 - t^4/45
        let t2 = theta * theta;
        T::one() - t2 / T::lit(3.0) - t2 * t2 / T::lit(45.0)
    } else {
        theta * theta.cos() / theta.sin()
    }
}

/// `sin(theta) / theta` with the removable singularity filled in.
#[inline]
pub fn sinc<T: Real>(theta: T) -> T {
    if theta.abs() < T::lit(1e-4) {
        let t2 = theta * theta;
        T::one() - t2 / T::lit(6.0) + t2 * t2 / T::lit(120.0)
    } else {
        theta.sin() / theta
    }
}

//! Principal Lambert function `W0`, the reflected branch `rho(z) = -W0(-z)`,
//! its one-sided boundary values on the cut `[1/e, inf)`, and the region
//! `Omega = { x + iy : |y| < pi, x < y cot y }` that `rho` maps onto.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, sinc, theta_cot_theta, Real};

/// Iteration cap shared by every Halley loop in this module.
pub const MAX_ITER: usize = 50;

/// Points of `rho`'s argument this close to the cut `[1/e, inf)` are rejected.
pub const CUT_BAND: f64 = 1e-9;

/// Upper end of the bisection bracket for boundary angles.
pub const THETA_MAX_GAP: f64 = 1e-12;

/// Which side of the cut a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Limit from the upper half plane.
    Plus,
    /// Limit from the lower half plane.
    Minus,
}

/// Boundary value of `rho` on the cut, parametrized by the angle `theta`.
///
/// `value = theta cot theta + i theta` and `t = (theta / sin theta) e^{-theta cot theta}`.
/// `log_t` is kept alongside `t` because `t` overflows long before `theta` reaches `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint<T> {
    pub theta: T,
    pub t: T,
    pub log_t: T,
    pub value: Complex<T>,
}

impl<T: Real> BoundaryPoint<T> {
    /// Boundary point at angle `theta` in `[0, pi)`.
    pub fn from_theta(theta: T) -> Result<Self> {
        if !(theta >= T::zero() && theta < T::PI()) {
            return Err(Error::domain(
                "boundary_point",
                format!("theta = {theta} not in [0, pi)"),
            ));
        }
        let log_t = log_inv_sigma(theta);
        Ok(BoundaryPoint {
            theta,
            t: log_t.exp(),
            log_t,
            value: Complex::new(theta_cot_theta(theta), theta),
        })
    }

    /// Value from the requested side.
    pub fn side(&self, side: Side) -> Complex<T> {
        match side {
            Side::Plus => self.value,
            Side::Minus => self.value.conj(),
        }
    }
}

/// `ln t(theta) = -ln(sin theta / theta) - theta cot theta`, strictly increasing on `[0, pi)`
/// from `-1` to `+inf`.
#[inline]
pub(crate) fn log_inv_sigma<T: Real>(theta: T) -> T {
    -sinc(theta).ln() - theta_cot_theta(theta)
}

/// Principal branch `W0(z)`: the solution of `w e^w = z` with `Im w` in `(-pi, pi)`
/// lying on the principal sheet. The branch cut is `(-inf, -1/e)`; `-1/e` itself maps to `-1`.
pub fn w0<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if !is_finite_c(z) {
        return Err(Error::domain("w0", "non-finite argument"));
    }
    if z.im < T::zero() {
        return w0(z.conj()).map(|w| w.conj());
    }
    let eps = T::epsilon();
    let inv_e = T::inv_e();
    if z.im == T::zero() {
        if z.re == T::zero() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        // Rounding of 1/e itself is absorbed into the closure point.
        let slack = T::lit(4.0) * eps;
        if z.re < -inv_e - slack {
            return Err(Error::domain(
                "w0",
                format!("z = {} lies on the cut (-inf, -1/e)", z.re),
            ));
        }
        if z.re <= -inv_e + slack {
            return Ok(Complex::new(-T::one(), T::zero()));
        }
    }

    let abs = z.norm();
    let near_branch = (z + Complex::new(inv_e, T::zero())).norm() < T::lit(0.3);
    let w = if abs < T::lit(0.2) {
        let guess = small_series(z);
        halley_exp(z, guess)?
    } else if near_branch {
        halley_exp(z, branch_guess(z))?
    } else {
        let log_z = z.ln();
        halley_log(log_z, log_guess(z, log_z))?
    };
    // Keep real inputs on the real line exactly.
    if z.im == T::zero() {
        return Ok(Complex::new(w.re, T::zero()));
    }
    Ok(w)
}

/// `W0` of `exp(log_z)`, for arguments whose modulus does not fit in `T`.
/// `log_z.im` must lie in `[-pi, pi]`; the cut corresponds to `|log_z.im| = pi`.
pub fn w0_from_log<T: Real>(log_z: Complex<T>) -> Result<Complex<T>> {
    if !is_finite_c(log_z) {
        return Err(Error::domain("w0_from_log", "non-finite argument"));
    }
    if log_z.im.abs() > T::PI() {
        return Err(Error::domain("w0_from_log", "argument not in [-pi, pi]"));
    }
    if log_z.re < T::lit(1.0) {
        return w0(log_z.exp());
    }
    if log_z.im < T::zero() {
        return w0_from_log(log_z.conj()).map(|w| w.conj());
    }
    if log_z.im == T::PI() {
        return Err(Error::domain(
            "w0_from_log",
            "argument lies on the cut (-inf, -1/e)",
        ));
    }
    let w = halley_log(log_z, asymptotic_guess(log_z))?;
    if log_z.im == T::zero() {
        return Ok(Complex::new(w.re, T::zero()));
    }
    Ok(w)
}

/// `rho(z) = -W0(-z)`, defined off the cut `[1/e, inf)`.
pub fn rho<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if !is_finite_c(z) {
        return Err(Error::domain("rho", "non-finite argument"));
    }
    let inv_e = T::inv_e();
    let dist = if z.re >= inv_e {
        z.im.abs()
    } else {
        (z - Complex::new(inv_e, T::zero())).norm()
    };
    if dist <= T::lit(CUT_BAND) {
        return Err(Error::domain(
            "rho",
            format!(
                "z = {} + {}i is within {CUT_BAND:e} of the cut [1/e, inf)",
                z.re, z.im
            ),
        ));
    }
    w0(-z).map(|w| -w)
}

/// `rho(r e^{i arg})` with `r = exp(ln_r)`, usable when `r` overflows.
/// `arg` must lie in `(-pi, pi]`.
pub fn rho_polar<T: Real>(ln_r: T, arg: T) -> Result<Complex<T>> {
    let pi = T::PI();
    if !(ln_r.is_finite() && arg.is_finite()) || arg <= -pi || arg > pi {
        return Err(Error::domain(
            "rho_polar",
            format!("bad polar argument ({ln_r}, {arg})"),
        ));
    }
    if ln_r < T::lit(1.0) {
        let r = ln_r.exp();
        return rho(Complex::new(r * arg.cos(), r * arg.sin()));
    }
    // r > e: the cut is reached only at arg = 0, at distance r |sin arg|.
    if arg.abs() < T::FRAC_PI_2() && ln_r + arg.sin().abs().ln() <= T::lit(CUT_BAND).ln() {
        return Err(Error::domain(
            "rho_polar",
            "argument within the cut band of [1/e, inf)",
        ));
    }
    let arg_neg = if arg > T::zero() { arg - pi } else { arg + pi };
    w0_from_log(Complex::new(ln_r, arg_neg)).map(|w| -w)
}

/// Boundary value `rho_{+/-}(t) = theta cot theta +/- i theta` for `t >= 1/e`.
pub fn rho_boundary<T: Real>(t: T, side: Side) -> Result<Complex<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::domain(
            "rho_boundary",
            format!("t = {t} is not a finite real"),
        ));
    }
    boundary_point_log(t.ln()).map(|p| p.side(side))
}

/// Boundary point for `t >= 1/e`.
pub fn boundary_point<T: Real>(t: T) -> Result<BoundaryPoint<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::domain(
            "boundary_point",
            format!("t = {t} is not a finite positive real"),
        ));
    }
    boundary_point_log(t.ln())
}

/// Boundary point for `t = exp(log_t) >= 1/e`, solved by bisection in `theta`.
pub fn boundary_point_log<T: Real>(log_t: T) -> Result<BoundaryPoint<T>> {
    let slack = T::lit(4.0) * T::epsilon();
    if !(log_t >= -T::one() - slack) || !log_t.is_finite() {
        return Err(Error::domain(
            "rho_boundary",
            format!("t = exp({log_t}) < 1/e"),
        ));
    }
    let theta = theta_for_log_t(log_t)?;
    Ok(BoundaryPoint {
        theta,
        t: log_t.exp(),
        log_t,
        value: Complex::new(theta_cot_theta(theta), theta),
    })
}

/// Bisection for the angle `theta` in `[0, pi - 1e-12]` with `log_inv_sigma(theta) = log_t`.
/// Runs until the bracket stops shrinking in `T`.
pub(crate) fn theta_for_log_t<T: Real>(log_t: T) -> Result<T> {
    let mut lo = T::zero();
    let mut hi = T::PI() - T::lit(THETA_MAX_GAP);
    if log_inv_sigma(hi) < log_t {
        return Err(Error::domain(
            "rho_boundary",
            "t beyond the bisection bracket",
        ));
    }
    if log_t <= -T::one() {
        return Ok(T::zero());
    }
    loop {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if log_inv_sigma(mid) < log_t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (log_inv_sigma(hi) - log_t).abs() < (log_inv_sigma(lo) - log_t).abs() {
        Ok(hi)
    } else {
        Ok(lo)
    }
}

/// `true` iff `w` lies in the open region `Omega`.
///
/// Points within a few ulps of the boundary curve `x = y cot y` count as boundary,
/// since the curve is not exactly representable.
pub fn in_omega<T: Real>(w: Complex<T>) -> bool {
    if !is_finite_c(w) || w.im.abs() >= T::PI() {
        return false;
    }
    let edge = theta_cot_theta(w.im);
    let slack = T::lit(8.0) * T::epsilon() * T::one().max(w.re.abs()).max(edge.abs());
    w.re < edge - slack
}

/// `true` iff `w` lies in the closure of `Omega`, allowing `tol` of slack.
pub fn in_omega_closure<T: Real>(w: Complex<T>, tol: T) -> bool {
    if !is_finite_c(w) || w.im.abs() > T::PI() + tol {
        return false;
    }
    let y = w.im.abs().min(T::PI() - T::epsilon());
    w.re <= theta_cot_theta(y) + tol * T::one().max(w.re.abs())
}

/// Taylor series `sum (-n)^{n-1} / n! z^n`, radius `1/e`.
fn small_series<T: Real>(z: Complex<T>) -> Complex<T> {
    let mut coeff = T::one();
    let mut power = z;
    let mut sum = z;
    for n in 1..64usize {
        // c_{n+1} = -c_n (1 + 1/n)^{n-1}
        let nf = T::from_count(n);
        coeff = -coeff * (T::one() + nf.recip()).powi(n as i32 - 1);
        power = power * z;
        let term = power * coeff;
        sum = sum + term;
        if term.norm() <= T::epsilon() * sum.norm() {
            break;
        }
    }
    sum
}

/// Series in `p = sqrt(2(e z + 1))` about the branch point `-1/e`.
fn branch_guess<T: Real>(z: Complex<T>) -> Complex<T> {
    let mut q = (z * T::E() + T::one()) * T::lit(2.0);
    if q.im == T::zero() && q.re < T::zero() {
        q.re = T::zero();
    }
    let p = q.sqrt();
    let coeffs = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
    ];
    let mut acc = Complex::new(T::zero(), T::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * p + T::lit(c);
    }
    acc
}

fn log_guess<T: Real>(z: Complex<T>, log_z: Complex<T>) -> Complex<T> {
    if (z - T::one()).norm() < T::lit(1.5) {
        // Rational fit of W0 about the origin, adequate on the positive real neighbourhood.
        let z2 = z * z;
        return z * (z * T::lit(6.0) + z2 + T::lit(3.0))
            / (z * T::lit(9.0) + z2 * T::lit(5.0) + T::lit(3.0));
    }
    asymptotic_guess(log_z)
}

fn asymptotic_guess<T: Real>(log_z: Complex<T>) -> Complex<T> {
    log_z - log_z.ln()
}

/// Halley iteration on `w e^w - z`.
fn halley_exp<T: Real>(z: Complex<T>, mut w: Complex<T>) -> Result<Complex<T>> {
    let tol = T::lit(4.0) * T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let mut last_step = T::infinity();
    for _ in 0..MAX_ITER {
        let ew = (-w).exp();
        let f = w - z * ew;
        let wp1 = w + one;
        let denom = wp1 - (w + two) * f / (wp1 * two);
        let step = f / denom;
        if !is_finite_c(step) {
            break;
        }
        w = w - step;
        last_step = step.norm();
        if last_step <= tol * w.norm() {
            return Ok(w);
        }
    }
    accept_or_fail("w0", z, w, last_step)
}

/// Halley iteration on `w + Log w - log_z`, valid on the principal sheet away from
/// the origin and the branch point.
fn halley_log<T: Real>(log_z: Complex<T>, mut w: Complex<T>) -> Result<Complex<T>> {
    let tol = T::lit(4.0) * T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let mut last_step = T::infinity();
    for _ in 0..MAX_ITER {
        let g = w + w.ln() - log_z;
        let ratio = g * w / (w + one);
        let step = ratio / (ratio / (w * (w + one) * two) + one);
        if !is_finite_c(step) {
            break;
        }
        w = w - step;
        last_step = step.norm();
        if last_step <= tol * w.norm() {
            return Ok(w);
        }
    }
    let z = if log_z.re < T::lit(700.0) {
        log_z.exp()
    } else {
        Complex::new(T::infinity(), T::zero())
    };
    accept_or_fail("w0", z, w, last_step)
}

/// After the iteration cap, accept a result whose last correction was at rounding level.
fn accept_or_fail<T: Real>(
    op: &'static str,
    z: Complex<T>,
    w: Complex<T>,
    last_step: T,
) -> Result<Complex<T>> {
    if is_finite_c(w) && last_step <= T::lit(256.0) * T::epsilon() * w.norm().max(T::one()) {
        return Ok(w);
    }
    let residual = if is_finite_c(w) && is_finite_c(z) {
        (w * w.exp() - z).norm().to_f64_lossy()
    } else {
        f64::NAN
    };
    Err(Error::Convergence {
        op,
        iterations: MAX_ITER,
        residual,
    })
}

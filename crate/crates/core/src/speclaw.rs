//! The law `mu` of `T*T` on `[0, e]`, described through the decreasing bijection
//! `sigma(v) = (sin v / v) e^{v cot v}` from `(0, pi)` onto `(0, e)`.
//!
//! Integrals against `mu` are computed in the `v` variable, where
//! `phi(sigma(v)) |sigma'(v)| = ((cos v - sin v / v)^2 + sin^2 v) / pi` is smooth on `[0, pi]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{Integrator, Quadrature};
use crate::scalar::{sinc, theta_cot_theta, Real};
use crate::wbranch::{log_inv_sigma, theta_for_log_t};

/// One point of the law, indexed by the parameter `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint<T> {
    pub v: T,
    /// `sigma(v)`.
    pub y: T,
    /// Density `phi(y)`.
    pub phi: T,
    /// Distribution function `F(y)`.
    pub cdf: T,
}

impl<T: Real> SpectralPoint<T> {
    pub fn at(v: T) -> Result<Self> {
        Ok(SpectralPoint {
            v,
            y: sigma(v)?,
            phi: phi_of_v(v),
            cdf: cdf_of_v(v),
        })
    }
}

/// Terms `a_1, a_2, ...` of `a_{n+1} = a_n F(e t / a_n)` with `a_1 = F(e t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace<T> {
    pub t: T,
    pub terms: Vec<T>,
}

impl<T: Real> RecursionTrace<T> {
    /// `a_{n_max} - t`.
    pub fn terminal_gap(&self) -> T {
        self.terms.last().map_or(T::nan(), |&a| a - self.t)
    }
}

fn check_v<T: Real>(op: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v < T::PI() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("v = {v} not in [0, pi)")))
    }
}

/// `sigma(v)`, with `sigma(0) = e`.
pub fn sigma<T: Real>(v: T) -> Result<T> {
    check_v("sigma", v)?;
    Ok(sigma_unchecked(v))
}

#[inline]
pub(crate) fn sigma_unchecked<T: Real>(v: T) -> T {
    (-log_inv_sigma(v)).exp()
}

/// `ln sigma(v)`, finite on `[0, pi)` even where `sigma` underflows.
pub fn log_sigma<T: Real>(v: T) -> Result<T> {
    check_v("log_sigma", v)?;
    Ok(-log_inv_sigma(v))
}

/// `sigma'(v) = sigma(v) (2 cot v - 1/v - v / sin^2 v)`, negative on `(0, pi)`.
pub fn dsigma<T: Real>(v: T) -> Result<T> {
    check_v("dsigma", v)?;
    if v < T::lit(1e-3) {
        // ln sigma = 1 - v^2/2 - v^4/36 + O(v^6)
        return Ok(-sigma_unchecked(v) * (v + v * v * v / T::lit(9.0)));
    }
    let s = v.sin();
    let bracket = T::lit(2.0) * v.cos() / s - v.recip() - v / (s * s);
    Ok(sigma_unchecked(v) * bracket)
}

/// Inverse of `sigma` by bisection in `v`; `sigma_inv(e) = 0`.
pub fn sigma_inv<T: Real>(y: T) -> Result<T> {
    if !(y > T::zero() && y <= T::E()) {
        return Err(Error::domain("sigma_inv", format!("y = {y} not in (0, e]")));
    }
    theta_for_log_t(-y.ln())
}

/// `phi(sigma(v)) = sin v e^{-v cot v} / pi`.
#[inline]
pub fn phi_of_v<T: Real>(v: T) -> T {
    v.sin() * (-theta_cot_theta(v)).exp() / T::PI()
}

/// Density of `mu` at `y` in `(0, e)`.
pub fn phi<T: Real>(y: T) -> Result<T> {
    if !(y > T::zero() && y < T::E()) {
        return Err(Error::domain("phi", format!("y = {y} not in (0, e)")));
    }
    Ok(phi_of_v(sigma_inv(y)?))
}

/// `1 - F(sigma(v)) = (v - sin v)(v + sin v) / (pi v)`, accurate for small `v`.
pub fn cdf_complement_of_v<T: Real>(v: T) -> T {
    if v == T::zero() {
        return T::zero();
    }
    let v_minus_sin = if v < T::lit(0.25) {
        // sum_{m>=1} (-1)^{m+1} v^{2m+1} / (2m+1)!, through v^15
        let v2 = v * v;
        let mut acc = T::zero();
        for d in [
            1307674368000.0,
            -6227020800.0,
            39916800.0,
            -362880.0,
            5040.0,
            -120.0,
            6.0,
        ] {
            acc = acc * v2 + T::lit(1.0 / d);
        }
        acc * v2 * v
    } else {
        v - v.sin()
    };
    v_minus_sin * (v + v.sin()) / (T::PI() * v)
}

/// `F(sigma(v)) = 1 - v/pi + sin^2 v / (pi v)`.
#[inline]
pub fn cdf_of_v<T: Real>(v: T) -> T {
    T::one() - cdf_complement_of_v(v)
}

/// Distribution function of `mu`; `F(0) = 0`, `F(e) = 1`.
pub fn cdf_f<T: Real>(y: T) -> Result<T> {
    if !(y >= T::zero() && y <= T::E()) {
        return Err(Error::domain("cdf_F", format!("y = {y} not in [0, e]")));
    }
    if y == T::zero() {
        return Ok(T::zero());
    }
    Ok(cdf_of_v(sigma_inv(y)?))
}

/// `1 - F(y)` without cancellation near `y = e`.
pub fn cdf_f_complement<T: Real>(y: T) -> Result<T> {
    if !(y >= T::zero() && y <= T::E()) {
        return Err(Error::domain("cdf_F", format!("y = {y} not in [0, e]")));
    }
    if y == T::zero() {
        return Ok(T::one());
    }
    Ok(cdf_complement_of_v(sigma_inv(y)?))
}

/// Quantile function of `mu` by bisection in `v` (`F` is decreasing in `v`).
pub fn cdf_f_inv<T: Real>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::domain("cdf_F_inv", format!("p = {p} not in [0, 1]")));
    }
    if p == T::zero() {
        return Ok(T::zero());
    }
    if p == T::one() {
        return Ok(T::E());
    }
    let mut lo = T::zero();
    let mut hi = T::PI();
    loop {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf_of_v(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(sigma_unchecked(lo))
}

/// The recursion `a_1 = F(e t)`, `a_{n+1} = a_n F(e t / a_n)` for `t` in `[0, 1]`.
pub fn an_recursion<T: Real>(t: T, n_max: usize) -> Result<RecursionTrace<T>> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::domain(
            "an_recursion",
            format!("t = {t} not in [0, 1]"),
        ));
    }
    if n_max == 0 {
        return Err(Error::domain("an_recursion", "n_max must be at least 1"));
    }
    let e = T::E();
    let mut terms = Vec::with_capacity(n_max);
    let mut a = cdf_f((e * t).min(e))?;
    terms.push(a);
    for _ in 1..n_max {
        if a == T::zero() {
            terms.push(a);
            continue;
        }
        let y = (e * t / a).min(e);
        // a F(y) = a - a (1 - F(y)) keeps the small decrement exact near the fixed point.
        a = a - a * cdf_f_complement(y)?;
        terms.push(a);
    }
    Ok(RecursionTrace { t, terms })
}

/// `phi(sigma(v)) |sigma'(v)|`, the density of `mu` pulled back to `v`.
#[inline]
pub fn v_weight<T: Real>(v: T) -> T {
    let c = v.cos() - sinc(v);
    let s = v.sin();
    (c * c + s * s) / T::PI()
}

/// `integral of g(y) dmu(y)` computed as `integral_0^pi g(sigma(v)) w(v) dv`.
pub fn integrate_mu<T: Real>(
    mut g: impl FnMut(T) -> T,
    integrator: &Integrator<T>,
) -> Quadrature<T, T> {
    integrator.integrate(|v| g(sigma_unchecked(v)) * v_weight(v), T::zero(), T::PI())
}

/// `integral over v in [a, b] of h(v) w(v) dv`, for integrands that need `v` directly.
pub fn integrate_mu_v<T: Real>(
    mut h: impl FnMut(T) -> T,
    a: T,
    b: T,
    integrator: &Integrator<T>,
) -> Quadrature<T, T> {
    integrator.integrate(|v| h(v) * v_weight(v), a, b)
}

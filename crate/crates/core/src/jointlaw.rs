//! Joint law of `(D0, S_k)`: the roots `a_j(t)`, partial-fraction weights `b_j`, `c_j`,
//! the conditional kernel `H(x, t)`, its mean and variance, the measures `nu_x` and
//! their Cauchy transforms, and the Hilbert–Schmidt distance `||F(S_k) - D0||_2`.
//!
//! Roots for `t = 1/sigma(theta)` are built directly from `theta`, which avoids a
//! bisection and keeps `t` in log form. Root sets are closed under conjugation
//! (`a_{k-j} = conj a_j`), and every sum over them is taken in conjugate pairs so that
//! real quantities come out exactly real.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{graded_toward_end, graded_toward_start, Integrator, Quadrature};
use crate::report::VerificationReport;
use crate::scalar::{is_finite_c, principal_turn, theta_cot_theta, unit_phase, Real};
use crate::speclaw::{cdf_of_v, phi_of_v, sigma_inv, v_weight};
use crate::wbranch::{boundary_point_log, log_inv_sigma, rho, rho_polar};

/// `nodes` rejects `t <= 1/e + NODE_GUARD`.
pub const NODE_GUARD: f64 = 1e-6;
/// Minimum separation of the `alpha_j` in `alpha_gamma`.
pub const ALPHA_GAP: f64 = 1e-10;
/// `identity_suite` requires pairwise gaps above this fraction of `max |a_j|`.
pub const IDENTITY_GAP: f64 = 1e-3;
/// Tolerance of the partial-fraction identities, relative to the size of their terms.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Rotated roots `alpha_j(z) = rho(z e^{2 pi i j/k})`, `j = 1..k`, with weights
/// `gamma_j = prod_{l != j} alpha_l / (alpha_l - alpha_j)`. Stored in the order `j = 1..k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaNodes<T> {
    pub k: usize,
    pub z: Complex<T>,
    pub alpha: Vec<Complex<T>>,
    pub gamma: Vec<Complex<T>>,
}

/// Roots `a_0..a_k` and weights `b_j`, `c_j = -k a_j b_j` for one `(k, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeData<T> {
    pub k: usize,
    /// `t = 1/sigma(theta)`; may be `inf` when only `log_t` is representable.
    pub t: T,
    pub log_t: T,
    /// `a_0 = theta cot theta + i theta`.
    pub theta: T,
    pub a: Vec<Complex<T>>,
    pub b: Vec<Complex<T>>,
    pub c: Vec<Complex<T>>,
}

/// Samples of the joint density on a tensor grid; `values[i][j]` is at `(x[i], y[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDensityGrid<T> {
    pub k: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub values: Vec<Vec<T>>,
}

fn check_k(op: &'static str, k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::domain(op, "k must be positive"))
    } else {
        Ok(())
    }
}

fn min_gap<T: Real>(a: &[Complex<T>]) -> T {
    let mut gap = T::infinity();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            gap = gap.min((a[i] - a[j]).norm());
        }
    }
    gap
}

/// `b_j = prod_{l != j} a_l / (a_l - a_j)` for arbitrary distinct nonzero `a`.
pub fn partial_fraction_weights<T: Real>(a: &[Complex<T>]) -> Vec<Complex<T>> {
    (0..a.len())
        .map(|j| {
            a.iter()
                .enumerate()
                .filter(|&(l, _)| l != j)
                .fold(Complex::new(T::one(), T::zero()), |acc, (_, &al)| {
                    acc * al / (al - a[j])
                })
        })
        .collect()
}

/// Weights for a conjugation-symmetric set (`a[n-1-j] = conj a[j]`): half are computed,
/// the rest mirrored, so that mirrored weights are exact conjugates.
fn symmetric_weights<T: Real>(a: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = a.len();
    let mut b = vec![Complex::new(T::zero(), T::zero()); n];
    for j in 0..n.div_ceil(2) {
        let w = a
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != j)
            .fold(Complex::new(T::one(), T::zero()), |acc, (_, &al)| {
                acc * al / (al - a[j])
            });
        let mirror = n - 1 - j;
        if mirror == j {
            b[j] = Complex::new(w.re, T::zero());
        } else {
            b[j] = w;
            b[mirror] = w.conj();
        }
    }
    b
}

/// Conjugate-pair sum of `f(j)` over a symmetric index set of length `n`, returning the real part.
fn paired_real_sum<T: Real>(n: usize, mut f: impl FnMut(usize) -> Complex<T>) -> T {
    let mut acc = T::zero();
    for j in 0..n.div_ceil(2) {
        let mirror = n - 1 - j;
        let term = f(j).re;
        acc = acc + if mirror == j { term } else { term + term };
    }
    acc
}

/// `alpha_j(z)` and `gamma_j(z)` for `|z| < 1/e`; at `z = 0`, `alpha = 0` and `gamma = 1/k`.
pub fn alpha_gamma<T: Real>(k: usize, z: Complex<T>) -> Result<GammaNodes<T>> {
    check_k("alpha_gamma", k)?;
    if !is_finite_c(z) || z.norm() >= T::inv_e() {
        return Err(Error::domain("alpha_gamma", "|z| must be below 1/e"));
    }
    alpha_gamma_unchecked(k, z)
}

/// As [`alpha_gamma`] but only requiring every rotated point to be off the cut, which
/// is what the Cauchy transform needs for `|z| >= 1/e`.
fn alpha_gamma_unchecked<T: Real>(k: usize, z: Complex<T>) -> Result<GammaNodes<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    if z == zero {
        return Ok(GammaNodes {
            k,
            z,
            alpha: vec![zero; k],
            gamma: vec![Complex::new(T::from_count(k).recip(), T::zero()); k],
        });
    }
    let alpha = (1..=k)
        .map(|j| rho(z * unit_phase::<T>(j, k)))
        .collect::<Result<Vec<_>>>()?;
    let gap = min_gap(&alpha);
    if gap < T::lit(ALPHA_GAP) {
        return Err(Error::DegenerateNodes {
            op: "alpha_gamma",
            min_gap: gap.to_f64_lossy(),
            threshold: ALPHA_GAP,
        });
    }
    let gamma = partial_fraction_weights(&alpha);
    Ok(GammaNodes { k, z, alpha, gamma })
}

impl<T: Real> GammaNodes<T> {
    /// `sum_j gamma_j e^{k alpha_j x}`.
    pub fn exp_sum(&self, x: T) -> Complex<T> {
        let kx = T::from_count(self.k) * x;
        self.gamma
            .iter()
            .zip(&self.alpha)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&g, &al)| {
                acc + g * (al * kx).exp()
            })
    }
}

/// Roots `a_0..a_k` for `t = 1/sigma(theta)`, `theta` in `(0, pi)`.
pub fn roots_from_angle<T: Real>(k: usize, theta: T) -> Result<Vec<Complex<T>>> {
    check_k("roots_from_angle", k)?;
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::domain(
            "roots_from_angle",
            format!("theta = {theta} not in (0, pi)"),
        ));
    }
    let log_t = log_inv_sigma(theta);
    let zero = Complex::new(T::zero(), T::zero());
    let mut a = vec![zero; k + 1];
    a[0] = Complex::new(theta_cot_theta(theta), theta);
    a[k] = a[0].conj();
    for j in 1..=k / 2 {
        let aj = rho_polar(log_t, principal_turn::<T>(j, k))?;
        if j == k - j {
            a[j] = Complex::new(aj.re, T::zero());
        } else {
            a[j] = aj;
            a[k - j] = aj.conj();
        }
    }
    Ok(a)
}

/// Node data for `t = 1/sigma(theta)`. No guard near `t = 1/e` beyond `theta > 0`:
/// near-collisions of `a_0` and `a_k` cost about `eps / theta` in absolute accuracy.
pub fn nodes_from_angle<T: Real>(k: usize, theta: T) -> Result<NodeData<T>> {
    let a = roots_from_angle(k, theta)?;
    let b = symmetric_weights(&a);
    let kf = T::from_count(k);
    let c = a
        .iter()
        .zip(&b)
        .map(|(&aj, &bj)| -(aj * bj) * kf)
        .collect::<Vec<_>>();
    if !a.iter().chain(&b).chain(&c).all(|&w| is_finite_c(w)) {
        return Err(Error::NonFinite { op: "nodes" });
    }
    let log_t = log_inv_sigma(theta);
    Ok(NodeData {
        k,
        t: log_t.exp(),
        log_t,
        theta,
        a,
        b,
        c,
    })
}

/// Node data for `t > 1/e + NODE_GUARD`.
pub fn nodes<T: Real>(k: usize, t: T) -> Result<NodeData<T>> {
    check_k("nodes", k)?;
    if !(t > T::inv_e() + T::lit(NODE_GUARD)) || !t.is_finite() {
        return Err(Error::domain(
            "nodes",
            format!("t = {t} must exceed 1/e + {NODE_GUARD:e}"),
        ));
    }
    let bp = boundary_point_log(t.ln())?;
    let mut nd = nodes_from_angle(k, bp.theta)?;
    nd.t = t;
    nd.log_t = t.ln();
    Ok(nd)
}

impl<T: Real> NodeData<T> {
    /// `H(x, t) = sum_j c_j e^{k a_j x}`, summed in conjugate pairs.
    pub fn kernel(&self, x: T) -> T {
        let kx = T::from_count(self.k) * x;
        paired_real_sum(self.k + 1, |j| self.c[j] * (self.a[j] * kx).exp())
    }

    /// The same sum taken naively in complex arithmetic; its imaginary part measures
    /// how far the conjugate structure is from exact.
    pub fn kernel_complex(&self, x: T) -> Complex<T> {
        let kx = T::from_count(self.k) * x;
        self.c
            .iter()
            .zip(&self.a)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&c, &a)| {
                acc + c * (a * kx).exp()
            })
    }

    /// `m = -(1/k) sum 1/a_j` and `v = (1/k^2) sum 1/a_j^2`.
    pub fn mean_variance(&self) -> (T, T) {
        mean_variance_of_roots(self.k, &self.a)
    }
}

fn mean_variance_of_roots<T: Real>(k: usize, a: &[Complex<T>]) -> (T, T) {
    let kf = T::from_count(k);
    let s1 = paired_real_sum(a.len(), |j| a[j].inv());
    let s2 = paired_real_sum(a.len(), |j| a[j].inv().powu(2));
    (-s1 / kf, s2 / (kf * kf))
}

/// `H(x, t)` for `x` in `[0, 1]`.
pub fn kernel_h<T: Real>(k: usize, x: T, t: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::domain("kernel_H", format!("x = {x} not in [0, 1]")));
    }
    Ok(nodes(k, t)?.kernel(x))
}

/// `(m_k(t), v_k(t))`.
pub fn mk_vk<T: Real>(k: usize, t: T) -> Result<(T, T)> {
    check_k("mk_vk", k)?;
    if !(t > T::inv_e() + T::lit(NODE_GUARD)) || !t.is_finite() {
        return Err(Error::domain(
            "mk_vk",
            format!("t = {t} must exceed 1/e + {NODE_GUARD:e}"),
        ));
    }
    let theta = boundary_point_log(t.ln())?.theta;
    Ok(mean_variance_of_roots(k, &roots_from_angle(k, theta)?))
}

/// `(m_k, v_k)` at `t = 1/sigma(theta)`.
pub fn mk_vk_from_angle<T: Real>(k: usize, theta: T) -> Result<(T, T)> {
    Ok(mean_variance_of_roots(k, &roots_from_angle(k, theta)?))
}

/// Density `phi(y) H(x, 1/y)` of the joint law on `(0,1) x (0,e)`.
pub fn joint_density<T: Real>(k: usize, x: T, y: T) -> Result<T> {
    check_k("joint_density", k)?;
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::domain(
            "joint_density",
            format!("x = {x} not in [0, 1]"),
        ));
    }
    if !(y > T::zero() && y < T::E()) {
        return Err(Error::domain(
            "joint_density",
            format!("y = {y} not in (0, e)"),
        ));
    }
    if !(y.recip() > T::inv_e() + T::lit(NODE_GUARD)) {
        return Err(Error::domain(
            "joint_density",
            "1/y within the node guard of 1/e",
        ));
    }
    let v = sigma_inv(y)?;
    Ok(phi_of_v(v) * nodes_from_angle(k, v)?.kernel(x))
}

/// Joint density at `(x, sigma(v))`, parametrized by `v` in `(0, pi)`.
pub fn joint_density_at_v<T: Real>(k: usize, x: T, v: T) -> Result<T> {
    Ok(phi_of_v(v) * nodes_from_angle(k, v)?.kernel(x))
}

/// The joint density on a tensor grid.
pub fn joint_density_grid<T: Real>(k: usize, xs: &[T], ys: &[T]) -> Result<JointDensityGrid<T>> {
    let mut values = vec![Vec::with_capacity(ys.len()); xs.len()];
    for &y in ys {
        let v = sigma_inv(y)?;
        let nd = nodes_from_angle(k, v)?;
        let phi = phi_of_v(v);
        for (row, &x) in values.iter_mut().zip(xs) {
            row.push(phi * nd.kernel(x));
        }
    }
    Ok(JointDensityGrid {
        k,
        x: xs.to_vec(),
        y: ys.to_vec(),
        values,
    })
}

/// Density of `nu_x` at `u` in `(0, e^k)`: `u^{1/k - 1} phi(u^{1/k}) H(x, u^{-1/k}) / k`.
pub fn nu_density<T: Real>(k: usize, x: T, u: T) -> Result<T> {
    check_k("nu_density", k)?;
    if !(x > T::zero() && x <= T::one()) {
        return Err(Error::domain(
            "nu_density",
            format!("x = {x} not in (0, 1]"),
        ));
    }
    let kf = T::from_count(k);
    if !(u > T::zero() && u < kf.exp()) {
        return Err(Error::domain(
            "nu_density",
            format!("u = {u} not in (0, e^k)"),
        ));
    }
    let y = u.powf(kf.recip());
    let v = sigma_inv(y.min(T::E()))?;
    if v <= T::zero() {
        return Err(Error::domain("nu_density", "u too close to e^k"));
    }
    let jac = y.powi(1 - k as i32) / kf;
    Ok(jac * phi_of_v(v) * nodes_from_angle(k, v)?.kernel(x))
}

/// Cauchy transform `G_x(lambda) = (1/lambda) sum_j gamma_j(w) e^{k alpha_j(w) x}`,
/// `w = lambda^{-1/k}` (principal root), for `lambda` off `[0, e^k]`.
pub fn cauchy_transform<T: Real>(k: usize, x: T, lambda: Complex<T>) -> Result<Complex<T>> {
    check_k("cauchy_transform", k)?;
    if !is_finite_c(lambda) {
        return Err(Error::domain("cauchy_transform", "non-finite lambda"));
    }
    let kf = T::from_count(k);
    if lambda.im == T::zero() && lambda.re >= T::zero() && lambda.re <= kf.exp() {
        return Err(Error::domain(
            "cauchy_transform",
            "lambda on the support [0, e^k]",
        ));
    }
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::domain(
            "cauchy_transform",
            format!("x = {x} not in [0, 1]"),
        ));
    }
    let inv = lambda.inv();
    if x == T::zero() {
        return Ok(inv);
    }
    let w = (-lambda.ln() / kf).exp();
    let g = alpha_gamma_unchecked(k, w)?;
    Ok(inv * g.exp_sum(x))
}

/// Breakpoints on `[0, 1]` graded toward both ends, for integrands in `x` that
/// concentrate at `x = 0` (large `t`) or `x = 1` (`t` near `1/e`).
pub fn x_breakpoints<T: Real>() -> Vec<T> {
    let half = T::lit(0.5);
    let mut pts = graded_toward_start(T::zero(), half, 40);
    pts.pop();
    pts.extend(graded_toward_end(half, T::one(), 20));
    pts
}

/// `integral_0^1 x^p H(x, t) dx` for `p = 0, 1, 2`, by adaptive quadrature.
pub fn kernel_moments<T: Real>(
    nd: &NodeData<T>,
    integrator: &Integrator<T>,
) -> [Quadrature<T, T>; 3] {
    let pts = x_breakpoints::<T>();
    let q0 = integrator.integrate_pieces(|x| nd.kernel(x), &pts);
    let q1 = integrator.integrate_pieces(|x| x * nd.kernel(x), &pts);
    let q2 = integrator.integrate_pieces(|x| x * x * nd.kernel(x), &pts);
    [q0, q1, q2]
}

/// `||F(S_k) - D0||_2`, as the square root of
/// `integral ((m_k(1/y) - F(y))^2 + v_k(1/y)) phi(y) dy`, for `k >= 3`.
pub fn hs_distance<T: Real>(k: usize) -> Result<T> {
    hs_distance_with(k, &Integrator::default()).map(|q: Quadrature<T, T>| q.value.sqrt())
}

/// The squared distance as a quadrature result.
pub fn hs_distance_with<T: Real>(k: usize, integrator: &Integrator<T>) -> Result<Quadrature<T, T>> {
    if k < 3 {
        return Err(Error::domain("hs_distance", format!("k = {k} < 3")));
    }
    let mut failure = None;
    let q = integrator.integrate(
        |v| match mk_vk_from_angle(k, v) {
            Ok((m, var)) => {
                let d = m - cdf_of_v(v);
                (d * d + var) * v_weight(v)
            }
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        T::zero(),
        T::PI(),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(q),
    }
}

/// Midpoint-trapezoid estimate of `-(1/2 pi) integral_0^{2 pi} d theta / rho(t e^{i theta})`,
/// which equals `F(1/t)`. Nodes sit at `2 pi (m + 1/2) / n` so none lies on the cut.
pub fn contour_mean<T: Real>(t: T, n_theta: usize) -> Result<T> {
    if !(t > T::inv_e()) || !t.is_finite() {
        return Err(Error::domain(
            "contour_mean",
            format!("t = {t} must exceed 1/e"),
        ));
    }
    if n_theta < 2 {
        return Err(Error::domain("contour_mean", "need at least two nodes"));
    }
    let ln_t = t.ln();
    let pi = T::PI();
    let n = T::from_count(n_theta);
    let mut acc = T::zero();
    // Nodes m and n-1-m are mirror images; sum each pair once.
    for m in 0..n_theta.div_ceil(2) {
        let mut angle = T::TAU() * (T::from_count(m) + T::lit(0.5)) / n;
        if angle > pi {
            angle = angle - T::TAU();
        }
        let term = rho_polar(ln_t, angle)?.inv().re;
        acc = acc
            + if n_theta - 1 - m == m {
                term
            } else {
                term + term
            };
    }
    Ok(-acc / n)
}

/// Relative residuals of the partial-fraction identities for distinct nonzero `a_0..a_k`:
/// `sum b_j a_j^p = 0` (`p = 1..k`), `sum b_j = 1`, `sum b_j / a_j = sum 1/a_j`,
/// `sum b_j / a_j^2 = sum_{i <= j} 1/(a_i a_j)`.
pub fn identity_suite<T: Real>(a: &[Complex<T>]) -> Result<VerificationReport> {
    if a.len() < 2 {
        return Err(Error::domain("identity_suite", "need at least two points"));
    }
    if a.iter().any(|w| !is_finite_c(*w) || w.norm() == T::zero()) {
        return Err(Error::domain(
            "identity_suite",
            "points must be finite and nonzero",
        ));
    }
    let scale = a.iter().fold(T::zero(), |m, w| m.max(w.norm()));
    let gap = min_gap(a);
    if gap < T::lit(IDENTITY_GAP) * scale {
        return Err(Error::DegenerateNodes {
            op: "identity_suite",
            min_gap: gap.to_f64_lossy(),
            threshold: (T::lit(IDENTITY_GAP) * scale).to_f64_lossy(),
        });
    }
    let b = partial_fraction_weights(a);
    let k = a.len() - 1;
    let mut report = VerificationReport::new();
    let rel = |sum: Complex<T>, target: Complex<T>, size: T| -> f64 {
        let size = size.max(target.norm()).max(T::min_positive_value());
        ((sum - target).norm() / size).to_f64_lossy()
    };
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    for p in 1..=k {
        let (s, size) = b
            .iter()
            .zip(a)
            .fold((zero, T::zero()), |(s, m), (&bj, &aj)| {
                let term = bj * aj.powu(p as u32);
                (s + term, m + term.norm())
            });
        report.check(
            format!("weights_annihilate_power_{p}"),
            rel(s, zero, size),
            IDENTITY_TOL,
        );
    }
    let (s, size) = b
        .iter()
        .fold((zero, T::zero()), |(s, m), &bj| (s + bj, m + bj.norm()));
    report.check("weights_sum_to_one", rel(s, one, size), IDENTITY_TOL);

    let inv: Vec<_> = a.iter().map(|w| w.inv()).collect();
    let (s, size) = b
        .iter()
        .zip(&inv)
        .fold((zero, T::zero()), |(s, m), (&bj, &ia)| {
            let term = bj * ia;
            (s + term, m + term.norm())
        });
    let target: Complex<T> = inv.iter().fold(zero, |s, &w| s + w);
    let target_size = inv.iter().fold(T::zero(), |s, w| s + w.norm());
    report.check(
        "weighted_reciprocal_sum",
        rel(s, target, size.max(target_size)),
        IDENTITY_TOL,
    );

    let (s, size) = b
        .iter()
        .zip(&inv)
        .fold((zero, T::zero()), |(s, m), (&bj, &ia)| {
            let term = bj * ia * ia;
            (s + term, m + term.norm())
        });
    let mut target = zero;
    let mut target_size = T::zero();
    for i in 0..inv.len() {
        for j in i..inv.len() {
            let term = inv[i] * inv[j];
            target = target + term;
            target_size = target_size + term.norm();
        }
    }
    report.check(
        "weighted_reciprocal_square_sum",
        rel(s, target, size.max(target_size)),
        IDENTITY_TOL,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speclaw::{cdf_f, phi, sigma};
    use crate::wbranch::{rho_boundary, Side};
    use std::f64::consts::{E, FRAC_PI_2, PI};

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn alpha_gamma_examples() {
        let g = alpha_gamma(3, c(0.0, 0.0)).unwrap();
        assert!(g
            .gamma
            .iter()
            .all(|&w| (w - c(1.0 / 3.0, 0.0)).norm() < 1e-16));
        let g = alpha_gamma(2, c(0.1, 0.0)).unwrap();
        let s: C = g.gamma.iter().zip(&g.alpha).map(|(&a, &b)| a * b).sum();
        assert!(s.norm() < 1e-14);
        let g = alpha_gamma(3, c(0.05, 0.0)).unwrap();
        let s: C = g.gamma.iter().sum();
        assert!((s - c(1.0, 0.0)).norm() < 1e-12);
        assert!(alpha_gamma(2, c(0.4, 0.0)).is_err());
    }

    #[test]
    fn alpha_gamma_lemma_grid() {
        for k in 2..=4usize {
            for r in [0.05, 0.1, 0.2] {
                for ang in [0.0, 0.3, 1.7, -2.5] {
                    let z = c(r * f64::cos(ang), r * f64::sin(ang));
                    let g = alpha_gamma(k, z).unwrap();
                    let s: C = g.gamma.iter().sum();
                    assert!((s - 1.0).norm() < 1e-10);
                    for p in 1..k as u32 {
                        let s: C = g
                            .gamma
                            .iter()
                            .zip(&g.alpha)
                            .map(|(&w, &a)| w * a.powu(p))
                            .sum();
                        let size: f64 = g
                            .gamma
                            .iter()
                            .zip(&g.alpha)
                            .map(|(&w, &a)| (w * a.powu(p)).norm())
                            .sum();
                        assert!(s.norm() <= 1e-10 * size, "k={k} z={z} p={p}");
                    }
                    for &a in &g.alpha {
                        let lhs = (a * (-a).exp()).powu(k as u32);
                        assert!((lhs - z.powu(k as u32)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn nodes_k1_example() {
        let nd = nodes(1, FRAC_PI_2).unwrap();
        assert!((nd.a[0] - c(0.0, FRAC_PI_2)).norm() < 1e-12);
        assert!((nd.c[0] - c(0.0, -PI / 4.0)).norm() < 1e-12);
        assert_eq!(nd.a[1], nd.a[0].conj());
        // c_0 = |rho+|^2 / (2 i Im rho+)
        let rp = rho_boundary(FRAC_PI_2, Side::Plus).unwrap();
        let expect = c(rp.norm_sqr(), 0.0) / c(0.0, 2.0 * rp.im);
        assert!((nd.c[0] - expect).norm() < 1e-12);
    }

    #[test]
    fn nodes_structure() {
        let nd = nodes(2, 1.0).unwrap();
        let s: C = nd.b.iter().sum();
        assert!((s - 1.0).norm() < 1e-12);
        for k in 1..=6 {
            let nd = nodes(k, 2.0).unwrap();
            assert_eq!(nd.a.len(), k + 1);
            for j in 0..=k {
                assert_eq!(nd.a[k - j], nd.a[j].conj());
                assert_eq!(nd.b[k - j], nd.b[j].conj());
            }
            for j in 1..k {
                let direct = rho(c(2.0, 0.0) * unit_phase::<f64>(j, k)).unwrap();
                assert!((nd.a[j] - direct).norm() < 1e-13);
            }
            for (j, (&a, &b)) in nd.a.iter().zip(&nd.b).enumerate() {
                assert!((nd.c[j] + a * b * k as f64).norm() < 1e-13);
            }
        }
        assert!(nodes(2, 1.0 / E).is_err());
        assert!(nodes(2, 1.0 / E + 1e-7).is_err());
        assert!(nodes(2, 1.0 / E + 1e-5).is_ok());
    }

    #[test]
    fn identity_suite_examples() {
        let r = identity_suite(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!(r.overall);
        assert_eq!(
            partial_fraction_weights(&[c(1.0, 0.0), c(-1.0, 0.0)]),
            vec![c(0.5, 0.0), c(0.5, 0.0)]
        );
        let r = identity_suite(&nodes(2, 1.0).unwrap().a).unwrap();
        assert!(r.overall, "{r:?}");
        // Oracle by hand for {1, 2, 4}: b = (8/3, -4, 7/3)... computed directly below.
        let a = [c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)];
        let b = partial_fraction_weights(&a);
        let b_hand = [
            2.0 * 4.0 / ((2.0 - 1.0) * (4.0 - 1.0)),
            4.0 / ((1.0 - 2.0) * (4.0 - 2.0)),
            2.0 / ((1.0 - 4.0) * (2.0 - 4.0)),
        ];
        let lhs: f64 = b_hand
            .iter()
            .zip([1.0, 2.0, 4.0])
            .map(|(b, a)| b / (a * a))
            .sum();
        let rhs = 1.0 + 0.5 + 0.25 + 0.25 + 0.125 + 1.0 / 16.0;
        assert!((lhs - rhs).abs() < 1e-12);
        for (x, y) in b.iter().zip(b_hand) {
            assert!((x.re - y).abs() < 1e-14 && x.im == 0.0);
        }
        assert!(identity_suite(&a).unwrap().overall);
        assert!(matches!(
            identity_suite(&[c(1.0, 0.0), c(1.0 + 1e-6, 0.0)]),
            Err(Error::DegenerateNodes { .. })
        ));
    }

    #[test]
    fn kernel_properties_on_grid() {
        let integ = Integrator::default();
        for k in 1..=4usize {
            for t in [0.6f64, 1.0, 2.0, 5.0] {
                let nd = nodes(k, t).unwrap();
                assert!(nd.kernel(0.0).abs() < 1e-9);
                for i in 0..200 {
                    let x = i as f64 / 199.0;
                    assert!(nd.kernel(x) >= -1e-9, "k={k} t={t} x={x}");
                    assert!(nd.kernel_complex(x).im.abs() < 1e-10);
                }
                let [q0, q1, q2] = kernel_moments(&nd, &integ);
                let (m, v) = nd.mean_variance();
                assert!(
                    (q0.value - 1.0).abs() < 1e-9,
                    "k={k} t={t} mass {}",
                    q0.value
                );
                if k >= 2 {
                    assert!((q1.value - m).abs() < 1e-9);
                }
                if k >= 3 {
                    assert!((q2.value - m * m - v).abs() < 1e-9);
                }
                if k >= 3 {
                    assert!((0.0..=1.0).contains(&m) && (0.0..=0.25).contains(&v));
                }
            }
        }
    }

    #[test]
    fn kernel_k1_reduction() {
        for i in 1..50 {
            for j in 1..50 {
                let x = i as f64 / 50.0;
                let y = E * j as f64 / 50.0;
                let rp = rho_boundary(1.0 / y, Side::Plus).unwrap();
                let expect = (rp * x).exp().im / (PI * y);
                let got = joint_density(1, x, y).unwrap();
                assert!((got - expect).abs() < 1e-10, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn joint_density_examples() {
        // k = 1, y = 2/pi: a_0 = i pi/2, c_0 = -i pi/4, phi = 1/pi
        for x in [0.1, 0.5, 0.9] {
            let h = nodes(1, PI / 2.0).unwrap().kernel(x);
            assert!((h - PI / 2.0 * (PI * x / 2.0).sin()).abs() < 1e-12);
        }
        let integ = Integrator::default();
        for k in [1usize, 2, 5] {
            for y in [0.3f64, 1.0, 2.5] {
                let v = sigma_inv(y).unwrap();
                let nd = nodes_from_angle(k, v).unwrap();
                let mass = kernel_moments(&nd, &integ)[0].value * phi_of_v(v);
                assert!((mass - phi(y).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn joint_density_total_mass() {
        let integ = Integrator::<f64>::with_tol(1e-10);
        for k in [1usize, 3] {
            let outer = integ.integrate(
                |v| {
                    let nd = nodes_from_angle(k, v).unwrap();
                    kernel_moments(&nd, &integ)[0].value * v_weight(v)
                },
                0.0,
                PI,
            );
            assert!((outer.value - 1.0).abs() < 1e-8, "k = {k}: {}", outer.value);
        }
    }

    #[test]
    fn nu_density_examples() {
        // k = 1, u = 2/pi: nu_x density = phi(y) H(x, 1/y) = (1/(pi y)) Im e^{i pi x / 2} at y = 2/pi
        for x in [0.2, 0.7] {
            let got = nu_density(1, x, 2.0 / PI).unwrap();
            assert!((got - 0.5 * (PI * x / 2.0).sin()).abs() < 1e-12);
            let d = joint_density(1, x, 2.0 / PI).unwrap();
            assert!((d - 0.5 * (PI * x / 2.0).sin()).abs() < 1e-12);
        }
        assert!(nu_density(1, 0.0, 1.0).is_err());
        assert!(nu_density(2, 0.5, E * E).is_err());
    }

    #[test]
    fn nu_moments_match_polynomials() {
        // Oracle: k^{nk} P_{k,n}(x) from exact polynomials.
        let integ = Integrator::default();
        for k in 1..=4usize {
            for n in 0..=8 / k {
                let p = crate::snpoly::sniady_poly(k, n).unwrap();
                for x in [0.25, 0.5, 1.0] {
                    let q = integ.integrate(
                        |v| {
                            let nd = nodes_from_angle(k, v).unwrap();
                            sigma(v).unwrap().powi((n * k) as i32) * nd.kernel(x) * v_weight(v)
                        },
                        0.0,
                        PI,
                    );
                    let expect = (k as f64).powi((n * k) as i32) * p.eval_real(x);
                    assert!(
                        (q.value - expect).abs() < 1e-7,
                        "k={k} n={n} x={x}: {} vs {expect}",
                        q.value
                    );
                }
            }
        }
    }

    #[test]
    fn nu_density_mass_and_first_moment() {
        // u = sigma(v)^k, du = k sigma^{k-1} |sigma'| dv
        let integ = Integrator::default();
        for k in [1usize, 2, 3] {
            for x in [0.3, 1.0] {
                let moment = |p: i32| {
                    integ
                        .integrate(
                            |v: f64| {
                                let s = sigma(v).unwrap();
                                let u = s.powi(k as i32);
                                let jac = k as f64
                                    * s.powi(k as i32 - 1)
                                    * crate::speclaw::dsigma(v).unwrap().abs();
                                if u >= (k as f64).exp() {
                                    return 0.0;
                                }
                                if s < 1e-200 || u < 1e-250 {
                                    // u-space density overflows here; use the pulled-back form
                                    return u.powi(p)
                                        * v_weight(v)
                                        * nodes_from_angle(k, v).unwrap().kernel(x);
                                }
                                u.powi(p) * nu_density(k, x, u).unwrap() * jac
                            },
                            1e-12,
                            PI - 1e-9,
                        )
                        .value
                };
                let m0 = moment(0);
                assert!((m0 - 1.0).abs() < 1e-8, "k={k} x={x} mass {m0}");
                let first = moment(1);
                match k {
                    1 => assert!((first - x).abs() < 1e-8),
                    2 => assert!((first - 2.0 * x * x).abs() < 1e-7),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn nu_density_pointwise_matches_pullback() {
        // Direct u-space density vs y-space joint density at u = y^k.
        for k in [2usize, 3] {
            for y in [0.5, 1.3, 2.2] {
                let u = f64::powi(y, k as i32);
                let lhs = nu_density(k, 0.6, u).unwrap() * k as f64 * u.powf(1.0 - 1.0 / k as f64);
                let rhs = joint_density(k, 0.6, y).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn cauchy_examples() {
        let lam = c(-2.0, 1.0);
        assert_eq!(cauchy_transform(2, 0.0, lam).unwrap(), lam.inv());
        let g = cauchy_transform(1, 1.0, c(-1.0, 0.0)).unwrap();
        let expect = -rho(c(-1.0, 0.0)).unwrap().exp();
        assert!((g - expect).norm() < 1e-13);
        assert!(cauchy_transform(2, 0.5, c(3.0, 0.0)).is_err());
        assert!(cauchy_transform(2, 0.5, c(8.0, 0.0)).is_ok());
    }

    #[test]
    fn cauchy_matches_moment_series() {
        for k in 1..=3usize {
            let polys: Vec<_> = (0..=12)
                .map(|n| crate::snpoly::sniady_poly(k, n).unwrap())
                .collect();
            let big = (k as f64).exp() * 6.0;
            for lam in [c(big, 1.0), c(-big, 0.0), c(0.0, big)] {
                for x in [0.3, 1.0] {
                    let series: C = polys
                        .iter()
                        .enumerate()
                        .map(|(n, p)| {
                            lam.powi(-(n as i32) - 1)
                                * (k as f64).powi((n * k) as i32)
                                * p.eval_real(x)
                        })
                        .sum();
                    let g = cauchy_transform(k, x, lam).unwrap();
                    assert!((g - series).norm() < 1e-8, "k={k} lam={lam} x={x}");
                }
            }
        }
    }

    #[test]
    fn stieltjes_inversion() {
        for k in [1usize, 2] {
            for u in [0.5, 1.5] {
                let g = cauchy_transform(k, 0.7, c(u, 1e-7)).unwrap();
                let d = nu_density(k, 0.7, u).unwrap();
                assert!((-g.im / PI - d).abs() < 1e-4, "k={k} u={u}");
            }
        }
    }

    #[test]
    fn mean_tends_to_cdf() {
        for t in [1.0f64, 2.0] {
            let target = cdf_f(1.0 / t).unwrap();
            let errs: Vec<f64> = [8, 16, 32, 64]
                .iter()
                .map(|&k| (mk_vk(k, t).unwrap().0 - target).abs())
                .collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "t={t}: {errs:?}");
            let (_, v32) = mk_vk(32, t).unwrap();
            let (_, v64) = mk_vk(64, t).unwrap();
            assert!((64.0 * v64 - 32.0 * v32).abs() < 0.05 * 32.0 * v32);
            let cm = contour_mean(t, 2048).unwrap();
            assert!((cm - target).abs() < 1e-6, "t={t}: {cm} vs {target}");
        }
    }

    #[test]
    fn hs_distance_trend() {
        let ks = [3usize, 6, 12, 24, 48];
        let d: Vec<f64> = ks.iter().map(|&k| hs_distance(k).unwrap()).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        assert!(d.iter().all(|&x| x >= 0.0));
        // Oracle: 30-digit quadrature with an independent Lambert W.
        assert!((d[0] - 0.173_964_956_139_937_6).abs() < 1e-10);
        assert!((d[4] - 0.047_997_707_807_575_1).abs() < 1e-10);
        assert!(hs_distance::<f64>(2).is_err());
        // lower bound by the variance part alone
        let k = 6;
        let var_part = Integrator::default().integrate(
            |v| mk_vk_from_angle(k, v).unwrap().1 * v_weight(v),
            0.0,
            PI,
        );
        assert!(d[1] * d[1] >= var_part.value);
    }

    #[test]
    fn f32_instantiation() {
        let nd = nodes(3, 2.0f32).unwrap();
        let h = nd.kernel(0.5);
        let h64 = nodes(3, 2.0f64).unwrap().kernel(0.5);
        assert!((h as f64 - h64).abs() < 1e-3);
    }
}

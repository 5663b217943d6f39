//! Adaptive composite Gauss–Legendre quadrature.
//!
//! A panel is accepted once the single-panel estimate and the sum over its two
//! halves differ by less than the panel's share of the tolerance. Panels that
//! reach the depth cap are accepted as they are and flagged in the result.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

/// Refinement threshold on successive estimates.
pub const DEFAULT_TOL: f64 = 1e-11;
/// Maximum bisection depth of a single panel.
pub const MAX_DEPTH: u32 = 40;
/// Points per Gauss–Legendre panel.
pub const ORDER: usize = 20;

/// Values that can be integrated: real or complex, with a magnitude for the stopping rule.
pub trait QuadValue<T>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn magnitude(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn magnitude(&self) -> T {
        self.norm()
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<V, T> {
    pub value: V,
    /// Sum of the final |coarse - refined| differences over accepted panels.
    pub error: T,
    /// Number of panels accepted at the depth cap without meeting the tolerance.
    pub capped_panels: usize,
    pub evaluations: usize,
}

impl<V, T> Quadrature<V, T> {
    pub fn converged(&self) -> bool {
        self.capped_panels == 0
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `n`-point rule, nodes by Newton iteration on the Legendre recurrence (carried out in f64).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[n - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[n - 1 - i] = T::lit(w);
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        GaussLegendre { nodes, weights }
    }

    /// Fixed rule applied once on `[a, b]`.
    pub fn apply<V: QuadValue<T>>(&self, f: &mut impl FnMut(T) -> V, a: T, b: T) -> V {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut acc = V::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * w;
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integrator with a reusable rule.
#[derive(Debug, Clone)]
pub struct Integrator<T> {
    rule: GaussLegendre<T>,
    pub tol: T,
    pub max_depth: u32,
}

impl<T: Real> Default for Integrator<T> {
    fn default() -> Self {
        Integrator {
            rule: GaussLegendre::new(ORDER),
            tol: T::lit(DEFAULT_TOL),
            max_depth: MAX_DEPTH,
        }
    }
}

impl<T: Real> Integrator<T> {
    pub fn with_tol(tol: T) -> Self {
        Integrator {
            tol,
            ..Self::default()
        }
    }

    /// Adaptive integral of `f` over `[a, b]`.
    pub fn integrate<V: QuadValue<T>>(
        &self,
        mut f: impl FnMut(T) -> V,
        a: T,
        b: T,
    ) -> Quadrature<V, T> {
        let mut out = Quadrature {
            value: V::zero(),
            error: T::zero(),
            capped_panels: 0,
            evaluations: 0,
        };
        if a == b {
            return out;
        }
        let whole = self.rule.apply(&mut f, a, b);
        out.evaluations += self.rule.nodes.len();
        self.refine(&mut f, a, b, whole, self.tol, 0, &mut out);
        out
    }

    /// Adaptive integral over consecutive intervals `[p_0, p_1], [p_1, p_2], ...`,
    /// with the tolerance applied to each piece.
    pub fn integrate_pieces<V: QuadValue<T>>(
        &self,
        mut f: impl FnMut(T) -> V,
        points: &[T],
    ) -> Quadrature<V, T> {
        let mut out = Quadrature {
            value: V::zero(),
            error: T::zero(),
            capped_panels: 0,
            evaluations: 0,
        };
        for w in points.windows(2) {
            let q = self.integrate(&mut f, w[0], w[1]);
            out.value = out.value + q.value;
            out.error = out.error + q.error;
            out.capped_panels += q.capped_panels;
            out.evaluations += q.evaluations;
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<V: QuadValue<T>>(
        &self,
        f: &mut impl FnMut(T) -> V,
        a: T,
        b: T,
        whole: V,
        tol: T,
        depth: u32,
        out: &mut Quadrature<V, T>,
    ) {
        let mid = (a + b) / T::lit(2.0);
        let left = self.rule.apply(f, a, mid);
        let right = self.rule.apply(f, mid, b);
        out.evaluations += 2 * self.rule.nodes.len();
        let refined = left + right;
        let diff = (refined - whole).magnitude();
        // Rounding floor so that low-precision scalars terminate.
        let floor = T::lit(64.0) * T::epsilon() * refined.magnitude();
        if diff <= tol.max(floor) || !diff.is_finite() {
            out.value = out.value + refined;
            out.error = out.error + diff;
            return;
        }
        if depth + 1 >= self.max_depth || mid <= a || mid >= b {
            out.value = out.value + refined;
            out.error = out.error + diff;
            out.capped_panels += 1;
            return;
        }
        let half_tol = tol / T::lit(2.0);
        self.refine(f, a, mid, left, half_tol, depth + 1, out);
        self.refine(f, mid, b, right, half_tol, depth + 1, out);
    }
}

/// Breakpoints `a, a + (b-a) 2^{-levels}, ..., a + (b-a)/2, b` clustered geometrically at `a`.
pub fn graded_toward_start<T: Real>(a: T, b: T, levels: u32) -> Vec<T> {
    let mut pts = vec![a];
    for l in (1..=levels).rev() {
        pts.push(a + (b - a) * T::lit(2f64.powi(-(l as i32))));
    }
    pts.push(b);
    pts
}

/// Breakpoints clustered geometrically at `b`.
pub fn graded_toward_end<T: Real>(a: T, b: T, levels: u32) -> Vec<T> {
    let mut pts = graded_toward_start(T::zero(), T::one(), levels);
    pts.reverse();
    pts.into_iter().map(|s| b - (b - a) * s).collect()
}

/// Adaptive integral with the default integrator.
pub fn integrate<T: Real, V: QuadValue<T>>(f: impl FnMut(T) -> V, a: T, b: T) -> Quadrature<V, T> {
    Integrator::default().integrate(f, a, b)
}

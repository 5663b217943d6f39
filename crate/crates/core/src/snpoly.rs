//! Exact Śniady polynomials `P_{k,n}`, the moments of `(T^k)^* T^k`, the power series of
//! `rho` and `1/rho`, and numerical checks of the generating-function identities.
//!
//! `P_{k,0} = 1` and `P_{k,n}` is the `k`-fold antiderivative of `x -> P_{k,n-1}(x + 1)`
//! with all integration constants zero, so `P_{k,n}` has degree `nk` and a zero of
//! order `k` at the origin.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jointlaw::alpha_gamma;
use crate::poly::{ratio_string, Polynomial};
use crate::scalar::{is_finite_c, unit_phase, Real};
use crate::wbranch::rho;

pub type ExactPolynomial = Polynomial<BigRational>;

/// Largest `n k` accepted by default.
pub const DEFAULT_CAP: usize = 60;
/// The generating-function checks require `|z| < 1/e - GENFUN_MARGIN`.
pub const GENFUN_MARGIN: f64 = 0.05;

fn check_cap(k: usize, n: usize, cap: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("sniady_poly", "k must be positive"));
    }
    match n.checked_mul(k) {
        Some(d) if d <= cap => Ok(()),
        d => Err(Error::CapExceeded {
            k,
            n,
            degree: d.unwrap_or(usize::MAX),
            cap,
        }),
    }
}

/// `P_{k,0}, ..., P_{k,n_max}` under the default cap.
pub fn sniady_sequence(k: usize, n_max: usize) -> Result<Vec<ExactPolynomial>> {
    sniady_sequence_capped(k, n_max, DEFAULT_CAP)
}

/// `P_{k,0}, ..., P_{k,n_max}`, requiring `n_max k <= cap`.
pub fn sniady_sequence_capped(k: usize, n_max: usize, cap: usize) -> Result<Vec<ExactPolynomial>> {
    check_cap(k, n_max, cap)?;
    let one = BigRational::one();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ExactPolynomial::one());
    for n in 1..=n_max {
        let next = out[n - 1].taylor_shift(&one).nth_antiderivative(k);
        out.push(next);
    }
    Ok(out)
}

/// `P_{k,n}` under the default cap.
pub fn sniady_poly(k: usize, n: usize) -> Result<ExactPolynomial> {
    sniady_poly_capped(k, n, DEFAULT_CAP)
}

pub fn sniady_poly_capped(k: usize, n: usize, cap: usize) -> Result<ExactPolynomial> {
    Ok(sniady_sequence_capped(k, n, cap)?
        .pop()
        .expect("sequence is nonempty"))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `x (x + n)^{n-1} / n!` expanded; `1` at `n = 0`.
pub fn closed_form_k1(n: usize) -> ExactPolynomial {
    if n == 0 {
        return ExactPolynomial::one();
    }
    let shifted =
        ExactPolynomial::linear_shift(BigRational::from_integer(BigInt::from(n))).pow(n - 1);
    let scale = BigRational::new(BigInt::one(), factorial(n));
    (&ExactPolynomial::x() * &shifted).scale(&scale)
}

/// `tr(((T^k)^* T^k)^n) = integral_0^1 P_{k,n}`, by exact antidifferentiation.
pub fn moment(k: usize, n: usize) -> Result<BigRational> {
    Ok(sniady_poly(k, n)?.integrate(&BigRational::zero(), &BigRational::one()))
}

/// The closed form `n^{nk} / (nk + 1)!` (with `0^0 = 1`).
pub fn moment_formula(k: usize, n: usize) -> BigRational {
    let d = n * k;
    let numer = BigInt::from(n).pow(d as u32);
    BigRational::new(numer, factorial(d + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `rho(z) = sum_{n >= 1} n^{n-2}/(n-1)! z^n`.
    Rho,
    /// `1/rho(z) = 1/z - sum_{n >= 0} n^n/(n+1)! z^n`; only the regular part is stored.
    RhoReciprocal,
}

/// Exact Taylor coefficients; `coefficients[n]` multiplies `z^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalSeries {
    pub kind: SeriesKind,
    #[serde(serialize_with = "serialize_ratios")]
    pub coefficients: Vec<BigRational>,
}

fn serialize_ratios<S: Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ratio_string))
}

/// Coefficients of `rho` through degree `n_max`.
pub fn rho_series(n_max: usize) -> RationalSeries {
    let coefficients = (0..=n_max)
        .map(|n| match n {
            0 => BigRational::zero(),
            // n^{n-2} / (n-1)! = n^{n-1} / n!
            _ => BigRational::new(BigInt::from(n).pow((n - 1) as u32), factorial(n)),
        })
        .collect();
    RationalSeries {
        kind: SeriesKind::Rho,
        coefficients,
    }
}

/// Regular part of `1/rho` through degree `n_max`.
pub fn rho_recip_series(n_max: usize) -> RationalSeries {
    let coefficients = (0..=n_max)
        .map(|n| -BigRational::new(BigInt::from(n).pow(n as u32), factorial(n + 1)))
        .collect();
    RationalSeries {
        kind: SeriesKind::RhoReciprocal,
        coefficients,
    }
}

impl RationalSeries {
    /// Truncated sum at `z`, including the `1/z` pole for the reciprocal kind.
    pub fn eval<T: Real>(&self, z: Complex<T>) -> Complex<T> {
        let regular = self
            .coefficients
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, c| {
                acc * z + T::lit(num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN))
            });
        match self.kind {
            SeriesKind::Rho => regular,
            SeriesKind::RhoReciprocal => regular + z.inv(),
        }
    }
}

fn check_disk<T: Real>(op: &'static str, z: Complex<T>, margin: f64) -> Result<()> {
    let radius = T::inv_e() - T::lit(margin);
    if !is_finite_c(z) || !(z.norm() < radius) {
        return Err(Error::domain(
            op,
            format!("|z| must be below 1/e - {margin}"),
        ));
    }
    Ok(())
}

/// `|sum_{n <= n_max} (kz)^{nk} P_{k,n}(x) - sum_j gamma_j(z) e^{k alpha_j(z) x}|`.
pub fn genfun_check<T: Real>(k: usize, x: T, z: Complex<T>, n_max: usize) -> Result<T> {
    genfun_check_with_margin(k, x, z, n_max, GENFUN_MARGIN)
}

pub fn genfun_check_with_margin<T: Real>(
    k: usize,
    x: T,
    z: Complex<T>,
    n_max: usize,
    margin: f64,
) -> Result<T> {
    genfun_max_residual_with_margin(k, &[x], &[z], n_max, margin)
}

/// Largest [`genfun_check`] residual over every pair in `xs` x `zs`, building the
/// polynomial sequence once.
pub fn genfun_max_residual<T: Real>(
    k: usize,
    xs: &[T],
    zs: &[Complex<T>],
    n_max: usize,
) -> Result<T> {
    genfun_max_residual_with_margin(k, xs, zs, n_max, GENFUN_MARGIN)
}

fn genfun_max_residual_with_margin<T: Real>(
    k: usize,
    xs: &[T],
    zs: &[Complex<T>],
    n_max: usize,
    margin: f64,
) -> Result<T> {
    for &z in zs {
        check_disk("genfun_check", z, margin)?;
    }
    let polys = sniady_sequence(k, n_max)?;
    let mut worst = T::zero();
    for &x in xs {
        let values: Vec<T> = polys.iter().map(|p| p.eval_real(x)).collect();
        for &z in zs {
            let step = (z * T::from_count(k)).powu(k as u32);
            let mut power = Complex::new(T::one(), T::zero());
            let mut lhs = Complex::new(T::zero(), T::zero());
            for &v in &values {
                lhs = lhs + power * v;
                power = power * step;
            }
            let rhs = alpha_gamma(k, z)?.exp_sum(x);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// `|sum_{n <= n_max} s_{k,n} (kz)^{nk} - R_k(z)|` with `s_{k,n} = n^{nk}/(nk+1)!` and
/// `R_k(z) = -(1/k) sum_j [rho(z w^j)^{-1} - (z w^j)^{-1}]`, `w = e^{2 pi i/k}`.
/// The subtracted poles cancel for `k >= 2` and supply the `1/z` term for `k = 1`.
pub fn moment_genfun_check<T: Real>(k: usize, z: Complex<T>, n_max: usize) -> Result<T> {
    if k == 0 {
        return Err(Error::domain("moment_genfun_check", "k must be positive"));
    }
    check_disk("moment_genfun_check", z, GENFUN_MARGIN)?;
    if z.norm() == T::zero() {
        return Err(Error::domain("moment_genfun_check", "z must be nonzero"));
    }
    let step = (z * T::from_count(k)).powu(k as u32);
    let mut power = Complex::new(T::one(), T::zero());
    let mut lhs = Complex::new(T::zero(), T::zero());
    for n in 0..=n_max {
        let s = T::lit(num_traits::ToPrimitive::to_f64(&moment_formula(k, n)).unwrap_or(f64::NAN));
        lhs = lhs + power * s;
        power = power * step;
    }
    let mut rhs = Complex::new(T::zero(), T::zero());
    for j in 1..=k {
        let w = z * unit_phase::<T>(j, k);
        rhs = rhs + (rho(w)?.inv() - w.inv());
    }
    rhs = -rhs / T::from_count(k);
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(p: i64, d: i64) -> Q {
        Q::new(p.into(), d.into())
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn poly_examples() {
        assert_eq!(sniady_poly(1, 1).unwrap(), ExactPolynomial::x());
        assert_eq!(
            sniady_poly(2, 1).unwrap(),
            ExactPolynomial::monomial(q(1, 2), 2)
        );
        // (x+1)^4/24 - x/6 - 1/24, built independently
        let expect = &(&ExactPolynomial::linear_shift(q(1, 1))
            .pow(4)
            .scale(&q(1, 24))
            - &ExactPolynomial::monomial(q(1, 6), 1))
            - &ExactPolynomial::constant(q(1, 24));
        assert_eq!(sniady_poly(2, 2).unwrap(), expect);
        assert!(matches!(
            sniady_poly(7, 9),
            Err(Error::CapExceeded {
                degree: 63,
                cap: 60,
                ..
            })
        ));
        assert!(sniady_poly(6, 10).is_ok());
        assert_eq!(sniady_poly(3, 0).unwrap(), ExactPolynomial::one());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_k1(1), ExactPolynomial::x());
        assert_eq!(
            closed_form_k1(2),
            ExactPolynomial::new(vec![q(0, 1), q(1, 1), q(1, 2)])
        );
        assert_eq!(closed_form_k1(3).eval(&q(1, 1)), q(8, 3));
        for n in 0..=12 {
            assert_eq!(sniady_poly(1, n).unwrap(), closed_form_k1(n), "n = {n}");
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment(1, 1).unwrap(), q(1, 2));
        assert_eq!(moment(2, 2).unwrap(), q(2, 15));
        assert_eq!(moment(3, 1).unwrap(), q(1, 24));
        assert_eq!(moment_formula(4, 0), q(1, 1));
        assert!(moment(61, 1).is_err());
    }

    #[test]
    fn moments_match_formula_exactly() {
        for k in 1..=12 {
            let seq = sniady_sequence(k, 24 / k).unwrap();
            for (n, p) in seq.iter().enumerate() {
                assert_eq!(
                    p.integrate(&Q::zero(), &Q::one()),
                    moment_formula(k, n),
                    "k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn recursion_and_vanishing_derivatives() {
        for k in 1..=5 {
            let seq = sniady_sequence(k, 8 / k + 1).unwrap();
            for n in 1..seq.len() {
                let p = &seq[n];
                assert_eq!(p.degree(), Some(n * k));
                assert_eq!(p.nth_derivative(k), seq[n - 1].taylor_shift(&Q::one()));
                for d in 0..k {
                    assert!(p.nth_derivative(d).eval(&Q::zero()).is_zero());
                }
            }
        }
    }

    #[test]
    fn series_examples() {
        let r = rho_series(6);
        assert_eq!(r.coefficients[1], q(1, 1));
        assert_eq!(r.coefficients[3], q(3, 2));
        assert_eq!(r.coefficients[4], q(8, 3));
        let s = rho_recip_series(6);
        assert_eq!(s.coefficients[0], q(-1, 1));
        assert_eq!(s.coefficients[1], q(-1, 2));
        // (1/z + R(z)) rho(z) = 1 through degree n_max - 1
        let n_max = 20;
        let r = rho_series(n_max);
        let s = rho_recip_series(n_max);
        for m in 0..n_max {
            let mut acc = r.coefficients[m + 1].clone();
            for i in 0..=m {
                acc += &s.coefficients[i] * &r.coefficients[m - i];
            }
            assert_eq!(acc, if m == 0 { Q::one() } else { Q::zero() }, "degree {m}");
        }
    }

    #[test]
    fn series_agree_with_rho() {
        let r = rho_series(80);
        let s = rho_recip_series(80);
        for z in [c(0.1, 0.0), c(-0.13, 0.07), c(0.0, 0.15)] {
            let exact = rho(z).unwrap();
            assert!((r.eval(z) - exact).norm() < 1e-13);
            assert!((s.eval(z) - exact.inv()).norm() < 1e-12);
        }
    }

    #[test]
    fn genfun_examples() {
        for z in [c(0.1, 0.0), c(-0.2, 0.05)] {
            assert_eq!(genfun_check(1, 0.0, z, 12).unwrap(), 0.0);
        }
        assert!(genfun_check(2, 1.0, c(0.1, 0.0), 12).unwrap() < 1e-8);
        // Oracle: sum P_{1,n}(x) z^n = e^{rho(z) x}
        let z = c(0.15, 0.0);
        let lhs: Complex<f64> = sniady_sequence(1, 40)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(n, p)| z.powu(n as u32) * p.eval_real(1.0))
            .sum();
        assert!((lhs - rho(z).unwrap().exp()).norm() < 1e-8);
        assert!(genfun_check(1, 1.0, z, 40).unwrap() < 1e-8);
        assert!(genfun_check(2, 0.5, c(0.33, 0.0), 12).is_err());
        assert!(genfun_check(2, 0.5, c(0.4, 0.0), 12).is_err());
    }

    #[test]
    fn moment_genfun_examples() {
        assert!(moment_genfun_check(1, c(0.1, 0.0), 15).unwrap() < 1e-10);
        assert!(moment_genfun_check(2, c(0.12, 0.0), 12).unwrap() < 1e-8);
        assert!(moment_genfun_check(2, c(0.0, 0.0), 12).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn genfun_small_disk(k in 1usize..=3, x in 0.0f64..=1.0, r in 0.0f64..0.12, a in -3.1f64..3.1) {
            let z = c(r * a.cos(), r * a.sin());
            prop_assert!(genfun_check(k, x, z, 12).unwrap() < 1e-8);
        }

        #[test]
        fn moment_genfun_small_disk(k in 1usize..=3, r in 0.01f64..0.12, a in -3.1f64..3.1) {
            let z = c(r * a.cos(), r * a.sin());
            prop_assert!(moment_genfun_check(k, z, 12).unwrap() < 1e-8);
        }

        #[test]
        fn sniady_coefficients_nonnegative(k in 1usize..=6, n in 0usize..=6) {
            let p = sniady_poly(k, n).unwrap();
            prop_assert!(p.coeffs().iter().all(|c| *c >= Q::zero()));
        }
    }
}

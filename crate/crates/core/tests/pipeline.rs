//! Cross-module checks through the public API only.

use std::f64::consts::{E, PI};

use dtlab_core::jointlaw::{joint_density_at_v, mk_vk};
use dtlab_core::quad::Integrator;
use dtlab_core::snpoly::{moment, moment_formula, sniady_poly};
use dtlab_core::speclaw::{cdf_f, integrate_mu, phi_of_v, sigma};
use dtlab_core::wbranch::rho;
use dtlab_core::{Complex32, Complex64, Rational};
use num_traits::ToPrimitive;

#[test]
fn law_moments_match_exact_polynomial_moments() {
    let integ = Integrator::default();
    for n in 1..=5u32 {
        let numeric = integrate_mu(|y: f64| y.powi(n as i32), &integ).value;
        let exact = moment_formula(1, n as usize).to_f64().unwrap();
        assert!(
            (numeric - exact).abs() <= 1e-10 * exact,
            "n = {n}: {numeric} vs {exact}"
        );
    }
}

#[test]
fn exact_moment_is_integral_of_polynomial() {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    for (k, n) in [(1, 5), (2, 4), (3, 3), (5, 2)] {
        let p = sniady_poly(k, n).unwrap();
        assert_eq!(p.integrate(&zero, &one), moment(k, n).unwrap());
        assert_eq!(moment(k, n).unwrap(), moment_formula(k, n));
    }
}

#[test]
fn joint_density_integrates_to_marginal_in_x() {
    let integ = Integrator::default();
    for k in [1usize, 2, 4] {
        for v in [0.4f64, 1.3, 2.2] {
            let row = integ
                .integrate(|x| joint_density_at_v(k, x, v).unwrap(), 0.0, 1.0)
                .value;
            assert!(
                (row - phi_of_v(v)).abs() <= 1e-9 * phi_of_v(v),
                "k = {k}, v = {v}"
            );
        }
    }
}

#[test]
fn conditional_mean_tracks_cdf() {
    for t in [1.0f64, 2.0] {
        let target = cdf_f(1.0 / t).unwrap();
        let (m, _) = mk_vk(64, t).unwrap();
        assert!((m - target).abs() < 2e-2);
    }
}

#[test]
fn rho_generic_over_precision() {
    let z64 = Complex64::new(0.2, 0.1);
    let r64 = rho(z64).unwrap();
    assert!((r64 * (-r64).exp() - z64).norm() < 1e-14);
    let z32 = Complex32::new(0.2, 0.1);
    let r32 = rho(z32).unwrap();
    assert!((r32 * (-r32).exp() - z32).norm() < 1e-6);
    assert!((r64.re as f32 - r32.re).abs() < 1e-6);
}

#[test]
fn sigma_spans_support() {
    assert_eq!(sigma(0.0f64).unwrap(), E);
    assert!((sigma(PI / 2.0).unwrap() - 2.0 / PI).abs() < 1e-15);
    assert!(sigma(PI).is_err());
    assert!((sigma(1.0f32).unwrap() - sigma(1.0f64).unwrap() as f32).abs() < 1e-6);
}

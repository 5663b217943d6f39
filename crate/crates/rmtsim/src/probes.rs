//! Finite-size probes: `||F(S_k) - D_N||`, the diagonal covariance structure of `T`,
//! operator norms, and the decay profile of `T^k` on initial coordinate blocks.

use dtlab_core::quad::Integrator;
use dtlab_core::report::VerificationReport;
use faer::Side;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::{map_samples, sk_scale, SampleSpectrum, C64};
use crate::stats::law_cdf;
use crate::{EnsembleConfig, Error, Result};

/// Tolerance of the RMS residuals in `covariance_check`.
pub const COVARIANCE_TOL: f64 = 0.02;

/// Midpoint grid `(i - 1/2)/N`, the diagonal of `D_N`.
pub fn midpoints(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

/// Sample average of `N^{-1/2} ||F(S_k) - D_N||_HS`.
pub fn fsk_vs_diag(cfg: &EnsembleConfig, k: usize) -> Result<f64> {
    cfg.validate()?;
    if k == 0 || k > cfg.k_max {
        return Err(Error::Config(format!("k = {k} not in 1..={}", cfg.k_max)));
    }
    let d = midpoints(cfg.n);
    let per_sample = map_samples(cfg, |_, t| -> Result<f64> {
        let mut p = t.clone();
        for _ in 1..k {
            p = &p * &t;
        }
        let gram = p.adjoint() * &p;
        let eig = gram
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        let u = eig.U();
        let f: Vec<f64> = eig
            .S()
            .column_vector()
            .iter()
            .map(|&x| law_cdf(sk_scale(k, x.re)))
            .collect();
        // ||U F U* - D||^2 = sum F^2 - 2 sum_i d_i (U F U*)_ii + sum d^2
        let mut cross = 0.0;
        for (i, &di) in d.iter().enumerate() {
            let diag: f64 = f
                .iter()
                .enumerate()
                .map(|(m, &fm)| u[(i, m)].norm_sqr() * fm)
                .sum();
            cross += di * diag;
        }
        let sq = f.iter().map(|x| x * x).sum::<f64>() - 2.0 * cross
            + d.iter().map(|x| x * x).sum::<f64>();
        Ok((sq.max(0.0) / cfg.n as f64).sqrt())
    });
    let vals = per_sample.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Sample means of `||T^k|| / (e/k)^{k/2}` for `k = 1..k_max`.
pub fn norm_ratios(spectra: &[SampleSpectrum]) -> Vec<f64> {
    let k_max = spectra.iter().map(|s| s.opnorms.len()).min().unwrap_or(0);
    (1..=k_max)
        .map(|k| {
            let target = (std::f64::consts::E / k as f64).powf(k as f64 / 2.0);
            spectra.iter().map(|s| s.opnorms[k - 1]).sum::<f64>() / spectra.len() as f64 / target
        })
        .collect()
}

/// Sample means of the diagonals of `T diag(f) T*`, `T* diag(f) T`, `T diag(f) T` and `T`,
/// with the limits `g(x) = int_x^1 f` and `h(x) = int_0^x f` at the midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub x: Vec<f64>,
    pub t_f_tstar: Vec<f64>,
    pub tstar_f_t: Vec<f64>,
    pub t_f_t: Vec<Complex<f64>>,
    pub t_diag: Vec<Complex<f64>>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    if n == 0 {
        0.0
    } else {
        (s / n as f64).sqrt()
    }
}

pub fn covariance_estimate(
    f: impl Fn(f64) -> f64 + Sync,
    cfg: &EnsembleConfig,
) -> Result<CovarianceEstimate> {
    cfg.validate()?;
    let n = cfg.n;
    let x = midpoints(n);
    let fx: Vec<f64> = x.iter().map(|&v| f(v)).collect();
    let per_sample = map_samples(cfg, |_, t| {
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![C64::new(0.0, 0.0); n];
        let mut d = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            d[i] = t[(i, i)];
            for j in 0..n {
                a[i] += t[(i, j)].norm_sqr() * fx[j];
                b[i] += t[(j, i)].norm_sqr() * fx[j];
                c[i] += t[(i, j)] * t[(j, i)] * fx[j];
            }
        }
        (a, b, c, d)
    });
    let s = per_sample.len() as f64;
    let mut out = CovarianceEstimate {
        x: x.clone(),
        t_f_tstar: vec![0.0; n],
        tstar_f_t: vec![0.0; n],
        t_f_t: vec![C64::new(0.0, 0.0); n],
        t_diag: vec![C64::new(0.0, 0.0); n],
        g: Vec::with_capacity(n),
        h: Vec::with_capacity(n),
    };
    for (a, b, c, d) in &per_sample {
        for i in 0..n {
            out.t_f_tstar[i] += a[i] / s;
            out.tstar_f_t[i] += b[i] / s;
            out.t_f_t[i] += c[i] / s;
            out.t_diag[i] += d[i] / s;
        }
    }
    let integ = Integrator::<f64>::default();
    for &xi in &x {
        out.g.push(integ.integrate(&f, xi, 1.0).value);
        out.h.push(integ.integrate(&f, 0.0, xi).value);
    }
    Ok(out)
}

/// RMS residuals of the four diagonal expectations against `g`, `h`, `0`, `0`.
pub fn covariance_check(
    f: impl Fn(f64) -> f64 + Sync,
    cfg: &EnsembleConfig,
) -> Result<VerificationReport> {
    let est = covariance_estimate(f, cfg)?;
    let mut report = VerificationReport::new();
    report.check(
        "t_f_tstar_vs_g",
        rms(est.t_f_tstar.iter().zip(&est.g).map(|(a, b)| a - b)),
        COVARIANCE_TOL,
    );
    report.check(
        "tstar_f_t_vs_h",
        rms(est.tstar_f_t.iter().zip(&est.h).map(|(a, b)| a - b)),
        COVARIANCE_TOL,
    );
    report.check(
        "t_f_t_vs_zero",
        rms(est.t_f_t.iter().map(|z| z.norm())),
        COVARIANCE_TOL,
    );
    report.check(
        "t_vs_zero",
        rms(est.t_diag.iter().map(|z| z.norm())),
        COVARIANCE_TOL,
    );
    Ok(report)
}

/// `(k/e) ||T^k xi||^{2/k}` for `k = 1..k_probe`, averaged over samples, where `xi` is
/// the normalized indicator of the first `ceil(tN)` coordinates.
pub fn decay_profile(t: f64, cfg: &EnsembleConfig, k_probe: usize) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Config(format!("t = {t} not in (0, 1]")));
    }
    if k_probe == 0 || 4 * k_probe > cfg.n {
        return Err(Error::Config(format!(
            "k_probe = {k_probe} must be in 1..=N/4"
        )));
    }
    let n = cfg.n;
    let m = ((t * n as f64).ceil() as usize).clamp(1, n);
    let per_sample = map_samples(cfg, |_, mat| {
        let mut v = vec![C64::new(0.0, 0.0); n];
        let w = 1.0 / (m as f64).sqrt();
        for x in v.iter_mut().take(m) {
            *x = C64::new(w, 0.0);
        }
        let mut profile = Vec::with_capacity(k_probe);
        for k in 1..=k_probe {
            v = (0..n)
                .map(|i| (i + 1..n).fold(C64::new(0.0, 0.0), |acc, j| acc + mat[(i, j)] * v[j]))
                .collect();
            let norm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            profile.push(k as f64 / std::f64::consts::E * norm2.powf(1.0 / k as f64));
        }
        profile
    });
    let s = per_sample.len() as f64;
    Ok((0..k_probe)
        .map(|k| per_sample.iter().map(|p| p[k]).sum::<f64>() / s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_grid() {
        assert_eq!(midpoints(4), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn covariance_constant_function() {
        let cfg = EnsembleConfig::new(100, 100, 11, 1).unwrap();
        let est = covariance_estimate(|_| 1.0, &cfg).unwrap();
        for (i, &x) in est.x.iter().enumerate() {
            assert!((est.g[i] - (1.0 - x)).abs() < 1e-12);
            assert!((est.h[i] - x).abs() < 1e-12);
        }
        assert!(covariance_check(|_| 1.0, &cfg).unwrap().overall);
    }

    #[test]
    fn covariance_identity_function() {
        let cfg = EnsembleConfig::new(200, 200, 5, 1).unwrap();
        let r = covariance_check(|x| x, &cfg).unwrap();
        assert!(r.overall, "{r:?}");
        let est = covariance_estimate(|x| x, &cfg).unwrap();
        for (i, &x) in est.x.iter().enumerate() {
            assert!((est.g[i] - (1.0 - x * x) / 2.0).abs() < 1e-12);
            assert!((est.h[i] - x * x / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decay_profile_guards_and_kernel() {
        let cfg = EnsembleConfig::new(40, 2, 1, 1).unwrap();
        assert!(decay_profile(0.0, &cfg, 3).is_err());
        assert!(decay_profile(0.5, &cfg, 11).is_err());
        // xi = e_1 lies in the kernel of T
        let p = decay_profile(1.0 / 40.0, &cfg, 5).unwrap();
        assert!(p.iter().all(|&v| v == 0.0));
        let p = decay_profile(1.0, &cfg, 1).unwrap();
        assert!(p[0] > 0.0 && p[0] < 1.5);
    }

    #[test]
    fn fsk_is_nonnegative_and_guarded() {
        let cfg = EnsembleConfig::new(60, 2, 9, 2).unwrap();
        let d = fsk_vs_diag(&cfg, 2).unwrap();
        assert!((0.0..1.0).contains(&d));
        assert!(fsk_vs_diag(&cfg, 3).is_err());
        assert!(fsk_vs_diag(&cfg, 0).is_err());
    }
}

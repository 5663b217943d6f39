//! Distribution statistics of sampled spectra.

use dtlab_core::speclaw::cdf_f;
use serde::{Deserialize, Serialize};

use crate::ensemble::{gram_eigenvalues, map_samples};
use crate::{EnsembleConfig, Result};

/// CDF of the law of `T*T`, extended by 0 below 0 and 1 above `e`.
pub fn law_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y >= std::f64::consts::E {
        1.0
    } else {
        cdf_f(y).unwrap_or(f64::NAN)
    }
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `sorted` and `cdf`.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    })
}

pub fn ks_to_law(sorted: &[f64]) -> f64 {
    ks_statistic(sorted, law_cdf)
}

/// Sample mean and standard error of `(1/N) tr((T*T)^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `n^n / (n+1)!`
    pub exact: f64,
}

impl MomentEstimate {
    /// `|mean - exact|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.exact).abs() / self.std_error
    }
}

/// Moments `n = 1..=n_max` of the empirical spectral law of `T*T`.
pub fn moment_estimates(cfg: &EnsembleConfig, n_max: usize) -> Result<Vec<MomentEstimate>> {
    cfg.validate()?;
    let per_sample = map_samples(cfg, |_, t| {
        gram_eigenvalues(&t).map(|eigs| {
            (1..=n_max)
                .map(|n| eigs.iter().map(|&x| x.powi(n as i32)).sum::<f64>() / eigs.len() as f64)
                .collect::<Vec<_>>()
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let s = per_sample.len() as f64;
    Ok((1..=n_max)
        .map(|n| {
            let vals: Vec<f64> = per_sample.iter().map(|m| m[n - 1]).collect();
            let mean = vals.iter().sum::<f64>() / s;
            let var = if vals.len() > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (s - 1.0)
            } else {
                0.0
            };
            let exact = (n as f64).powi(n as i32) / (1..=n + 1).map(|i| i as f64).product::<f64>();
            MomentEstimate {
                n,
                mean,
                std_error: (var / s).sqrt(),
                exact,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        // Uniform CDF against midpoint quantiles: distance 1/(2n).
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
        assert_eq!(ks_statistic(&[0.0, 0.0], |_| 1.0), 1.0);
    }

    #[test]
    fn law_cdf_edges() {
        assert_eq!(law_cdf(-1.0), 0.0);
        assert_eq!(law_cdf(3.0), 1.0);
        assert!((law_cdf(1.0) - cdf_f(1.0).unwrap()).abs() == 0.0);
    }
}

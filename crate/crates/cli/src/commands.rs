//! Command bodies. Each writes its table or report to `out` and returns whether all of
//! its checks passed; argument and domain problems come back as [`CliError::Usage`].

use std::f64::consts::PI;
use std::io::Write;

use dtlab_core::jointlaw::{self, joint_density_at_v};
use dtlab_core::snpoly::{moment_formula, sniady_sequence};
use dtlab_core::speclaw::{an_recursion, cdf_of_v, phi_of_v, sigma};
use dtlab_core::{Rational, VerificationReport};
use dtlab_rmt::stats::MomentEstimate;
use dtlab_rmt::{
    covariance_check, decay_profile, fsk_vs_diag, ks_to_law, moment_estimates, norm_ratios,
    spectrum_suite, EnsembleConfig,
};
use serde::Serialize;

use crate::format::{float, ratio, row};
use crate::{suites, CliError};

/// Smallest accepted `--grid`.
pub const MIN_GRID: usize = 8;

/// Angles `v_j = (j + 1/2) pi / G` of the joint grid, so that `y_j = sigma(v_j)` are the
/// rows; `x_i = (i + 1/2) / G`. Rows are written in ascending `y`.
pub fn joint_grid_angles(grid: usize) -> Vec<f64> {
    (0..grid)
        .rev()
        .map(|j| (j as f64 + 0.5) * PI / grid as f64)
        .collect()
}

/// Angles `v_j = j pi / G`, `0 < j < G`, of the marginal table, ascending in `y`.
pub fn marginal_grid_angles(grid: usize) -> Vec<f64> {
    (1..grid)
        .rev()
        .map(|j| j as f64 * PI / grid as f64)
        .collect()
}

/// Joint density table `x,y,density` for `Some(k)`, else the marginal `y,phi,F`.
/// Rows where `y` underflows to 0 are omitted.
pub fn density(k: Option<usize>, grid: usize, out: &mut dyn Write) -> Result<bool, CliError> {
    if grid < MIN_GRID {
        return Err(CliError::Usage(format!(
            "--grid must be at least {MIN_GRID}"
        )));
    }
    match k {
        None => {
            writeln!(out, "y,phi,F")?;
            for v in marginal_grid_angles(grid) {
                let y = sigma(v)?;
                if y > 0.0 {
                    writeln!(
                        out,
                        "{}",
                        row([float(y), float(phi_of_v(v)), float(cdf_of_v(v))])
                    )?;
                }
            }
        }
        Some(k) => {
            if k == 0 {
                return Err(CliError::Usage("--k must be positive".into()));
            }
            writeln!(out, "x,y,density")?;
            let xs: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) / grid as f64).collect();
            for v in joint_grid_angles(grid) {
                let y = sigma(v)?;
                if y <= 0.0 {
                    continue;
                }
                for &x in &xs {
                    let d = joint_density_at_v(k, x, v)?;
                    if d.is_finite() {
                        writeln!(out, "{}", row([float(x), float(y), float(d)]))?;
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Rows `n,integral,formula,equal` comparing the exact integral of `P_{k,n}` with
/// `n^{nk}/(nk+1)!`.
pub fn moments(k: usize, n_max: usize, out: &mut dyn Write) -> Result<bool, CliError> {
    if k == 0 {
        return Err(CliError::Usage("--k must be positive".into()));
    }
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    writeln!(out, "n,integral,formula,equal")?;
    let mut all = true;
    for (n, p) in sniady_sequence(k, n_max)?.iter().enumerate() {
        let exact = p.integrate(&zero, &one);
        let formula = moment_formula(k, n);
        let equal = exact == formula;
        all &= equal;
        writeln!(
            out,
            "{}",
            row([
                n.to_string(),
                ratio(&exact),
                ratio(&formula),
                equal.to_string()
            ])
        )?;
    }
    Ok(all)
}

/// JSON report of one suite.
pub fn verify(suite: &str, out: &mut dyn Write) -> Result<bool, CliError> {
    let report = suites::by_name(suite).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown suite {suite:?}; expected one of {:?}",
            suites::SUITES
        ))
    })??;
    serde_json::to_writer_pretty(&mut *out, &report)?;
    writeln!(out)?;
    Ok(report.overall)
}

/// Rows `k,hs_distance`; every `k` must be at least 3.
pub fn distance(ks: &[usize], out: &mut dyn Write) -> Result<bool, CliError> {
    if ks.is_empty() {
        return Err(CliError::Usage("--k needs at least one value".into()));
    }
    if let Some(k) = ks.iter().find(|&&k| k < 3) {
        return Err(CliError::Usage(format!(
            "hs_distance needs k >= 3, got {k}"
        )));
    }
    writeln!(out, "k,hs_distance")?;
    for &k in ks {
        writeln!(
            out,
            "{}",
            row([k.to_string(), float(jointlaw::hs_distance(k)?)])
        )?;
    }
    Ok(true)
}

/// Rows `n,a_n` followed by the footer `gap,a_last - t`.
pub fn recursion(t: f64, iters: usize, out: &mut dyn Write) -> Result<bool, CliError> {
    let trace = an_recursion(t, iters)?;
    writeln!(out, "n,a_n")?;
    for (n, a) in trace.terms.iter().enumerate() {
        writeln!(out, "{}", row([(n + 1).to_string(), float(*a)]))?;
    }
    writeln!(
        out,
        "{}",
        row(["gap".to_string(), float(trace.terminal_gap())])
    )?;
    Ok(true)
}

/// Optional Monte Carlo probes of `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimulateChecks {
    pub fsk: bool,
    pub covariance: bool,
    pub moments: bool,
    pub decay: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayComparison {
    pub t_low: f64,
    pub t_high: f64,
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

/// JSON document written by `simulate`. Keys are snake_case, in declaration order.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub config: EnsembleConfig,
    /// Sample mean of the KS distance of the `T*T` spectrum to `F`.
    pub ks_tstar_t: f64,
    /// Sample mean KS distance of the `S_k` spectrum to `F`, `k = 1..k_max`.
    pub ks_sk: Vec<f64>,
    /// Sample mean of `||T^k|| / (e/k)^{k/2}`, `k = 1..k_max`.
    pub norm_ratios: Vec<f64>,
    pub norm_ratio_k1: f64,
    pub fsk_distance: Option<Vec<f64>>,
    pub covariance: Option<VerificationReport>,
    pub moments: Option<Vec<MomentEstimate>>,
    pub decay: Option<DecayComparison>,
    pub checks: VerificationReport,
}

/// KS threshold of the spectral checks in `simulate`.
pub const KS_TOL: f64 = 0.05;
/// Relative tolerance of `||T||` against `sqrt(e)`.
pub const NORM_TOL: f64 = 0.05;

pub fn simulate_report(
    cfg: &EnsembleConfig,
    checks: SimulateChecks,
) -> Result<SimulationReport, CliError> {
    let spectra = spectrum_suite(cfg)?;
    let s = spectra.len() as f64;
    let ks_tstar_t = spectra
        .iter()
        .map(|x| ks_to_law(&x.tstar_t_eigs))
        .sum::<f64>()
        / s;
    let ks_sk: Vec<f64> = (0..cfg.k_max)
        .map(|k| {
            spectra
                .iter()
                .map(|x| ks_to_law(&x.sk_eigs[k]))
                .sum::<f64>()
                / s
        })
        .collect();
    let ratios = norm_ratios(&spectra);
    let norm_ratio_k1 = ratios.first().copied().unwrap_or(f64::NAN);

    let mut report = VerificationReport::new();
    report.check("ks_tstar_t", ks_tstar_t, KS_TOL);
    if cfg.k_max >= 2 {
        report.check("ks_s2", ks_sk[1], KS_TOL);
    }
    report.check("norm_ratio_k1", (norm_ratio_k1 - 1.0).abs(), NORM_TOL);

    let fsk_distance = if checks.fsk {
        Some(
            (1..=cfg.k_max)
                .map(|k| fsk_vs_diag(cfg, k))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let covariance = if checks.covariance {
        let r = covariance_check(|x| x, cfg)?;
        report.extend_prefixed("covariance.", r.clone());
        Some(r)
    } else {
        None
    };
    let moments = if checks.moments {
        Some(moment_estimates(cfg, 4)?)
    } else {
        None
    };
    let decay = if checks.decay {
        let k_probe = (cfg.n / 4).clamp(1, 8);
        let (t_low, t_high) = (0.3, 0.9);
        let low = decay_profile(t_low, cfg, k_probe)?;
        let high = decay_profile(t_high, cfg, k_probe)?;
        let k = k_probe.min(6) - 1;
        report.check_true("decay_ordering", low[k] < high[k]);
        Some(DecayComparison {
            t_low,
            t_high,
            low,
            high,
        })
    } else {
        None
    };
    Ok(SimulationReport {
        config: *cfg,
        ks_tstar_t,
        ks_sk,
        norm_ratios: ratios,
        norm_ratio_k1,
        fsk_distance,
        covariance,
        moments,
        decay,
        checks: report,
    })
}

pub fn simulate(
    cfg: &EnsembleConfig,
    checks: SimulateChecks,
    out: &mut dyn Write,
) -> Result<bool, CliError> {
    let report = simulate_report(cfg, checks)?;
    serde_json::to_writer_pretty(&mut *out, &report)?;
    writeln!(out)?;
    Ok(report.checks.overall)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: impl FnOnce(&mut Vec<u8>) -> Result<bool, CliError>) -> (bool, String) {
        let mut buf = Vec::new();
        let ok = f(&mut buf).unwrap();
        (ok, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn moments_table() {
        let (ok, s) = run(|o| moments(1, 3, o));
        assert!(ok);
        assert!(s.lines().any(|l| l == "3,9/8,9/8,true"), "{s}");
        let (_, s) = run(|o| moments(2, 2, o));
        assert!(s.contains("2,2/15,2/15,true"));
        let (_, s) = run(|o| moments(3, 1, o));
        assert!(s.contains("1,1/24,1/24,true"));
        assert!(moments(7, 9, &mut Vec::new()).is_err());
    }

    #[test]
    fn marginal_contains_two_over_pi() {
        let (_, s) = run(|o| density(None, 16, o));
        let hit = s
            .lines()
            .skip(1)
            .map(|l| {
                l.split(',')
                    .map(|f| f.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .find(|r| (r[0] - 2.0 / PI).abs() < 1e-12)
            .expect("row at 2/pi");
        assert!((hit[1] - 1.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn small_grids() {
        let (_, s) = run(|o| density(Some(2), 8, o));
        assert_eq!(s.lines().next(), Some("x,y,density"));
        assert_eq!(s.lines().count(), 1 + 64);
        assert!(matches!(
            density(Some(2), 7, &mut Vec::new()),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn recursion_table() {
        let (_, s) = run(|o| recursion(1.0, 5, o));
        let rows: Vec<&str> = s.lines().collect();
        assert_eq!(rows[0], "n,a_n");
        for r in &rows[1..6] {
            assert_eq!(r.split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1.0);
        }
        assert!(rows[6].starts_with("gap,"));
    }

    #[test]
    fn distance_rejects_small_k() {
        assert!(matches!(
            distance(&[2, 3], &mut Vec::new()),
            Err(CliError::Usage(_))
        ));
    }
}

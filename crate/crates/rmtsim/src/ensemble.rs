//! Sampling `T` and the spectra of `T*T` and `S_k = k((T^k)^* T^k)^{1/k}`.

use faer::{Mat, Side};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{with_thread_limit, EnsembleConfig, Error, Result};

pub type C64 = Complex<f64>;

/// Eigen-data of one sample. `sk_eigs[k-1]` and `opnorms[k-1]` belong to `S_k` and `||T^k||`;
/// `sk_eigs[0]` coincides with `tstar_t_eigs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpectrum {
    pub tstar_t_eigs: Vec<f64>,
    pub sk_eigs: Vec<Vec<f64>>,
    pub opnorms: Vec<f64>,
}

/// Generator for sample `index`: the base seed picks the key, the index the stream.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Strictly upper-triangular `N x N` matrix with independent complex Gaussian entries,
/// `E|T_ij|^2 = 1/N`. Entries are drawn row by row, real part first.
pub fn sample_t(n: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
    let scale = (0.5 / n as f64).sqrt();
    let mut t = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            t[(i, j)] = C64::new(re * scale, im * scale);
        }
    }
    t
}

pub fn sample_t_seeded(n: usize, seed: u64, index: u64) -> Mat<C64> {
    sample_t(n, &mut sample_rng(seed, index))
}

/// Ascending eigenvalues of the Hermitian matrix `A^* A`, clamped at 0.
pub(crate) fn gram_eigenvalues(a: &Mat<C64>) -> Result<Vec<f64>> {
    let gram = a.adjoint() * a;
    let mut eigs = gram
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    for e in &mut eigs {
        *e = e.max(0.0);
    }
    Ok(eigs)
}

/// `k x^{1/k}` with `0^{1/k} = 0`.
pub(crate) fn sk_scale(k: usize, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        k as f64 * x.powf(1.0 / k as f64)
    }
}

/// Spectra of `S_1, ..., S_{k_max}` for one matrix.
pub fn spectrum_of(t: &Mat<C64>, k_max: usize) -> Result<SampleSpectrum> {
    let mut power = t.clone();
    let mut sk_eigs: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    let mut opnorms = Vec::with_capacity(k_max);
    for k in 1..=k_max.max(1) {
        if k > 1 {
            power = &power * t;
        }
        let eigs = gram_eigenvalues(&power)?;
        opnorms.push(eigs.last().copied().unwrap_or(0.0).sqrt());
        sk_eigs.push(eigs.into_iter().map(|x| sk_scale(k, x)).collect());
    }
    let tstar_t_eigs = sk_eigs[0].clone();
    sk_eigs.truncate(k_max);
    opnorms.truncate(k_max);
    Ok(SampleSpectrum {
        tstar_t_eigs,
        sk_eigs,
        opnorms,
    })
}

/// Runs `f(index, T)` over all samples in parallel; results come back in index order.
pub(crate) fn map_samples<R: Send>(
    cfg: &EnsembleConfig,
    f: impl Fn(usize, Mat<C64>) -> R + Sync,
) -> Vec<R> {
    with_thread_limit(|| {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| f(i, sample_t_seeded(cfg.n, cfg.seed, i as u64)))
            .collect()
    })
}

/// Per-sample spectra of `T*T` and `S_1..S_{k_max}`.
pub fn spectrum_suite(cfg: &EnsembleConfig) -> Result<Vec<SampleSpectrum>> {
    cfg.validate()?;
    cfg.check_power_guard()?;
    map_samples(cfg, |_, t| spectrum_of(&t, cfg.k_max))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_and_strictly_upper() {
        let n = 12;
        let t = sample_t_seeded(n, 7, 3);
        for i in 0..n {
            for j in 0..=i {
                assert_eq!(t[(i, j)], C64::new(0.0, 0.0));
            }
        }
        let mut p = t.clone();
        for _ in 1..n {
            p = &p * &t;
        }
        assert!(p.norm_max() == 0.0);
    }

    #[test]
    fn reproducible_and_stream_distinct() {
        let a = sample_t_seeded(20, 42, 5);
        let b = sample_t_seeded(20, 42, 5);
        let c = sample_t_seeded(20, 42, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn trace_mean() {
        let cfg = EnsembleConfig::new(100, 200, 1, 1).unwrap();
        let traces = map_samples(&cfg, |_, t| {
            let mut s = 0.0;
            for i in 0..cfg.n {
                for j in 0..cfg.n {
                    s += t[(i, j)].norm_sqr();
                }
            }
            s / cfg.n as f64
        });
        let mean = traces.iter().sum::<f64>() / traces.len() as f64;
        let expect = (cfg.n - 1) as f64 / (2.0 * cfg.n as f64);
        assert!((mean - expect).abs() < 0.005, "{mean}");
    }

    #[test]
    fn spectra_are_sorted_and_nonnegative() {
        let cfg = EnsembleConfig::new(60, 2, 3, 3).unwrap();
        for s in spectrum_suite(&cfg).unwrap() {
            assert_eq!(s.sk_eigs.len(), 3);
            assert_eq!(s.tstar_t_eigs, s.sk_eigs[0]);
            for e in &s.sk_eigs {
                assert_eq!(e.len(), 60);
                assert!(e.iter().all(|&x| x >= 0.0));
                assert!(e.windows(2).all(|w| w[0] <= w[1]));
            }
            // T^k has a kernel of dimension >= k
            for (k, e) in s.sk_eigs.iter().enumerate() {
                assert!(e[..=k].iter().all(|&x| x < 1e-3));
            }
        }
    }
}

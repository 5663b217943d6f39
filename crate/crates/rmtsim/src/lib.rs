//! Monte Carlo model of the quasinilpotent DT-operator: strictly upper-triangular
//! complex Gaussian matrices with entry variance `1/N`.
//!
//! Every sample owns a ChaCha8 stream keyed by `(seed, sample index)`, so results do
//! not depend on the number of worker threads. Samples run in parallel and are reduced
//! in index order.

pub mod ensemble;
pub mod probes;
pub mod stats;

use serde::{Deserialize, Serialize};

pub use ensemble::{
    sample_rng, sample_t, sample_t_seeded, spectrum_of, spectrum_suite, SampleSpectrum,
};
pub use probes::{covariance_check, decay_profile, fsk_vs_diag, norm_ratios, CovarianceEstimate};
pub use stats::{ks_statistic, ks_to_law, law_cdf, moment_estimates, MomentEstimate};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "DTLAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid ensemble configuration: {0}")]
    Config(String),
    #[error("eigendecomposition failed: {0}")]
    LinearAlgebra(String),
    #[error(transparent)]
    Core(#[from] dtlab_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Matrix size, sample count, base seed, and the largest power `k` to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub k_max: usize,
}

impl EnsembleConfig {
    pub fn new(n: usize, samples: usize, seed: u64, k_max: usize) -> Result<Self> {
        let cfg = EnsembleConfig {
            n,
            samples,
            seed,
            k_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("N = {} < 2", self.n)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        Ok(())
    }

    /// `k_max log2 N <= N`: beyond this `T^k` is dominated by its finite-size kernel.
    pub fn check_power_guard(&self) -> Result<()> {
        let bound = self.n as f64 / (self.n as f64).log2();
        if self.k_max as f64 > bound {
            return Err(Error::Config(format!(
                "k_max = {} exceeds N / log2 N = {bound:.1}",
                self.k_max
            )));
        }
        Ok(())
    }
}

/// Runs `f` inside a pool sized by `DTLAB_THREADS` when set, else on the global pool.
pub fn with_thread_limit<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let requested = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok());
    match requested {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

use thiserror::Error;

/// Errors raised by the numeric and exact routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("{op}: argument outside domain: {detail}")]
    Domain { op: &'static str, detail: String },

    /// An iterative solver hit its iteration cap before meeting its tolerance.
    #[error("{op}: no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// The requested polynomial degree exceeds the configured cap.
    #[error("degree n*k = {degree} exceeds cap {cap} (k = {k}, n = {n})")]
    CapExceeded {
        k: usize,
        n: usize,
        degree: usize,
        cap: usize,
    },

    /// Interpolation nodes are too close to each other for the weights to be trusted.
    #[error("{op}: nodes nearly coincide (min gap {min_gap:e} < {threshold:e})")]
    DegenerateNodes {
        op: &'static str,
        min_gap: f64,
        threshold: f64,
    },

    /// A computation produced a NaN or infinity.
    #[error("{op}: non-finite result")]
    NonFinite { op: &'static str },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

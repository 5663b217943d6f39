// Domain guards are written as `!(x > a)` so that NaN arguments are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod jointlaw;
pub mod poly;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod snpoly;
pub mod speclaw;
pub mod wbranch;

pub use error::{Error, Result};
pub use jointlaw::{GammaNodes, JointDensityGrid, NodeData};
pub use poly::Polynomial;
pub use report::{Entry, VerificationReport};
pub use scalar::Real;
pub use snpoly::{ExactPolynomial, RationalSeries, SeriesKind};
pub use speclaw::{RecursionTrace, SpectralPoint};
pub use wbranch::{BoundaryPoint, Side};

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
pub type Rational = num_rational::BigRational;
pub type NodeData64 = NodeData<f64>;
pub type NodeData32 = NodeData<f32>;
pub type SpectralPoint64 = SpectralPoint<f64>;
pub type BoundaryPoint64 = BoundaryPoint<f64>;

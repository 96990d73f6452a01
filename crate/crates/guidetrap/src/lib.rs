//! Trapped-mode eigenvalues of a two-dimensional waveguide containing a small rigid obstacle.
//!
//! The pipeline runs from an exterior Neumann solve on the obstacle (dipole strengths), through
//! closed-form leading-order asymptotics, to the full discretized secular equation and the
//! reconstruction of the mode field. All numerics are generic over [`Real`]; the aliases below fix
//! the double-precision instantiation used by the CLI and the acceptance tests.

// Negated comparisons such as `!(x > 0)` are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod contour;
pub mod error;
pub mod linalg;
pub mod neumann_bem;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod secular;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type ContourSpec = contour::ContourSpec<f64>;
pub type SampledContour = contour::SampledContour<f64>;
pub type WaveguideGeometry = contour::WaveguideGeometry<f64>;
pub type DipoleData = neumann_bem::DipoleData<f64>;
pub type KernelMatrix = neumann_bem::KernelMatrix<f64>;
pub type AsymptoticVerdict = asymptotics::AsymptoticVerdict<f64>;
pub type PGrid = secular::PGrid<f64>;
pub type DiscretizedSystem = secular::DiscretizedSystem<f64>;
pub type SpectralResult = secular::SpectralResult<f64>;
pub type ModeTraces = secular::ModeTraces<f64>;
pub type FieldSamples = secular::FieldSamples<f64>;
pub type MuEstimate = oracle::MuEstimate<f64>;
pub type ScanResult = oracle::ScanResult<f64>;
pub use secular::{ModeFamily, SolveOptions};

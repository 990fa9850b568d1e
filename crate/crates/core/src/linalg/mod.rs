//! Dense vectors, linear operators, spectral estimates, SPD solves and the
//! seeded random stream.

pub mod dense;
pub mod factor;
pub mod operator;
pub mod rng;
pub mod spd;
pub mod spectral;
pub mod vector;

pub use dense::DenseMatrix;
pub use factor::{Cholesky, TridiagonalFactor};
pub use operator::{first_difference_sigma, LinearOperator, OperatorKind};
pub use rng::RngStream;
pub use spd::{spd_solve, Curvature, SpdFactor, SpdSystem};
pub use spectral::{power_iteration, symmetric_extremes, DEFAULT_SPECTRAL_TOL, POWER_MAX_ITER};

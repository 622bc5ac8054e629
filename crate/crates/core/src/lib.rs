//! D-optimal sampling designs for complex Ornstein-Uhlenbeck processes with trend.
//!
//! The observed process is `Z(t) = m f(t) + Y(t)` where `Y` is a stationary complex OU
//! process with damping `lambda > 0` and frequency `omega`. Observing `Z` at times
//! `t_1 < ... < t_n` gives a `2n`-dimensional Gaussian vector whose Fisher information on
//! the trend coefficient `m` and on `(lambda, omega)` has closed forms in the spacings
//! `d_j = t_{j+1} - t_j`. This crate provides
//!
//! * [`kernel`]: parameter/design types, the `2x2` damped rotation, the stationary
//!   covariance and its block-tridiagonal inverse, and the scalar information functions;
//! * [`fisher`]: closed-form information blocks plus a dense trace oracle;
//! * [`solver`]: optimal spacings for every criterion (trend, frequency, joint covariance,
//!   all parameters), with the Lambert W, Brent, golden-section and simplex machinery;
//! * [`efficiency`]: sensitivity of the standardized design;
//! * [`simulator`]: exact sampling and generalized least squares trend estimation.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases below fix `f64`.

pub mod efficiency;
pub mod emit;
pub mod error;
pub mod fisher;
pub mod kernel;
pub mod linalg;
pub mod scalar;
pub mod simulator;
pub mod solver;

pub use error::{Error, Result};
pub use kernel::{Design, OuParams, RotationBlock, TrendParams, TrendSpec};
pub use scalar::Scalar;

pub type Params = kernel::OuParams<f64>;
pub type Design64 = kernel::Design<f64>;
pub type Trend = kernel::TrendSpec<f64>;
pub type Matrix = linalg::DenseMatrix<f64>;
pub type Fisher = fisher::FisherBlocks<f64>;
pub type Optimum = solver::DesignResult<f64>;
pub type Surface = efficiency::EfficiencyGrid<f64>;
pub type Path = simulator::SamplePath<f64>;

//! Domain types, the damped rotation `e^{A tau}`, the stationary covariance of the
//! observation vector and the scalar information functions.

mod covariance;
pub(crate) mod design;
pub mod info;
mod params;
mod rotation;
mod trend;

pub use covariance::{
    covariance_inverse_closed, covariance_matrix, covariance_matrix_capped, BlockTridiagonal,
    DEFAULT_DENSE_CAP,
};
pub use design::Design;
pub use info::{g_func, kappa_func, phi_func, psi_func, r_func};
pub use params::OuParams;
pub use rotation::{rotation_block, RotationBlock};
pub use trend::{TrendParams, TrendSpec};

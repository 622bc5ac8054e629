//! Fisher information of the observation vector on the trend coefficient `(m1, m2)` and
//! the covariance parameters `(lambda, omega)`.
//!
//! The closed forms here are `O(n)`; [`oracle_trend_fim`] and [`oracle_cov_fim`] evaluate
//! the defining matrix expressions densely and serve as their independent check.

mod oracle;

use serde::Serialize;

pub use oracle::{covariance_derivatives, oracle_cov_fim, oracle_trend_fim, trend_design_matrix};

use crate::error::Result;
use crate::kernel::info::{g_func, phi_func, psi_func};
use crate::kernel::{Design, OuParams, TrendSpec};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Information on `(lambda, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovInfo<T> {
    pub i_lambda: T,
    pub i_omega: T,
    /// Always exactly zero for this model.
    pub cross: T,
    /// Set when evaluated at `omega = 0`, where the optimal-design results do not apply.
    pub omega_zero: bool,
}

/// Block-diagonal information on `(m1, m2, lambda, omega)`: `Q(n) I_2` for the trend and
/// `diag(I_lambda, I_omega)` for the covariance parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherBlocks<T> {
    pub q_n: T,
    pub i_lambda: T,
    pub i_omega: T,
    pub i_lambda_omega: T,
    pub omega_zero: bool,
}

impl<T: Scalar> FisherBlocks<T> {
    pub fn matrix(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(4, 4);
        m[(0, 0)] = self.q_n;
        m[(1, 1)] = self.q_n;
        m[(2, 2)] = self.i_lambda;
        m[(3, 3)] = self.i_omega;
        m[(2, 3)] = self.i_lambda_omega;
        m[(3, 2)] = self.i_lambda_omega;
        m
    }

    /// `Q(n)^2 (I_lambda I_omega - I_{lambda,omega}^2)`.
    pub fn determinant(&self) -> T {
        self.q_n
            * self.q_n
            * (self.i_lambda * self.i_omega - self.i_lambda_omega * self.i_lambda_omega)
    }
}

/// Trend information `Q(n)` for an arbitrary trend basis.
///
/// With `q_j = exp(-lambda d_j)` and `f_j = f(t_j)`:
///
/// ```text
/// Q(n) = |f_n|^2 + sum_j [ |f_j|^2 + q_j^2 |f_{j+1}|^2
///         - 2 q_j ( Im(conj(f_j) f_{j+1}) sin(omega d_j) + Re(conj(f_j) f_{j+1}) cos(omega d_j) ) ]
///         / (1 - q_j^2)
/// ```
///
/// where `Im(conj(f_j) f_{j+1}) = f1_j f2_{j+1} - f2_j f1_{j+1}`. The sign of the sine term
/// follows the covariance layout of [`covariance_matrix`](crate::kernel::covariance_matrix),
/// i.e. the noise rotates forward in time at rate `omega`.
pub fn trend_info_general<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    trend: &TrendSpec<T>,
) -> Result<T> {
    p.ensure_normalized()?;
    let f: Vec<(T, T)> = dz.times().iter().map(|t| trend.eval(*t)).collect();
    let norm2 = |(a, b): (T, T)| a * a + b * b;
    let mut q_n = norm2(f[f.len() - 1]);
    for (j, d) in dz.spacings().iter().enumerate() {
        let (a1, a2) = f[j];
        let (b1, b2) = f[j + 1];
        let q = (-p.lambda() * *d).exp();
        let one_minus_q2 = -(-T::two() * p.lambda() * *d).exp_m1();
        let (s, c) = (p.omega() * *d).sin_cos();
        let im = a1 * b2 - a2 * b1;
        let re = a1 * b1 + a2 * b2;
        let bracket = norm2(f[j]) + q * q * norm2(f[j + 1]) - T::two() * q * (im * s + re * c);
        q_n = q_n + bracket / one_minus_q2;
    }
    Ok(q_n)
}

/// `Q(n) = 1 + sum g(d_l)` for the constant trend.
pub fn trend_info_constant<T: Scalar>(p: &OuParams<T>, dz: &Design<T>) -> Result<T> {
    p.ensure_normalized()?;
    Ok(T::one() + dz.spacings().iter().map(|d| g_func(p, *d)).sum::<T>())
}

/// `I_lambda = sum phi(d_l)`, `I_omega = sum psi(d_l)`, zero cross term.
pub fn cov_info<T: Scalar>(p: &OuParams<T>, dz: &Design<T>) -> Result<CovInfo<T>> {
    p.ensure_normalized()?;
    let d = dz.spacings();
    Ok(CovInfo {
        i_lambda: d.iter().map(|x| phi_func(p, *x)).sum(),
        i_omega: d.iter().map(|x| psi_func(p, *x)).sum(),
        cross: T::zero(),
        omega_zero: p.omega() == T::zero(),
    })
}

pub fn fisher_blocks<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    trend: &TrendSpec<T>,
) -> Result<FisherBlocks<T>> {
    let q_n = match trend {
        TrendSpec::Constant => trend_info_constant(p, dz)?,
        _ => trend_info_general(p, dz, trend)?,
    };
    let cov = cov_info(p, dz)?;
    Ok(FisherBlocks {
        q_n,
        i_lambda: cov.i_lambda,
        i_omega: cov.i_omega,
        i_lambda_omega: cov.cross,
        omega_zero: cov.omega_zero,
    })
}

/// The assembled `4x4` information matrix on `(m1, m2, lambda, omega)`.
pub fn full_fim<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    trend: &TrendSpec<T>,
) -> Result<DenseMatrix<T>> {
    Ok(fisher_blocks(p, dz, trend)?.matrix())
}

/// D-criterion on all four parameters for the constant trend as a function of the spacings,
/// `(1 + sum g)^2 (sum phi) (sum psi)`.
pub fn all_params_objective<T: Scalar>(p: &OuParams<T>, spacings: &[T]) -> T {
    let (mut g, mut phi, mut psi) = (T::one(), T::zero(), T::zero());
    for d in spacings {
        g = g + g_func(p, *d);
        phi = phi + phi_func(p, *d);
        psi = psi + psi_func(p, *d);
    }
    g * g * phi * psi
}

use crate::error::Result;
use crate::kernel::{covariance_matrix, rotation_block, Design, OuParams, TrendSpec, DEFAULT_DENSE_CAP};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// `H(n)`, the `2 x 2n` matrix with `E[Z] = H^T (m1, m2)^T`.
///
/// Column pair `j` is `[[f1(t_j), f2(t_j)], [-f2(t_j), f1(t_j)]]`: the first row carries the
/// coefficients of `m1` in `(Z1(t_j), Z2(t_j))`, the second those of `m2`.
pub fn trend_design_matrix<T: Scalar>(dz: &Design<T>, trend: &TrendSpec<T>) -> DenseMatrix<T> {
    let n = dz.len();
    let mut h = DenseMatrix::zeros(2, 2 * n);
    for (j, t) in dz.times().iter().enumerate() {
        let (f1, f2) = trend.eval(*t);
        h[(0, 2 * j)] = f1;
        h[(0, 2 * j + 1)] = f2;
        h[(1, 2 * j)] = -f2;
        h[(1, 2 * j + 1)] = f1;
    }
    h
}

/// Analytic `(dC/dlambda, dC/domega)`, differentiating each block `e^{A tau}` entrywise:
/// `d/dlambda = -tau e^{A tau}` and `d/domega = tau e^{-lambda tau} [[-sin, -cos], [cos, -sin]]`.
pub fn covariance_derivatives<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    p.ensure_normalized()?;
    let n = dz.len();
    if n > DEFAULT_DENSE_CAP {
        return Err(crate::Error::DenseCapExceeded {
            n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let t = dz.times();
    let mut d_lambda = DenseMatrix::zeros(2 * n, 2 * n);
    let mut d_omega = DenseMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        for j in 0..k {
            let tau = t[k] - t[j];
            let b = rotation_block(p, tau);
            let dl = b.scale(-tau).matrix();
            // derivative of the rotation angle: (c, s) -> (-s, c) scaled by tau
            let dw = [[-b.s * tau, -b.c * tau], [b.c * tau, -b.s * tau]];
            d_lambda.set_block2(k, j, dl);
            d_lambda.set_block2(j, k, transpose(dl));
            d_omega.set_block2(k, j, dw);
            d_omega.set_block2(j, k, transpose(dw));
        }
    }
    Ok((d_lambda, d_omega))
}

fn transpose<T: Copy>(m: [[T; 2]; 2]) -> [[T; 2]; 2] {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// `H C^{-1} H^T` with a dense Cholesky inverse.
pub fn oracle_trend_fim<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    trend: &TrendSpec<T>,
) -> Result<[[T; 2]; 2]> {
    let c_inv = covariance_matrix(p, dz)?.cholesky()?.inverse();
    let h = trend_design_matrix(dz, trend);
    let m = &(&h * &c_inv) * &h.transpose();
    Ok([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
}

/// `1/2 tr(C^{-1} dC_a C^{-1} dC_b)` for `a, b` in `{lambda, omega}`.
pub fn oracle_cov_fim<T: Scalar>(p: &OuParams<T>, dz: &Design<T>) -> Result<[[T; 2]; 2]> {
    let c_inv = covariance_matrix(p, dz)?.cholesky()?.inverse();
    let (dl, dw) = covariance_derivatives(p, dz)?;
    let a = &c_inv * &dl;
    let b = &c_inv * &dw;
    let half = T::half();
    let ll = half * a.trace_of_product(&a);
    let ww = half * b.trace_of_product(&b);
    let lw = half * a.trace_of_product(&b);
    Ok([[ll, lw], [lw, ww]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::{cov_info, trend_info_general};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn derivatives_match_finite_differences() {
        let dz = Design::new(vec![0.0, 0.7, 1.1, 2.6]).unwrap();
        let (l, w) = (0.9, 2.2);
        let p = OuParams::new(l, w).unwrap();
        let (dl, dw) = covariance_derivatives(&p, &dz).unwrap();
        let h = 1e-6;
        let c = |l: f64, w: f64| covariance_matrix(&OuParams::new(l, w).unwrap(), &dz).unwrap();
        let fd_l = c(l + h, w).sub(&c(l - h, w)).scaled(0.5 / h);
        let fd_w = c(l, w + h).sub(&c(l, w - h)).scaled(0.5 / h);
        assert!(dl.max_abs_diff(&fd_l) < 1e-6);
        assert!(dw.max_abs_diff(&fd_w) < 1e-6);
    }

    #[test]
    fn chandler_trend_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = OuParams::new(rng.random_range(0.05..5.0), rng.random_range(-10.0..10.0)).unwrap();
            let d: Vec<f64> = (0..2).map(|_| rng.random_range(0.05..2.0)).collect();
            let dz = Design::from_spacings(rng.random_range(0.0..1.0), &d).unwrap();
            let oracle = oracle_trend_fim(&p, &dz, &TrendSpec::Chandler).unwrap();
            let q = trend_info_general(&p, &dz, &TrendSpec::Chandler).unwrap();
            assert!((oracle[0][0] - q).abs() < 1e-9 * q.max(1.0));
            assert!((oracle[1][1] - q).abs() < 1e-9 * q.max(1.0));
            assert!(oracle[0][1].abs() < 1e-9 && oracle[1][0].abs() < 1e-9);
        }
    }

    #[test]
    fn custom_trend_fim_is_scalar_multiple_of_identity() {
        let trend = TrendSpec::custom("poly", |t: f64| (1.0 + 0.5 * t, t * t - 0.3));
        let p = OuParams::new(0.4, 3.0).unwrap();
        let dz = Design::new(vec![0.1, 0.9, 1.0, 2.2, 3.5]).unwrap();
        let oracle = oracle_trend_fim(&p, &dz, &trend).unwrap();
        let q = trend_info_general(&p, &dz, &trend).unwrap();
        assert!(oracle[0][1].abs() < 1e-9 * q);
        assert!((oracle[0][0] - oracle[1][1]).abs() < 1e-9 * q);
        assert!((oracle[0][0] - q).abs() < 1e-9 * q);
    }

    #[test]
    fn cov_oracle_matches_closed_form() {
        let dz = Design::new(vec![0.0f64, 0.3, 1.0, 1.05, 3.0]).unwrap();
        let p = OuParams::new(0.7, -3.0).unwrap();
        let oracle = oracle_cov_fim(&p, &dz).unwrap();
        let closed = cov_info(&p, &dz).unwrap();
        assert!((oracle[0][0] - closed.i_lambda).abs() < 1e-8 * closed.i_lambda);
        assert!((oracle[1][1] - closed.i_omega).abs() < 1e-8 * closed.i_omega);
        assert!(oracle[0][1].abs() < 1e-9);
    }

    #[test]
    fn cov_info_is_frequency_free() {
        let dz = Design::new(vec![0.0f64, 0.5, 1.7]).unwrap();
        let a = oracle_cov_fim(&OuParams::new(1.2, 0.5).unwrap(), &dz).unwrap();
        let b = oracle_cov_fim(&OuParams::new(1.2, 7.5).unwrap(), &dz).unwrap();
        assert!((a[0][0] - b[0][0]).abs() < 1e-10);
        assert!((a[1][1] - b[1][1]).abs() < 1e-10);
    }
}

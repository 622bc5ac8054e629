use super::{rotation_block, Design, OuParams, RotationBlock};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Largest number of observation pairs the dense covariance route accepts.
pub const DEFAULT_DENSE_CAP: usize = 2048;

/// Covariance of `(Y1(t_1), Y2(t_1), ..., Y1(t_n), Y2(t_n))` for the unit-variance process.
///
/// Block `(k, j)` with `k > j` is `E[Y(t_k) Y(t_j)^T] = e^{A (t_k - t_j)}`; the block above
/// the diagonal is its transpose and diagonal blocks are `I_2`.
pub fn covariance_matrix<T: Scalar>(p: &OuParams<T>, dz: &Design<T>) -> Result<DenseMatrix<T>> {
    covariance_matrix_capped(p, dz, DEFAULT_DENSE_CAP)
}

pub fn covariance_matrix_capped<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    cap: usize,
) -> Result<DenseMatrix<T>> {
    p.ensure_normalized()?;
    let n = dz.len();
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    let t = dz.times();
    let mut c = DenseMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        c.set_block2(k, k, RotationBlock::identity().matrix());
        for j in 0..k {
            let b = rotation_block(p, t[k] - t[j]);
            c.set_block2(k, j, b.matrix());
            c.set_block2(j, k, b.transpose().matrix());
        }
    }
    Ok(c)
}

/// Symmetric block-tridiagonal matrix with scalar diagonal blocks `diag[j] I_2`,
/// sub-diagonal blocks `lower[j]` at `(j + 1, j)` and their transposes above.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiagonal<T> {
    pub diag: Vec<T>,
    pub lower: Vec<RotationBlock<T>>,
}

impl<T: Scalar> BlockTridiagonal<T> {
    /// Number of `2x2` block rows.
    pub fn blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let n = self.blocks();
        let mut m = DenseMatrix::zeros(2 * n, 2 * n);
        for (j, d) in self.diag.iter().enumerate() {
            m.set_block2(j, j, [[*d, T::zero()], [T::zero(), *d]]);
        }
        for (j, b) in self.lower.iter().enumerate() {
            m.set_block2(j + 1, j, b.matrix());
            m.set_block2(j, j + 1, b.transpose().matrix());
        }
        m
    }

    /// Product with a stacked vector of `2`-blocks, `O(n)`.
    pub fn mul_pairs(&self, v: &[[T; 2]]) -> Vec<[T; 2]> {
        assert_eq!(v.len(), self.blocks());
        let mut out: Vec<[T; 2]> = v
            .iter()
            .zip(&self.diag)
            .map(|(x, d)| [*d * x[0], *d * x[1]])
            .collect();
        for (j, b) in self.lower.iter().enumerate() {
            let below = b.apply(v[j]);
            let above = b.transpose().apply(v[j + 1]);
            out[j + 1] = [out[j + 1][0] + below[0], out[j + 1][1] + below[1]];
            out[j] = [out[j][0] + above[0], out[j][1] + above[1]];
        }
        out
    }
}

/// Closed-form inverse of [`covariance_matrix`].
///
/// With `q_k = exp(-lambda d_k)` and `u_k = 1 / (1 - q_k^2)`: the diagonal is
/// `u_1, u_k + q_{k-1}^2 u_{k-1} (k = 2..n-1), u_{n-1}` and block `(k + 1, k)` is
/// `-u_k e^{A d_k}`. No size cap; this is the `O(n)` route.
pub fn covariance_inverse_closed<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
) -> Result<BlockTridiagonal<T>> {
    p.ensure_normalized()?;
    let d = dz.spacings();
    let mut u = Vec::with_capacity(d.len());
    let mut q2 = Vec::with_capacity(d.len());
    for (index, dk) in d.iter().enumerate() {
        let one_minus = -(-T::two() * p.lambda() * *dk).exp_m1();
        if !(one_minus > T::zero()) {
            return Err(Error::SingularCovariance { index });
        }
        u.push(one_minus.recip());
        q2.push(T::one() - one_minus);
    }
    let m = d.len();
    let mut diag = Vec::with_capacity(m + 1);
    diag.push(u[0]);
    for k in 1..m {
        diag.push(u[k] + q2[k - 1] * u[k - 1]);
    }
    diag.push(u[m - 1]);
    let lower = d
        .iter()
        .zip(&u)
        .map(|(dk, uk)| rotation_block(p, *dk).scale(-*uk))
        .collect();
    Ok(BlockTridiagonal { diag, lower })
}

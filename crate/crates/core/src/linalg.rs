//! Small dense row-major matrices for the verification paths.
//!
//! Nothing here is tuned: the dense covariance route is an `O(n^3)` oracle for the
//! closed forms and is capped accordingly.

use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Writes a `2x2` block with top-left corner at `(2 bi, 2 bj)`.
    pub fn set_block2(&mut self, bi: usize, bj: usize, block: [[T; 2]; 2]) {
        for (a, row) in block.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                self[(2 * bi + a, 2 * bj + b)] = *v;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> T {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = T::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| *v * k).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        Cholesky::new(self)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;

    fn mul(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Lower Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: DenseMatrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "Cholesky needs a square matrix");
        let n = a.rows;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag = diag - l[(j, k)] * l[(j, k)];
            }
            if !(diag > T::zero()) {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let djj = diag.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut v = a[(i, j)];
                for k in 0..j {
                    v = v - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = v / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &DenseMatrix<T> {
        &self.l
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v = v - self.l[(i, k)] * y[k];
            }
            y[i] = v / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in i + 1..n {
                v = v - self.l[(k, i)] * y[k];
            }
            y[i] = v / self.l[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.l.rows;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }

    pub fn log_determinant(&self) -> T {
        (0..self.l.rows).map(|i| self.l[(i, i)].ln()).sum::<T>() * T::two()
    }
}

use serde::Serialize;

use super::OuParams;
use crate::scalar::Scalar;

/// Damped rotation `[[c, -s], [s, c]]`.
///
/// `rotation_block(p, tau)` is `e^{A tau}` with `A = [[-lambda, -omega], [omega, -lambda]]`,
/// which is also the lag-`tau` covariance `E[Y(t + tau) Y(t)^T]` of the unit-variance
/// process. Only `(c, s)` are stored, so the rotation structure holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationBlock<T> {
    pub c: T,
    pub s: T,
}

pub fn rotation_block<T: Scalar>(p: &OuParams<T>, tau: T) -> RotationBlock<T> {
    debug_assert!(tau >= T::zero(), "negative lag {tau}");
    let damp = (-p.lambda() * tau).exp();
    let (s, c) = (p.omega() * tau).sin_cos();
    RotationBlock {
        c: damp * c,
        s: damp * s,
    }
}

impl<T: Scalar> RotationBlock<T> {
    pub fn identity() -> Self {
        Self {
            c: T::one(),
            s: T::zero(),
        }
    }

    pub fn matrix(&self) -> [[T; 2]; 2] {
        [[self.c, -self.s], [self.s, self.c]]
    }

    pub fn transpose(&self) -> Self {
        Self {
            c: self.c,
            s: -self.s,
        }
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            c: self.c * k,
            s: self.s * k,
        }
    }

    /// `self * other`; rotations commute.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            c: self.c * other.c - self.s * other.s,
            s: self.s * other.c + self.c * other.s,
        }
    }

    pub fn determinant(&self) -> T {
        self.c * self.c + self.s * self.s
    }

    pub fn apply(&self, v: [T; 2]) -> [T; 2] {
        [self.c * v[0] - self.s * v[1], self.s * v[0] + self.c * v[1]]
    }
}

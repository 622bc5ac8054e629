use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of the stationary complex OU process `dY = -(lambda - i omega) Y dt + sigma dW`.
///
/// `variance` is the stationary variance `sigma^2 / (2 lambda)` of each coordinate. The
/// information formulas are only valid for the normalized process (`variance == 1`) and
/// check this through [`OuParams::ensure_normalized`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuParams<T> {
    lambda: T,
    omega: T,
    variance: T,
}

impl<T: Scalar> OuParams<T> {
    /// Unit-variance parameters.
    pub fn new(lambda: T, omega: T) -> Result<Self> {
        Self::with_variance(lambda, omega, T::one())
    }

    pub fn with_variance(lambda: T, omega: T, variance: T) -> Result<Self> {
        if !(lambda.is_finite() && lambda > T::zero()) {
            return Err(Error::param("lambda", format!("must be finite and > 0, got {lambda}")));
        }
        if !omega.is_finite() {
            return Err(Error::param("omega", format!("must be finite, got {omega}")));
        }
        if !(variance.is_finite() && variance > T::zero()) {
            return Err(Error::param(
                "sigma2_over_2lambda",
                format!("must be finite and > 0, got {variance}"),
            ));
        }
        Ok(Self {
            lambda,
            omega,
            variance,
        })
    }

    #[inline]
    pub fn lambda(&self) -> T {
        self.lambda
    }

    #[inline]
    pub fn omega(&self) -> T {
        self.omega
    }

    /// `sigma^2 / (2 lambda)`.
    #[inline]
    pub fn variance(&self) -> T {
        self.variance
    }

    /// Diffusion coefficient `sigma` implied by the variance scale.
    pub fn sigma(&self) -> T {
        (T::two() * self.lambda * self.variance).sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        self.variance == T::one()
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.variance.as_f64()))
        }
    }

    /// Same process with both rates multiplied by `c`, i.e. time measured in units of `1/c`.
    pub fn rescaled(&self, c: T) -> Result<Self> {
        Self::with_variance(self.lambda * c, self.omega * c, self.variance)
    }

    /// Parameters with `|omega|`; every information function is even in `omega`
    /// except the general-trend cross term.
    pub(crate) fn abs_omega(&self) -> Self {
        Self {
            omega: self.omega.abs(),
            ..*self
        }
    }
}

impl OuParams<f64> {
    /// `lambda = omega = 1`, the standardized setup.
    pub fn standard() -> Self {
        Self::new(1.0, 1.0).expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_lambda() {
        assert!(OuParams::new(0.0, 1.0).is_err());
        assert!(OuParams::new(-1.0, 1.0).is_err());
        assert!(OuParams::new(f64::NAN, 1.0).is_err());
        assert!(OuParams::new(1.0, f64::INFINITY).is_err());
        assert!(OuParams::with_variance(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn normalization_check() {
        assert!(OuParams::new(2.0, 0.0).unwrap().ensure_normalized().is_ok());
        let p = OuParams::with_variance(2.0, 1.0, 3.0).unwrap();
        assert_eq!(p.ensure_normalized(), Err(Error::NotNormalized(3.0)));
        assert!((p.sigma() - 12f64.sqrt()).abs() < 1e-15);
    }
}

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::scalar::Scalar;

type TrendFn<T> = Arc<dyn Fn(T) -> (T, T) + Send + Sync>;

/// Complex trend basis `f(t) = f1(t) + i f2(t)`.
#[derive(Clone)]
pub enum TrendSpec<T> {
    /// `f1 = 1`, `f2 = 0`.
    Constant,
    /// Annual term of the polar motion model, `f(t) = exp(2 pi i t)`.
    Chandler,
    Custom { name: String, f: TrendFn<T> },
}

impl<T: Scalar> TrendSpec<T> {
    pub fn custom(name: impl Into<String>, f: impl Fn(T) -> (T, T) + Send + Sync + 'static) -> Self {
        TrendSpec::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `(f1(t), f2(t))`.
    pub fn eval(&self, t: T) -> (T, T) {
        match self {
            TrendSpec::Constant => (T::one(), T::zero()),
            TrendSpec::Chandler => {
                let (s, c) = (T::two() * T::PI() * t).sin_cos();
                (c, s)
            }
            TrendSpec::Custom { f, .. } => f(t),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            TrendSpec::Constant => "constant",
            TrendSpec::Chandler => "chandler",
            TrendSpec::Custom { name, .. } => name,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "constant" => Some(TrendSpec::Constant),
            "chandler" => Some(TrendSpec::Chandler),
            _ => None,
        }
    }

    /// Mean of `(Z1(t), Z2(t))`: `(m1 f1 - m2 f2, m2 f1 + m1 f2)`.
    pub fn mean(&self, t: T, m: TrendParams<T>) -> [T; 2] {
        let (f1, f2) = self.eval(t);
        [m.m1 * f1 - m.m2 * f2, m.m2 * f1 + m.m1 * f2]
    }
}

impl<T> fmt::Debug for TrendSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrendSpec::Constant => f.write_str("Constant"),
            TrendSpec::Chandler => f.write_str("Chandler"),
            TrendSpec::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Real and imaginary part of the trend coefficient `m = m1 + i m2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TrendParams<T> {
    pub m1: T,
    pub m2: T,
}

impl<T> TrendParams<T> {
    pub fn new(m1: T, m2: T) -> Self {
        Self { m1, m2 }
    }
}

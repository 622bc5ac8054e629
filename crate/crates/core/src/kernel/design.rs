use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Observation instants `t_1 < t_2 < ... < t_n`, `n >= 2`.
///
/// Spacings are stored alongside the times. When a design is built from spacings those
/// values are kept verbatim, so closed-form information never sees cumulative-sum rounding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Design<T> {
    times: Vec<T>,
    spacings: Vec<T>,
}

impl<T: Scalar> Design<T> {
    pub fn new(times: Vec<T>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidDesign(format!(
                "need at least 2 observation times, got {}",
                times.len()
            )));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidDesign(format!("time {i} is not finite")));
        }
        let spacings: Vec<T> = times.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = spacings.iter().position(|d| !(*d > T::zero())) {
            return Err(Error::InvalidDesign(format!(
                "times must be strictly increasing: t[{}] = {} >= t[{}] = {}",
                i,
                times[i],
                i + 1,
                times[i + 1]
            )));
        }
        Ok(Self { times, spacings })
    }

    /// Design starting at `start` with the given positive spacings.
    pub fn from_spacings(start: T, spacings: &[T]) -> Result<Self> {
        if spacings.is_empty() {
            return Err(Error::InvalidDesign("need at least one spacing".into()));
        }
        if let Some(i) = spacings.iter().position(|d| !(d.is_finite() && *d > T::zero())) {
            return Err(Error::InvalidDesign(format!(
                "spacing {i} must be finite and > 0, got {}",
                spacings[i]
            )));
        }
        let mut times = Vec::with_capacity(spacings.len() + 1);
        let mut t = start;
        times.push(t);
        for d in spacings {
            t = t + *d;
            times.push(t);
        }
        let mut design = Self::new(times)?;
        design.spacings = spacings.to_vec();
        Ok(design)
    }

    /// `n` points at `0, d, 2d, ...`.
    pub fn equidistant(n: usize, spacing: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDesign(format!("need n >= 2, got {n}")));
        }
        Self::from_spacings(T::zero(), &vec![spacing; n - 1])
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn spacings(&self) -> &[T] {
        &self.spacings
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `max d - min d`.
    pub fn spread(&self) -> T {
        spread(&self.spacings)
    }
}

pub(crate) fn spread<T: Scalar>(values: &[T]) -> T {
    let (lo, hi) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacings_are_exact_differences() {
        let d = Design::new(vec![0.5, 1.25, 4.0]).unwrap();
        assert_eq!(d.spacings(), &[0.75, 2.75]);
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn rejects_bad_designs() {
        assert!(Design::new(vec![1.0]).is_err());
        assert!(Design::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(Design::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(Design::new(vec![0.0, f64::NAN]).is_err());
        assert!(Design::from_spacings(0.0, &[1.0, 0.0]).is_err());
        assert!(Design::<f64>::equidistant(1, 1.0).is_err());
    }

    #[test]
    fn from_spacings_keeps_spacings() {
        let d = Design::from_spacings(0.1f64, &[0.2, 0.3]).unwrap();
        assert_eq!(d.spacings(), &[0.2, 0.3]);
        assert!((d.times()[2] - 0.6).abs() < 1e-15);
        assert_eq!(Design::equidistant(4, 0.5f64).unwrap().spread(), 0.0);
    }
}

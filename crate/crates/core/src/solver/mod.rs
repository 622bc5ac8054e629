//! Optimal spacings for every criterion, and the one-dimensional and simplex machinery
//! they are built on.

mod design;
mod lambert;
mod roots;
mod simplex;

use serde::Serialize;

pub use design::{
    equidistant_all_params_objective, optimal_cov_joint_spacing, optimal_omega_spacing,
    optimal_trend_spacing, optimize_all_params, reject_lambda_design, LambdaNonExistence, Mode,
};
pub use lambert::lambert_w0;
pub use roots::{brent_root, golden_section_max, Extremum, Root};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};

use crate::error::Result;
use crate::kernel::{design::spread, Design};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Criterion {
    /// Trend coefficient `(m1, m2)`.
    TrendD,
    /// Damping `lambda` alone (has no optimum).
    LambdaD,
    /// Frequency `omega` alone.
    OmegaD,
    /// `(lambda, omega)` jointly.
    CovJointD,
    /// `(m1, m2, lambda, omega)`.
    AllParamsD,
}

/// Result of one multistart seed in free mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOutcome<T> {
    pub start: Vec<T>,
    pub spacings: Vec<T>,
    pub objective: T,
    pub spread: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics<T> {
    pub iterations: usize,
    /// Number of bracketed roots (or grid brackets) examined.
    pub brackets: usize,
    pub converged: bool,
    /// First-order condition at the returned point.
    pub residual: T,
    /// Second derivative of the one-dimensional objective at the optimum, when known.
    pub second_order: Option<T>,
    /// Two local maxima were equal within tolerance; the smaller spacing was returned.
    pub tie: bool,
    pub seeds: Vec<SeedOutcome<T>>,
}

impl<T: Scalar> Diagnostics<T> {
    pub(crate) fn new(iterations: usize, brackets: usize, residual: T) -> Self {
        Self {
            iterations,
            brackets,
            converged: true,
            residual,
            second_order: None,
            tie: false,
            seeds: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignResult<T> {
    pub criterion: Criterion,
    /// One entry for the single-spacing criteria, `n - 1` entries for the all-parameter one.
    pub spacings: Vec<T>,
    pub objective: T,
    pub equidistant: bool,
    /// `max d - min d`.
    pub spread: T,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Scalar> DesignResult<T> {
    pub(crate) fn new(
        criterion: Criterion,
        spacings: Vec<T>,
        objective: T,
        diagnostics: Diagnostics<T>,
    ) -> Self {
        let spread = spread(&spacings);
        let mean = spacings.iter().copied().sum::<T>() / T::count(spacings.len());
        Self {
            criterion,
            equidistant: spread <= T::of(1e-6) * mean,
            spacings,
            objective,
            spread,
            diagnostics,
        }
    }

    /// Mean spacing; the optimal spacing itself for one-dimensional criteria.
    pub fn spacing(&self) -> T {
        self.spacings.iter().copied().sum::<T>() / T::count(self.spacings.len())
    }

    /// `n`-point design starting at 0. Single-spacing results are repeated.
    pub fn design(&self, n: usize) -> Result<Design<T>> {
        if self.spacings.len() == 1 {
            Design::equidistant(n, self.spacings[0])
        } else {
            Design::from_spacings(T::zero(), &self.spacings)
        }
    }
}

//! Sensitivity of the standardized trend design.
//!
//! `R(d, lambda, omega; n) = (1 + (n-1) g(d; 1, 1))^2 / (1 + (n-1) g(d; lambda, omega))^2`
//! compares the trend information of an equidistant design built for `lambda = omega = 1`
//! with what it would deliver under other parameter values.

use rayon::prelude::*;
use serde::Serialize;

use crate::emit::csv_document;
use crate::error::{Error, Result};
use crate::kernel::{g_func, OuParams};
use crate::scalar::Scalar;
use crate::solver::optimal_trend_spacing;

pub fn efficiency_ratio<T: Scalar>(d: T, lambda: T, omega: T, n: usize) -> Result<T> {
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::param("d", format!("must be positive, got {d}")));
    }
    if n < 2 {
        return Err(Error::param("n", format!("must be at least 2, got {n}")));
    }
    let base = OuParams::new(T::one(), T::one())?;
    let p = OuParams::new(lambda, omega)?;
    Ok(ratio(&base, &p, d, T::count(n - 1)))
}

fn ratio<T: Scalar>(base: &OuParams<T>, p: &OuParams<T>, d: T, m: T) -> T {
    let num = T::one() + m * g_func(base, d);
    let den = T::one() + m * g_func(p, d);
    (num / den) * (num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Vary `lambda` with `omega = 1`.
    Lambda,
    /// Vary `omega` with `lambda = 1`.
    Omega,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Lambda => "lambda",
            Axis::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyGrid<T> {
    pub axis: Axis,
    pub n: usize,
    /// Value of the parameter held at 1.
    pub fixed: T,
    pub d: Vec<T>,
    pub param: Vec<T>,
    /// `values[i][j] = R(d[i], param[j])`.
    pub values: Vec<Vec<T>>,
}

impl<T: Scalar> EfficiencyGrid<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i][j]
    }

    /// Long-format CSV `d,<axis>,R`, rows ordered by `d` then the parameter.
    pub fn to_csv(&self, metadata: &[(String, String)]) -> String {
        let rows: Vec<Vec<f64>> = self
            .d
            .iter()
            .zip(&self.values)
            .flat_map(|(d, row)| {
                self.param
                    .iter()
                    .zip(row)
                    .map(move |(v, r)| vec![d.as_f64(), v.as_f64(), r.as_f64()])
            })
            .collect();
        csv_document(metadata, &["d", self.axis.name(), "R"], &rows)
    }
}

fn check_axis<T: Scalar>(name: &'static str, values: &[T], positive: bool) -> Result<()> {
    if values.is_empty() {
        return Err(Error::param(name, "grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite() || (positive && !(*v > T::zero()))) {
        return Err(Error::param(name, "grid values must be finite and positive"));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param(name, "grid must be strictly increasing"));
    }
    Ok(())
}

/// `R` on the product of `d_grid` and `param_grid`, evaluated in parallel over `d`.
pub fn efficiency_surface<T: Scalar>(
    axis: Axis,
    d_grid: &[T],
    param_grid: &[T],
    n: usize,
) -> Result<EfficiencyGrid<T>> {
    check_axis("d", d_grid, true)?;
    check_axis(axis.name(), param_grid, axis == Axis::Lambda)?;
    if n < 2 {
        return Err(Error::param("n", format!("must be at least 2, got {n}")));
    }
    let base = OuParams::new(T::one(), T::one())?;
    let params: Vec<OuParams<T>> = param_grid
        .iter()
        .map(|v| match axis {
            Axis::Lambda => OuParams::new(*v, T::one()),
            Axis::Omega => OuParams::new(T::one(), *v),
        })
        .collect::<Result<_>>()?;
    let m = T::count(n - 1);
    let values = d_grid
        .par_iter()
        .map(|d| params.iter().map(|p| ratio(&base, p, *d, m)).collect())
        .collect();
    Ok(EfficiencyGrid {
        axis,
        n,
        fixed: T::one(),
        d: d_grid.to_vec(),
        param: param_grid.to_vec(),
        values,
    })
}

/// An extrapolated constant with the size of the last Richardson correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate<T> {
    pub value: T,
    pub error: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorReport<T> {
    /// Optimal trend spacing at `lambda = omega = 1`, from the solver.
    pub d_star: T,
    pub n_max: usize,
    /// `lim_{n -> inf} lim_{lambda -> 0} R(d*, lambda, 1; n) / lambda^2`.
    pub lambda_limit: LimitEstimate<T>,
    /// `R(d*, 1e-3, 1; n_max) / 1e-6`, the same constant read off at finite arguments.
    pub lambda_ratio_at_n_max: T,
    /// `R(d*, 1, omega; 10) = a - b omega^2 + O(omega^4)`: ten-point coefficients.
    pub omega_intercept_10: T,
    pub omega_slope_10: LimitEstimate<T>,
    /// The same coefficients as `n -> inf`.
    pub omega_intercept_limit: LimitEstimate<T>,
    pub omega_slope_limit: LimitEstimate<T>,
}

/// Richardson table for samples at `h, h/2, h/4, ...` of a function with an expansion in
/// integer powers `h^k, h^{2k}, ...`; returns the top-level value and last correction.
fn richardson<T: Scalar>(samples: &[T], order: i32, ratio: T) -> LimitEstimate<T> {
    let mut level: Vec<T> = samples.to_vec();
    let mut error = T::zero();
    let mut k = order;
    while level.len() > 1 {
        let factor = ratio.powi(k);
        let next: Vec<T> = level
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - T::one()))
            .collect();
        error = (next[next.len() - 1] - level[level.len() - 1]).abs();
        level = next;
        k += order;
    }
    LimitEstimate {
        value: level[0],
        error,
    }
}

/// Leading small-`lambda` coefficient of `R(d, lambda, 1; n)`, extrapolated in `lambda`.
fn lambda_coefficient<T: Scalar>(d: T, n: usize) -> Result<LimitEstimate<T>> {
    let h = T::of(4e-4);
    let samples: Vec<T> = (0..3)
        .map(|k| {
            let lam = h / T::count(1 << k);
            efficiency_ratio(d, lam, T::one(), n).map(|r| r / (lam * lam))
        })
        .collect::<Result<_>>()?;
    Ok(richardson(&samples, 1, T::two()))
}

/// `(R(d, 1, 0; n) - R(d, 1, omega; n)) / omega^2` extrapolated to `omega -> 0`.
fn omega_coefficients<T: Scalar>(d: T, n: usize) -> Result<(T, LimitEstimate<T>)> {
    let base = OuParams::new(T::one(), T::one())?;
    let m = T::count(n - 1);
    let r0 = ratio(&base, &OuParams::new(T::one(), T::zero())?, d, m);
    let h = T::of(4e-2);
    let samples: Vec<T> = (0..3)
        .map(|k| {
            let w = h / T::count(1 << k);
            OuParams::new(T::one(), w).map(|p| (r0 - ratio(&base, &p, d, m)) / (w * w))
        })
        .collect::<Result<_>>()?;
    Ok((r0, richardson(&samples, 2, T::two())))
}

/// Numerical limits of the efficiency ratio at the optimal standardized spacing.
///
/// The `lambda` constant is extrapolated first in `lambda` (at fixed `n`) and then in
/// `1 / (n - 1)` over `n - 1 = n_max / 8, n_max / 4, n_max / 2, n_max`; the `omega`
/// coefficients are extrapolated in `omega` and then in `1 / (n - 1)` the same way.
pub fn taylor_limit_checks<T: Scalar>(n_max: usize) -> Result<TaylorReport<T>> {
    if n_max < 100 {
        return Err(Error::param("n_max", format!("must be at least 100, got {n_max}")));
    }
    let d_star = optimal_trend_spacing(&OuParams::new(T::one(), T::one())?)?.spacings[0];
    let levels: Vec<usize> = (0..4).map(|k| (n_max >> (3 - k)) + 1).collect();

    let mut lam = Vec::new();
    let mut intercept = Vec::new();
    let mut slope = Vec::new();
    for n in &levels {
        lam.push(lambda_coefficient(d_star, *n)?.value);
        let (a, b) = omega_coefficients(d_star, *n)?;
        intercept.push(a);
        slope.push(b.value);
    }
    let (a10, b10) = omega_coefficients(d_star, 10)?;
    let lam_small = T::of(1e-3);
    Ok(TaylorReport {
        d_star,
        n_max,
        lambda_limit: richardson(&lam, 1, T::two()),
        lambda_ratio_at_n_max: efficiency_ratio(d_star, lam_small, T::one(), n_max)?
            / (lam_small * lam_small),
        omega_intercept_10: a10,
        omega_slope_10: b10,
        omega_intercept_limit: richardson(&intercept, 1, T::two()),
        omega_slope_limit: richardson(&slope, 1, T::two()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const D_STAR: f64 = 2.183_538_057_775_918_7;

    /// Analytic `lambda -> 0` coefficient at fixed `d` and `n`.
    fn small_lambda_law(d: f64, n: usize) -> f64 {
        let m = (n - 1) as f64;
        let g1 = g_func(&OuParams::new(1.0, 1.0).unwrap(), d);
        d * d * (1.0 + m * g1).powi(2) / (m * m * (d.cos() - 1.0).powi(2))
    }

    /// Analytic `omega^2` coefficient: `dg/d(omega^2) = q d^2 / (1 - q^2)` at `omega = 0`.
    fn omega_slope(d: f64, n: usize) -> f64 {
        let m = (n - 1) as f64;
        let g1 = g_func(&OuParams::new(1.0, 1.0).unwrap(), d);
        let g0 = g_func(&OuParams::new(1.0, 0.0).unwrap(), d);
        let q = (-d).exp();
        2.0 * (1.0 + m * g1).powi(2) * m * q * d * d / ((1.0 - q * q) * (1.0 + m * g0).powi(3))
    }

    #[test]
    fn standardized_point_is_one() {
        for n in [2, 5, 40] {
            for d in [0.1, 1.0, D_STAR, 7.0] {
                assert_eq!(efficiency_ratio(d, 1.0, 1.0, n).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(efficiency_ratio(0.0, 1.0, 1.0, 3).is_err());
        assert!(efficiency_ratio(1.0, 0.0, 1.0, 3).is_err());
        assert!(efficiency_ratio(1.0, 1.0, 1.0, 1).is_err());
        assert!(efficiency_surface(Axis::Lambda, &[1.0, 0.5], &[1.0], 3).is_err());
        assert!(efficiency_surface::<f64>(Axis::Omega, &[], &[1.0], 3).is_err());
    }

    #[test]
    fn small_lambda_quadratic_law() {
        for n in [2, 5, 10] {
            for d in [1.0, D_STAR, 4.0] {
                let lam = 1e-3;
                let got = efficiency_ratio(d, lam, 1.0, n).unwrap() / (lam * lam);
                let want = small_lambda_law(d, n);
                assert!((got / want - 1.0).abs() < 1e-2, "n={n} d={d}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn lambda_constant_at_large_n() {
        let lam = 1e-3;
        let got = efficiency_ratio(D_STAR, lam, 1.0, 10_000).unwrap() / (lam * lam);
        assert!((got / 2.5723 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn vanishes_for_tiny_damping() {
        assert!(efficiency_ratio(D_STAR, 1e-4, 1.0, 10).unwrap() < 1e-4);
    }

    #[test]
    fn omega_axis_slope_matches_analytic_coefficient() {
        let grid = efficiency_surface(Axis::Omega, &[D_STAR], &[0.0, 1e-2], 10).unwrap();
        let numeric = (grid.get(0, 0) - grid.get(0, 1)) / 1e-4;
        let analytic = omega_slope(D_STAR, 10);
        assert!((numeric / analytic - 1.0).abs() < 1e-2, "{numeric} vs {analytic}");
    }

    #[test]
    fn surface_cells_match_ratio() {
        let g = efficiency_surface(Axis::Lambda, &[0.5, D_STAR], &[0.3, 1.0, 2.0], 6).unwrap();
        for (i, d) in g.d.iter().enumerate() {
            for (j, l) in g.param.iter().enumerate() {
                assert_eq!(g.get(i, j), efficiency_ratio(*d, *l, 1.0, 6).unwrap());
            }
            assert_eq!(g.get(i, 1), 1.0);
        }
        let csv = g.to_csv(&[]);
        assert!(csv.starts_with("d,lambda,R\n"));
        assert_eq!(csv.lines().count(), 7);
        assert_eq!(csv, g.to_csv(&[]));
    }

    #[test]
    fn taylor_report() {
        let r = taylor_limit_checks::<f64>(2000).unwrap();
        assert!((r.d_star - D_STAR).abs() < 1e-12);
        let d = D_STAR;
        let exact_lambda = d * d * (g_func(&OuParams::new(1.0, 1.0).unwrap(), d) / (d.cos() - 1.0)).powi(2);
        assert!((r.lambda_limit.value - exact_lambda).abs() < 1e-6, "{:?}", r.lambda_limit);
        assert!((r.omega_slope_10.value - omega_slope(d, 10)).abs() < 1e-7);
        assert!(taylor_limit_checks::<f64>(50).is_err());
    }

    proptest! {
        #[test]
        fn even_in_frequency(d in 0.05f64..10.0, w in -8.0f64..8.0, n in 2usize..50) {
            prop_assert_eq!(
                efficiency_ratio(d, 1.0, w, n).unwrap(),
                efficiency_ratio(d, 1.0, -w, n).unwrap()
            );
        }
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{
    brent_root, golden_section_max, lambert_w0, nelder_mead, Criterion, DesignResult,
    Diagnostics, SeedOutcome, SimplexOptions,
};
use crate::error::{Error, Result};
use crate::fisher::all_params_objective;
use crate::kernel::info::{
    g_envelope_excess, g_excess, g_func, g_prime, g_second_at_critical, joint_critical_residual,
    phi_func, phi_prime, psi_critical_residual, psi_func, psi_prime, psi_second, r_func,
    r_scaled,
};
use crate::kernel::OuParams;
use crate::scalar::Scalar;

const BRENT_MAX_ITER: usize = 200;
const MAX_WINDOWS: usize = 1_000_000;
const SEEDS: usize = 9;
const SEED_SCATTER: f64 = 0.25;

/// Same process in time units of `1 / lambda`: damping 1, frequency `|omega| / lambda`.
fn standardized<T: Scalar>(p: &OuParams<T>) -> Result<OuParams<T>> {
    OuParams::new(T::one(), p.omega().abs() / p.lambda())
}

fn require_frequency<T: Scalar>(p: &OuParams<T>) -> Result<()> {
    if p.omega() == T::zero() {
        Err(Error::FrequencyZero)
    } else {
        Ok(())
    }
}

/// Global maximiser `d*` of `g` over `(0, inf)`.
///
/// Critical points are the roots of `r`, enumerated window by window (width `pi / |omega|`);
/// a window is skipped for good once the decreasing majorant of `g` at its start falls
/// below the best local maximum so far. Works in standardized time and uses `|omega|`.
pub fn optimal_trend_spacing<T: Scalar>(p: &OuParams<T>) -> Result<DesignResult<T>> {
    require_frequency(p)?;
    let s = standardized(p)?;
    let window = T::PI() / s.omega();
    let per_window = T::of(64.0);
    let step = (window / per_window)
        .min(T::of(0.05))
        .max(window / T::of(1e5));
    let steps = (window / step).ceil().to_usize().unwrap_or(1).max(1);
    let f = |x: T| r_scaled(&s, x);
    let tie_tol = T::of(1e-12);

    let mut best: Option<(T, T)> = None;
    let mut tie = false;
    let mut roots = 0;
    let mut iterations = 0;
    let mut prev_x = T::zero();
    let mut prev_f = T::one();
    for k in 0..MAX_WINDOWS {
        let start = T::count(k) * window;
        if let Some((_, excess)) = best {
            if g_envelope_excess(&s, start) < excess {
                let (x, _) = best.unwrap_or((T::zero(), T::zero()));
                let d = x / p.lambda();
                let mut diag = Diagnostics::new(iterations, roots, r_func(&p.abs_omega(), d));
                diag.second_order = Some(g_second_at_critical(&p.abs_omega(), d));
                diag.tie = tie;
                return Ok(DesignResult::new(
                    Criterion::TrendD,
                    vec![d],
                    g_func(p, d),
                    diag,
                ));
            }
        }
        for j in 1..=steps {
            let x = start + window * T::count(j) / T::count(steps);
            let fx = f(x);
            if fx.signum() != prev_f.signum() {
                let root = brent_root(f, prev_x, x, T::zero(), BRENT_MAX_ITER)?;
                roots += 1;
                iterations += root.iterations;
                let curvature = g_second_at_critical(&s, root.x);
                let is_max = if curvature != T::zero() {
                    curvature < T::zero()
                } else {
                    prev_f > T::zero()
                };
                if is_max {
                    let excess = g_excess(&s, root.x);
                    match best {
                        None => best = Some((root.x, excess)),
                        Some((_, b)) => {
                            let scale = b.abs().max(excess.abs());
                            if (excess - b).abs() <= tie_tol * scale {
                                tie = true;
                            } else if excess > b {
                                best = Some((root.x, excess));
                                tie = false;
                            }
                        }
                    }
                }
            }
            prev_x = x;
            prev_f = fx;
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_WINDOWS,
        reason: "critical-point scan of g did not terminate".into(),
    })
}

/// `d_lambda = (W0(-2 e^-2) / 2 + 1) / lambda`, the maximiser of `psi`.
pub fn optimal_omega_spacing<T: Scalar>(p: &OuParams<T>) -> Result<DesignResult<T>> {
    let w = lambert_w0(-T::two() * (-T::two()).exp())?;
    let d = (w * T::half() + T::one()) / p.lambda();
    let residual = psi_critical_residual(p, d);
    if residual.abs() > T::of(1e-12).max(T::of(64.0) * T::epsilon()) {
        return Err(Error::NonConvergence {
            iterations: 0,
            reason: format!("critical residual {residual} at d = {d}"),
        });
    }
    let mut diag = Diagnostics::new(0, 0, residual);
    diag.second_order = Some(psi_second(p, d));
    Ok(DesignResult::new(
        Criterion::OmegaD,
        vec![d],
        psi_func(p, d),
        diag,
    ))
}

/// Common spacing `d° / lambda` maximising `(sum phi)(sum psi)`, with `d°` the positive root
/// of `1 - x - 2x e^{-2x} - e^{-4x}`.
pub fn optimal_cov_joint_spacing<T: Scalar>(p: &OuParams<T>) -> Result<DesignResult<T>> {
    let (lo, hi) = (T::of(1e-3), T::two());
    let steps = 400;
    let h = (hi - lo) / T::count(steps);
    let mut a = lo;
    let mut fa = joint_critical_residual(a);
    let mut bracket = None;
    for k in 1..=steps {
        let b = lo + h * T::count(k);
        let fb = joint_critical_residual(b);
        if fa.signum() != fb.signum() {
            bracket = Some((a, b));
            break;
        }
        a = b;
        fa = fb;
    }
    let (a, b) = bracket.ok_or(Error::NoBracket {
        lo: lo.as_f64(),
        hi: hi.as_f64(),
    })?;
    let root = brent_root(joint_critical_residual, a, b, T::zero(), BRENT_MAX_ITER)?;
    let d = root.x / p.lambda();
    let diag = Diagnostics::new(root.iterations, 1, joint_critical_residual(root.x));
    Ok(DesignResult::new(
        Criterion::CovJointD,
        vec![d],
        phi_func(p, d) * psi_func(p, d),
        diag,
    ))
}

/// `(1 + m g(d))^2 (m phi(d)) (m psi(d))` with `m = n - 1`.
pub fn equidistant_all_params_objective<T: Scalar>(p: &OuParams<T>, n: usize, d: T) -> T {
    let m = T::count(n.saturating_sub(1));
    let q = T::one() + m * g_func(p, d);
    q * q * m * m * phi_func(p, d) * psi_func(p, d)
}

fn log_equidistant<T: Scalar>(p: &OuParams<T>, m: T, x: T) -> T {
    let q = T::one() + m * g_func(p, x);
    (q * q * m * m * phi_func(p, x) * psi_func(p, x)).ln()
}

fn log_equidistant_slope<T: Scalar>(p: &OuParams<T>, m: T, x: T) -> T {
    let q = T::one() + m * g_func(p, x);
    T::two() * m * g_prime(p, x) / q + phi_prime(p, x) / phi_func(p, x) + psi_prime(p, x) / psi_func(p, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Equidistant,
    Free,
}

/// D-optimal design on `(m1, m2, lambda, omega)` for `n` points with constant trend.
///
/// `Equidistant` maximises over the common spacing (grid bracket, golden section, then a
/// Brent polish on the log-derivative). `Free` runs a simplex search over all `n - 1`
/// spacings in log coordinates from the equidistant optimum and eight scattered seeds.
pub fn optimize_all_params<T: Scalar>(
    p: &OuParams<T>,
    n: usize,
    mode: Mode,
) -> Result<DesignResult<T>> {
    require_frequency(p)?;
    if n < 2 {
        return Err(Error::InvalidDesign(format!("need at least 2 points, got {n}")));
    }
    let s = standardized(p)?;
    let (x, mut diag) = equidistant_optimum(&s, n)?;
    match mode {
        Mode::Equidistant => {
            let d = x / p.lambda();
            diag.residual = log_equidistant_slope(&s, T::count(n - 1), x) / p.lambda();
            Ok(DesignResult::new(
                Criterion::AllParamsD,
                vec![d; n - 1],
                all_params_objective(p, &vec![d; n - 1]),
                diag,
            ))
        }
        Mode::Free => free_optimum(p, &s, n, x),
    }
}

fn equidistant_optimum<T: Scalar>(s: &OuParams<T>, n: usize) -> Result<(T, Diagnostics<T>)> {
    let m = T::count(n - 1);
    let horizon = T::of(40.0);
    let step = T::of(0.01).min(T::two() * T::PI() / s.omega() / T::of(64.0));
    let points = (horizon / step).ceil().to_usize().unwrap_or(1).clamp(64, 4_000_000);
    let step = horizon / T::count(points);
    let objective = |x: T| {
        let v = log_equidistant(s, m, x);
        if v.is_nan() {
            T::neg_infinity()
        } else {
            v
        }
    };
    let mut best = (1, T::neg_infinity());
    for i in 1..=points {
        let v = objective(step * T::count(i));
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo = step * T::count(best.0 - 1).max(T::of(1e-3));
    let hi = step * T::count(best.0 + 1);
    let golden = golden_section_max(objective, lo, hi, T::of(1e-10) * hi, 500);
    let mut x = golden.x;
    let mut iterations = golden.iterations;
    let slope = |x: T| log_equidistant_slope(s, m, x);
    if slope(lo) > T::zero() && slope(hi) < T::zero() {
        let root = brent_root(slope, lo, hi, T::zero(), BRENT_MAX_ITER)?;
        iterations += root.iterations;
        x = root.x;
    }
    Ok((x, Diagnostics::new(iterations, points, T::zero())))
}

fn free_optimum<T: Scalar>(
    p: &OuParams<T>,
    s: &OuParams<T>,
    n: usize,
    x_eq: T,
) -> Result<DesignResult<T>> {
    let dim = n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0fd0 ^ n as u64);
    let starts: Vec<Vec<T>> = (0..SEEDS)
        .map(|k| {
            (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    if k == 0 {
                        T::zero()
                    } else {
                        T::of(SEED_SCATTER * z)
                    }
                })
                .collect()
        })
        .collect();
    let opts = SimplexOptions::default();
    let to_spacings = |u: &[T]| -> Vec<T> { u.iter().map(|v| x_eq * v.exp()).collect() };
    let cost = |u: &[T]| {
        let v = -all_params_objective(s, &to_spacings(u)).ln();
        if v.is_finite() {
            v
        } else {
            T::infinity()
        }
    };

    let outcomes: Vec<SeedOutcome<T>> = starts
        .par_iter()
        .map(|start| {
            let mut run = nelder_mead(cost, start, &opts);
            let mut iterations = run.iterations;
            for _ in 0..4 {
                let again = nelder_mead(cost, &run.x, &opts);
                iterations += again.iterations;
                let gain = run.fx - again.fx;
                let settled = gain <= opts.ftol_abs;
                if again.fx <= run.fx {
                    run = again;
                }
                if settled && run.converged {
                    break;
                }
            }
            let spacings: Vec<T> = to_spacings(&run.x).into_iter().map(|x| x / p.lambda()).collect();
            SeedOutcome {
                start: to_spacings(start).into_iter().map(|x| x / p.lambda()).collect(),
                objective: all_params_objective(p, &spacings),
                spread: crate::kernel::design::spread(&spacings),
                spacings,
                iterations,
                converged: run.converged,
            }
        })
        .collect();

    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.converged && o.objective.is_finite())
        .max_by(|a, b| {
            a.1.objective
                .partial_cmp(&b.1.objective)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, _)| i);
    let Some(best) = best else {
        let summary: Vec<String> = outcomes
            .iter()
            .map(|o| format!("objective {} after {} iterations", o.objective, o.iterations))
            .collect();
        return Err(Error::NonConvergence {
            iterations: outcomes.iter().map(|o| o.iterations).sum(),
            reason: format!("no simplex seed met the tolerances: {}", summary.join("; ")),
        });
    };
    let chosen = outcomes[best].clone();
    let mut diag = Diagnostics::new(
        outcomes.iter().map(|o| o.iterations).sum(),
        outcomes.len(),
        T::zero(),
    );
    diag.seeds = outcomes;
    Ok(DesignResult::new(
        Criterion::AllParamsD,
        chosen.spacings,
        chosen.objective,
        diag,
    ))
}

/// Outcome for the damping-only criterion: `phi` is maximal at spacing 0, so the supremum
/// `(n - 1) / lambda^2` is approached by collapsing designs and never attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaNonExistence<T> {
    pub n: usize,
    pub supremum: T,
    pub phi_at_zero: T,
    pub attained_at: Option<T>,
    pub explanation: String,
}

pub fn reject_lambda_design<T: Scalar>(p: &OuParams<T>, n: usize) -> LambdaNonExistence<T> {
    let phi0 = phi_func(p, T::zero());
    LambdaNonExistence {
        n,
        supremum: T::count(n.saturating_sub(1)) * phi0,
        phi_at_zero: phi0,
        attained_at: None,
        explanation: "information on lambda decreases in every spacing; its supremum is reached \
                      only as the design points coalesce, which is not an admissible design"
            .into(),
    }
}

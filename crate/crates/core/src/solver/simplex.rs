//! Nelder-Mead simplex minimisation with dimension-adaptive coefficients.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions<T> {
    /// Spread of function values across the simplex.
    pub ftol_abs: T,
    /// Largest coordinate distance from the best vertex.
    pub xtol: T,
    pub initial_step: T,
    pub max_evaluations: usize,
}

impl<T: Scalar> Default for SimplexOptions<T> {
    fn default() -> Self {
        Self {
            ftol_abs: T::of(1e-12),
            xtol: T::of(1e-9),
            initial_step: T::of(0.05),
            max_evaluations: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult<T> {
    pub x: Vec<T>,
    pub fx: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn nelder_mead<T: Scalar>(
    mut f: impl FnMut(&[T]) -> T,
    x0: &[T],
    opts: &SimplexOptions<T>,
) -> SimplexResult<T> {
    let n = x0.len();
    let nf = T::count(n.max(1));
    let one = T::one();
    // Gao & Han adaptive coefficients
    let alpha = one;
    let gamma = one + T::two() / nf;
    let rho = T::of(0.75) - T::half() / nf;
    let sigma = one - one / nf;

    let mut evaluations = 0;
    let mut eval = |x: &[T], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        let step = if v[i] != T::zero() {
            opts.initial_step * v[i].abs().max(one)
        } else {
            opts.initial_step
        };
        v[i] = v[i] + step;
        simplex.push(v);
    }
    let mut values: Vec<T> = simplex.iter().map(|v| eval(v, &mut evaluations)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while evaluations < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let fspread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        if fspread <= opts.ftol_abs && diameter <= opts.xtol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![T::zero(); n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c = *c + *x / nf;
            }
        }
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr, &mut evaluations);
        if fr < values[0] {
            let xe = along(alpha * gamma);
            let fe = eval(&xe, &mut evaluations);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(alpha * rho);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = simplex[i]
                .iter()
                .zip(&best)
                .map(|(x, b)| *b + sigma * (*x - *b))
                .collect();
            values[i] = eval(&simplex[i], &mut evaluations);
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    SimplexResult {
        x: simplex[best].clone(),
        fx: values[best],
        iterations,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(f, &[-1.2, 1.0], &SimplexOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn separable_quadratic_in_six_dimensions() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.5).powi(2)).sum();
        let r = nelder_mead(f, &[0.0; 6], &SimplexOptions::default());
        assert!(r.converged);
        assert!(r.x.iter().all(|v| (v - 0.5).abs() < 1e-6));
    }

    #[test]
    fn evaluation_budget_is_respected() {
        let opts = SimplexOptions {
            max_evaluations: 50,
            ..SimplexOptions::default()
        };
        let r = nelder_mead(|x: &[f64]| x[0].sin() + x[1].powi(2), &[3.0, 2.0], &opts);
        assert!(!r.converged);
        assert!(r.evaluations <= 55);
    }
}

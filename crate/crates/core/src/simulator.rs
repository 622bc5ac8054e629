//! Exact sampling of the observed process and generalized least squares for the trend.
//!
//! Paths are drawn by the exact transition `Y(t + d) = e^{A d} Y(t) + eps`, with
//! `eps ~ N(0, v (1 - e^{-2 lambda d}) I_2)`, starting from the stationary law `N(0, v I_2)`.
//! Replicate `r` of seed `s` always uses ChaCha8 stream `r` of key `s`, so results do not
//! depend on thread count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::emit::csv_document;
use crate::error::{Error, Result};
use crate::fisher::{trend_info_constant, trend_info_general};
use crate::kernel::{
    covariance_inverse_closed, covariance_matrix, rotation_block, Design, OuParams, TrendParams,
    TrendSpec,
};
use crate::linalg::Cholesky;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePath<T> {
    pub times: Vec<T>,
    /// `(Z1(t_j), Z2(t_j))`.
    pub z: Vec<[T; 2]>,
    pub seed: u64,
    pub replicate: u64,
    pub params: OuParams<T>,
}

fn stream(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

fn normal<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    let z: f64 = StandardNormal.sample(rng);
    T::of(z)
}

/// Zero-mean noise `Y(t_1), ..., Y(t_n)` for one replicate.
pub fn sample_noise<T: Scalar>(p: &OuParams<T>, dz: &Design<T>, seed: u64, replicate: u64) -> Vec<[T; 2]> {
    let mut rng = stream(seed, replicate);
    let sd = p.variance().sqrt();
    let mut y = [sd * normal(&mut rng), sd * normal(&mut rng)];
    let mut out = Vec::with_capacity(dz.len());
    out.push(y);
    for d in dz.spacings() {
        let step = rotation_block(p, *d);
        let innovation = (p.variance() * -(-T::two() * p.lambda() * *d).exp_m1()).sqrt();
        let moved = step.apply(y);
        y = [
            moved[0] + innovation * normal(&mut rng),
            moved[1] + innovation * normal(&mut rng),
        ];
        out.push(y);
    }
    out
}

/// Joint draw through the Cholesky factor of the full covariance; the distributional oracle
/// for [`sample_noise`].
pub fn sample_noise_cholesky<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    seed: u64,
    replicate: u64,
) -> Result<Vec<[T; 2]>> {
    let unit = OuParams::new(p.lambda(), p.omega())?;
    let chol = Cholesky::new(&covariance_matrix(&unit, dz)?)?;
    Ok(sample_with_factor(&chol, p.variance(), seed, replicate))
}

fn sample_with_factor<T: Scalar>(chol: &Cholesky<T>, variance: T, seed: u64, replicate: u64) -> Vec<[T; 2]> {
    let mut rng = stream(seed, replicate);
    let l = chol.factor();
    let dim = l.rows();
    let e: Vec<T> = (0..dim).map(|_| normal(&mut rng)).collect();
    let sd = variance.sqrt();
    let x = l.matvec(&e);
    x.chunks(2).map(|c| [sd * c[0], sd * c[1]]).collect()
}

/// Many Cholesky draws sharing one factorisation.
pub fn sample_noise_cholesky_many<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    reps: usize,
    seed: u64,
) -> Result<Vec<Vec<[T; 2]>>> {
    let unit = OuParams::new(p.lambda(), p.omega())?;
    let chol = Cholesky::new(&covariance_matrix(&unit, dz)?)?;
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|r| sample_with_factor(&chol, p.variance(), seed, r))
        .collect())
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        Err(Error::param("reps", "must be at least 1"))
    } else {
        Ok(())
    }
}

pub fn sample_path<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    trend: &TrendSpec<T>,
    tp: TrendParams<T>,
    seed: u64,
    replicate: u64,
) -> SamplePath<T> {
    let noise = sample_noise(p, dz, seed, replicate);
    let z = dz
        .times()
        .iter()
        .zip(noise)
        .map(|(t, y)| {
            let mu = trend.mean(*t, tp);
            [mu[0] + y[0], mu[1] + y[1]]
        })
        .collect();
    SamplePath {
        times: dz.times().to_vec(),
        z,
        seed,
        replicate,
        params: *p,
    }
}

/// `reps` independent paths; replicate `r` is the same whatever the thread count.
pub fn sample_paths<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    trend: &TrendSpec<T>,
    tp: TrendParams<T>,
    reps: usize,
    seed: u64,
) -> Result<Vec<SamplePath<T>>> {
    check_reps(reps)?;
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|r| sample_path(p, dz, trend, tp, seed, r))
        .collect())
}

/// Reusable GLS estimator for a fixed design: holds `P h_0`, `P h_1` and the inverse of the
/// `2x2` normal matrix, where `P` is the precision and `h_0 = (f1, f2)`, `h_1 = (-f2, f1)`
/// per point.
#[derive(Debug, Clone)]
pub struct GlsEstimator<T> {
    ph: [Vec<[T; 2]>; 2],
    normal_inv: [[T; 2]; 2],
}

fn dot<T: Scalar>(a: &[[T; 2]], b: &[[T; 2]]) -> T {
    a.iter().zip(b).map(|(x, y)| x[0] * y[0] + x[1] * y[1]).sum()
}

impl<T: Scalar> GlsEstimator<T> {
    pub fn new(p: &OuParams<T>, dz: &Design<T>, trend: &TrendSpec<T>) -> Result<Self> {
        // The estimate is invariant to the variance scale.
        let unit = OuParams::new(p.lambda(), p.omega())?;
        let prec = covariance_inverse_closed(&unit, dz)?;
        let f: Vec<(T, T)> = dz.times().iter().map(|t| trend.eval(*t)).collect();
        let h0: Vec<[T; 2]> = f.iter().map(|(a, b)| [*a, *b]).collect();
        let h1: Vec<[T; 2]> = f.iter().map(|(a, b)| [-*b, *a]).collect();
        let ph = [prec.mul_pairs(&h0), prec.mul_pairs(&h1)];
        let a = [
            [dot(&h0, &ph[0]), dot(&h0, &ph[1])],
            [dot(&h1, &ph[0]), dot(&h1, &ph[1])],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if !(det.abs() > T::zero()) || !det.is_finite() {
            return Err(Error::InvalidDesign("trend is not identifiable on this design".into()));
        }
        let normal_inv = [
            [a[1][1] / det, -a[0][1] / det],
            [-a[1][0] / det, a[0][0] / det],
        ];
        Ok(Self { ph, normal_inv })
    }

    pub fn estimate(&self, z: &[[T; 2]]) -> TrendParams<T> {
        let b = [dot(&self.ph[0], z), dot(&self.ph[1], z)];
        let inv = &self.normal_inv;
        TrendParams::new(
            inv[0][0] * b[0] + inv[0][1] * b[1],
            inv[1][0] * b[0] + inv[1][1] * b[1],
        )
    }

    /// Covariance of the estimate under unit variance, `(H P H^T)^{-1}`.
    pub fn covariance(&self) -> [[T; 2]; 2] {
        self.normal_inv
    }
}

/// `(H C^{-1} H^T)^{-1} H C^{-1} z` with the closed-form precision.
pub fn gls_trend_estimate<T: Scalar>(
    path: &SamplePath<T>,
    p: &OuParams<T>,
    trend: &TrendSpec<T>,
) -> Result<TrendParams<T>> {
    let dz = Design::new(path.times.clone())?;
    Ok(GlsEstimator::new(p, &dz, trend)?.estimate(&path.z))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlsSummary<T> {
    pub reps: usize,
    pub seed: u64,
    pub mean: [T; 2],
    pub covariance: [[T; 2]; 2],
    /// `v / Q(n)` on the diagonal, zero off it.
    pub expected_variance: T,
    /// Largest `|empirical / expected - 1|` over the diagonal.
    pub max_relative_deviation: T,
    /// Largest off-diagonal entry relative to the expected variance.
    pub max_relative_cross: T,
}

/// Monte-Carlo spread of the GLS estimate against the inverse trend information.
pub fn monte_carlo_gls<T: Scalar>(
    p: &OuParams<T>,
    dz: &Design<T>,
    trend: &TrendSpec<T>,
    tp: TrendParams<T>,
    reps: usize,
    seed: u64,
) -> Result<GlsSummary<T>> {
    check_reps(reps)?;
    let est = GlsEstimator::new(p, dz, trend)?;
    let unit = OuParams::new(p.lambda(), p.omega())?;
    let q_n = match trend {
        TrendSpec::Constant => trend_info_constant(&unit, dz)?,
        _ => trend_info_general(&unit, dz, trend)?,
    };
    let estimates: Vec<TrendParams<T>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| est.estimate(&sample_path(p, dz, trend, tp, seed, r).z))
        .collect();
    let count = T::count(reps);
    let mean = [
        estimates.iter().map(|e| e.m1).sum::<T>() / count,
        estimates.iter().map(|e| e.m2).sum::<T>() / count,
    ];
    let mut cov = [[T::zero(); 2]; 2];
    for e in &estimates {
        let c = [e.m1 - mean[0], e.m2 - mean[1]];
        for i in 0..2 {
            for j in 0..2 {
                cov[i][j] = cov[i][j] + c[i] * c[j];
            }
        }
    }
    let denom = T::count(reps.max(2) - 1);
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v = *v / denom;
        }
    }
    let expected = p.variance() / q_n;
    Ok(GlsSummary {
        reps,
        seed,
        mean,
        covariance: cov,
        expected_variance: expected,
        max_relative_deviation: (cov[0][0] / expected - T::one())
            .abs()
            .max((cov[1][1] / expected - T::one()).abs()),
        max_relative_cross: cov[0][1].abs() / expected,
    })
}

/// Long-format CSV `t,z1,z2,rep` with `#` metadata lines.
pub fn paths_csv<T: Scalar>(paths: &[SamplePath<T>], metadata: &[(String, String)]) -> String {
    let rows: Vec<Vec<f64>> = paths
        .iter()
        .flat_map(|path| {
            path.times.iter().zip(&path.z).map(move |(t, z)| {
                vec![t.as_f64(), z[0].as_f64(), z[1].as_f64(), path.replicate as f64]
            })
        })
        .collect();
    csv_document(metadata, &["t", "z1", "z2", "rep"], &rows)
}

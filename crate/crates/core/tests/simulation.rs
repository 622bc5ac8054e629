use ou_design::kernel::{covariance_matrix, Design, OuParams, TrendParams, TrendSpec};
use ou_design::simulator::{
    gls_trend_estimate, monte_carlo_gls, sample_noise, sample_noise_cholesky_many, sample_paths,
};
use ou_design::solver::optimal_trend_spacing;

fn second_moments(draws: &[Vec<[f64; 2]>]) -> Vec<Vec<f64>> {
    let dim = 2 * draws[0].len();
    let mut m = vec![vec![0.0; dim]; dim];
    for d in draws {
        let flat: Vec<f64> = d.iter().flat_map(|p| p.iter().copied()).collect();
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] += flat[i] * flat[j];
            }
        }
    }
    let n = draws.len() as f64;
    m.iter_mut().flatten().for_each(|v| *v /= n);
    m
}

#[test]
fn transition_sampler_reproduces_covariance() {
    let p = OuParams::new(0.9, 2.5).unwrap();
    let dz = Design::new(vec![0.0, 0.35, 1.1]).unwrap();
    let reps = 1_000_000u64;
    let draws: Vec<Vec<[f64; 2]>> = (0..reps).map(|r| sample_noise(&p, &dz, 99, r)).collect();
    let emp = second_moments(&draws);
    let exact = covariance_matrix(&p, &dz).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let c = exact[(i, j)];
            // Var(XY) = 1 + c^2 for unit-variance jointly Gaussian X, Y; 21 distinct entries,
            // so the multi-entry 4 sigma bound keeps the family-wise false-positive rate < 1%
            let se = ((1.0 + c * c) / reps as f64).sqrt();
            assert!((emp[i][j] - c).abs() < 4.0 * se, "({i},{j}): {} vs {c}", emp[i][j]);
        }
    }
}

#[test]
fn transition_and_cholesky_samplers_agree() {
    let p = OuParams::new(0.5, 4.0).unwrap();
    let dz = Design::new(vec![0.0, 0.2, 0.9, 2.0]).unwrap();
    let reps = 100_000;
    let seq: Vec<Vec<[f64; 2]>> = (0..reps as u64).map(|r| sample_noise(&p, &dz, 1, r)).collect();
    let joint = sample_noise_cholesky_many(&p, &dz, reps, 2).unwrap();
    let (a, b) = (second_moments(&seq), second_moments(&joint));
    let exact = covariance_matrix(&p, &dz).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let c = exact[(i, j)];
            let se = (2.0 * (1.0 + c * c) / reps as f64).sqrt();
            assert!((a[i][j] - b[i][j]).abs() < 4.0 * se, "({i},{j})");
        }
    }
}

#[test]
fn path_means_follow_the_trend() {
    let p = OuParams::with_variance(1.2, -1.5, 2.0).unwrap();
    let dz = Design::new(vec![0.1, 0.6, 1.4, 1.5]).unwrap();
    let trend = TrendSpec::Chandler;
    let tp = TrendParams::new(0.8, -0.3);
    let reps = 50_000;
    let paths = sample_paths(&p, &dz, &trend, tp, reps, 17).unwrap();
    let se = (2.0f64 / reps as f64).sqrt();
    for (j, t) in dz.times().iter().enumerate() {
        let want = trend.mean(*t, tp);
        for c in 0..2 {
            let mean = paths.iter().map(|x| x.z[j][c]).sum::<f64>() / reps as f64;
            assert!((mean - want[c]).abs() < 3.0 * se, "t={t} c={c}");
        }
    }
}

#[test]
fn gls_shift_equivariance() {
    let p = OuParams::new(1.0, 1.0).unwrap();
    let dz = Design::equidistant(5, 1.3f64).unwrap();
    let base = monte_carlo_gls(&p, &dz, &TrendSpec::Constant, TrendParams::new(0.0, 0.0), 10_000, 3).unwrap();
    let shifted = monte_carlo_gls(&p, &dz, &TrendSpec::Constant, TrendParams::new(0.75, 0.0), 10_000, 3).unwrap();
    // same streams: the shift carries through exactly up to rounding
    assert!((shifted.mean[0] - base.mean[0] - 0.75).abs() < 1e-12);
    let se = (base.expected_variance / 10_000.0).sqrt();
    assert!((shifted.mean[0] - 0.75).abs() < 3.0 * se);
    assert!(shifted.mean[1].abs() < 3.0 * se);
}

#[test]
fn gls_single_path_recovers_trend_on_average() {
    let p = OuParams::new(0.4, 2.0).unwrap();
    let dz = Design::new(vec![0.0, 0.5, 1.5, 3.0, 3.2, 5.0]).unwrap();
    let trend = TrendSpec::Chandler;
    let tp = TrendParams::new(-1.0, 2.0);
    let paths = sample_paths(&p, &dz, &trend, tp, 20_000, 5).unwrap();
    let est: Vec<TrendParams<f64>> = paths.iter().map(|x| gls_trend_estimate(x, &p, &trend).unwrap()).collect();
    let m1 = est.iter().map(|e| e.m1).sum::<f64>() / est.len() as f64;
    let m2 = est.iter().map(|e| e.m2).sum::<f64>() / est.len() as f64;
    let summary = monte_carlo_gls(&p, &dz, &trend, tp, 20_000, 5).unwrap();
    let se = (summary.expected_variance / 20_000.0).sqrt();
    assert!((m1 + 1.0).abs() < 3.0 * se && (m2 - 2.0).abs() < 3.0 * se);
    assert!(summary.max_relative_deviation < 0.05);
}

#[test]
fn optimal_design_beats_perturbed_designs() {
    let p = OuParams::new(1.0, 1.0).unwrap();
    let d = optimal_trend_spacing(&p).unwrap().spacings[0];
    let var = |spacing: f64| {
        let dz = Design::equidistant(5, spacing).unwrap();
        let s = monte_carlo_gls(&p, &dz, &TrendSpec::Constant, TrendParams::default(), 100_000, 21).unwrap();
        s.covariance[0][0] + s.covariance[1][1]
    };
    let best = var(d);
    assert!(best < var(0.7 * d));
    assert!(best < var(1.3 * d));
}

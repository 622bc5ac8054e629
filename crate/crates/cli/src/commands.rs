use std::fs;

use ou_design::efficiency::{efficiency_surface, Axis};
use ou_design::fisher::{all_params_objective, fisher_blocks, oracle_cov_fim, oracle_trend_fim};
use ou_design::kernel::info::{g_func, r_func};
use ou_design::kernel::{Design, OuParams, TrendParams, TrendSpec};
use ou_design::simulator::{monte_carlo_gls, sample_paths};
use ou_design::solver::{
    optimal_cov_joint_spacing, optimal_omega_spacing, optimal_trend_spacing, optimize_all_params,
    reject_lambda_design, DesignResult, Mode,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::args::{
    Common, CriterionName, DesignInput, FimArgs, ModeName, OptimizeArgs, SimulateArgs, SurfaceArgs,
    SurfaceKind, TrendName,
};
use crate::error::CliError;
use crate::output::{num, rounded, Emission};

const VERIFY_RTOL: f64 = 1e-8;
const MAX_AXIS_STEPS: usize = 4000;
const MAX_CELLS: usize = 4_000_000;
const MAX_PATH_ROWS: usize = 20_000_000;
const MAX_REPS: usize = 10_000_000;

/// Emission plus an optional failure to report after it has been written.
pub struct Outcome {
    pub emission: Emission,
    pub after: Option<CliError>,
}

impl From<Emission> for Outcome {
    fn from(emission: Emission) -> Self {
        Self { emission, after: None }
    }
}

fn json<S: Serialize>(v: &S) -> Value {
    rounded(serde_json::to_value(v).unwrap_or(Value::Null))
}

pub struct Context<'a> {
    pub common: &'a Common,
    pub invocation: String,
}

impl Context<'_> {
    fn metadata(&self, variance: f64, seed: Option<u64>) -> Vec<(String, Value)> {
        vec![
            ("version".into(), Value::from(env!("CARGO_PKG_VERSION"))),
            ("command".into(), Value::from(self.invocation.clone())),
            ("lambda".into(), num(self.common.lambda)),
            ("omega".into(), num(self.common.omega)),
            ("variance".into(), num(variance)),
            ("seed".into(), seed.map(Value::from).unwrap_or(Value::Null)),
        ]
    }

    fn params(&self) -> Result<OuParams<f64>, CliError> {
        Ok(OuParams::new(self.common.lambda, self.common.omega)?)
    }
}

fn trend_spec(name: TrendName) -> TrendSpec<f64> {
    match name {
        TrendName::Constant => TrendSpec::Constant,
        TrendName::Chandler => TrendSpec::Chandler,
    }
}

fn read_times_file(path: &std::path::Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut times = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cell = line.split(',').next().unwrap_or("").trim();
        match cell.parse::<f64>() {
            Ok(t) => times.push(t),
            Err(_) if times.is_empty() => continue,
            Err(_) => {
                return Err(CliError::validation(format!(
                    "{}:{}: not a number: {cell:?}",
                    path.display(),
                    k + 1
                )))
            }
        }
    }
    Ok(times)
}

fn read_design(input: &DesignInput) -> Result<Option<Design<f64>>, CliError> {
    let times = match (&input.times, &input.times_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => read_times_file(path)?,
        (None, None) => return Ok(None),
    };
    Ok(Some(Design::new(times)?))
}

fn rel_delta(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn fim(ctx: &Context, args: &FimArgs) -> Result<Outcome, CliError> {
    let p = ctx.params()?;
    let dz = read_design(&args.design)?
        .ok_or_else(|| CliError::validation("a design is required: --times or --times-file"))?;
    let trend = trend_spec(args.trend);
    let b = fisher_blocks(&p, &dz, &trend)?;
    let det = b.determinant();
    let mut fields = vec![
        ("n".to_string(), Value::from(dz.len())),
        ("trend".into(), Value::from(trend.name())),
        ("times".into(), dz.times().iter().map(|t| num(*t)).collect()),
        ("q_n".into(), num(b.q_n)),
        ("i_lambda".into(), num(b.i_lambda)),
        ("i_omega".into(), num(b.i_omega)),
        ("cross_term".into(), num(b.i_lambda_omega)),
        ("determinant".into(), num(det)),
        ("omega_zero".into(), Value::from(b.omega_zero)),
    ];
    let mut header = vec!["q_n", "i_lambda", "i_omega", "cross_term", "determinant"];
    let mut row = vec![b.q_n, b.i_lambda, b.i_omega, b.i_lambda_omega, det];
    let mut after = None;
    if args.verify {
        let t = oracle_trend_fim(&p, &dz, &trend)?;
        let c = oracle_cov_fim(&p, &dz)?;
        let trend_delta = rel_delta(t[0][0], b.q_n)
            .max(rel_delta(t[1][1], b.q_n))
            .max(t[0][1].abs().max(t[1][0].abs()) / b.q_n);
        let deltas = [
            ("oracle_delta_trend", trend_delta),
            ("oracle_delta_lambda", rel_delta(c[0][0], b.i_lambda)),
            ("oracle_delta_omega", rel_delta(c[1][1], b.i_omega)),
            ("oracle_delta_cross", c[0][1].abs().max(c[1][0].abs())),
        ];
        for (k, v) in deltas {
            fields.push((k.into(), num(v)));
            header.push(k);
            row.push(v);
        }
        let worst = deltas.iter().map(|x| x.1).fold(0.0, f64::max);
        if !(worst <= VERIFY_RTOL) {
            after = Some(CliError::verification(format!(
                "closed form and oracle differ by {worst:e} (tolerance {VERIFY_RTOL:e})"
            )));
        }
    }
    Ok(Outcome {
        emission: Emission {
            metadata: ctx.metadata(1.0, None),
            fields,
            header: header.into_iter().map(String::from).collect(),
            rows: vec![row],
        },
        after,
    })
}

fn design_emission(ctx: &Context, n: usize, r: &DesignResult<f64>) -> Emission {
    let mut fields = vec![("n".to_string(), Value::from(n))];
    if let Value::Object(map) = json(r) {
        fields.extend(map);
    }
    Emission {
        metadata: ctx.metadata(1.0, None),
        fields,
        header: vec!["j".into(), "spacing".into()],
        rows: r.spacings.iter().enumerate().map(|(j, d)| vec![(j + 1) as f64, *d]).collect(),
    }
}

pub fn optimize(ctx: &Context, args: &OptimizeArgs) -> Result<Outcome, CliError> {
    let p = ctx.params()?;
    if args.n < 2 {
        return Err(CliError::validation(format!("--n must be at least 2, got {}", args.n)));
    }
    let result = match args.criterion {
        CriterionName::Trend => optimal_trend_spacing(&p)?,
        CriterionName::Omega => optimal_omega_spacing(&p)?,
        CriterionName::CovJoint => optimal_cov_joint_spacing(&p)?,
        CriterionName::All => {
            let mode = match args.mode {
                ModeName::Equidistant => Mode::Equidistant,
                ModeName::Free => Mode::Free,
            };
            optimize_all_params(&p, args.n, mode)?
        }
        CriterionName::Lambda => {
            let r = reject_lambda_design(&p, args.n);
            let mut fields = vec![("criterion".to_string(), Value::from("LambdaD"))];
            if let Value::Object(map) = json(&r) {
                fields.extend(map);
            }
            return Ok(Outcome {
                emission: Emission {
                    metadata: ctx.metadata(1.0, None),
                    fields,
                    header: Vec::new(),
                    rows: Vec::new(),
                },
                after: Some(CliError::nonexistence(
                    "no D-optimal design exists for the damping parameter alone: its information \
                     is largest as the spacings shrink to zero",
                )),
            });
        }
    };
    Ok(design_emission(ctx, args.n, &result).into())
}

fn linspace(name: &str, lo: f64, hi: f64, steps: usize, positive: bool) -> Result<Vec<f64>, CliError> {
    if steps == 0 || steps > MAX_AXIS_STEPS {
        return Err(CliError::validation(format!("{name} steps must be in 1..={MAX_AXIS_STEPS}, got {steps}")));
    }
    if !lo.is_finite() || !hi.is_finite() || (positive && !(lo > 0.0)) {
        return Err(CliError::validation(format!("{name} range must be finite{}", if positive { " and positive" } else { "" })));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    if !(hi > lo) {
        return Err(CliError::validation(format!("{name} max must exceed min")));
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn check_cells(cells: usize) -> Result<(), CliError> {
    if cells > MAX_CELLS {
        Err(CliError::validation(format!("grid has {cells} cells, cap is {MAX_CELLS}")))
    } else {
        Ok(())
    }
}

fn pair_grid(d: &[f64], f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<Vec<f64>> {
    d.par_iter()
        .flat_map_iter(|a| d.iter().map(move |b| (*a, *b)).collect::<Vec<_>>())
        .map(|(a, b)| vec![a, b, f(a, b)])
        .collect()
}

pub fn surface(ctx: &Context, args: &SurfaceArgs) -> Result<Outcome, CliError> {
    let d = linspace("d", args.d_min, args.d_max, args.d_steps, true)?;
    let n_first = *args.n.first().ok_or_else(|| CliError::validation("--n needs a value"))?;
    if args.n.iter().any(|n| *n < 2) {
        return Err(CliError::validation("every --n must be at least 2"));
    }
    let p = ctx.params()?;
    let (header, rows): (Vec<&str>, Vec<Vec<f64>>) = match args.kind {
        SurfaceKind::Trend2 => {
            check_cells(d.len() * d.len())?;
            (vec!["d1", "d2", "q_n"], pair_grid(&d, |a, b| 1.0 + g_func(&p, a) + g_func(&p, b)))
        }
        SurfaceKind::All1 => (
            vec!["d", "determinant"],
            d.iter().map(|x| vec![*x, all_params_objective(&p, &[*x])]).collect(),
        ),
        SurfaceKind::All2 => {
            check_cells(d.len() * d.len())?;
            (vec!["d1", "d2", "determinant"], pair_grid(&d, |a, b| all_params_objective(&p, &[a, b])))
        }
        SurfaceKind::DstarOmega => {
            let w = linspace("omega", args.p_min, args.p_max, args.p_steps, false)?;
            let rows = w
                .par_iter()
                .map(|w| {
                    let q = OuParams::new(p.lambda(), *w)?;
                    let r = optimal_trend_spacing(&q)?;
                    let x = r.spacings[0];
                    Ok(vec![*w, x, r.objective, r_func(&q, x)])
                })
                .collect::<Result<Vec<_>, ou_design::Error>>()?;
            (vec!["omega", "d_star", "g_max", "residual"], rows)
        }
        SurfaceKind::DallOmega => {
            let w = linspace("omega", args.p_min, args.p_max, args.p_steps, false)?;
            check_cells(w.len() * args.n.len())?;
            let cells: Vec<(f64, usize)> = w.iter().flat_map(|w| args.n.iter().map(move |n| (*w, *n))).collect();
            let rows = cells
                .par_iter()
                .map(|(w, n)| {
                    let q = OuParams::new(p.lambda(), *w)?;
                    let r = optimize_all_params(&q, *n, Mode::Equidistant)?;
                    Ok(vec![*w, *n as f64, r.spacings[0], r.objective])
                })
                .collect::<Result<Vec<_>, ou_design::Error>>()?;
            (vec!["omega", "n", "d", "determinant"], rows)
        }
        SurfaceKind::EfficiencyLambda | SurfaceKind::EfficiencyOmega => {
            let axis = if args.kind == SurfaceKind::EfficiencyLambda { Axis::Lambda } else { Axis::Omega };
            let v = linspace(axis.name(), args.p_min, args.p_max, args.p_steps, axis == Axis::Lambda)?;
            check_cells(d.len() * v.len())?;
            let grid = efficiency_surface(axis, &d, &v, n_first)?;
            let rows = grid
                .d
                .iter()
                .zip(&grid.values)
                .flat_map(|(x, row)| v.iter().zip(row).map(move |(a, r)| vec![*x, *a, *r]))
                .collect();
            (vec!["d", axis.name(), "R"], rows)
        }
    };
    let kind = format!("{:?}", args.kind);
    Ok(Emission {
        metadata: ctx.metadata(1.0, None),
        fields: vec![
            ("kind".into(), Value::from(kind)),
            ("n".into(), args.n.iter().map(|n| Value::from(*n)).collect()),
        ],
        header: header.into_iter().map(String::from).collect(),
        rows,
    }
    .into())
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<Outcome, CliError> {
    if args.reps == 0 || args.reps > MAX_REPS {
        return Err(CliError::validation(format!("--reps must be in 1..={MAX_REPS}, got {}", args.reps)));
    }
    let p = OuParams::with_variance(ctx.common.lambda, ctx.common.omega, args.variance)?;
    let dz = match read_design(&args.design)? {
        Some(dz) => dz,
        None => {
            let spacing = match args.spacing {
                Some(s) => s,
                None => optimal_trend_spacing(&OuParams::new(p.lambda(), p.omega())?)?.spacings[0],
            };
            Design::equidistant(args.n, spacing)?
        }
    };
    let trend = trend_spec(args.trend);
    let tp = TrendParams::new(args.m1, args.m2);
    let mut metadata = ctx.metadata(args.variance, Some(args.seed));
    metadata.push(("trend".into(), Value::from(trend.name())));
    metadata.push(("m1".into(), num(args.m1)));
    metadata.push(("m2".into(), num(args.m2)));
    metadata.push(("reps".into(), Value::from(args.reps)));
    if args.validate {
        let s = monte_carlo_gls(&p, &dz, &trend, tp, args.reps, args.seed)?;
        let mut fields = vec![("times".to_string(), dz.times().iter().map(|t| num(*t)).collect())];
        if let Value::Object(map) = json(&s) {
            fields.extend(map.into_iter().filter(|(k, _)| k != "reps" && k != "seed"));
        }
        let c = s.covariance;
        return Ok(Emission {
            metadata,
            fields,
            header: vec!["mean_m1", "mean_m2", "var_m1", "cov_m1_m2", "var_m2", "expected_variance"]
                .into_iter()
                .map(String::from)
                .collect(),
            rows: vec![vec![s.mean[0], s.mean[1], c[0][0], c[0][1], c[1][1], s.expected_variance]],
        }
        .into());
    }
    if args.reps.saturating_mul(dz.len()) > MAX_PATH_ROWS {
        return Err(CliError::validation(format!("reps x points exceeds the {MAX_PATH_ROWS}-row cap")));
    }
    let paths = sample_paths(&p, &dz, &trend, tp, args.reps, args.seed)?;
    let rows = paths
        .iter()
        .flat_map(|path| {
            path.times
                .iter()
                .zip(&path.z)
                .map(move |(t, z)| vec![*t, z[0], z[1], path.replicate as f64])
        })
        .collect();
    Ok(Emission {
        metadata,
        fields: Vec::new(),
        header: vec!["t".into(), "z1".into(), "z2".into(), "rep".into()],
        rows,
    }
    .into())
}

//! The four subcommands, producing their output as strings.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{Map, Number, Value};
use slabtherm::math::axial_medium;
use slabtherm::{
    effective_occupation, evolve, g_halfspace, thickness_criterion, RateBundle,
    Relaxation, Thickness, ThicknessCriterion, TwoLevelState,
};

use crate::config::{with_axes, RawConfig, RunConfig};
use crate::CliError;

/// Everything reported for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub bundle: RateBundle,
    pub g_halfspace: f64,
    /// `|g - g_halfspace| / g_halfspace`; `None` when `g_halfspace` is zero.
    pub g_rel_dev: Option<f64>,
    /// `None` for the half-space.
    pub criterion: Option<ThicknessCriterion>,
}

pub fn evaluate(config: &RunConfig) -> Result<PointResult, CliError> {
    let atom = config.atom()?;
    let geom = config.geometry()?;
    let bundle = effective_occupation(&atom, &geom, config.eps, config.baths, &config.quadrature)?;
    let (g_half, criterion) = match config.thickness {
        Thickness::HalfSpace => (bundle.g, None),
        Thickness::Finite(d) => {
            let half = g_halfspace(config.z_a, atom.omega0(), config.eps, &config.quadrature)?
                .require("g_halfspace")?
                .value;
            (half, Some(thickness_criterion(config.eps, d, atom.lambda0())?))
        }
    };
    let g_rel_dev = (g_half > 0.0).then(|| (bundle.g - g_half).abs() / g_half);
    Ok(PointResult {
        bundle,
        g_halfspace: g_half,
        g_rel_dev,
        criterion,
    })
}

fn json_number(v: f64) -> Value {
    Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn json_option(v: Option<f64>) -> Value {
    v.map_or(Value::Null, json_number)
}

/// JSON object with the input keys echoed (so it can be fed back as a
/// config) followed by the results.
pub fn point_json(raw: &RawConfig) -> Result<String, CliError> {
    let config = RunConfig::from_raw(raw)?;
    let result = evaluate(&config)?;
    let mut out = Map::new();
    for (key, value) in raw.entries() {
        if key.starts_with("sweep") || key.starts_with("evolve") || key.starts_with("probe") {
            continue;
        }
        let v = match value.parse::<f64>() {
            Ok(x) if x.is_finite() => json_number(x),
            _ => Value::String(value.to_string()),
        };
        out.insert(key.to_string(), v);
    }
    let b = &result.bundle;
    let fields: [(&str, Value); 20] = [
        ("status", Value::String("ok".into())),
        ("alpha", json_option(b.alpha)),
        ("g", json_number(b.g)),
        ("g_hat", json_number(b.g_hat)),
        ("g_halfspace", json_number(result.g_halfspace)),
        ("g_rel_dev", json_option(result.g_rel_dev)),
        ("slab_weight", json_number(b.slab_weight)),
        ("n_env", json_number(b.n_env)),
        ("n_slab", json_number(b.n_slab)),
        ("n_eff", json_number(b.n_eff)),
        ("gamma0", json_number(b.gamma0)),
        ("gamma_down", json_option(b.gamma_down)),
        ("gamma_up", json_option(b.gamma_up)),
        ("t_eff", json_number(b.t_eff)),
        ("lhs_exact", json_option(result.criterion.map(|c| c.lhs_exact))),
        ("lhs_smallloss", json_option(result.criterion.and_then(|c| c.lhs_smallloss))),
        ("g_error", json_number(b.g_quadrature.error_estimate)),
        ("g_evaluations", Value::from(b.g_quadrature.evaluations)),
        ("alpha_error", json_option(b.alpha_quadrature.map(|q| q.error_estimate))),
        ("alpha_evaluations", b.alpha_quadrature.map_or(Value::Null, |q| Value::from(q.evaluations))),
    ];
    for (k, v) in fields {
        out.insert(k.to_string(), v);
    }
    Ok(serde_json::to_string_pretty(&Value::Object(out)).expect("serializable") + "\n")
}

pub fn criterion_json(config: &RunConfig) -> Result<String, CliError> {
    let Thickness::Finite(d) = config.thickness else {
        return Err(CliError::Config("the criterion needs a finite `geometry.d`".into()));
    };
    let lambda0 = config.omega0()?.reduced_wavelength();
    let c = thickness_criterion(config.eps, d, lambda0)?;
    let value = serde_json::json!({
        "lambda0": lambda0,
        "d": d,
        "lhs_exact": json_number(c.lhs_exact),
        "lhs_smallloss": json_option(c.lhs_smallloss),
        "satisfied_exact": c.satisfied_exact,
        "satisfied_smallloss": c.satisfied_smallloss,
        "d_min_exact": json_number(c.d_min_exact),
        "d_min_smallloss": json_option(c.d_min_smallloss),
    });
    Ok(serde_json::to_string_pretty(&value).expect("serializable") + "\n")
}

/// 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Full pipeline per point.
    Full,
    /// Medium axial wavevector at `probe.k2 = (c k / omega)^2`.
    Branch,
}

pub const FULL_COLUMNS: &[&str] = &[
    "status",
    "omega0",
    "lambda0",
    "dipole_sq",
    "gamma0",
    "eps_re",
    "eps_im",
    "d",
    "z_a",
    "t_env",
    "t_slab",
    "alpha",
    "g",
    "g_hat",
    "g_halfspace",
    "g_rel_dev",
    "slab_weight",
    "n_env",
    "n_slab",
    "n_eff",
    "gamma_down",
    "gamma_up",
    "t_eff",
    "lhs_exact",
    "lhs_smallloss",
    "g_error",
    "g_evaluations",
    "alpha_error",
    "alpha_evaluations",
];

pub const BRANCH_COLUMNS: &[&str] = &[
    "status", "eps_re", "eps_im", "k2", "re_b1", "im_b1", "re_b1_sq", "im_b1_sq",
];

pub struct SweepOutput {
    pub csv: String,
    pub failed: usize,
}

fn status_of(e: &CliError) -> &'static str {
    match e {
        CliError::Config(_) => "invalid_input",
        CliError::Compute(err) => match err {
            slabtherm::Error::InvalidInput { .. } => "invalid_input",
            slabtherm::Error::DegenerateInterface { .. } => "degenerate_interface",
            slabtherm::Error::GuidedModePole { .. } => "guided_mode_pole",
            slabtherm::Error::LosslessSlab => "lossless_slab",
            slabtherm::Error::Quadrature { .. } => "quadrature_failed",
            slabtherm::Error::SandwichViolation { .. } => "sandwich_violation",
        },
        _ => "failed",
    }
}

fn full_row(config: Result<RunConfig, CliError>) -> (bool, String) {
    let mut cells = vec![String::new(); FULL_COLUMNS.len()];
    let outcome = config.and_then(|c| {
        let atom = c.atom()?;
        cells[1] = fmt_num(atom.omega0().omega());
        cells[2] = fmt_num(atom.lambda0());
        cells[3] = fmt_num(atom.dipole_sq());
        cells[4] = fmt_num(atom.gamma0());
        cells[5] = fmt_num(c.eps.re());
        cells[6] = fmt_num(c.eps.im());
        cells[7] = match c.thickness {
            Thickness::Finite(d) => fmt_num(d),
            Thickness::HalfSpace => "inf".into(),
        };
        cells[8] = fmt_num(c.z_a);
        cells[9] = fmt_num(c.baths.t_env());
        cells[10] = fmt_num(c.baths.t_slab());
        evaluate(&c)
    });
    match outcome {
        Ok(r) => {
            let b = &r.bundle;
            cells[0] = "ok".into();
            let values = [
                fmt_opt(b.alpha),
                fmt_num(b.g),
                fmt_num(b.g_hat),
                fmt_num(r.g_halfspace),
                fmt_opt(r.g_rel_dev),
                fmt_num(b.slab_weight),
                fmt_num(b.n_env),
                fmt_num(b.n_slab),
                fmt_num(b.n_eff),
                fmt_opt(b.gamma_down),
                fmt_opt(b.gamma_up),
                fmt_num(b.t_eff),
                fmt_opt(r.criterion.map(|c| c.lhs_exact)),
                fmt_opt(r.criterion.and_then(|c| c.lhs_smallloss)),
                fmt_num(b.g_quadrature.error_estimate),
                b.g_quadrature.evaluations.to_string(),
                fmt_opt(b.alpha_quadrature.map(|q| q.error_estimate)),
                b.alpha_quadrature.map(|q| q.evaluations.to_string()).unwrap_or_default(),
            ];
            for (cell, v) in cells[11..].iter_mut().zip(values) {
                *cell = v;
            }
            (true, cells.join(","))
        }
        Err(e) => {
            cells[0] = status_of(&e).into();
            (false, cells.join(","))
        }
    }
}

fn branch_row(config: Result<RunConfig, CliError>) -> (bool, String) {
    let mut cells = vec![String::new(); BRANCH_COLUMNS.len()];
    let outcome = config.and_then(|c| {
        cells[1] = fmt_num(c.eps.re());
        cells[2] = fmt_num(c.eps.im());
        let k2 = c
            .probe_k2
            .ok_or_else(|| CliError::Config("branch sweep needs `probe.k2`".into()))?;
        cells[3] = fmt_num(k2);
        if !(k2 >= 0.0 && k2.is_finite()) {
            return Err(CliError::Config("`probe.k2` must be finite and >= 0".into()));
        }
        let omega = c.omega0()?;
        let k0 = omega.wavenumber();
        let b1: Complex64 = axial_medium(k2.sqrt() * k0, omega, c.eps)? / k0;
        Ok(b1)
    });
    match outcome {
        Ok(b1) => {
            cells[0] = "ok".into();
            cells[4] = fmt_num(b1.re);
            cells[5] = fmt_num(b1.im);
            cells[6] = fmt_num(b1.re * b1.re);
            cells[7] = fmt_num(b1.im * b1.im);
            (true, cells.join(","))
        }
        Err(e) => {
            cells[0] = status_of(&e).into();
            (false, cells.join(","))
        }
    }
}

/// Runs the configured sweep (outer axis slow). Rows are computed on `jobs`
/// workers and emitted in input order.
pub fn sweep(raw: &RawConfig, kind: SweepKind, jobs: usize) -> Result<SweepOutput, CliError> {
    let base = RunConfig::from_raw(raw)?;
    if base.sweeps.is_empty() {
        return Err(CliError::Config("sweep needs `sweep.axis`".into()));
    }
    let outer = &base.sweeps[0];
    let mut points: Vec<Vec<(&str, f64)>> = Vec::new();
    for &v in &outer.values {
        match base.sweeps.get(1) {
            Some(inner) => {
                for &w in &inner.values {
                    points.push(vec![(outer.name.as_str(), v), (inner.name.as_str(), w)]);
                }
            }
            None => points.push(vec![(outer.name.as_str(), v)]),
        }
    }
    let row = |assign: &Vec<(&str, f64)>| {
        let config = with_axes(raw, assign);
        match kind {
            SweepKind::Full => full_row(config),
            SweepKind::Branch => branch_row(config),
        }
    };
    let rows: Vec<(bool, String)> = if jobs <= 1 {
        points.iter().map(row).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?
            .install(|| points.par_iter().map(row).collect())
    };
    let header = match kind {
        SweepKind::Full => FULL_COLUMNS,
        SweepKind::Branch => BRANCH_COLUMNS,
    };
    let mut csv = header.join(",");
    csv.push('\n');
    let mut failed = 0;
    for (ok, line) in rows {
        failed += usize::from(!ok);
        csv.push_str(&line);
        csv.push('\n');
    }
    Ok(SweepOutput { csv, failed })
}

pub const EVOLVE_COLUMNS: &[&str] = &["t", "rho11", "rho22", "rho12_re", "rho12_im", "rho12_abs"];

pub fn evolve_csv(config: &RunConfig) -> Result<String, CliError> {
    let atom = config.atom()?;
    let result = evaluate(config)?;
    let rates = Relaxation::from_bundle(&result.bundle, atom.omega0()).map_err(|_| {
        CliError::Config("a lossless finite slab has no well-defined decay rates".into())
    })?;
    let spec = config.evolve;
    let t_max = match (spec.t_max, spec.lifetimes) {
        (Some(t), None) => t,
        (None, Some(n)) => n / rates.total(),
        (None, None) => return Err(CliError::Config("evolve needs `evolve.t_max` or `evolve.lifetimes`".into())),
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give only one of `evolve.t_max`, `evolve.lifetimes`".into()))
        }
    };
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Config("evolve needs t_max > 0".into()));
    }
    if spec.samples < 2 {
        return Err(CliError::Config("evolve needs at least 2 samples".into()));
    }
    let start = TwoLevelState::new(
        1.0 - spec.rho22,
        spec.rho22,
        Complex64::new(spec.rho12_re, spec.rho12_im),
    )?;
    let mut csv = EVOLVE_COLUMNS.join(",");
    csv.push('\n');
    let last = (spec.samples - 1) as f64;
    for i in 0..spec.samples {
        let t = if i == spec.samples - 1 {
            t_max
        } else {
            t_max * i as f64 / last
        };
        let s = evolve(&start, &rates, t)?;
        let row = [
            fmt_num(t),
            fmt_num(s.rho11()),
            fmt_num(s.rho22()),
            fmt_num(s.rho12().re),
            fmt_num(s.rho12().im),
            fmt_num(s.rho12().norm()),
        ];
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use sobolev_core::numcore::{format_rational, parse_rational, Field, Mode, Scalar};
use sobolev_core::oracle::{
    galerkin_lambda, max_principle_check, sign_iteration, GalerkinConfig, MaxPrincipleMethod, OracleError,
    OracleReport, SignIterationConfig,
};
use sobolev_core::solver::{solve, ProblemSpec, Solution};
use sobolev_core::weight::{parse_weight, Weight};

use crate::config::{Format, RunConfig};
use crate::CliError;

/// Relative Galerkin gap accepted for polynomial weights (the span is exact).
pub const GALERKIN_POLY_RTOL: f64 = 1e-8;
/// Relative Galerkin gap accepted for other weights, where the bound
/// converges algebraically in N.
pub const GALERKIN_LOOSE_RTOL: f64 = 0.10;
/// Relative error accepted from the second-order finite-difference iteration.
pub const SIGN_ITERATION_RTOL: f64 = 0.05;
pub const MAX_SWEEP_ROWS: usize = 10_000;

pub enum Document {
    Json(Value),
    Csv(String),
}

/// A rendered document plus the process exit code that goes with it.
pub struct Outcome {
    pub document: Document,
    pub exit_code: u8,
}

impl Outcome {
    fn ok(document: Document) -> Self {
        Outcome { document, exit_code: 0 }
    }
}

fn finite(x: f64, what: &str) -> Result<Value, CliError> {
    if x.is_finite() {
        Ok(json!(x))
    } else {
        Err(CliError::Solver(format!("{what} is not finite ({x}); JSON cannot represent it")))
    }
}

/// 17 significant digits.
fn fmt_f64(x: f64) -> String {
    // Adding zero maps -0.0 to 0.0.
    format!("{:.16e}", x + 0.0)
}

fn problem(cfg: &RunConfig) -> Result<ProblemSpec, CliError> {
    let weight = parse_weight(&cfg.weight_spec).map_err(|e| CliError::Input(e.to_string()))?;
    ProblemSpec::new(cfg.k, weight, cfg.mode).map_err(|e| CliError::Input(e.to_string()))
}

fn run_solver(spec: &ProblemSpec) -> Result<Solution, CliError> {
    solve(spec).map_err(CliError::from_solve)
}

fn csv_document(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Document, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Solver(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Solver(format!("csv: {e}")))?;
    Ok(Document::Csv(String::from_utf8(bytes).expect("csv output is UTF-8")))
}

fn notes_for(weight: &Weight) -> Vec<Value> {
    if weight.outside_theorem_scope() {
        vec![json!("outside_theorem_scope")]
    } else {
        Vec::new()
    }
}

fn diagnostics_json(sol: &Solution) -> Result<Value, CliError> {
    let d = sol.diagnostics();
    Ok(json!({
        "boundary_residual": finite(d.boundary_residual, "boundary residual")?,
        "normalization_residual": finite(d.normalization_residual, "normalization residual")?,
        "min_interior": finite(d.min_interior, "minimum interior value")?,
        "sturm_positive": d.sturm_positive,
        "dual_mu_residual": finite(d.dual_mu_residual, "dual mu residual")?,
        "closed_form_checked": sol.closed_form_checked(),
    }))
}

pub fn constant(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = problem(cfg)?;
    let sol = run_solver(&spec)?;
    let mu = sol.mu();
    match cfg.output {
        Format::Json => {
            let doc = json!({
                "k": spec.k,
                "weight": spec.weight.to_string(),
                "mode": spec.mode.to_string(),
                "mu": mu.to_string(),
                "mu_float": finite(mu.to_f64(), "mu")?,
                "lambda": finite(sol.lambda(), "lambda")?,
                "method": sol.method().as_str(),
                "outside_theorem_scope": spec.weight.outside_theorem_scope(),
                "notes": notes_for(&spec.weight),
                "diagnostics": diagnostics_json(&sol)?,
            });
            Ok(Outcome::ok(Document::Json(doc)))
        }
        Format::Csv => {
            let row = vec![
                spec.k.to_string(),
                spec.weight.to_string(),
                mu.to_string(),
                fmt_f64(mu.to_f64()),
                fmt_f64(sol.lambda()),
                sol.method().as_str().to_string(),
            ];
            Ok(Outcome::ok(csv_document(&["k", "weight", "mu", "mu_float", "lambda", "method"], [row])?))
        }
    }
}

pub fn minimizer(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = problem(cfg)?;
    let sol = run_solver(&spec)?;
    let rows = sol.samples(cfg.samples);
    match cfg.output {
        Format::Csv => {
            let rows = rows.into_iter().map(|(x, u, uk)| vec![fmt_f64(x), fmt_f64(u), fmt_f64(uk)]);
            Ok(Outcome::ok(csv_document(&["x", "u", "u_k"], rows)?))
        }
        Format::Json => {
            let points = rows
                .into_iter()
                .map(|(x, u, uk)| {
                    Ok(json!({
                        "x": finite(x, "x")?,
                        "u": finite(u, "u")?,
                        "u_k": finite(uk, "u_k")?,
                    }))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Outcome::ok(Document::Json(json!({
                "k": spec.k,
                "weight": spec.weight.to_string(),
                "mu": sol.mu().to_string(),
                "samples": points,
            }))))
        }
    }
}

fn is_polynomial(weight: &Weight) -> bool {
    matches!(weight, Weight::Poly(_))
}

/// Galerkin bound, lowering N in float mode until the Gram matrix factors.
fn galerkin_section(
    spec: &ProblemSpec,
    cfg: &RunConfig,
    mu: &Scalar,
    notes: &mut Vec<Value>,
) -> Result<(Value, bool), CliError> {
    let mut degree = cfg.galerkin_degree;
    let report = loop {
        match galerkin_lambda(spec, &GalerkinConfig::new(degree, cfg.mode)) {
            Ok(r) => break r,
            Err(OracleError::IllConditioned { index, .. }) if index > 0 => {
                notes.push(json!(format!(
                    "galerkin: float Gram matrix singular at pivot {index} for N = {degree}; N lowered to {}",
                    index - 1
                )));
                degree = index - 1;
            }
            Err(e) => return Err(CliError::Solver(e.to_string())),
        }
    };
    // gap = 1 - μ Λ_N², exact when both sides are exact.
    let (gap, lower_bound) = match (mu, &report.lambda_sq) {
        (Scalar::Exact(m), Scalar::Exact(l)) => {
            let gap: BigRational = BigRational::from_integer(1.into()) - m * l;
            (gap.to_f64(), !gap.is_negative())
        }
        (m, l) => {
            let gap = 1.0 - m.to_f64() * l.to_f64();
            (gap, gap >= -1e-12)
        }
    };
    let tolerance = if is_polynomial(&spec.weight) { GALERKIN_POLY_RTOL } else { GALERKIN_LOOSE_RTOL };
    let pass = lower_bound && gap.abs() <= tolerance;
    if !lower_bound {
        notes.push(json!("galerkin: bound exceeds the pipeline constant"));
    }
    let history = report
        .history
        .iter()
        .map(|(_, v)| finite(v.to_f64(), "galerkin history"))
        .collect::<Result<Vec<_>, _>>()?;
    let section = json!({
        "N": degree,
        "lambda_sq": report.lambda_sq.to_string(),
        "lambda_sq_float": finite(report.lambda_sq.to_f64(), "galerkin lambda_sq")?,
        "gap": finite(gap, "galerkin gap")?,
        "tolerance": tolerance,
        "lower_bound": lower_bound,
        "history": history,
        "pass": pass,
    });
    Ok((section, pass))
}

fn sign_section(
    spec: &ProblemSpec,
    cfg: &RunConfig,
    mu: f64,
    notes: &mut Vec<Value>,
) -> Result<(Value, bool), CliError> {
    if spec.k > 2 {
        notes.push(json!("sign_iteration: finite differences cover k = 1, 2 only; skipped"));
        return Ok((Value::Null, true));
    }
    let report: OracleReport =
        sign_iteration(spec, &SignIterationConfig::new(cfg.grid)).map_err(|e| CliError::Solver(e.to_string()))?;
    let mu_h = report.details["mu_h"];
    let rel = (mu_h - mu).abs() / mu;
    let pass = report.sign_definite && rel <= SIGN_ITERATION_RTOL;
    let section = json!({
        "grid": cfg.grid,
        "mu_h": finite(mu_h, "discrete mu")?,
        "relative_error": finite(rel, "sign iteration error")?,
        "tolerance": SIGN_ITERATION_RTOL,
        "converged": report.converged,
        "sign_definite": report.sign_definite,
        "pass": pass,
    });
    Ok((section, pass))
}

fn max_principle_section(spec: &ProblemSpec, cfg: &RunConfig, notes: &mut Vec<Value>) -> (Value, bool) {
    let exact_ok = !matches!(spec.weight, Weight::Power { .. } | Weight::Hardy { .. });
    let method = match (cfg.mode, exact_ok, spec.k) {
        (_, _, _) if matches!(spec.weight, Weight::Hardy { .. }) => None,
        (Mode::Exact, true, _) => Some(MaxPrincipleMethod::Exact),
        (_, _, 1 | 2) => Some(MaxPrincipleMethod::FiniteDifference { grid: cfg.grid }),
        (_, true, _) => Some(MaxPrincipleMethod::Exact),
        _ => None,
    };
    let Some(method) = method else {
        notes.push(json!("max_principle: no applicable solver for this weight and order; skipped"));
        return (json!("skipped"), true);
    };
    match max_principle_check(spec.k, &spec.weight, method) {
        Ok(_) => (json!("pass"), true),
        Err(e) => {
            notes.push(json!(format!("max_principle: {e}")));
            (json!("fail"), false)
        }
    }
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = problem(cfg)?;
    let sol = run_solver(&spec)?;
    let mu = sol.mu();
    let mut notes = notes_for(&spec.weight);
    let (galerkin, g_ok) = galerkin_section(&spec, cfg, &mu, &mut notes)?;
    let (sign, s_ok) = sign_section(&spec, cfg, mu.to_f64(), &mut notes)?;
    let (max_principle, m_ok) = max_principle_section(&spec, cfg, &mut notes);
    let agree = g_ok && s_ok && m_ok;
    let mut doc = Map::new();
    doc.insert("k".into(), json!(spec.k));
    doc.insert("weight".into(), json!(spec.weight.to_string()));
    doc.insert("mode".into(), json!(spec.mode.to_string()));
    doc.insert("pipeline_mu".into(), json!(mu.to_string()));
    doc.insert("pipeline_mu_float".into(), finite(mu.to_f64(), "mu")?);
    doc.insert("galerkin".into(), galerkin);
    doc.insert("sign_iteration".into(), sign);
    doc.insert("max_principle".into(), max_principle);
    doc.insert("verdict".into(), json!(if agree { "agree" } else { "disagree" }));
    doc.insert("notes".into(), Value::Array(notes));
    Ok(Outcome {
        document: Document::Json(Value::Object(doc)),
        exit_code: if agree { 0 } else { 4 },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Dirac,
    ChiCenter,
    ChiHalfwidth,
    Pow,
}

#[derive(Clone, Debug)]
pub struct SweepRange {
    pub param: SweepParam,
    pub from: String,
    pub to: String,
    pub step: String,
    pub center: Option<String>,
    pub halfwidth: Option<String>,
}

fn rational(text: &str, what: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

/// `from, from + step, …` up to and including `to`.
pub fn sweep_values(from: &BigRational, to: &BigRational, step: &BigRational) -> Result<Vec<BigRational>, CliError> {
    if step.is_zero() {
        return Err(CliError::Input("--step must be nonzero".into()));
    }
    if (to - from).is_negative() != step.is_negative() && to != from {
        return Err(CliError::Input("--step points away from --to".into()));
    }
    let mut values = Vec::new();
    let mut v = from.clone();
    while if step.is_positive() { &v <= to } else { &v >= to } {
        if values.len() == MAX_SWEEP_ROWS {
            return Err(CliError::Input(format!("sweep exceeds {MAX_SWEEP_ROWS} rows")));
        }
        values.push(v.clone());
        v += step;
    }
    Ok(values)
}

fn sweep_weight(range: &SweepRange, v: &BigRational) -> Result<Weight, CliError> {
    let half = |c: &BigRational, h: &BigRational| Weight::indicator(c - h, c + h);
    let weight = match range.param {
        SweepParam::Dirac => Weight::dirac(v.clone()),
        SweepParam::Pow => Weight::power(v.clone()),
        SweepParam::ChiCenter => {
            let h = range
                .halfwidth
                .as_deref()
                .ok_or_else(|| CliError::Input("chi-center sweeps need --halfwidth".into()))?;
            half(v, &rational(h, "--halfwidth")?)
        }
        SweepParam::ChiHalfwidth => {
            let c = rational(range.center.as_deref().unwrap_or("1/2"), "--center")?;
            half(&c, v)
        }
    };
    weight.map_err(|e| CliError::Input(format!("sweep value {}: {e}", format_rational(v))))
}

pub fn sweep(cfg: &RunConfig, range: &SweepRange) -> Result<Outcome, CliError> {
    let from = rational(&range.from, "--from")?;
    let to = rational(&range.to, "--to")?;
    let step = rational(&range.step, "--step")?;
    let mut values = sweep_values(&from, &to, &step)?;
    values.sort();
    let weights = values
        .iter()
        .map(|v| sweep_weight(range, v))
        .collect::<Result<Vec<_>, _>>()?;
    let solutions = weights
        .into_par_iter()
        .map(|w| {
            let spec = ProblemSpec::new(cfg.k, w, cfg.mode).map_err(|e| CliError::Input(e.to_string()))?;
            run_solver(&spec)
        })
        .collect::<Result<Vec<_>, _>>()?;
    match cfg.output {
        Format::Csv => {
            let rows = values.iter().zip(&solutions).map(|(v, s)| {
                vec![fmt_f64(v.to_f64()), fmt_f64(s.mu().to_f64()), fmt_f64(s.lambda())]
            });
            Ok(Outcome::ok(csv_document(&["param", "mu", "lambda"], rows)?))
        }
        Format::Json => {
            let rows = values
                .iter()
                .zip(&solutions)
                .map(|(v, s)| {
                    Ok(json!({
                        "param": format_rational(v),
                        "param_float": v.to_f64(),
                        "mu": s.mu().to_string(),
                        "mu_float": finite(s.mu().to_f64(), "mu")?,
                        "lambda": finite(s.lambda(), "lambda")?,
                    }))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Outcome::ok(Document::Json(json!({ "k": cfg.k, "rows": rows }))))
        }
    }
}

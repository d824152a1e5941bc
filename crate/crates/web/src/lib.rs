//! JSON-returning entry points for the browser demo.
//!
//! Every function returns a JSON string; failures come back as `{"error": "..."}`
//! so the page never has to catch exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sardquad::analysis::{self, TestFunction};
use sardquad::operator::DiscreteOperator;
use sardquad::real::Precision;
use sardquad::{compute_rule, Method, ProblemConfig};

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| respond::<()>(Err(e.to_string()))),
        Err(e) => serde_json::to_string(&ErrorJson { error: &e }).expect("string serializes"),
    }
}

fn method_named(name: &str, m: u32) -> Result<Method, String> {
    match name {
        "dense" => Ok(Method::Dense),
        "sobolev" => Ok(Method::Sobolev),
        "closed" if m == 1 => Ok(Method::ClosedFormM1),
        "closed" if m == 3 => Ok(Method::ClosedFormM3),
        "closed" => Err(format!("no closed form for m = {m}")),
        "trapezoid" => Ok(Method::TrapezoidProjected),
        other => Err(format!("unknown method '{other}'")),
    }
}

#[derive(Serialize)]
pub struct WeightsJson {
    pub m: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub method: &'static str,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub constraint_residuals: Vec<f64>,
    pub norm_sq: Option<f64>,
}

pub fn weights_data(m: u32, n: usize, method: &str) -> Result<WeightsJson, String> {
    let config = ProblemConfig::new(m, n).map_err(|e| e.to_string())?;
    let method = method_named(method, m)?;
    let rule = compute_rule(&config, method).map_err(|e| e.to_string())?;
    let norm_sq = if n <= 400 {
        Some(analysis::error_norm_squared(&config, &rule).map_err(|e| e.to_string())?.norm_sq)
    } else {
        None
    };
    Ok(WeightsJson {
        m,
        n,
        method: method.as_str(),
        nodes: rule.nodes(),
        weights: rule.weights(),
        constraint_residuals: rule.constraint_residuals(),
        norm_sq,
    })
}

/// Weights, nodes and constraint residuals for `method` in `dense`, `sobolev`,
/// `closed` or `trapezoid`.
#[wasm_bindgen]
pub fn weights(m: u32, n: usize, method: &str) -> String {
    respond(weights_data(m, n, method))
}

#[derive(Serialize)]
pub struct OperatorJson {
    pub m: u32,
    pub h: f64,
    pub values: Vec<f64>,
    pub roots: Vec<(f64, f64)>,
    pub amplitudes: Vec<(f64, f64)>,
    pub spectral_radius: f64,
    pub decay_constant: f64,
}

pub fn operator_data(m: u32, h: f64, count: usize) -> Result<OperatorJson, String> {
    if count > 2000 {
        return Err("at most 2000 values".into());
    }
    let n = (1.0 / h).round().max(1.0) as usize;
    let op = DiscreteOperator::with_step(m, h, Precision::for_problem(m, n)).map_err(|e| e.to_string())?;
    Ok(OperatorJson {
        m,
        h,
        values: op.values_upto(count).iter().map(|v| v.to_f64()).collect(),
        roots: op.lambda.iter().map(|z| z.to_f64()).collect(),
        amplitudes: op.amplitudes.iter().map(|z| z.to_f64()).collect(),
        spectral_radius: op.spectral_radius(),
        decay_constant: op.decay_constant(),
    })
}

/// `D_m(h beta)` for `beta = 0..=count` with the roots inside the unit disk.
#[wasm_bindgen]
pub fn operator_values(m: u32, h: f64, count: usize) -> String {
    respond(operator_data(m, h, count))
}

pub fn convergence_data(m: u32, ns: &str) -> Result<Vec<analysis::ConvergenceRow>, String> {
    let ns: Vec<usize> = ns
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| format!("bad N '{s}'")))
        .collect::<Result<_, _>>()?;
    if ns.iter().any(|&n| n > 400) {
        return Err("N is limited to 400 in the demo".into());
    }
    analysis::convergence_study(m, &ns, &TestFunction::ALL, Method::Sobolev).map_err(|e| e.to_string())
}

/// Norm and test-function errors for a comma-separated list of N.
#[wasm_bindgen]
pub fn convergence(m: u32, ns: &str) -> String {
    respond(convergence_data(m, ns))
}

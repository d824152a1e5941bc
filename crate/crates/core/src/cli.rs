//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, TestFunction};
use crate::error::Error;
use crate::kernel::{basis_integral, exactness_basis, ProblemConfig};
use crate::operator::DiscreteOperator;
use crate::real::Precision;
use crate::rule::{Method, QuadratureRule};
use crate::{dense, sobolev};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "sardquad", version, about = "Optimal quadrature weights in W2^(m,0)")]
#[command(args_override_self = true)]
struct Cli {
    /// Flat key=value file whose entries act as flags (command-line flags win).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute weights for one (m, N).
    Weights(WeightsArgs),
    /// Run the property suite for each N.
    Verify(VerifyArgs),
    /// Norm and integration errors over a list of N.
    Converge(ConvergeArgs),
    /// Squared norm of the error functional.
    Norm(NormArgs),
    /// Random feasible perturbations around the optimal weights.
    Probe(ProbeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Dense,
    Sobolev,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Problem {
    /// Odd order of the space.
    #[arg(long)]
    m: u32,
    /// Number of intervals; nodes are beta/N.
    #[arg(long = "N")]
    n: usize,
    /// Working precision in bits (default depends on m and N).
    #[arg(long)]
    precision: Option<usize>,
}

#[derive(Args, Debug)]
struct WeightsArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum, default_value_t = MethodArg::Sobolev)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cross-check against an independent route; exit 4 on disagreement.
    #[arg(long)]
    verify: bool,
    /// Include the squared error norm (quadratic in N).
    #[arg(long)]
    norm: bool,
    /// Include wall-clock time (output is then not reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    m: u32,
    #[arg(long = "N", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = analysis::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(long)]
    m: u32,
    #[arg(long = "N", value_delimiter = ',', num_args = 0..)]
    n: Vec<usize>,
    /// Test functions: exp, runge, sqrt, poly, one.
    #[arg(long, value_delimiter = ',', default_value = "exp,runge,sqrt,poly,one")]
    functions: Vec<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Sobolev)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum, default_value_t = MethodArg::Sobolev)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum, default_value_t = MethodArg::Sobolev)]
    method: MethodArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1e-3)]
    magnitude: f64,
    #[arg(long, default_value_t = analysis::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// One `weights` result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub m: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub h: f64,
    pub method: String,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub constraint_residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub norm_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub condition_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, n: usize, tolerance: f64, observed: f64) -> Check {
        Check { name: name.into(), n, tolerance, observed, pass: observed <= tolerance }
    }
}

/// Failure carrying its exit status.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = if e.is_degeneracy() {
            EXIT_DEGENERATE
        } else {
            match e {
                Error::Precondition { .. } | Error::OptimalityViolation { .. } => EXIT_VERIFY,
                _ => EXIT_USAGE,
            }
        };
        Exit(code, e.to_string())
    }
}

fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable output")
}

/// Splices `--config` entries in right after the subcommand name.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, Exit> {
    let mut path = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            path = args.get(i + 1).cloned();
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.into());
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(sub)) = (path, sub) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Exit(EXIT_USAGE, format!("cannot read {}: {e}", path.to_string_lossy())))?;
    let mut extra: Vec<OsString> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Exit(EXIT_USAGE, format!("config line {}: expected key=value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match value {
            "true" => extra.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                extra.push(format!("--{key}").into());
                extra.push(value.into());
            }
        }
    }
    let mut out = args[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = expand_config(args).and_then(|args| {
        let cli = Cli::try_parse_from(args).map_err(|e| {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            Exit(code, e.render().to_string())
        })?;
        dispatch(cli.command)
    });
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Exit(code, msg)) => {
            if code == EXIT_OK {
                let _ = out.write_all(msg.as_bytes());
            } else {
                let msg = msg.trim_end();
                if msg.starts_with("error:") {
                    let _ = writeln!(err, "{msg}");
                } else {
                    let _ = writeln!(err, "error: {msg}");
                }
            }
            code
        }
    }
}

fn dispatch(cmd: Command) -> Result<(String, i32), Exit> {
    match cmd {
        Command::Weights(a) => cmd_weights(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Probe(a) => cmd_probe(a),
    }
}

fn config_of(p: &Problem) -> Result<ProblemConfig, Exit> {
    let c = ProblemConfig::new(p.m, p.n)?;
    Ok(match p.precision {
        Some(bits) => ProblemConfig::with_precision(p.m, p.n, Precision::new(bits))?,
        None => c,
    })
}

fn method_of(arg: MethodArg, m: u32) -> Result<Method, Exit> {
    Ok(match arg {
        MethodArg::Dense => Method::Dense,
        MethodArg::Sobolev => Method::Sobolev,
        MethodArg::Closed => match m {
            1 => Method::ClosedFormM1,
            3 => Method::ClosedFormM3,
            m => return Err(Error::NoClosedForm { m }.into()),
        },
    })
}

fn cmd_weights(a: WeightsArgs) -> Result<(String, i32), Exit> {
    let config = config_of(&a.problem)?;
    let method = method_of(a.method, config.m)?;
    let start = Instant::now();
    let (rule, condition) = match method {
        Method::Dense => {
            let s = dense::solve_config(&config)?;
            (s.rule, Some(s.condition_estimate))
        }
        _ => (crate::compute_rule(&config, method)?, None),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let norm_sq = if a.norm { Some(analysis::error_norm_squared(&config, &rule)?.norm_sq) } else { None };
    let record = OutputRecord {
        m: config.m,
        n: config.n,
        h: config.h(),
        method: method.as_str().to_string(),
        nodes: rule.nodes(),
        weights: rule.weights(),
        constraint_residuals: rule.constraint_residuals(),
        norm_sq,
        condition_estimate: condition,
        timings_ms: a.timings.then_some(elapsed),
    };
    let mut code = EXIT_OK;
    if a.verify && !cross_check(&config, &rule)? {
        code = EXIT_VERIFY;
    }
    let text = match a.format {
        Format::Json => json(&record) + "\n",
        Format::Csv => record_csv(&record),
    };
    Ok((text, code))
}

/// Constraint residuals and agreement with a second route.
fn cross_check(config: &ProblemConfig, rule: &QuadratureRule) -> Result<bool, Exit> {
    let other = match rule.method {
        Method::Dense => Method::Sobolev,
        _ => Method::Dense,
    };
    let reference = crate::compute_rule(config, other)?;
    Ok(rule.max_constraint_residual() <= 1e-9 && rule.max_difference(&reference) <= 1e-9)
}

pub fn record_csv(r: &OutputRecord) -> String {
    let mut s = String::from("m,N,h,method,index,node,weight,constraint_residual,norm_sq,condition_estimate");
    if r.timings_ms.is_some() {
        s.push_str(",timings_ms");
    }
    s.push('\n');
    for (i, (x, w)) in r.nodes.iter().zip(&r.weights).enumerate() {
        let res = r.constraint_residuals.get(i).copied();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.m,
            r.n,
            num(r.h),
            r.method,
            i,
            num(*x),
            num(*w),
            opt(res),
            opt(r.norm_sq),
            opt(r.condition_estimate)
        ));
        if let Some(t) = r.timings_ms {
            s.push(',');
            s.push_str(&num(t));
        }
        s.push('\n');
    }
    s
}

/// Property suite for one `(m, N)`.
pub fn verify_suite(m: u32, n: usize, seed: u64) -> crate::Result<Vec<Check>> {
    let config = ProblemConfig::new(m, n)?;
    let mut checks = Vec::new();
    let op = DiscreteOperator::for_config(&config)?;
    let loose = if m >= 5 { 1e-8 } else { 1e-9 };
    let window = 30.min(4 * n + 4);
    checks.push(Check::at_most("delta identity", n, loose, op.verify_delta(window)?));
    checks.push(Check::at_most("annihilation", n, loose, op.verify_annihilation(window)?));
    if !op.lambda.is_empty() {
        checks.push(Check::at_most("reciprocal root pairs", n, 1e-10, op.reciprocal_residual()));
        checks.push(Check::at_most("operator values real", n, 1e-10, op.imaginary_residue(100)));
    }

    let sob = sobolev::solve(&config, &op, sobolev::TailMode::Analytic)?;
    let den = dense::solve_config(&config)?;
    checks.push(Check::at_most("boundary system residual", n, 1e-10, sob.boundary_residual));
    let mut support: f64 = 0.0;
    for beta in [-1, n as i64 + 1, -(m as i64 + 1), (n + m as usize + 1) as i64] {
        support = support.max(sobolev::coefficient_at(&config, &op, &sob.u, beta)?.abs().to_f64());
    }
    checks.push(Check::at_most("compact support", n, 1e-9, support));
    let agree = if m == 1 { 1e-12 } else { 1e-9 };
    checks.push(Check::at_most("sobolev vs dense", n, agree, sob.rule.max_difference(&den.rule)));
    let mult = den
        .multipliers
        .to_vec()
        .iter()
        .zip(sob.multipliers.to_vec())
        .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("multipliers sobolev vs dense", n, 1e-9, mult));

    let mut routes = vec![den.rule.clone(), sob.rule.clone()];
    if m == 1 || m == 3 {
        let closed = crate::compute_rule(&config, if m == 1 { Method::ClosedFormM1 } else { Method::ClosedFormM3 })?;
        let tol = if m == 1 { 1e-12 } else { 1e-8 };
        checks.push(Check::at_most("closed form vs dense", n, tol, closed.max_difference(&den.rule)));
        routes.push(closed);
    }
    for rule in &routes {
        let worst = exactness_basis(m)
            .iter()
            .map(|b| {
                let i = basis_integral(b);
                (rule.apply(|x| b.eval(x)) - i).abs() / (1.0 + i.abs())
            })
            .fold(0.0, f64::max);
        checks.push(Check::at_most(format!("exactness {}", rule.method.as_str()), n, 1e-10, worst));
    }

    let norm = analysis::error_norm_squared(&config, &sob.rule)?;
    checks.push(Check::at_most("norm nonnegative", n, 1e-12, -norm.norm_sq));
    let probe = analysis::minimality_probe(&config, &sob.rule, 20, 1e-3, seed)?;
    checks.push(Check {
        name: "perturbations increase norm".into(),
        n,
        tolerance: 0.0,
        observed: probe.min_increase,
        pass: probe.min_increase > 0.0,
    });
    let stat = analysis::stationarity(&config, &sob.rule, 10, 1e-6, seed)?;
    checks.push(Check::at_most("stationarity", n, 1e-8, stat));
    Ok(checks)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    m: u32,
    passed: bool,
    checks: &'a [Check],
}

fn cmd_verify(a: VerifyArgs) -> Result<(String, i32), Exit> {
    for &n in &a.n {
        ProblemConfig::new(a.m, n)?;
    }
    let mut checks = Vec::new();
    for &n in &a.n {
        checks.extend(verify_suite(a.m, n, a.seed)?);
    }
    let passed = checks.iter().all(|c| c.pass);
    let text = match a.format {
        Format::Json => json(&VerifyReport { m: a.m, passed, checks: &checks }) + "\n",
        Format::Csv => {
            let mut s = String::from("m,N,check,tolerance,observed,pass\n");
            for c in &checks {
                s.push_str(&format!("{},{},{},{},{},{}\n", a.m, c.n, c.name, num(c.tolerance), num(c.observed), c.pass));
            }
            s
        }
    };
    Ok((text, if passed { EXIT_OK } else { EXIT_VERIFY }))
}

fn cmd_converge(a: ConvergeArgs) -> Result<(String, i32), Exit> {
    if a.n.is_empty() {
        return Err(Error::EmptyInput("N list").into());
    }
    let mut functions = Vec::new();
    for name in &a.functions {
        let f = TestFunction::parse(name)
            .ok_or_else(|| Exit(EXIT_USAGE, format!("unknown test function '{name}'")))?;
        functions.push(f);
    }
    let method = method_of(a.method, a.m)?;
    let rows = analysis::convergence_study(a.m, &a.n, &functions, method)?;
    let text = match a.format {
        Format::Json => json(&rows) + "\n",
        Format::Csv => {
            let mut s = String::from("N,h,norm_sq,trapezoid_norm_sq");
            for f in &functions {
                s.push_str(&format!(",err_{0},trapezoid_err_{0}", f.name()));
            }
            s.push_str(",slope\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}", r.n, num(r.h), num(r.norm_sq), num(r.trapezoid_norm_sq)));
                for e in &r.errors {
                    s.push_str(&format!(",{},{}", num(e.optimal), num(e.trapezoid)));
                }
                s.push_str(&format!(",{}\n", opt(r.slope)));
            }
            s
        }
    };
    Ok((text, EXIT_OK))
}

#[derive(Serialize)]
struct NormRecord<'a> {
    m: u32,
    #[serde(rename = "N")]
    n: usize,
    method: &'a str,
    #[serde(flatten)]
    report: &'a analysis::ErrorNormReport,
}

fn cmd_norm(a: NormArgs) -> Result<(String, i32), Exit> {
    let config = config_of(&a.problem)?;
    let method = method_of(a.method, config.m)?;
    let rule = crate::compute_rule(&config, method)?;
    let report = analysis::error_norm_squared(&config, &rule)?;
    let text = match a.format {
        Format::Json => {
            json(&NormRecord { m: config.m, n: config.n, method: method.as_str(), report: &report }) + "\n"
        }
        Format::Csv => format!(
            "m,N,method,norm_sq,term_linear,term_quadratic,term_constant\n{},{},{},{},{},{},{}\n",
            config.m,
            config.n,
            method.as_str(),
            num(report.norm_sq),
            num(report.term_linear),
            num(report.term_quadratic),
            num(report.term_constant)
        ),
    };
    Ok((text, EXIT_OK))
}

#[derive(Serialize)]
struct ProbeRecord<'a> {
    m: u32,
    #[serde(rename = "N")]
    n: usize,
    method: &'a str,
    #[serde(flatten)]
    report: &'a analysis::ProbeReport,
    stationarity: f64,
}

fn cmd_probe(a: ProbeArgs) -> Result<(String, i32), Exit> {
    let config = config_of(&a.problem)?;
    let method = method_of(a.method, config.m)?;
    let rule = crate::compute_rule(&config, method)?;
    let report = analysis::minimality_probe(&config, &rule, a.trials, a.magnitude, a.seed)?;
    let stationarity = analysis::stationarity(&config, &rule, a.trials.clamp(1, 10), 1e-6, a.seed)?;
    let ok = report.check().is_ok() && stationarity <= 1e-8;
    let text = match a.format {
        Format::Json => json(&ProbeRecord {
            m: config.m,
            n: config.n,
            method: method.as_str(),
            report: &report,
            stationarity,
        }) + "\n",
        Format::Csv => format!(
            "m,N,method,trials,magnitude,seed,base_norm_sq,min_increase,max_increase,violations,stationarity\n{},{},{},{},{},{},{},{},{},{},{}\n",
            config.m,
            config.n,
            method.as_str(),
            report.trials,
            num(report.magnitude),
            report.seed,
            num(report.base_norm_sq),
            num(report.min_increase),
            num(report.max_increase),
            report.violations.len(),
            num(stationarity)
        ),
    };
    Ok((text, if ok { EXIT_OK } else { EXIT_VERIFY }))
}

//! Error-functional norm, convergence tables and optimality probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{basis_integral_real, exactness_basis, green_double_integral_real, GreenFunction, ProblemConfig};
use crate::linalg::{Lu, Matrix};
use crate::real::Real;
use crate::rule::{Method, QuadratureRule};

/// Constraint violation beyond which the norm formula is refused.
pub const PRECONDITION_TOLERANCE: f64 = 1e-6;
/// Decrease tolerated before a probe counts as an optimality violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 20240607;

/// `norm_sq = term_linear - term_quadratic - term_constant`.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorNormReport {
    pub norm_sq: f64,
    pub term_linear: f64,
    pub term_quadratic: f64,
    pub term_constant: f64,
    #[serde(skip)]
    pub norm_sq_real: Real,
}

/// Tables of `f_m` and `G_m` on the grid, reused across weight vectors.
#[derive(Clone, Debug)]
pub struct NormEvaluator {
    config: ProblemConfig,
    f: Vec<Real>,
    g: Vec<Real>,
    constant: Real,
}

impl NormEvaluator {
    pub fn new(config: &ProblemConfig) -> Self {
        let green = GreenFunction { m: config.m };
        let g = (0..=config.n as i64).map(|k| green.value_real(&config.node_real(k))).collect();
        NormEvaluator {
            config: *config,
            f: green.f_table(config),
            g,
            constant: green_double_integral_real(config.m, config.precision),
        }
    }

    /// Evaluates the three terms without checking the constraints.
    pub fn evaluate(&self, w: &[Real]) -> Result<ErrorNormReport> {
        let n = self.config.n + 1;
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: w.len() });
        }
        let p = self.config.precision;
        let linear: Real = w.iter().zip(&self.f).map(|(c, f)| c * f).sum::<Real>() * 2.0;
        let mut quad = p.zero();
        for k in 1..n {
            let mut s = p.zero();
            for b in 0..n - k {
                s += &w[b] * &w[b + k];
            }
            quad += s * &self.g[k];
        }
        let quad = quad * 2.0;
        let norm = &linear - &quad - &self.constant;
        Ok(ErrorNormReport {
            norm_sq: norm.to_f64(),
            term_linear: linear.to_f64(),
            term_quadratic: quad.to_f64(),
            term_constant: self.constant.to_f64(),
            norm_sq_real: norm,
        })
    }
}

fn check_constraints(rule: &QuadratureRule) -> Result<()> {
    let residual = rule.max_constraint_residual();
    if residual.is_nan() || residual > PRECONDITION_TOLERANCE {
        return Err(Error::Precondition { residual });
    }
    Ok(())
}

/// Squared norm of the error functional; valid only on the constraint manifold.
pub fn error_norm_squared(config: &ProblemConfig, rule: &QuadratureRule) -> Result<ErrorNormReport> {
    check_constraints(rule)?;
    NormEvaluator::new(config).evaluate(rule.weights_real())
}

pub fn apply(rule: &QuadratureRule, f: impl Fn(f64) -> f64) -> f64 {
    rule.apply(f)
}

/// Projections onto the constraint rows `A C = b`.
struct Constraints {
    rows: Vec<Vec<Real>>,
    rhs: Vec<Real>,
    gram: Lu,
}

impl Constraints {
    fn new(config: &ProblemConfig) -> Result<Self> {
        let p = config.precision;
        let basis = exactness_basis(config.m);
        let nodes: Vec<Real> = (0..=config.n as i64).map(|b| config.node_real(b)).collect();
        let rows: Vec<Vec<Real>> = basis.iter().map(|b| nodes.iter().map(|x| b.eval_real(x)).collect()).collect();
        let rhs = basis.iter().map(|b| basis_integral_real(b, p)).collect();
        let m = rows.len();
        let mut g = Matrix::zeros(m, p);
        for i in 0..m {
            for j in 0..m {
                g.set(i, j, rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum());
            }
        }
        Ok(Constraints { rows, rhs, gram: Lu::factor(&g)? })
    }

    /// `A^T (A A^T)^{-1} r`.
    fn lift(&self, r: &[Real]) -> Vec<Real> {
        let y = self.gram.solve(r);
        let p = r[0].precision();
        let mut out = vec![p.zero(); self.rows[0].len()];
        for (row, yi) in self.rows.iter().zip(&y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        out
    }

    fn apply_rows(&self, v: &[Real]) -> Vec<Real> {
        self.rows.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Component of `v` in the null space of `A`.
    fn null_project(&self, v: &[Real]) -> Vec<Real> {
        let c = self.lift(&self.apply_rows(v));
        v.iter().zip(c).map(|(a, b)| a - b).collect()
    }

    /// Nearest point of `{A C = b}` to `w` in the Euclidean norm.
    fn affine_project(&self, w: &[Real]) -> Vec<Real> {
        let r: Vec<Real> = self.apply_rows(w).into_iter().zip(&self.rhs).map(|(a, b)| b - a).collect();
        let c = self.lift(&r);
        w.iter().zip(c).map(|(a, b)| a + b).collect()
    }
}

/// Composite trapezoid weights.
pub fn trapezoid_weights(config: &ProblemConfig) -> Vec<Real> {
    let h = config.h_real();
    let half = &h / 2.0;
    (0..=config.n).map(|b| if b == 0 || b == config.n { half.clone() } else { h.clone() }).collect()
}

/// Trapezoid weights moved onto the constraint manifold by least squares.
pub fn projected_trapezoid(config: &ProblemConfig) -> Result<QuadratureRule> {
    let c = Constraints::new(config)?;
    QuadratureRule::new(*config, Method::TrapezoidProjected, c.affine_project(&trapezoid_weights(config)))
}

/// Integrands with known integrals over `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    Exp,
    Runge,
    Sqrt,
    Poly,
    One,
}

impl TestFunction {
    pub const ALL: [TestFunction; 5] =
        [TestFunction::Exp, TestFunction::Runge, TestFunction::Sqrt, TestFunction::Poly, TestFunction::One];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Exp => "exp",
            TestFunction::Runge => "runge",
            TestFunction::Sqrt => "sqrt",
            TestFunction::Poly => "poly",
            TestFunction::One => "one",
        }
    }

    pub fn parse(s: &str) -> Option<TestFunction> {
        TestFunction::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn value(self, x: f64) -> f64 {
        match self {
            TestFunction::Exp => x.exp(),
            TestFunction::Runge => 1.0 / (1.0 + 25.0 * x * x),
            TestFunction::Sqrt => x.sqrt(),
            TestFunction::Poly => x.powi(5) - 2.0 * x * x + 1.0,
            TestFunction::One => 1.0,
        }
    }

    pub fn integral(self) -> f64 {
        match self {
            TestFunction::Exp => std::f64::consts::E - 1.0,
            TestFunction::Runge => 5f64.atan() / 5.0,
            TestFunction::Sqrt => 2.0 / 3.0,
            TestFunction::Poly => 1.0 / 6.0 - 2.0 / 3.0 + 1.0,
            TestFunction::One => 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionError {
    pub name: &'static str,
    pub optimal: f64,
    pub trapezoid: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub norm_sq: f64,
    /// Norm of the trapezoid rule after projection onto the constraints.
    pub trapezoid_norm_sq: f64,
    pub errors: Vec<FunctionError>,
    /// `d ln ||l|| / d ln N` against the previous row.
    pub slope: Option<f64>,
}

pub fn convergence_study(
    m: u32,
    ns: &[usize],
    functions: &[TestFunction],
    method: Method,
) -> Result<Vec<ConvergenceRow>> {
    if ns.is_empty() {
        return Err(Error::EmptyInput("N list"));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let config = ProblemConfig::new(m, n)?;
        let rule = crate::compute_rule(&config, method)?;
        let eval = NormEvaluator::new(&config);
        check_constraints(&rule)?;
        let norm = eval.evaluate(rule.weights_real())?;
        let trap = projected_trapezoid(&config)?;
        let trap_norm = eval.evaluate(trap.weights_real())?;
        let tw: Vec<f64> = trapezoid_weights(&config).iter().map(Real::to_f64).collect();
        let nodes = config.nodes();
        let errors = functions
            .iter()
            .map(|f| {
                let t: f64 = tw.iter().zip(&nodes).map(|(w, x)| w * f.value(*x)).sum();
                FunctionError {
                    name: f.name(),
                    optimal: rule.apply(|x| f.value(x)) - f.integral(),
                    trapezoid: t - f.integral(),
                }
            })
            .collect();
        let slope = rows.last().map(|prev| {
            (norm.norm_sq.ln() - prev.norm_sq.ln()) / 2.0 / ((n as f64).ln() - (prev.n as f64).ln())
        });
        rows.push(ConvergenceRow {
            n,
            h: config.h(),
            norm_sq: norm.norm_sq,
            trapezoid_norm_sq: trap_norm.norm_sq,
            errors,
            slope,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub magnitude: f64,
    pub seed: u64,
    pub base_norm_sq: f64,
    /// Smallest `norm_sq(C + s v) - norm_sq(C)` over all trials and signs.
    pub min_increase: f64,
    pub max_increase: f64,
    /// `(trial, decrease)` for every probe that lowered the norm beyond tolerance.
    pub violations: Vec<(usize, f64)>,
}

impl ProbeReport {
    pub fn check(&self) -> Result<()> {
        match self.violations.first() {
            Some(&(trial, decrease)) => Err(Error::OptimalityViolation { trial, decrease }),
            None => Ok(()),
        }
    }
}

/// Unit directions in the null space of the constraint rows.
fn directions(config: &ProblemConfig, c: &Constraints, count: usize, seed: u64) -> Result<Vec<Vec<Real>>> {
    if config.n < config.m as usize {
        return Err(Error::NoFeasibleDirections { m: config.m, n: config.n });
    }
    let p = config.precision;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let v: Vec<Real> = (0..=config.n).map(|_| p.real(rng.random_range(-1.0..1.0))).collect();
            let v = c.null_project(&v);
            let len = v.iter().map(|x| x * x).sum::<Real>().sqrt();
            v.iter().map(|x| x / &len).collect()
        })
        .collect())
}

fn shifted(w: &[Real], v: &[Real], s: &Real) -> Vec<Real> {
    w.iter().zip(v).map(|(a, b)| a + b * s).collect()
}

/// Random feasible perturbations of `rule` must not lower the norm.
pub fn minimality_probe(
    config: &ProblemConfig,
    rule: &QuadratureRule,
    trials: usize,
    magnitude: f64,
    seed: u64,
) -> Result<ProbeReport> {
    check_constraints(rule)?;
    let p = config.precision;
    let c = Constraints::new(config)?;
    let eval = NormEvaluator::new(config);
    let w = rule.weights_real();
    let base = eval.evaluate(w)?;
    let mut min_increase = f64::INFINITY;
    let mut max_increase = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for (trial, v) in directions(config, &c, trials, seed)?.into_iter().enumerate() {
        for sign in [1.0, -1.0] {
            let s = p.real(sign * magnitude);
            let d = (eval.evaluate(&shifted(w, &v, &s))?.norm_sq_real - &base.norm_sq_real).to_f64();
            min_increase = min_increase.min(d);
            max_increase = max_increase.max(d);
            if d < -VIOLATION_TOLERANCE {
                violations.push((trial, -d));
            }
        }
    }
    Ok(ProbeReport {
        trials,
        magnitude,
        seed,
        base_norm_sq: base.norm_sq,
        min_increase,
        max_increase,
        violations,
    })
}

/// Largest central-difference directional derivative of `norm_sq` along
/// random feasible directions.
pub fn stationarity(config: &ProblemConfig, rule: &QuadratureRule, directions_count: usize, step: f64, seed: u64) -> Result<f64> {
    check_constraints(rule)?;
    let p = config.precision;
    let c = Constraints::new(config)?;
    let eval = NormEvaluator::new(config);
    let w = rule.weights_real();
    let (plus, minus) = (p.real(step), p.real(-step));
    let mut worst: f64 = 0.0;
    for v in directions(config, &c, directions_count, seed)? {
        let a = eval.evaluate(&shifted(w, &v, &plus))?.norm_sq_real;
        let b = eval.evaluate(&shifted(w, &v, &minus))?.norm_sq_real;
        worst = worst.max(((a - b) / (2.0 * step)).abs().to_f64());
    }
    Ok(worst)
}

//! Direct solve of the saddle-point system `[G E^T; E 0] [C; d] = [f; I]`.

use crate::error::{Error, Result};
use crate::kernel::{basis_integral_real, exactness_basis, GreenFunction, ProblemConfig};
use crate::linalg::{Lu, Matrix};
use crate::real::Real;
pub use crate::rule::{Method, MultiplierSet, QuadratureRule};

/// Conditioning thresholds, stated for unit roundoff `2^-53` and rescaled to
/// the working precision.
const WARN_CONDITION_F64: f64 = 1e12;
const FAIL_CONDITION_F64: f64 = 1e15;
const RESIDUAL_TOL: f64 = 1e-10;

/// The assembled system; unknowns are `C_0..C_N` followed by the multipliers.
#[derive(Clone, Debug)]
pub struct DenseSystem {
    pub config: ProblemConfig,
    matrix: Matrix,
    rhs: Vec<Real>,
}

impl DenseSystem {
    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j).to_f64()
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.rhs.iter().map(Real::to_f64).collect()
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.entry(i, j)).collect()).collect()
    }
}

pub fn assemble(config: &ProblemConfig) -> Result<DenseSystem> {
    let config = ProblemConfig::with_precision(config.m, config.n, config.precision)?;
    let (m, n, p) = (config.m as usize, config.n, config.precision);
    let dim = n + 1 + m;
    let green = GreenFunction { m: config.m };
    let g: Vec<Real> = (0..=n).map(|k| green.value_real(&config.node_real(k as i64))).collect();
    let basis = exactness_basis(config.m);
    let mut a = Matrix::zeros(dim, p);
    let mut rhs = Vec::with_capacity(dim);
    for beta in 0..=n {
        for gamma in 0..=n {
            a.set(beta, gamma, g[beta.abs_diff(gamma)].clone());
        }
        let x = config.node_real(beta as i64);
        for (r, b) in basis.iter().enumerate() {
            let v = b.eval_real(&x);
            a.set(beta, n + 1 + r, v.clone());
            a.set(n + 1 + r, beta, v);
        }
        rhs.push(green.f_real(&x));
    }
    for b in &basis {
        rhs.push(basis_integral_real(b, p));
    }
    Ok(DenseSystem { config, matrix: a, rhs })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Scale each row by its largest entry before factoring.
    pub equilibrate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AccuracyWarning {
    Residual { relative: f64, tolerance: f64 },
    Conditioning { condition: f64, threshold: f64 },
}

#[derive(Clone, Debug)]
pub struct DenseSolution {
    pub rule: QuadratureRule,
    pub multipliers: MultiplierSet,
    pub multipliers_real: Vec<Real>,
    pub condition_estimate: f64,
    /// `||A x - b||_inf / ||b||_inf`.
    pub residual: f64,
    pub warnings: Vec<AccuracyWarning>,
}

pub fn solve(sys: &DenseSystem) -> Result<DenseSolution> {
    solve_with(sys, SolveOptions::default())
}

pub fn solve_with(sys: &DenseSystem, options: SolveOptions) -> Result<DenseSolution> {
    let config = sys.config;
    let p = config.precision;
    let dim = sys.dim();
    let (matrix, rhs) = if options.equilibrate {
        let mut a = sys.matrix.clone();
        let mut b = sys.rhs.clone();
        for i in 0..dim {
            let scale = (0..dim).map(|j| a.get(i, j).abs()).fold(p.zero(), Real::max);
            if scale.is_zero() {
                continue;
            }
            let inv = scale.recip();
            for j in 0..dim {
                let v = a.get(i, j) * &inv;
                a.set(i, j, v);
            }
            b[i] = &b[i] * &inv;
        }
        (a, b)
    } else {
        (sys.matrix.clone(), sys.rhs.clone())
    };

    let lu = Lu::factor(&matrix)?;
    let condition = lu.condition_estimate(matrix.norm1(), p);
    let u = p.epsilon() / 2.0;
    let f64_u = f64::EPSILON / 2.0;
    let fail = FAIL_CONDITION_F64 * f64_u / u;
    let warn = WARN_CONDITION_F64 * f64_u / u;
    if !condition.is_finite() || condition > fail {
        return Err(Error::Singular { condition });
    }
    let mut warnings = Vec::new();
    if condition > warn {
        warnings.push(AccuracyWarning::Conditioning { condition, threshold: warn });
    }

    let x = lu.solve(&rhs);
    let ax = sys.matrix.mul_vec(&x);
    let rmax = ax.iter().zip(&sys.rhs).map(|(a, b)| (a - b).abs().to_f64()).fold(0.0, f64::max);
    let bmax = sys.rhs.iter().map(|b| b.abs().to_f64()).fold(0.0, f64::max);
    let residual = rmax / bmax;
    if residual > RESIDUAL_TOL {
        warnings.push(AccuracyWarning::Residual { relative: residual, tolerance: RESIDUAL_TOL });
    }

    let n = config.n;
    let weights = x[..=n].to_vec();
    let multipliers_real = x[n + 1..].to_vec();
    Ok(DenseSolution {
        rule: QuadratureRule::new(config, Method::Dense, weights)?,
        multipliers: MultiplierSet::from_real(config.m, &multipliers_real)?,
        multipliers_real,
        condition_estimate: condition,
        residual,
        warnings,
    })
}

/// Assemble and solve in one step.
pub fn solve_config(config: &ProblemConfig) -> Result<DenseSolution> {
    solve(&assemble(config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn assembly_shapes() {
        let s = assemble(&ProblemConfig::new(1, 1).unwrap()).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.entry(0, 0), 0.0);
        assert_eq!(s.entry(1, 1), 0.0);
        let s = assemble(&ProblemConfig::new(1, 2).unwrap()).unwrap();
        assert_eq!(s.dim(), 4);
        assert_relative_eq!(s.entry(0, 1), 0.5f64.sinh() / 2.0, max_relative = 1e-15);
        let s = assemble(&ProblemConfig::new(3, 2).unwrap()).unwrap();
        assert_eq!(s.dim(), 6);
        let half = (0.25f64).exp() * (3f64.sqrt() / 4.0).sin();
        assert_relative_eq!(s.entry(5, 1), half, max_relative = 1e-15);
        assert_relative_eq!(s.entry(1, 5), half, max_relative = 1e-15);
    }

    #[test]
    fn too_few_nodes() {
        let bad = ProblemConfig { m: 3, n: 1, precision: crate::real::Precision::new(128) };
        assert!(matches!(assemble(&bad), Err(Error::TooFewNodes { .. })));
    }

    #[test]
    fn m1_single_interval() {
        let sol = solve_config(&ProblemConfig::new(1, 1).unwrap()).unwrap();
        let e = 1f64.exp();
        let w = sol.rule.weights();
        assert_relative_eq!(w[0], (e - 1.0) / (e + 1.0), max_relative = 1e-14);
        assert_relative_eq!(w[1], (e - 1.0) / (e + 1.0), max_relative = 1e-14);
        assert!(sol.residual < 1e-30);
        assert!(sol.warnings.is_empty());
    }

    #[test]
    fn m1_interior_weights() {
        let sol = solve_config(&ProblemConfig::new(1, 10).unwrap()).unwrap();
        let eh = 0.1f64.exp();
        let interior = 2.0 * (eh - 1.0) / (eh + 1.0);
        for w in &sol.rule.weights()[1..10] {
            assert_relative_eq!(*w, interior, max_relative = 1e-14);
        }
    }

    #[test]
    fn equilibration_gives_the_same_answer() {
        let sys = assemble(&ProblemConfig::new(3, 7).unwrap()).unwrap();
        let a = solve(&sys).unwrap();
        let b = solve_with(&sys, SolveOptions { equilibrate: true }).unwrap();
        assert!(a.rule.max_difference(&b.rule) < 1e-25);
    }
}

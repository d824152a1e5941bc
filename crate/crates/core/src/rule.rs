use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{basis_integral_real, exactness_basis, ProblemConfig};
use crate::real::Real;

/// Lagrange multipliers `d0`, `d1_k`, `d2_k` attached to the exactness basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSet {
    pub d0: f64,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl MultiplierSet {
    /// Splits `[d0, d1_1..d1_L, d2_1..d2_L]`.
    pub fn from_slice(m: u32, values: &[f64]) -> Result<Self> {
        if values.len() != m as usize {
            return Err(Error::DimensionMismatch { expected: m as usize, found: values.len() });
        }
        let pairs = (m as usize - 1) / 2;
        Ok(MultiplierSet {
            d0: values[0],
            d1: values[1..1 + pairs].to_vec(),
            d2: values[1 + pairs..].to_vec(),
        })
    }

    pub fn from_real(m: u32, values: &[Real]) -> Result<Self> {
        let v: Vec<f64> = values.iter().map(Real::to_f64).collect();
        Self::from_slice(m, &v)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.d0];
        v.extend(&self.d1);
        v.extend(&self.d2);
        v
    }

    pub fn len(&self) -> usize {
        1 + self.d1.len() + self.d2.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Which route produced a set of weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "dense")]
    Dense,
    #[serde(rename = "sobolev")]
    Sobolev,
    #[serde(rename = "closed-form-m1")]
    ClosedFormM1,
    #[serde(rename = "closed-form-m3")]
    ClosedFormM3,
    #[serde(rename = "trapezoid-projected")]
    TrapezoidProjected,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::Sobolev => "sobolev",
            Method::ClosedFormM1 => "closed-form-m1",
            Method::ClosedFormM3 => "closed-form-m3",
            Method::TrapezoidProjected => "trapezoid-projected",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Weights `C_beta` at the nodes `x_beta = beta h`, kept at working precision.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub config: ProblemConfig,
    pub method: Method,
    weights: Vec<Real>,
}

impl QuadratureRule {
    pub fn new(config: ProblemConfig, method: Method, weights: Vec<Real>) -> Result<Self> {
        if weights.len() != config.n + 1 {
            return Err(Error::DimensionMismatch { expected: config.n + 1, found: weights.len() });
        }
        Ok(QuadratureRule { config, method, weights })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights.iter().map(Real::to_f64).collect()
    }

    pub fn weights_real(&self) -> &[Real] {
        &self.weights
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.config.nodes()
    }

    /// `sum_beta C_beta f(x_beta)` in double precision.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weights()
            .iter()
            .zip(self.nodes())
            .map(|(c, x)| c * f(x))
            .sum()
    }

    /// `sum_beta C_beta f(x_beta)` at working precision.
    pub fn apply_real(&self, f: impl Fn(&Real) -> Real) -> Real {
        let p = self.config.precision;
        self.weights
            .iter()
            .enumerate()
            .fold(p.zero(), |acc, (b, c)| acc + c * f(&self.config.node_real(b as i64)))
    }

    /// `sum C_beta b(x_beta) - int_0^1 b` for each exactness function.
    pub fn constraint_residuals_real(&self) -> Vec<Real> {
        let p = self.config.precision;
        exactness_basis(self.config.m)
            .iter()
            .map(|b| self.apply_real(|x| b.eval_real(x)) - basis_integral_real(b, p))
            .collect()
    }

    pub fn constraint_residuals(&self) -> Vec<f64> {
        self.constraint_residuals_real().iter().map(Real::to_f64).collect()
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.constraint_residuals().iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    /// `max_beta |C_beta - C_{N-beta}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.weights.len();
        (0..n)
            .map(|b| (&self.weights[b] - &self.weights[n - 1 - b]).abs().to_f64())
            .fold(0.0, f64::max)
    }

    /// `max_beta |C_beta - D_beta|` against another rule on the same nodes.
    pub fn max_difference(&self, other: &QuadratureRule) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs().to_f64())
            .fold(0.0, f64::max)
    }
}

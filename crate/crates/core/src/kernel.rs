//! Green's function, exactness basis and the right-hand-side functions.
//!
//! `G_m` is evaluated from its power series
//! `G_m(x) = 1/2 * sum_{j>=1} |x|^(2mj-1) / (2mj-1)!`, which has only positive
//! terms. The sinh/exp-cos form is kept as [`green_value_exp_trig`]; near the
//! origin its terms cancel down to `|x|^(2m-1)`.

use crate::error::{Error, Result};
use crate::real::{Precision, Real};
use crate::rule::MultiplierSet;

/// Problem size: odd order `m` and `n` intervals of width `h = 1/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProblemConfig {
    pub m: u32,
    pub n: usize,
    pub precision: Precision,
}

pub(crate) fn check_order(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::ZeroOrder);
    }
    if m % 2 == 0 {
        return Err(Error::EvenOrder { m });
    }
    Ok(())
}

impl ProblemConfig {
    pub fn new(m: u32, n: usize) -> Result<Self> {
        Self::with_precision(m, n, Precision::for_problem(m, n))
    }

    pub fn with_precision(m: u32, n: usize, precision: Precision) -> Result<Self> {
        check_order(m)?;
        if n == 0 {
            return Err(Error::NoIntervals);
        }
        if n + 1 < m as usize {
            return Err(Error::TooFewNodes { m, n });
        }
        Ok(ProblemConfig { m, n, precision })
    }

    /// Number of cosine/sine pairs, `(m-1)/2`.
    pub fn pairs(&self) -> usize {
        (self.m as usize - 1) / 2
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn h_real(&self) -> Real {
        self.precision.ratio(1, self.n as i64)
    }

    pub fn node(&self, beta: i64) -> f64 {
        beta as f64 / self.n as f64
    }

    pub fn node_real(&self, beta: i64) -> Real {
        self.precision.ratio(beta, self.n as i64)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n as i64).map(|b| self.node(b)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Exp,
    ExpCos,
    ExpSin,
}

/// `e^{a x}`, `e^{a x} cos(b x)` or `e^{a x} sin(b x)`, with
/// `a = -cos(2 pi k/m)` and `b = sin(2 pi k/m)` for the paired members.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisFunction {
    pub kind: BasisKind,
    pub a: f64,
    pub b: f64,
    pub m: u32,
    pub k: u32,
}

/// `2 pi k / m` at precision `p`.
pub(crate) fn angle(k: u32, m: u32, p: Precision) -> Real {
    p.pi() * p.ratio(2 * k as i64, m as i64)
}

impl BasisFunction {
    /// `(a, b)` at precision `p`.
    pub fn rates(&self, p: Precision) -> (Real, Real) {
        match self.kind {
            BasisKind::Exp => (p.int(-1), p.zero()),
            _ => {
                let t = angle(self.k, self.m, p);
                (-t.cos(), t.sin())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let e = (self.a * x).exp();
        match self.kind {
            BasisKind::Exp => e,
            BasisKind::ExpCos => e * (self.b * x).cos(),
            BasisKind::ExpSin => e * (self.b * x).sin(),
        }
    }

    pub fn eval_real(&self, x: &Real) -> Real {
        let p = x.precision();
        let (a, b) = self.rates(p);
        let e = (a * x).exp();
        match self.kind {
            BasisKind::Exp => e,
            BasisKind::ExpCos => e * (b * x).cos(),
            BasisKind::ExpSin => e * (b * x).sin(),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            BasisKind::Exp => "exp(-x)".to_string(),
            BasisKind::ExpCos => format!("expcos_{}", self.k),
            BasisKind::ExpSin => format!("expsin_{}", self.k),
        }
    }
}

/// The `m` exactness functions: `e^{-x}`, then all cosine members, then all
/// sine members.
pub fn exactness_basis(m: u32) -> Vec<BasisFunction> {
    let mut out = vec![BasisFunction { kind: BasisKind::Exp, a: -1.0, b: 0.0, m, k: 0 }];
    let pairs = (m.max(1) - 1) / 2;
    for kind in [BasisKind::ExpCos, BasisKind::ExpSin] {
        for k in 1..=pairs {
            let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            out.push(BasisFunction { kind, a: -t.cos(), b: t.sin(), m, k });
        }
    }
    out
}

pub fn basis_integral(b: &BasisFunction) -> f64 {
    basis_integral_real(b, Precision::new(128)).to_f64()
}

/// `int_0^1 b(x) dx` in closed form.
pub fn basis_integral_real(b: &BasisFunction, p: Precision) -> Real {
    if b.kind == BasisKind::Exp {
        return p.one() - p.int(-1).exp();
    }
    let t = angle(b.k, b.m, p);
    let (c, s) = (t.cos(), t.sin());
    let damp = (-&c).exp();
    let shifted = &s + &t;
    match b.kind {
        BasisKind::ExpCos => c - damp * shifted.cos(),
        _ => s - damp * shifted.sin(),
    }
}

/// `sum_{j>=1} x^(2mj-s) / (2mj-s)!` for `x >= 0` and `s` in `{-1, 0, 1}`.
fn series_f64(m: u32, x: f64, s: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let two_m = 2 * m as i32;
    let first = two_m - s;
    let mut t = 1.0;
    for i in 1..=first {
        t *= x / i as f64;
    }
    let mut n = first;
    let mut sum = 0.0;
    while t > 0.0 {
        sum += t;
        if t <= f64::EPSILON * 0.25 * sum {
            break;
        }
        for i in 1..=two_m {
            t *= x / (n + i) as f64;
        }
        n += two_m;
    }
    sum
}

fn series_real(m: u32, x: &Real, s: i64) -> Real {
    let p = x.precision();
    if x.is_zero() {
        return p.zero();
    }
    let two_m = 2 * m as i64;
    let first = two_m - s;
    let mut t = p.one();
    for i in 1..=first {
        t = t * x / (i as f64);
    }
    let x2m = x.powi(two_m);
    let tol = p.real(p.epsilon() * 0.25);
    let mut n = first;
    let mut sum = p.zero();
    loop {
        sum += &t;
        if t <= &tol * &sum {
            break;
        }
        let mut den = p.one();
        for i in 1..=two_m {
            den *= (n + i) as f64;
        }
        t = t * &x2m / den;
        n += two_m;
    }
    sum
}

/// `G_m(x)` in double precision.
pub fn green_value(m: u32, x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 8.0 {
        0.5 * series_f64(m, ax, 1)
    } else {
        green_value_exp_trig(m, ax)
    }
}

/// `G_m(x)` from the sinh plus exp-cosine terms.
pub fn green_value_exp_trig(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut s = x.sinh();
    for n in 1..m {
        let th = std::f64::consts::PI * n as f64 / m as f64;
        s += (x * th.cos()).exp() * (x * th.sin() + th).cos();
    }
    x.signum() * s / (2.0 * m as f64)
}

/// One exp-cosine term of `G_m`: `e^{rate x} cos(freq x + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenTerm {
    pub rate: f64,
    pub freq: f64,
    pub phase: f64,
}

/// `G_m`, the fundamental solution of `d^{2m}/dx^{2m} - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreenFunction {
    pub m: u32,
}

impl GreenFunction {
    pub fn new(m: u32) -> Result<Self> {
        check_order(m)?;
        Ok(GreenFunction { m })
    }

    /// The `m-1` exp-cosine terms that accompany `sinh(x)`.
    pub fn terms(&self) -> Vec<GreenTerm> {
        (1..self.m)
            .map(|n| {
                let th = std::f64::consts::PI * n as f64 / self.m as f64;
                GreenTerm { rate: th.cos(), freq: th.sin(), phase: th }
            })
            .collect()
    }

    pub fn value(&self, x: f64) -> f64 {
        green_value(self.m, x)
    }

    pub fn value_real(&self, x: &Real) -> Real {
        let ax = x.abs();
        if ax.to_f64() <= 8.0 {
            series_real(self.m, &ax, 1) / 2.0
        } else {
            self.value_exp_trig_real(&ax)
        }
    }

    pub fn value_exp_trig_real(&self, x: &Real) -> Real {
        let p = x.precision();
        if x.is_zero() {
            return p.zero();
        }
        let mut s = x.sinh();
        for n in 1..self.m {
            let th = p.pi() * p.ratio(n as i64, self.m as i64);
            s += (x * th.cos()).exp() * (x * th.sin() + &th).cos();
        }
        let s = s / (2.0 * self.m as f64);
        if x.is_negative() {
            -s
        } else {
            s
        }
    }

    /// `int_0^u G_m(t) dt` (odd in `u`).
    pub fn primitive_real(&self, u: &Real) -> Real {
        let v = series_real(self.m, &u.abs(), 0) / 2.0;
        if u.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `f_m(x) = int_0^1 G_m(t - x) dt`.
    pub fn f_real(&self, x: &Real) -> Real {
        let one = x.precision().one();
        self.primitive_real(&(one - x)) - self.primitive_real(&-x)
    }

    /// `f_m` at every node `h beta`, `beta = 0..N`.
    pub fn f_table(&self, config: &ProblemConfig) -> Vec<Real> {
        let p = config.precision;
        let two_m = 2 * self.m as i64;
        // Coefficients 1/(2mj)! of the primitive series, enough for |u| <= 1.
        let mut coeffs = Vec::new();
        let mut c = p.one();
        let mut n = 0i64;
        let tol = p.epsilon() * 0.25;
        loop {
            for i in 1..=two_m {
                c /= (n + i) as f64;
            }
            n += two_m;
            let small = c.to_f64() <= tol;
            coeffs.push(c.clone());
            if small {
                break;
            }
        }
        let prim = |u: &Real| -> Real {
            let y = u.abs().powi(two_m);
            let mut acc = p.zero();
            for c in coeffs.iter().rev() {
                acc = (acc + c) * &y;
            }
            let v = acc / 2.0;
            if u.is_negative() {
                -v
            } else {
                v
            }
        };
        (0..=config.n as i64)
            .map(|b| {
                let x = config.node_real(b);
                prim(&(p.one() - &x)) - prim(&-x)
            })
            .collect()
    }

    /// `f_m` through the antiderivative `(cosh t + sum_n e^{t c_n} cos(t s_n)) / 2m`
    /// of the exp-trig terms, split at `t = x`.
    pub fn f_exp_trig_real(&self, x: &Real) -> Real {
        let p = x.precision();
        let m = self.m;
        let gamma = |t: &Real| -> Real {
            let mut s = t.cosh();
            for n in 1..m {
                let th = p.pi() * p.ratio(n as i64, m as i64);
                s += (t * th.cos()).exp() * (t * th.sin()).cos();
            }
            s / (2.0 * m as f64) - 0.5
        };
        let signed = |u: Real| -> Real {
            if u.is_zero() {
                p.zero()
            } else if u.is_negative() {
                -gamma(&u)
            } else {
                gamma(&u)
            }
        };
        signed(p.one() - x) + signed(x.clone())
    }
}

pub fn f_value(m: u32, x: f64) -> f64 {
    let s = |u: f64| u.signum() * 0.5 * series_f64(m, u.abs(), 0);
    s(1.0 - x) - s(-x)
}

/// `int_0^1 int_0^1 G_m(x - y) dx dy = sum_{j>=1} 1/(2mj+1)!`.
pub fn green_double_integral(m: u32) -> f64 {
    green_double_integral_real(m, Precision::new(128)).to_f64()
}

pub fn green_double_integral_real(m: u32, p: Precision) -> Real {
    series_real(m, &p.one(), -1)
}

pub fn q_value(m: u32, x: f64) -> f64 {
    q_value_real(m, &Precision::new(128).real(x)).to_f64()
}

/// `Q(x) = e^x (1 - 1/e)/2 + sum_k e^{x c_k} [cos(x s_k) - e^{-c_k} cos((x-1) s_k)]`
/// with `c_k + i s_k = e^{2 pi i k/m}`.
pub fn q_value_real(m: u32, x: &Real) -> Real {
    let p = x.precision();
    let mut q = x.exp() * (p.one() - p.int(-1).exp()) / 2.0;
    for k in 1..=(m - 1) / 2 {
        let t = angle(k, m, p);
        let (c, s) = (t.cos(), t.sin());
        let xm1 = x - 1.0;
        q += (x * &c).exp() * ((x * &s).cos() - (-&c).exp() * (xm1 * &s).cos());
    }
    q
}

pub fn p_value(m: u32, x: f64, mult: &MultiplierSet) -> Result<f64> {
    let values = mult.to_vec();
    if values.len() != m as usize {
        return Err(Error::DimensionMismatch { expected: m as usize, found: values.len() });
    }
    let p = Precision::new(128);
    let d: Vec<Real> = values.iter().map(|&v| p.real(v)).collect();
    Ok(p_value_real(m, &p.real(x), &d).to_f64())
}

/// `P(x, d) = sum_i d_i b_i(x)` over the exactness basis, with `d` ordered as
/// `[d0, d1_1..d1_L, d2_1..d2_L]`.
pub fn p_value_real(m: u32, x: &Real, d: &[Real]) -> Real {
    let p = x.precision();
    exactness_basis(m)
        .iter()
        .zip(d)
        .fold(p.zero(), |acc, (b, di)| acc + di * b.eval_real(x))
}

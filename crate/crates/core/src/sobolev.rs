//! Weights from `C_beta = (D_m * u_m)(h beta)`.
//!
//! Outside `[0, 1]`, `u_m` is a finite exponential sum, so its convolution with
//! `D_m` over a half-line is a geometric series in each root `lambda_n`. The
//! `2m` split multipliers come from requiring the convolution to vanish at
//! `beta = -1..-m` and `N+1..N+m`.

use crate::error::{Error, Result};
use crate::kernel::{angle, exactness_basis, BasisKind, GreenFunction, ProblemConfig};
use crate::linalg::{Lu, Matrix};
use crate::operator::DiscreteOperator;
use crate::real::{Complex, Precision, Real};
use crate::rule::{Method, MultiplierSet, QuadratureRule};

/// How the infinite convolution tails are summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TailMode {
    /// Closed-form geometric series.
    #[default]
    Analytic,
    /// Direct summation until the remaining tail is below working precision.
    Truncated,
}

/// `Re sum_r c_r e^{z_r x}`.
#[derive(Clone, Debug)]
pub struct ExpSum {
    pub terms: Vec<(Complex, Complex)>,
}

impl ExpSum {
    pub fn eval(&self, x: &Real) -> Real {
        let mut acc = x.precision().zero();
        for (c, z) in &self.terms {
            acc += (c * &(z.scale(x)).exp()).re;
        }
        acc
    }

    fn scaled(&self, s: &Real) -> ExpSum {
        ExpSum { terms: self.terms.iter().map(|(c, z)| (c.scale(s), z.clone())).collect() }
    }

    fn extend(mut self, other: ExpSum) -> ExpSum {
        self.terms.extend(other.terms);
        self
    }

    /// `(c_r, q_r = e^{z_r h})`.
    fn generators(&self, h: &Real) -> Vec<(Complex, Complex)> {
        self.terms.iter().map(|(c, z)| (c.clone(), z.scale(h).exp())).collect()
    }
}

/// `Q` as an exponential sum.
pub fn q_exp_sum(m: u32, p: Precision) -> ExpSum {
    let mut terms = vec![(
        Complex::from_real((p.one() - p.int(-1).exp()) / 2.0),
        Complex::one(p),
    )];
    for k in 1..=(m - 1) / 2 {
        let t = angle(k, m, p);
        let (c, s) = (t.cos(), t.sin());
        let z = Complex::new(c.clone(), s.clone());
        let shift = Complex::cis(&-&s).scale(&(-&c).exp());
        terms.push((Complex::one(p) - shift, z));
    }
    ExpSum { terms }
}

/// The exactness basis as exponential sums, in basis order.
pub fn basis_exp_sums(m: u32, p: Precision) -> Vec<ExpSum> {
    exactness_basis(m)
        .iter()
        .map(|b| {
            let (a, freq) = b.rates(p);
            let rate = Complex::new(a, freq);
            let coef = match b.kind {
                BasisKind::Exp | BasisKind::ExpCos => Complex::one(p),
                BasisKind::ExpSin => Complex::new(p.zero(), p.int(-1)),
            };
            ExpSum { terms: vec![(coef, rate)] }
        })
        .collect()
}

/// `d-` and `d+`, each ordered like the exactness basis.
#[derive(Clone, Debug)]
pub struct SplitMultipliers {
    pub dminus: Vec<Real>,
    pub dplus: Vec<Real>,
}

impl SplitMultipliers {
    pub fn dminus_f64(&self) -> Vec<f64> {
        self.dminus.iter().map(Real::to_f64).collect()
    }

    pub fn dplus_f64(&self) -> Vec<f64> {
        self.dplus.iter().map(Real::to_f64).collect()
    }

    /// `(d, b) = ((d+ + d-)/2, (d+ - d-)/2)`.
    pub fn recombine_real(&self) -> (Vec<Real>, Vec<Real>) {
        let d = self.dplus.iter().zip(&self.dminus).map(|(a, b)| (a + b) / 2.0).collect();
        let t = self.dplus.iter().zip(&self.dminus).map(|(a, b)| (a - b) / 2.0).collect();
        (d, t)
    }

    pub fn recombine(&self, m: u32) -> Result<(MultiplierSet, MultiplierSet)> {
        let (d, b) = self.recombine_real();
        Ok((MultiplierSet::from_real(m, &d)?, MultiplierSet::from_real(m, &b)?))
    }
}

/// `u_m` on the grid: stored `f_m` values on `[0, N]`, exponential sums outside.
#[derive(Clone, Debug)]
pub struct UFunction {
    pub config: ProblemConfig,
    pub f_values: Vec<Real>,
    pub split: SplitMultipliers,
    pub left: ExpSum,
    pub right: ExpSum,
}

impl UFunction {
    pub fn value_real(&self, beta: i64) -> Real {
        if beta < 0 {
            self.left.eval(&self.config.node_real(beta))
        } else if beta as usize > self.config.n {
            self.right.eval(&self.config.node_real(beta))
        } else {
            self.f_values[beta as usize].clone()
        }
    }

    pub fn value(&self, beta: i64) -> f64 {
        self.value_real(beta).to_f64()
    }
}

/// Convolution machinery shared by the boundary solve and the weights.
struct Conv<'a> {
    op: &'a DiscreteOperator,
    n: i64,
    d: Vec<Real>,
    amps: Vec<Complex>,
    p: Precision,
}

impl<'a> Conv<'a> {
    fn new(config: &ProblemConfig, op: &'a DiscreteOperator, table: usize) -> Self {
        let p = config.precision;
        let s = p.int(op.m as i64) / &op.k;
        Conv {
            op,
            n: config.n as i64,
            d: op.values_upto(table),
            amps: op.amplitudes.iter().map(|a| a.scale(&s)).collect(),
            p,
        }
    }

    fn dv(&self, k: i64) -> &Real {
        &self.d[k.unsigned_abs() as usize]
    }

    fn check(&self, gens: &[(Complex, Complex)], left: bool) -> Result<()> {
        let rho = self.op.spectral_radius();
        for (_, q) in gens {
            let qa = q.abs().to_f64();
            let r = if left { rho / qa } else { rho * qa };
            if r >= 1.0 {
                return Err(Error::Integrity(format!("half-line tail does not converge (ratio {r})")));
            }
        }
        Ok(())
    }

    /// `sum_{gamma <= -1} D(beta - gamma) e(h gamma)`.
    fn left(&self, beta: i64, gens: &[(Complex, Complex)]) -> Real {
        let mut total = Complex::zero(self.p);
        let k0 = (beta + 1).max(2);
        for (c, q) in gens {
            let mut inner = Complex::zero(self.p);
            for k in (beta + 1)..=1 {
                inner += q.powi(beta - k).scale(self.dv(k));
            }
            let qk = q.powi(beta - k0);
            let qi = q.recip();
            for (a, l) in self.amps.iter().zip(&self.op.lambda) {
                let den = Complex::one(self.p) - l * &qi;
                inner += &(a * &l.powi(k0 - 1)) * &qk / den;
            }
            total += c * &inner;
        }
        total.re
    }

    /// `sum_{gamma >= N+1} D(beta - gamma) e(h gamma)`.
    fn right(&self, beta: i64, gens: &[(Complex, Complex)]) -> Real {
        let mut total = Complex::zero(self.p);
        let j0 = self.n + 1 - beta;
        let k0 = j0.max(2);
        for (c, q) in gens {
            let mut inner = Complex::zero(self.p);
            for k in j0..=1 {
                inner += q.powi(beta + k).scale(self.dv(k));
            }
            let qk = q.powi(beta + k0);
            for (a, l) in self.amps.iter().zip(&self.op.lambda) {
                let den = Complex::one(self.p) - l * q;
                inner += &(a * &l.powi(k0 - 1)) * &qk / den;
            }
            total += c * &inner;
        }
        total.re
    }

    /// `sum_{gamma=0}^{N} D(beta - gamma) f_gamma` by direct summation.
    fn middle(&self, beta: i64, f: &[Real]) -> Real {
        let mut acc = self.p.zero();
        for (g, v) in f.iter().enumerate() {
            acc += self.dv(beta - g as i64) * v;
        }
        acc
    }

    /// `sum_{|k| <= K} D(k) u(beta - k)` for a tabulated `u`.
    fn truncated(&self, beta: i64, len: i64, u: &dyn Fn(i64) -> Real) -> Real {
        let mut acc = self.dv(0) * u(beta);
        for k in 1..=len {
            acc += self.dv(k) * (u(beta - k) + u(beta + k));
        }
        acc
    }
}

/// Result of the Sobolev route.
#[derive(Clone, Debug)]
pub struct SobolevSolution {
    pub rule: QuadratureRule,
    pub u: UFunction,
    /// Lagrange multipliers `d = (d+ + d-)/2`.
    pub multipliers: MultiplierSet,
    pub multipliers_real: Vec<Real>,
    /// Tail coefficients `b = (d+ - d-)/2`.
    pub tail_coefficients: MultiplierSet,
    /// Worst boundary-equation residual relative to the magnitude of its terms.
    pub boundary_residual: f64,
    pub mode: TailMode,
}

fn boundary_rows(n: i64, m: i64) -> Vec<i64> {
    (1..=m).map(|j| -j).chain((1..=m).map(|j| n + j)).collect()
}

fn combine(base: &ExpSum, basis: &[ExpSum], d: &[Real]) -> ExpSum {
    basis.iter().zip(d).fold(base.clone(), |acc, (b, di)| acc.extend(b.scaled(di)))
}

/// Tabulates `phi(gamma)` for `gamma` in `lo..=hi` by powers of the generators.
fn tabulate(gens: &[(Complex, Complex)], lo: i64, hi: i64, p: Precision) -> Vec<Real> {
    let mut out = vec![p.zero(); (hi - lo + 1) as usize];
    for (c, q) in gens {
        let mut z = c * &q.powi(lo);
        for v in out.iter_mut() {
            *v += &z.re;
            z = &z * q;
        }
    }
    out
}

struct Setup {
    f: Vec<Real>,
    q_left: ExpSum,
    q_right: ExpSum,
    basis: Vec<ExpSum>,
}

fn setup(config: &ProblemConfig) -> Setup {
    let p = config.precision;
    let green = GreenFunction { m: config.m };
    let f = green.f_table(config);
    let q = q_exp_sum(config.m, p);
    let two_m = p.int(2 * config.m as i64);
    Setup {
        f,
        q_left: q.scaled(&(-two_m.recip())),
        q_right: q.scaled(&two_m.recip()),
        basis: basis_exp_sums(config.m, p),
    }
}

fn solve_system(a: &Matrix, b: &[Real]) -> Result<(Vec<Real>, f64)> {
    let lu = Lu::factor(a)?;
    let p = b[0].precision();
    let cond = lu.condition_estimate(a.norm1(), p);
    if !cond.is_finite() || cond * p.epsilon() > 1e-3 {
        return Err(Error::Singular { condition: cond });
    }
    let x = lu.solve(b);
    let mut worst: f64 = 0.0;
    for i in 0..a.n {
        let mut r = -b[i].clone();
        let mut mag = b[i].abs().to_f64();
        for j in 0..a.n {
            let t = a.get(i, j) * &x[j];
            mag += t.abs().to_f64();
            r += t;
        }
        if mag > 0.0 {
            worst = worst.max(r.abs().to_f64() / mag);
        }
    }
    Ok((x, worst))
}

/// Solves the `2m` boundary equations for `d-` and `d+`.
pub fn solve_boundary(config: &ProblemConfig, op: &DiscreteOperator) -> Result<SplitMultipliers> {
    Ok(boundary(config, op, &setup(config), TailMode::Analytic)?.0)
}

fn boundary(
    config: &ProblemConfig,
    op: &DiscreteOperator,
    s: &Setup,
    mode: TailMode,
) -> Result<(SplitMultipliers, f64)> {
    check_pair(config, op)?;
    let m = config.m as usize;
    let n = config.n as i64;
    let p = config.precision;
    let h = config.h_real();
    let rows = boundary_rows(n, m as i64);
    let mut a = Matrix::zeros(2 * m, p);
    let mut b = Vec::with_capacity(2 * m);
    match mode {
        TailMode::Analytic => {
            let conv = Conv::new(config, op, (n + 2 * m as i64 + 2) as usize);
            let ql = s.q_left.generators(&h);
            let qr = s.q_right.generators(&h);
            conv.check(&ql, true)?;
            conv.check(&qr, false)?;
            let bg: Vec<_> = s.basis.iter().map(|e| e.generators(&h)).collect();
            for (row, &beta) in rows.iter().enumerate() {
                for (i, g) in bg.iter().enumerate() {
                    a.set(row, i, conv.left(beta, g));
                    a.set(row, m + i, conv.right(beta, g));
                }
                let known = conv.left(beta, &ql) + conv.middle(beta, &s.f) + conv.right(beta, &qr);
                b.push(-known);
            }
        }
        TailMode::Truncated => {
            let len = op.tail_length(1.0, m + 1)? as i64;
            let conv = Conv::new(config, op, (n + len + 2 * m as i64 + 2) as usize);
            let lo = -(len + m as i64 + 1);
            let hi = n + len + m as i64 + 1;
            let zero_mid = |tab: Vec<Real>, keep_left: bool| -> Vec<Real> {
                tab.into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let g = lo + i as i64;
                        let inside = if keep_left { g < 0 } else { g > n };
                        if inside {
                            v
                        } else {
                            p.zero()
                        }
                    })
                    .collect()
            };
            let known = {
                let l = zero_mid(tabulate(&s.q_left.generators(&h), lo, hi, p), true);
                let r = zero_mid(tabulate(&s.q_right.generators(&h), lo, hi, p), false);
                let mut t: Vec<Real> = l.iter().zip(&r).map(|(x, y)| x + y).collect();
                for (g, v) in s.f.iter().enumerate() {
                    t[(g as i64 - lo) as usize] = v.clone();
                }
                t
            };
            let cols: Vec<(Vec<Real>, Vec<Real>)> = s
                .basis
                .iter()
                .map(|e| {
                    let t = tabulate(&e.generators(&h), lo, hi, p);
                    (zero_mid(t.clone(), true), zero_mid(t, false))
                })
                .collect();
            for (row, &beta) in rows.iter().enumerate() {
                for (i, (l, r)) in cols.iter().enumerate() {
                    a.set(row, i, conv.truncated(beta, len, &|g| l[(g - lo) as usize].clone()));
                    a.set(row, m + i, conv.truncated(beta, len, &|g| r[(g - lo) as usize].clone()));
                }
                b.push(-conv.truncated(beta, len, &|g| known[(g - lo) as usize].clone()));
            }
        }
    }
    let (x, resid) = solve_system(&a, &b)?;
    Ok((SplitMultipliers { dminus: x[..m].to_vec(), dplus: x[m..].to_vec() }, resid))
}

fn check_pair(config: &ProblemConfig, op: &DiscreteOperator) -> Result<()> {
    if op.m != config.m {
        return Err(Error::Integrity(format!("operator order {} does not match m = {}", op.m, config.m)));
    }
    let gap = (&op.h - config.h_real()).abs().to_f64();
    if gap > 1e-15 {
        return Err(Error::Integrity(format!("operator step differs from 1/N by {gap:e}")));
    }
    Ok(())
}

/// Builds `u_m` with solved split multipliers.
pub fn u_function(config: &ProblemConfig, op: &DiscreteOperator) -> Result<UFunction> {
    let s = setup(config);
    let (split, _) = boundary(config, op, &s, TailMode::Analytic)?;
    Ok(make_u(config, s, split))
}

fn make_u(config: &ProblemConfig, s: Setup, split: SplitMultipliers) -> UFunction {
    let left = combine(&s.q_left, &s.basis, &split.dminus);
    let right = combine(&s.q_right, &s.basis, &split.dplus);
    UFunction { config: *config, f_values: s.f, split, left, right }
}

pub fn weights(config: &ProblemConfig, op: &DiscreteOperator) -> Result<QuadratureRule> {
    Ok(solve(config, op, TailMode::Analytic)?.rule)
}

/// Operator plus analytic-tail weights for a configuration.
pub fn solve_config(config: &ProblemConfig) -> Result<SobolevSolution> {
    let op = DiscreteOperator::for_config(config)?;
    solve(config, &op, TailMode::Analytic)
}

pub fn solve(config: &ProblemConfig, op: &DiscreteOperator, mode: TailMode) -> Result<SobolevSolution> {
    let s = setup(config);
    let (split, boundary_residual) = boundary(config, op, &s, mode)?;
    let u = make_u(config, s, split);
    let c = match mode {
        TailMode::Analytic => analytic_weights(config, op, &u)?,
        TailMode::Truncated => truncated_weights(config, op, &u)?,
    };
    let m = config.m;
    let (d, b) = u.split.recombine_real();
    Ok(SobolevSolution {
        rule: QuadratureRule::new(*config, Method::Sobolev, c)?,
        multipliers: MultiplierSet::from_real(m, &d)?,
        multipliers_real: d,
        tail_coefficients: MultiplierSet::from_real(m, &b)?,
        boundary_residual,
        u,
        mode,
    })
}

/// `C_beta` for `beta = 0..N` in `O(N m)`.
fn analytic_weights(config: &ProblemConfig, op: &DiscreteOperator, u: &UFunction) -> Result<Vec<Real>> {
    let n = config.n;
    let ni = n as i64;
    let p = config.precision;
    let h = config.h_real();
    let conv = Conv::new(config, op, 2);
    let gl = u.left.generators(&h);
    let gr = u.right.generators(&h);
    conv.check(&gl, true)?;
    conv.check(&gr, false)?;
    let f = &u.f_values;
    let roots = &op.lambda;

    // sum_{gamma <= -1} for beta >= 1 is Re sum_n alpha_n lambda_n^beta, and
    // sum_{gamma >= N+1} for beta <= N-1 is Re sum_n rho_n lambda_n^{N-beta}.
    let alpha: Vec<Complex> = conv
        .amps
        .iter()
        .zip(roots)
        .map(|(a, l)| {
            gl.iter().fold(Complex::zero(p), |acc, (c, q)| acc + &(c * a) / (q - l))
        })
        .collect();
    let rho: Vec<Complex> = conv
        .amps
        .iter()
        .zip(roots)
        .map(|(a, l)| {
            gr.iter().fold(Complex::zero(p), |acc, (c, q)| {
                let num = &(c * a) * &q.powi(ni + 1);
                acc + num / (Complex::one(p) - l * q)
            })
        })
        .collect();

    let mut tail_left = vec![p.zero(); n + 1];
    let mut tail_right = vec![p.zero(); n + 1];
    tail_left[0] = conv.left(0, &gl);
    tail_right[n] = conv.right(ni, &gr);
    let mut pw: Vec<Complex> = roots.to_vec();
    for beta in 1..=n {
        let mut v = p.zero();
        for (a, l) in alpha.iter().zip(&pw) {
            v += (a * l).re;
        }
        tail_left[beta] = v;
        let mut w = p.zero();
        for (r, l) in rho.iter().zip(&pw) {
            w += (r * l).re;
        }
        tail_right[n - beta] = w;
        for (x, l) in pw.iter_mut().zip(roots) {
            *x = &*x * l;
        }
    }

    // Interior sum by first-order recursions in each root.
    let mut inner_fwd = vec![p.zero(); n + 1];
    let mut inner_bwd = vec![p.zero(); n + 1];
    let mut s: Vec<Complex> = vec![Complex::zero(p); roots.len()];
    for beta in 2..=n {
        let mut v = p.zero();
        for ((x, l), a) in s.iter_mut().zip(roots).zip(&conv.amps) {
            let mut t = x.clone();
            t.re += &f[beta - 2];
            *x = &t * l;
            v += (a * &*x).re;
        }
        inner_fwd[beta] = v;
    }
    let mut t: Vec<Complex> = vec![Complex::zero(p); roots.len()];
    for beta in (0..n.saturating_sub(1)).rev() {
        let mut v = p.zero();
        for ((x, l), a) in t.iter_mut().zip(roots).zip(&conv.amps) {
            let mut y = x.clone();
            y.re += &f[beta + 2];
            *x = &y * l;
            v += (a * &*x).re;
        }
        inner_bwd[beta] = v;
    }

    let (d0, d1) = (conv.dv(0).clone(), conv.dv(1).clone());
    let mut out = Vec::with_capacity(n + 1);
    for beta in 0..=n {
        let mut c = &d0 * &f[beta];
        if beta >= 1 {
            c += &d1 * &f[beta - 1];
        }
        if beta < n {
            c += &d1 * &f[beta + 1];
        }
        c += &inner_fwd[beta];
        c += &inner_bwd[beta];
        c += &tail_left[beta];
        c += &tail_right[beta];
        out.push(c);
    }
    Ok(out)
}

fn truncated_weights(config: &ProblemConfig, op: &DiscreteOperator, u: &UFunction) -> Result<Vec<Real>> {
    let n = config.n as i64;
    let p = config.precision;
    let h = config.h_real();
    let len = op.tail_length(1.0, 1)? as i64;
    let conv = Conv::new(config, op, (len + 1) as usize);
    let lo = -len - 1;
    let hi = n + len + 1;
    let left = tabulate(&u.left.generators(&h), lo, -1, p);
    let right = tabulate(&u.right.generators(&h), n + 1, hi, p);
    let table = |g: i64| -> Real {
        if g < 0 {
            left[(g - lo) as usize].clone()
        } else if g > n {
            right[(g - n - 1) as usize].clone()
        } else {
            u.f_values[g as usize].clone()
        }
    };
    Ok((0..=n).map(|beta| conv.truncated(beta, len, &table)).collect())
}

/// `(D_m * u_m)(h beta)` at any `beta`, with analytic tails.
pub fn coefficient_at(config: &ProblemConfig, op: &DiscreteOperator, u: &UFunction, beta: i64) -> Result<Real> {
    let n = config.n as i64;
    let h = config.h_real();
    let conv = Conv::new(config, op, (beta.abs() + n + 2) as usize);
    let gl = u.left.generators(&h);
    let gr = u.right.generators(&h);
    conv.check(&gl, true)?;
    conv.check(&gr, false)?;
    Ok(conv.left(beta, &gl) + conv.middle(beta, &u.f_values) + conv.right(beta, &gr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{p_value_real, q_value_real};

    #[test]
    fn exp_sums_reproduce_q_and_basis() {
        let p = Precision::new(192);
        for m in [1u32, 3, 5] {
            let q = q_exp_sum(m, p);
            let basis = basis_exp_sums(m, p);
            for &x in &[-0.7, -0.1, 0.0, 0.4, 1.3] {
                let xr = p.real(x);
                assert!((q.eval(&xr) - q_value_real(m, &xr)).abs().to_f64() < 1e-50);
                for (e, b) in basis.iter().zip(exactness_basis(m)) {
                    assert!((e.eval(&xr) - b.eval_real(&xr)).abs().to_f64() < 1e-50);
                }
            }
        }
    }

    #[test]
    fn u_branches() {
        let config = ProblemConfig::new(1, 10).unwrap();
        let op = DiscreteOperator::for_config(&config).unwrap();
        let u = u_function(&config, &op).unwrap();
        let f0 = (1f64.cosh() - 1.0) / 2.0;
        assert!((u.value(0) - f0).abs() < 1e-15);
        assert!((u.value(10) - crate::kernel::f_value(1, 1.0)).abs() < 1e-15);
        let x = config.node_real(-1);
        let want = -q_value_real(1, &x) / 2.0 + p_value_real(1, &x, &u.split.dminus);
        assert!((u.value_real(-1) - want).abs().to_f64() < 1e-30);
        assert_eq!(u.split.dminus.len(), 1);
    }

    #[test]
    fn analytic_and_truncated_tails_agree() {
        for (m, n) in [(1u32, 7usize), (3, 6), (5, 12)] {
            let config = ProblemConfig::new(m, n).unwrap();
            let op = DiscreteOperator::for_config(&config).unwrap();
            let a = solve(&config, &op, TailMode::Analytic).unwrap();
            let t = solve(&config, &op, TailMode::Truncated).unwrap();
            let diff = a.rule.max_difference(&t.rule);
            assert!(diff < 1e-12, "m={m} N={n}: {diff:e}");
        }
    }

    #[test]
    fn mismatched_operator() {
        let config = ProblemConfig::new(3, 10).unwrap();
        let op = DiscreteOperator::with_step(3, 0.2, config.precision).unwrap();
        assert!(matches!(weights(&config, &op), Err(Error::Integrity(_))));
    }
}

//! Explicit weights for `m = 1` and `m = 3`.

use crate::error::{Error, Result};
use crate::kernel::ProblemConfig;
use crate::linalg::{Lu, Matrix};
use crate::real::{Precision, Real};
use crate::rule::{Method, QuadratureRule};

/// `C_0 = C_N = (e^h - 1)/(e^h + 1)`, interior weights twice that.
pub fn weights_m1(n: usize) -> Result<QuadratureRule> {
    let config = ProblemConfig::new(1, n)?;
    weights_m1_config(&config)
}

pub fn weights_m1_config(config: &ProblemConfig) -> Result<QuadratureRule> {
    if config.m != 1 {
        return Err(Error::NoClosedForm { m: config.m });
    }
    let eh = config.h_real().exp();
    let end = (&eh - 1.0) / (&eh + 1.0);
    let inner = &end * 2.0;
    let n = config.n;
    let weights = (0..=n).map(|b| if b == 0 || b == n { end.clone() } else { inner.clone() }).collect();
    QuadratureRule::new(*config, Method::ClosedFormM1, weights)
}

/// Auxiliary quantities of the `m = 3` formula.
#[derive(Clone, Debug)]
pub struct M3Parameters {
    pub tau1: Real,
    pub tau2: Real,
    pub t: Real,
    pub kc: Real,
    pub k1c: Real,
    pub k2c: Real,
    pub m1: Real,
    pub m2: Real,
    pub n1: Real,
    pub n2: Real,
    pub a11: Real,
    pub a12: Real,
    pub a21: Real,
    pub a22: Real,
    pub b11: Real,
    pub b12: Real,
    pub b21: Real,
    pub b22: Real,
    pub t1: Real,
    pub t2: Real,
    /// Worst row residual of the 4x4 system relative to its term magnitudes.
    pub system_residual: f64,
    pub condition: f64,
}

impl M3Parameters {
    pub fn compute(config: &ProblemConfig) -> Result<Self> {
        if config.m != 3 {
            return Err(Error::NoClosedForm { m: config.m });
        }
        let p = config.precision;
        let h = config.h_real();
        let n = config.n as i64;
        let r3 = p.int(3).sqrt();
        let (ch, sh) = (h.cosh(), h.sinh());
        let half = &h / 2.0;
        let (ch2, sh2) = (half.cosh(), half.sinh());
        let (c3, s3) = ((&r3 * &half).cos(), (&r3 * &half).sin());
        let (c3f, s3f) = ((&r3 * &h).cos(), (&r3 * &h).sin());

        let kc = &sh + &sh2 * &c3 - &r3 * &ch2 * &s3;
        let k1c = &ch * 2.0
            + (&c3 * &ch2 * &sh * 4.0 + &sh - &r3 * &s3f - &sh * &ch * 2.0) / &kc;
        let k2c = (&c3f * &sh * 2.0 + &sh * &ch * 4.0 - &r3 * &s3f * &ch * 2.0) / &kc + 2.0;

        let disc = |x: &Real| -> Result<Real> {
            if x.is_negative() {
                return Err(Error::Integrity(format!("complex tau (discriminant {})", x.to_f64())));
            }
            Ok(x.sqrt())
        };
        let s = disc(&(&k1c * &k1c - &k2c * 4.0 + 8.0))?;
        let u1 = &k1c + &s;
        let u2 = &k1c - &s;
        let tau1 = (&u1 + disc(&(&u1 * &u1 - 16.0))?) / 4.0;
        let tau2 = (&u2 + disc(&(&u2 * &u2 - 16.0))?) / 4.0;
        for (i, tau) in [&tau1, &tau2].into_iter().enumerate() {
            let modulus = tau.abs().to_f64();
            if modulus >= 1.0 {
                return Err(Error::Unstable { index: i + 1, modulus });
            }
        }

        let t = (&ch - 1.0) * (&c3 - &ch2) * (&c3 - &ch2) * 24.0 / (&kc * (&k2c + 2.0 - &k1c * 2.0));
        let eh = h.exp();
        let e2 = half.exp();
        let one = p.one();
        let q = |x: &Real| &one - x * &e2 * &c3 * 2.0 + x * x * &eh;
        let a1 = |x: &Real| x * &e2 * &s3 / q(x);
        let a2 = |x: &Real| &eh / (&eh - x) + (x * &e2 * &c3 - 1.0) / q(x);
        let qb = |x: &Real| x * x - x * &e2 * &c3 * 2.0 + &eh;
        let b1 = |x: &Real| x * &e2 * &s3 / qb(x);
        let b2 = |x: &Real| &eh * x / (&eh * x - 1.0) + (x * &e2 * &c3 - x * x) / qb(x);
        let t1 = &r3 / 2.0 - &t * &e2 * &s3 / q(&one);
        let t2 = p.ratio(3, 2) - &t * &eh / (&eh - 1.0) - (&t * &e2 * &c3 - &t) / q(&one);

        let (p1, p2) = (tau1.powi(n), tau2.powi(n));
        let (a11, a12, a21, a22) = (a1(&tau1), a1(&tau2), a2(&tau1), a2(&tau2));
        let (b11, b12, b21, b22) = (b1(&tau1), b1(&tau2), b2(&tau1), b2(&tau2));
        let rows = [
            [a11.clone(), a12.clone(), &p1 * &b11, &p2 * &b12],
            [a21.clone(), a22.clone(), &p1 * &b21, &p2 * &b22],
            [&p1 * &a11, &p2 * &a12, b11.clone(), b12.clone()],
            [&p1 * &a21, &p2 * &a22, b21.clone(), b22.clone()],
        ];
        let mut mat = Matrix::zeros(4, p);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                mat.set(i, j, v.clone());
            }
        }
        let rhs = [t1.clone(), t2.clone(), t1.clone(), t2.clone()];
        let lu = Lu::factor(&mat)?;
        let condition = lu.condition_estimate(mat.norm1(), p);
        let x = lu.solve(&rhs);
        let system_residual = residual(&rows, &x, &rhs);
        let mut it = x.into_iter();
        let mut next = || it.next().expect("4 unknowns");
        let (m1, m2, n1, n2) = (next(), next(), next(), next());
        Ok(M3Parameters {
            tau1,
            tau2,
            t,
            kc,
            k1c,
            k2c,
            m1,
            m2,
            n1,
            n2,
            a11,
            a12,
            a21,
            a22,
            b11,
            b12,
            b21,
            b22,
            t1,
            t2,
            system_residual,
            condition,
        })
    }

    /// Whether the 4x4 system is ill-conditioned enough to warrant a warning.
    pub fn ill_conditioned(&self, p: Precision) -> bool {
        self.condition * p.epsilon() / f64::EPSILON > 1e10
    }
}

fn residual(rows: &[[Real; 4]; 4], x: &[Real], rhs: &[Real; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for (row, b) in rows.iter().zip(rhs) {
        let mut r = -b.clone();
        let mut mag = b.abs().to_f64();
        for (a, v) in row.iter().zip(x) {
            let t = a * v;
            mag += t.abs().to_f64();
            r += t;
        }
        worst = worst.max(r.abs().to_f64() / mag.max(f64::MIN_POSITIVE));
    }
    worst
}

pub fn weights_m3(n: usize) -> Result<QuadratureRule> {
    let config = ProblemConfig::new(3, n)?;
    Ok(weights_m3_config(&config)?.0)
}

pub fn weights_m3_config(config: &ProblemConfig) -> Result<(QuadratureRule, M3Parameters)> {
    let par = M3Parameters::compute(config)?;
    if par.system_residual > 1e-12 {
        return Err(Error::Integrity(format!("4x4 system residual {:e}", par.system_residual)));
    }
    let n = config.n;
    let ni = n as i64;
    let eh = config.h_real().exp();
    let (t1, t2) = (&par.tau1, &par.tau2);
    let (p1, p2) = (t1.powi(ni), t2.powi(ni));
    let one = config.precision.one();
    let mut w = Vec::with_capacity(n + 1);
    w.push(
        &one - (&par.t / (&eh - 1.0)
            + &par.m1 * t1 / (&eh - t1)
            + &par.m2 * t2 / (&eh - t2)
            + &par.n1 * &p1 / (t1 * &eh - 1.0)
            + &par.n2 * &p2 / (t2 * &eh - 1.0)),
    );
    // Interior: T + m_k tau_k^b + n_k tau_k^(N-b), powers built incrementally.
    let mut up = [t1.clone(), t2.clone()];
    let mut down = vec![[one.clone(), one.clone()]; n + 1];
    for b in 1..=n {
        down[b] = [&down[b - 1][0] * t1, &down[b - 1][1] * t2];
    }
    for b in 1..n {
        let d = &down[n - b];
        w.push(&par.t + &par.m1 * &up[0] + &par.m2 * &up[1] + &par.n1 * &d[0] + &par.n2 * &d[1]);
        up = [&up[0] * t1, &up[1] * t2];
    }
    if n >= 1 {
        w.push(
            -one.clone()
                + &eh
                    * (&par.t / (&eh - 1.0)
                        + &par.m1 * &p1 / (&eh - t1)
                        + &par.m2 * &p2 / (&eh - t2)
                        + &par.n1 * t1 / (t1 * &eh - 1.0)
                        + &par.n2 * t2 / (t2 * &eh - 1.0)),
        );
    }
    Ok((QuadratureRule::new(*config, Method::ClosedFormM3, w)?, par))
}

/// Closed-form weights for whichever order has one.
pub fn weights_config(config: &ProblemConfig) -> Result<QuadratureRule> {
    match config.m {
        1 => weights_m1_config(config),
        3 => Ok(weights_m3_config(config)?.0),
        m => Err(Error::NoClosedForm { m }),
    }
}

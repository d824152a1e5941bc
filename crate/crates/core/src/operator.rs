//! Discrete analogue `D_m(h beta)` of `d^{2m}/dx^{2m} - 1`.
//!
//! For `|beta| >= 2`, `D_m(h beta) = (m/K) sum_n A_n lambda_n^{|beta|-1}`, where
//! `lambda_n` are the `m-1` roots inside the unit disk of a reciprocal
//! polynomial of degree `2m-2`. All roots are found together by Aberth
//! iteration at working precision.

use crate::error::{Error, Result};
use crate::kernel::{angle, check_order, GreenFunction, ProblemConfig};
use crate::poly::Poly;
use crate::real::{Complex, Precision, Real};

const UNIT_CIRCLE_GAP: f64 = 1e-8;
const MAX_ABERTH_STEPS: usize = 500;

/// Generating coefficients `a1_k`, `a2_k`, `b1_k`, `b2_k`, `k = 1..(m-1)/2`.
#[derive(Clone, Debug)]
pub struct OperatorCoefficients {
    pub h: Real,
    pub a1: Vec<Real>,
    pub a2: Vec<Real>,
    pub b1: Vec<Real>,
    pub b2: Vec<Real>,
}

impl OperatorCoefficients {
    pub fn compute(m: u32, h: &Real) -> Self {
        let p = h.precision();
        let pairs = (m - 1) / 2;
        let mut out = OperatorCoefficients {
            h: h.clone(),
            a1: Vec::new(),
            a2: Vec::new(),
            b1: Vec::new(),
            b2: Vec::new(),
        };
        for k in 1..=pairs {
            let th = p.pi() * p.ratio(k as i64, m as i64);
            let (c, s) = (th.cos(), th.sin());
            let hc = h * &c;
            let hs = h * &s;
            let h2c = &hc * 2.0;
            let h2s = &hs * 2.0;
            out.a1.push((&c * hs.cos() * hc.sinh() - &s * hs.sin() * hc.cosh()) * 2.0);
            out.a2.push(-((&c * h2c.sinh() - &s * h2s.sin()) * 2.0));
            out.b1.push(-(hs.cos() * hc.cosh() * 4.0));
            out.b2.push((h2s.cos() + h2c.cosh() + 1.0) * 2.0);
        }
        out
    }

    /// `lambda^4 + b1 lambda^3 + b2 lambda^2 + b1 lambda + 1`.
    fn quartic(&self, k: usize) -> Poly {
        let p = self.h.precision();
        Poly::new(vec![p.one(), self.b1[k].clone(), self.b2[k].clone(), self.b1[k].clone(), p.one()])
    }
}

#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub m: u32,
    pub h: Real,
    pub coefficients: OperatorCoefficients,
    /// Roots with `|lambda| < 1`, sorted by modulus.
    pub lambda: Vec<Complex>,
    pub amplitudes: Vec<Complex>,
    /// All `2m-2` roots of `poly_p`, sorted by modulus.
    pub all_roots: Vec<Complex>,
    pub k: Real,
    pub k1: Real,
    pub m1: Real,
    pub poly_b: Poly,
    /// Degree `2m-2`, leading and trailing coefficient `K`.
    pub poly_p: Poly,
    rho: f64,
    decay: f64,
}

impl DiscreteOperator {
    pub fn build(m: u32, h: &Real) -> Result<Self> {
        check_order(m)?;
        let hf = h.to_f64();
        if !(hf > 0.0 && hf <= 1.0) {
            return Err(Error::InvalidStep { h: hf });
        }
        let p = h.precision();
        let co = OperatorCoefficients::compute(m, h);
        let pairs = co.a1.len();
        let (sh, ch) = (h.sinh(), h.cosh());

        let k = co.a1.iter().fold(sh.clone(), |acc, a| acc + a);
        let b1_sum = co.b1.iter().fold(p.zero(), |acc, b| acc + b);
        let mut k1 = p.zero();
        for j in 0..pairs {
            let others = &b1_sum - &co.b1[j];
            k1 += &co.b1[j] * &sh + &co.a2[j] + &co.a1[j] * (others - &ch * 2.0);
        }
        let m1 = &b1_sum - &ch * 2.0;

        let quartics: Vec<Poly> = (0..pairs).map(|j| co.quartic(j)).collect();
        let poly_b = quartics.iter().fold(Poly::one(p), |acc, q| acc.mul(q));
        let w = Poly::new(vec![p.one(), -(&ch * 2.0), p.one()]);
        let mut poly_p = poly_b.scale(&sh);
        for j in 0..pairs {
            let mut t = w.mul(&Poly::new(vec![co.a1[j].clone(), co.a2[j].clone(), co.a1[j].clone()]));
            for (i, q) in quartics.iter().enumerate() {
                if i != j {
                    t = t.mul(q);
                }
            }
            poly_p = poly_p.add(&t);
        }
        let lead_gap = (poly_p.leading() - &k).abs().to_f64();
        if lead_gap > 1e-20 * k.abs().to_f64() {
            return Err(Error::Integrity(format!("leading coefficient differs from K by {lead_gap:e}")));
        }

        let all_roots = find_roots(&poly_p)?;
        let inside: Vec<Complex> = all_roots.iter().filter(|r| r.abs().to_f64() < 1.0).cloned().collect();
        let expected = m as usize - 1;
        if expected > 0 {
            let moduli: Vec<f64> = all_roots.iter().map(|r| r.abs().to_f64()).collect();
            let inner = moduli[expected - 1];
            let outer = moduli[expected];
            if inner > 1.0 - UNIT_CIRCLE_GAP || outer < 1.0 + UNIT_CIRCLE_GAP {
                let modulus = if inner > 1.0 - UNIT_CIRCLE_GAP { inner } else { outer };
                return Err(Error::DegenerateStep { modulus });
            }
        }
        if inside.len() != expected {
            return Err(Error::RootPairing { inside: inside.len(), expected });
        }

        let dp = poly_p.derivative();
        let amplitudes: Vec<Complex> = inside
            .iter()
            .map(|l| {
                let num = w.eval_complex(l) * poly_b.eval_complex(l);
                (num / (l * &dp.eval_complex(l))).scale(&k)
            })
            .collect();

        let rho = inside.iter().map(|l| l.abs().to_f64()).fold(0.0, f64::max);
        let scale = (p.int(m as i64) / &k).abs().to_f64();
        let decay = scale * amplitudes.iter().map(|a| a.abs().to_f64()).sum::<f64>();
        Ok(DiscreteOperator {
            m,
            h: h.clone(),
            coefficients: co,
            lambda: inside,
            amplitudes,
            all_roots,
            k,
            k1,
            m1,
            poly_b,
            poly_p,
            rho,
            decay,
        })
    }

    /// Operator for `h = 1/N` at the configuration's precision.
    pub fn for_config(config: &ProblemConfig) -> Result<Self> {
        Self::build(config.m, &config.h_real())
    }

    /// Operator for a double-precision step, at precision `p`.
    pub fn with_step(m: u32, h: f64, p: Precision) -> Result<Self> {
        Self::build(m, &p.real(h))
    }

    pub fn precision(&self) -> Precision {
        self.h.precision()
    }

    fn scale(&self) -> Real {
        self.precision().int(self.m as i64) / &self.k
    }

    /// Raw complex value before the imaginary part is discarded.
    pub fn value_complex(&self, beta: i64) -> Complex {
        let p = self.precision();
        let b = beta.unsigned_abs() as i64;
        let mut acc = Complex::zero(p);
        match b {
            0 => {
                acc.re = &self.m1 - &self.k1 / &self.k;
                for (a, l) in self.amplitudes.iter().zip(&self.lambda) {
                    acc += a / l;
                }
            }
            1 => {
                acc.re = p.one();
                for a in &self.amplitudes {
                    acc += a;
                }
            }
            _ => {
                for (a, l) in self.amplitudes.iter().zip(&self.lambda) {
                    acc += a * &l.powi(b - 1);
                }
            }
        }
        acc.scale(&self.scale())
    }

    pub fn value_real(&self, beta: i64) -> Real {
        self.value_complex(beta).re
    }

    pub fn value(&self, beta: i64) -> f64 {
        self.value_real(beta).to_f64()
    }

    /// `D_m(h k)` for `k = 0..=kmax`.
    pub fn values_upto(&self, kmax: usize) -> Vec<Real> {
        let mut out = Vec::with_capacity(kmax + 1);
        out.push(self.value_real(0));
        if kmax >= 1 {
            out.push(self.value_real(1));
        }
        let s = self.scale();
        let mut terms: Vec<Complex> = self.amplitudes.iter().map(|a| a.scale(&s)).collect();
        for _ in 2..=kmax {
            for (t, l) in terms.iter_mut().zip(&self.lambda) {
                *t = &*t * l;
            }
            let mut v = self.precision().zero();
            for t in &terms {
                v += &t.re;
            }
            out.push(v);
        }
        out
    }

    /// Largest root modulus `rho`.
    pub fn spectral_radius(&self) -> f64 {
        self.rho
    }

    /// `c` with `|D_m(h beta)| <= c rho^{|beta|-1}` for `|beta| >= 2`.
    pub fn decay_constant(&self) -> f64 {
        self.decay
    }

    /// `max_n |P(1/lambda_n)| / max|coeff|`.
    pub fn reciprocal_residual(&self) -> f64 {
        let scale = self.poly_p.max_abs();
        self.lambda
            .iter()
            .map(|l| self.poly_p.eval_complex(&l.recip()).abs().to_f64() / scale)
            .fold(0.0, f64::max)
    }

    /// `max_{0 <= beta <= upto} |Im D| / (1 + |Re D|)`.
    pub fn imaginary_residue(&self, upto: usize) -> f64 {
        (0..=upto as i64)
            .map(|b| {
                let v = self.value_complex(b);
                v.im.abs().to_f64() / (1.0 + v.re.abs().to_f64())
            })
            .fold(0.0, f64::max)
    }

    /// `rho e^{rate h}` must stay below one for a convolution against a
    /// function growing like `e^{rate x}` to converge.
    fn tail_ratio(&self, rate: f64) -> Result<f64> {
        let r = self.spectral_radius() * (rate * self.h.to_f64()).exp();
        if r >= 1.0 {
            return Err(Error::Integrity(format!(
                "convolution tail does not converge (rho e^(rate h) = {r})"
            )));
        }
        Ok(r)
    }

    /// Number of `D_m` values needed before the tail of a convolution against
    /// a function bounded by `e^{rate |x|}` drops below working precision.
    pub(crate) fn tail_length(&self, rate: f64, window: usize) -> Result<usize> {
        let r = self.tail_ratio(rate)?;
        if self.lambda.is_empty() {
            return Ok(window + 2);
        }
        let c = self.decay_constant().max(1.0) / (1.0 - r);
        let need = ((self.precision().epsilon().ln() - c.ln() - 20.0) / r.ln()).ceil();
        Ok(need.max(0.0) as usize + 2 * window + 4)
    }

    /// Adaptive `sum_gamma D(gamma) phi(beta - gamma)` with
    /// `|phi(x)| <= e^{rate |x|}`, stopping once the geometric bound on the rest
    /// falls below working precision relative to the accumulated magnitude.
    fn convolve(&self, beta: i64, d: &[Real], phi: &dyn Fn(i64) -> Real, rate: f64) -> Result<Real> {
        let p = self.precision();
        let r = self.tail_ratio(rate)?;
        let c = self.decay_constant();
        let eps = p.epsilon();
        let hf = self.h.to_f64();
        let mut acc = &d[0] * phi(beta);
        let mut mag = acc.abs().to_f64();
        let mut bound = 2.0 * c * (rate * hf * (beta.abs() + 1) as f64).exp() / (1.0 - r);
        for g in 1..d.len() as i64 {
            let t = &d[g as usize] * (phi(beta - g) + phi(beta + g));
            mag += t.abs().to_f64();
            acc += t;
            bound *= r;
            if g >= 2 && (bound <= eps * mag || bound == 0.0) {
                break;
            }
        }
        Ok(acc)
    }

    /// `max_{|beta| <= window} |(D_m * G_m)(h beta) - delta_beta|`.
    pub fn verify_delta(&self, window: usize) -> Result<f64> {
        let len = self.tail_length(1.0, window)?;
        let d = self.values_upto(len);
        let green = GreenFunction { m: self.m };
        let span = len + window + 1;
        let g: Vec<Real> = (0..=span).map(|j| green.value_real(&(&self.h * (j as f64)))).collect();
        let phi = |x: i64| g[x.unsigned_abs() as usize].clone();
        let mut worst: f64 = 0.0;
        for beta in -(window as i64)..=window as i64 {
            let mut v = self.convolve(beta, &d, &phi, 1.0)?;
            if beta == 0 {
                v -= 1.0;
            }
            worst = worst.max(v.abs().to_f64());
        }
        Ok(worst)
    }

    /// The `2m` grid functions that `D_m` annihilates, as `(name, q, take_im)`:
    /// each is `Re q^beta` or `Im q^beta`.
    fn annihilated(&self) -> Vec<(String, Complex, bool)> {
        let p = self.precision();
        let mut out = Vec::new();
        for sign in [1.0, -1.0] {
            let tag = if sign > 0.0 { "+" } else { "-" };
            let q = Complex::from_real((&self.h * sign).exp());
            out.push((format!("exp({tag}x)"), q, false));
            for k in 1..=(self.m - 1) / 2 {
                let t = angle(k, self.m, p);
                let z = Complex::new(&self.h * t.cos() * sign, &self.h * t.sin()).exp();
                out.push((format!("exp({tag}x c{k}) cos"), z.clone(), false));
                out.push((format!("exp({tag}x c{k}) sin"), z, true));
            }
        }
        out
    }

    /// `max` over the `2m` functions of `max_{|beta| <= window} |(D_m * phi)(beta)| / max|phi|`.
    pub fn verify_annihilation(&self, window: usize) -> Result<f64> {
        Ok(self.annihilation_residuals(window)?.into_iter().map(|(_, r)| r).fold(0.0, f64::max))
    }

    /// Per-function normalized residuals.
    pub fn annihilation_residuals(&self, window: usize) -> Result<Vec<(String, f64)>> {
        let len = self.tail_length(1.0, window)?;
        let d = self.values_upto(len);
        let span = (len + window + 1) as i64;
        let mut out = Vec::new();
        for (name, q, take_im) in self.annihilated() {
            let qi = q.recip();
            let mut pos = vec![Complex::one(self.precision())];
            let mut neg = vec![Complex::one(self.precision())];
            for j in 1..=span as usize {
                pos.push(&pos[j - 1] * &q);
                neg.push(&neg[j - 1] * &qi);
            }
            let pick = |z: &Complex| if take_im { z.im.clone() } else { z.re.clone() };
            let phi = |x: i64| if x >= 0 { pick(&pos[x as usize]) } else { pick(&neg[(-x) as usize]) };
            let norm = pos.iter().chain(&neg).map(|z| pick(z).abs().to_f64()).fold(0.0, f64::max);
            let mut worst: f64 = 0.0;
            for beta in -(window as i64)..=window as i64 {
                let v = self.convolve(beta, &d, &phi, 1.0)?;
                worst = worst.max(v.abs().to_f64() / norm);
            }
            out.push((name, worst));
        }
        Ok(out)
    }
}

/// All roots of `poly`, sorted by modulus.
fn find_roots(poly: &Poly) -> Result<Vec<Complex>> {
    let deg = poly.degree();
    if deg == 0 {
        return Ok(Vec::new());
    }
    let p = poly.coeffs[0].precision();
    let dp = poly.derivative();
    let mut z = initial_guesses(poly);
    let tol = p.epsilon() * 64.0;
    for _ in 0..MAX_ABERTH_STEPS {
        let mut settled = true;
        for i in 0..deg {
            let newton = poly.eval_complex(&z[i]) / dp.eval_complex(&z[i]);
            let mut pull = Complex::zero(p);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    pull += (&z[i] - zj).recip();
                }
            }
            let step = &newton / (Complex::one(p) - &newton * &pull);
            if !step.re.is_finite() || !step.im.is_finite() {
                return Err(Error::Integrity("root iteration produced a non-finite step".into()));
            }
            z[i] -= &step;
            if step.abs().to_f64() > tol * z[i].abs().to_f64() {
                settled = false;
            }
        }
        if settled {
            break;
        }
    }
    let scale = poly.max_abs();
    for r in &z {
        let resid = poly.eval_complex(r).abs().to_f64();
        let bound = 1e-14 * scale * r.abs().to_f64().max(1.0).powi(deg as i32);
        if resid.is_nan() || resid > bound {
            return Err(Error::Integrity(format!("root polishing stalled (residual {resid:e})")));
        }
    }
    z.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(z)
}

/// Starting points on circles whose radii come from the upper convex hull of
/// `(i, ln|c_i|)`, so that widely spread root moduli are seeded separately.
fn initial_guesses(poly: &Poly) -> Vec<Complex> {
    let p = poly.coeffs[0].precision();
    let deg = poly.degree();
    let logs: Vec<f64> = poly
        .coeffs
        .iter()
        .map(|c| if c.is_zero() { f64::NEG_INFINITY } else { c.abs().ln().to_f64() })
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for i in (0..=deg).filter(|&i| logs[i].is_finite()) {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b - a) as f64 * (logs[i] - logs[a]) - (i - a) as f64 * (logs[b] - logs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(deg);
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let count = b - a;
        let radius = ((logs[a] - logs[b]) / count as f64).exp();
        for k in 0..count {
            let theta = std::f64::consts::TAU * (k as f64 + 0.25) / count as f64 + 0.4 * a as f64 / deg as f64 + 0.1;
            out.push(Complex::new(p.real(radius * theta.cos()), p.real(radius * theta.sin())));
        }
    }
    out
}

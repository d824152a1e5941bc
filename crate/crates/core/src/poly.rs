use crate::real::{Complex, Precision, Real};

/// Polynomial with coefficients stored from the constant term upward.
#[derive(Clone, Debug)]
pub struct Poly {
    pub coeffs: Vec<Real>,
}

impl Poly {
    pub fn new(coeffs: Vec<Real>) -> Self {
        Poly { coeffs }
    }

    pub fn one(p: Precision) -> Self {
        Poly { coeffs: vec![p.one()] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> &Real {
        self.coeffs.last().expect("non-empty polynomial")
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let p = self.coeffs[0].precision();
        let mut out = vec![p.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly { coeffs: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let p = self.coeffs[0].precision();
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |c: &[Real], i: usize| c.get(i).cloned().unwrap_or_else(|| p.zero());
        Poly { coeffs: (0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect() }
    }

    pub fn scale(&self, s: &Real) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            let p = self.coeffs[0].precision();
            return Poly { coeffs: vec![p.zero()] };
        }
        Poly {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * (i as f64)).collect(),
        }
    }

    pub fn eval(&self, x: &Real) -> Real {
        let mut acc = x.precision().zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let p = z.re.precision();
        let mut acc = Complex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = &acc * z;
            acc.re += c;
        }
        acc
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Real::to_f64).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

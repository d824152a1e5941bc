//! Dense LU with partial pivoting over [`Real`].

use crate::error::{Error, Result};
use crate::real::{Precision, Real};

#[derive(Clone, Debug)]
pub(crate) struct Lu {
    n: usize,
    lu: Vec<Real>,
    perm: Vec<usize>,
}

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub(crate) struct Matrix {
    pub n: usize,
    pub data: Vec<Real>,
}

impl Matrix {
    pub fn zeros(n: usize, p: Precision) -> Self {
        Matrix { n, data: vec![p.zero(); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> &Real {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Real) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[Real]) -> Vec<Real> {
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(x).fold(x[0].precision().zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).to_f64().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[k * n + k].abs();
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best.is_zero() {
                return Err(Error::Singular { condition: f64::INFINITY });
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let inv = lu[k * n + k].recip();
            for i in k + 1..n {
                if lu[i * n + k].is_zero() {
                    continue;
                }
                let l = &lu[i * n + k] * &inv;
                for j in k + 1..n {
                    let t = &l * &lu[k * n + j];
                    lu[i * n + j] -= t;
                }
                lu[i * n + k] = l;
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &[Real]) -> Vec<Real> {
        let n = self.n;
        let mut y: Vec<Real> = self.perm.iter().map(|&i| b[i].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = &self.lu[i * n + j] * &y[j];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = &self.lu[i * n + j] * &y[j];
                y[i] -= t;
            }
            y[i] = &y[i] / &self.lu[i * n + i];
        }
        y
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[Real]) -> Vec<Real> {
        let n = self.n;
        let mut z: Vec<Real> = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let t = &self.lu[j * n + i] * &z[j];
                z[i] -= t;
            }
            z[i] = &z[i] / &self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = &self.lu[j * n + i] * &z[j];
                z[i] -= t;
            }
        }
        let mut x = vec![b[0].precision().zero(); n];
        for (k, &i) in self.perm.iter().enumerate() {
            x[i] = z[k].clone();
        }
        x
    }

    /// Hager's estimate of `||A^{-1}||_1`, times `||A||_1`.
    pub fn condition_estimate(&self, norm1: f64, p: Precision) -> f64 {
        let n = self.n;
        let mut x = vec![p.ratio(1, n as i64); n];
        let mut estimate = 0.0;
        let mut last: Option<usize> = None;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|v| v.to_f64().abs()).sum::<f64>();
            let xi: Vec<Real> = y
                .iter()
                .map(|v| if v.is_negative() { p.int(-1) } else { p.one() })
                .collect();
            let z = self.solve_transpose(&xi);
            let zf: Vec<f64> = z.iter().map(Real::to_f64).collect();
            let (j, zmax) = zf
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bj, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bj, bv) });
            let ztx: f64 = zf.iter().zip(&x).map(|(a, b)| a * b.to_f64()).sum();
            if zmax <= ztx || last == Some(j) {
                break;
            }
            last = Some(j);
            x = vec![p.zero(); n];
            x[j] = p.one();
        }
        estimate * norm1
    }
}

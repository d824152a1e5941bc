#![allow(dead_code, clippy::excessive_precision)]

pub mod frozen;

use std::f64::consts::PI;

/// `G_m` straight from its exp-trig closed form, independent of the library.
pub fn green(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut s = x.sinh();
    for n in 1..m {
        let t = PI * n as f64 / m as f64;
        s += (x * t.cos()).exp() * (x * t.sin() + t).cos();
    }
    x.signum() * s / (2.0 * m as f64)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss-Kronrod 7/15 on `[a, b]`: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let d = r * XGK[i];
        let s = f(c - d) + f(c + d);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth > 40 {
            return v;
        }
        let c = 0.5 * (a + b);
        rec(f, a, c, tol / 2.0, depth + 1) + rec(f, c, b, tol / 2.0, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// `int_0^1 G_m(t - x) dt`, split at the kink.
pub fn f_oracle(m: u32, x: f64) -> f64 {
    let g = |t: f64| green(m, t - x);
    if x > 0.0 && x < 1.0 {
        integrate(&g, 0.0, x, 1e-15) + integrate(&g, x, 1.0, 1e-15)
    } else {
        integrate(&g, 0.0, 1.0, 1e-15)
    }
}

/// `int_0^1 int_0^1 G_m(x - y) dy dx`.
pub fn double_integral_oracle(m: u32) -> f64 {
    integrate(&|x| f_oracle(m, x), 0.0, 1.0, 1e-14)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

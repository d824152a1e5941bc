//! Arbitrary-precision real and complex scalars.
//!
//! [`Real`] wraps an [`astro_float::BigFloat`] and carries its own precision.
//! Binary operations run at the larger precision of the two operands, so a
//! computation seeded from [`Precision::real`] stays at that precision
//! throughout. Literal `f64` operands are widened to the precision of the
//! `Real` they meet.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;
const WORD: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision in bits, always a whole number of 64-bit words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(usize);

impl Precision {
    /// Smallest precision accepted by [`Precision::new`].
    pub const MIN_BITS: usize = 128;

    pub fn new(bits: usize) -> Self {
        let bits = bits.max(Self::MIN_BITS);
        Precision(bits.div_ceil(WORD) * WORD)
    }

    /// Precision sized for an order-`m` problem on `n` intervals.
    ///
    /// The weights come out of sums whose terms are larger than the result by
    /// roughly `N^(2(2m-1))`, so that many bits are added on top of a fixed
    /// 96-bit margin. Above `m = 5` the smallest operator root shrinks by
    /// about four bits per unit of `m`, and `D_m(0)` cancels accordingly;
    /// 16 extra bits per order cover the loss measured up to `m = 13`.
    pub fn for_problem(m: u32, n: usize) -> Self {
        let growth = 2.0 * (2.0 * m as f64 - 1.0) * ((n as f64) + 1.0).log2();
        let small_roots = 16 * (m as usize).saturating_sub(5);
        Self::new(96 + growth.ceil() as usize + small_roots)
    }

    pub fn bits(self) -> usize {
        self.0
    }

    /// Unit roundoff `2^(1-bits)`.
    pub fn epsilon(self) -> f64 {
        2f64.powi(1 - self.0 as i32)
    }

    pub fn real(self, x: f64) -> Real {
        Real(BigFloat::from_f64(x, self.0), self.0)
    }

    pub fn int(self, i: i64) -> Real {
        Real(BigFloat::from_i64(i, self.0), self.0)
    }

    pub fn zero(self) -> Real {
        self.int(0)
    }

    pub fn one(self) -> Real {
        self.int(1)
    }

    /// `num / den` rounded once at this precision.
    pub fn ratio(self, num: i64, den: i64) -> Real {
        self.int(num) / self.int(den)
    }

    pub fn pi(self) -> Real {
        Real(with_consts(|cc| cc.pi(self.0, RM)), self.0)
    }

    /// `e = exp(1)`.
    pub fn e(self) -> Real {
        self.one().exp()
    }
}

/// Arbitrary-precision real number.
#[derive(Clone)]
pub struct Real(BigFloat, usize);

impl Real {
    fn bits(&self) -> usize {
        self.1
    }


    pub fn precision(&self) -> Precision {
        Precision(self.bits())
    }

    fn lift(&self, x: f64) -> Real {
        Real(BigFloat::from_f64(x, self.bits()), self.bits())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs(), self.1)
    }

    pub fn recip(&self) -> Real {
        Real(self.0.reciprocal(self.1, RM), self.1)
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.sqrt(self.1, RM), self.1)
    }

    pub fn exp(&self) -> Real {
        let p = self.bits();
        Real(with_consts(|cc| self.0.exp(p, RM, cc)), p)
    }

    pub fn ln(&self) -> Real {
        let p = self.bits();
        Real(with_consts(|cc| self.0.ln(p, RM, cc)), p)
    }

    pub fn sin(&self) -> Real {
        let p = self.bits();
        Real(with_consts(|cc| self.0.sin(p, RM, cc)), p)
    }

    pub fn cos(&self) -> Real {
        let p = self.bits();
        Real(with_consts(|cc| self.0.cos(p, RM, cc)), p)
    }

    pub fn sinh(&self) -> Real {
        let p = self.bits();
        Real(with_consts(|cc| self.0.sinh(p, RM, cc)), p)
    }

    pub fn cosh(&self) -> Real {
        let p = self.bits();
        Real(with_consts(|cc| self.0.cosh(p, RM, cc)), p)
    }

    pub fn atan(&self) -> Real {
        let p = self.bits();
        Real(with_consts(|cc| self.0.atan(p, RM, cc)), p)
    }

    /// Integer power; negative exponents go through the reciprocal.
    pub fn powi(&self, n: i64) -> Real {
        let p = self.bits();
        let r = Real(self.0.powi(n.unsigned_abs() as usize, p, RM), p);
        if n < 0 {
            r.recip()
        } else {
            r
        }
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64`. Values beyond the `f64` range saturate to infinity.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_inf_pos() { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((mantissa, _, sign, exponent, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        // Leading 64 bits of the mantissa, whatever the platform word size.
        let word = astro_float::WORD_BIT_SIZE;
        let mut top = 0f64;
        let mut used = 0;
        for w in mantissa.iter().rev() {
            top = top * 2f64.powi(word as i32) + *w as f64;
            used += word;
            if used >= 64 {
                break;
            }
        }
        let shift = exponent - used as i32;
        let half = shift / 2;
        let v = top * 2f64.powi(half) * 2f64.powi(shift - half);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e}, {} bits)", self.to_f64(), self.bits())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $big:ident, $atr:ident, $amethod:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.bits().max(rhs.bits());
                Real(self.0.$big(&rhs.0, p, RM), p)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<f64> for &Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                self.$method(&self.lift(rhs))
            }
        }
        impl $tr<f64> for Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                (&self).$method(&self.lift(rhs))
            }
        }
        impl $atr<&Real> for Real {
            fn $amethod(&mut self, rhs: &Real) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $atr<Real> for Real {
            fn $amethod(&mut self, rhs: Real) {
                *self = (&*self).$method(&rhs);
            }
        }
        impl $atr<f64> for Real {
            fn $amethod(&mut self, rhs: f64) {
                *self = (&*self).$method(rhs);
            }
        }
    };
}

real_binop!(Add, add, add, AddAssign, add_assign);
real_binop!(Sub, sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, mul, MulAssign, mul_assign);
real_binop!(Div, div, div, DivAssign, div_assign);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -self.clone()
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(mut self) -> Real {
        self.0.inv_sign();
        self
    }
}

impl Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Precision(WORD).zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Real> for Real {
    fn sum<I: Iterator<Item = &'a Real>>(iter: I) -> Real {
        iter.fold(Precision(WORD).zero(), |acc, x| acc + x)
    }
}

/// Complex number over [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let im = re.precision().zero();
        Complex { re, im }
    }

    pub fn zero(p: Precision) -> Self {
        Complex::new(p.zero(), p.zero())
    }

    pub fn one(p: Precision) -> Self {
        Complex::new(p.one(), p.zero())
    }

    /// `e^{i theta}`.
    pub fn cis(theta: &Real) -> Self {
        Complex::new(theta.cos(), theta.sin())
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Complex::new(&self.re / &d, -(&self.im / &d))
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        Complex::new(&r * self.im.cos(), &r * self.im.sin())
    }

    pub fn scale(&self, s: &Real) -> Self {
        Complex::new(&self.re * s, &self.im * s)
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.re.precision().max(self.im.precision());
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Complex::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

macro_rules! complex_binop {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<&Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $tr<Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                self.$method(&rhs)
            }
        }
        impl $tr<&Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                (&self).$method(rhs)
            }
        }
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                (&self).$method(&rhs)
            }
        }
        impl $atr<&Complex> for Complex {
            fn $amethod(&mut self, rhs: &Complex) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $atr<Complex> for Complex {
            fn $amethod(&mut self, rhs: Complex) {
                *self = (&*self).$method(&rhs);
            }
        }
    };
}

complex_binop!(Add, add, AddAssign, add_assign, |a, b| Complex::new(
    &a.re + &b.re,
    &a.im + &b.im
));
complex_binop!(Sub, sub, SubAssign, sub_assign, |a, b| Complex::new(
    &a.re - &b.re,
    &a.im - &b.im
));
complex_binop!(Mul, mul, MulAssign, mul_assign, |a, b| Complex::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));
complex_binop!(Div, div, DivAssign, div_assign, |a, b| a * &b.recip());

impl Mul<&Real> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Real) -> Complex {
        self.scale(rhs)
    }
}

impl Mul<&Real> for Complex {
    type Output = Complex;
    fn mul(self, rhs: &Real) -> Complex {
        self.scale(rhs)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -&self
    }
}

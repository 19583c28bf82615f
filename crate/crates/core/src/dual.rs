//! First-order dual numbers `re + du·ε`, `ε² = 0`.
//!
//! Evaluating a function on `Dual::var(x)` yields `f(x)` and `f'(x)` in one
//! pass, which is how coefficient derivatives are obtained throughout.

use core::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub re: f64,
    pub du: f64,
}

impl Dual {
    pub const fn new(re: f64, du: f64) -> Self {
        Dual { re, du }
    }

    /// A constant: zero derivative.
    pub const fn cst(re: f64) -> Self {
        Dual { re, du: 0.0 }
    }

    /// The independent variable: unit derivative.
    pub const fn var(re: f64) -> Self {
        Dual { re, du: 1.0 }
    }

    #[inline]
    fn chain(self, value: f64, slope: f64) -> Self {
        Dual { re: value, du: slope * self.du }
    }

    pub fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }

    pub fn ln(self) -> Self {
        self.chain(self.re.ln(), 1.0 / self.re)
    }

    pub fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }

    pub fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        self.chain(r, 0.5 / r)
    }

    pub fn atan(self) -> Self {
        self.chain(self.re.atan(), 1.0 / (1.0 + self.re * self.re))
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.re;
        self.chain(r, -r * r)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Dual::cst(1.0),
            1 => self,
            _ => self.chain(self.re.powi(n), f64::from(n) * self.re.powi(n - 1)),
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Dual { re: k * self.re, du: k * self.du }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.du.is_finite()
    }
}

impl From<f64> for Dual {
    fn from(v: f64) -> Self {
        Dual::cst(v)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual { re: self.re + rhs.re, du: self.du + rhs.du }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual { re: self.re - rhs.re, du: self.du - rhs.du }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual { re: self.re * rhs.re, du: self.du * rhs.re + self.re * rhs.du }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let q = self.re / rhs.re;
        Dual { re: q, du: (self.du - q * rhs.du) / rhs.re }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { re: -self.re, du: -self.du }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for Dual {
            type Output = Dual;
            fn $m(self, rhs: f64) -> Dual { self.$m(Dual::cst(rhs)) }
        }
        impl $tr<Dual> for f64 {
            type Output = Dual;
            fn $m(self, rhs: Dual) -> Dual { Dual::cst(self).$m(rhs) }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);

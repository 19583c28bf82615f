//! Dense real polynomials and rational functions, evaluable at real and
//! complex points with exact derivatives.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Mul;
use num_complex::Complex64;

/// `c[0] + c[1] x + c[2] x² + …`
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| k * c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Self, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Self::new((0..n).map(|i| at(self, i) - at(other, i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// `num(x) / den(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl Rational {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        Rational { num, den }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.num.eval(x) / self.den.eval(x)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// Quotient rule, kept as a rational function.
    pub fn derivative(&self) -> Rational {
        let top = (&self.num.derivative() * &self.den).sub(&(&self.num * &self.den.derivative()));
        Rational::new(top, &self.den * &self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_derivatives() {
        let p = Polynomial::new(vec![1.0, -3.0, 0.0, 2.0]); // 2x³ − 3x + 1
        assert_eq!(p.degree(), 3);
        assert_eq!(p.eval(2.0), 11.0);
        assert_eq!(p.derivative().coeffs(), &[-3.0, 0.0, 6.0]);
        let sq = p.powi(2);
        assert_eq!(sq.eval(2.0), 121.0);
        let r = Rational::new(Polynomial::new(vec![0.0, 1.0]), Polynomial::new(vec![1.0, 1.0]));
        // d/dx x/(1+x) = 1/(1+x)²
        assert!((r.derivative().eval(1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn complex_evaluation() {
        let p = Polynomial::new(vec![1.0, 0.0, 1.0]);
        assert_eq!(p.eval_complex(Complex64::new(0.0, 1.0)), Complex64::new(0.0, 0.0));
    }
}

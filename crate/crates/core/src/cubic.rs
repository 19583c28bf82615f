//! Real roots of real cubics and the four-way root-structure classification
//! used by the constant-coefficient solver.

use crate::{Error, Result};
use core::f64::consts::PI;

/// Relative tie tolerance on the scaled discriminant.
pub const DISCRIMINANT_TIE: f64 = 1e-10;
/// Relative gap below which two roots are declared equal.
pub const ROOT_GAP_TIE: f64 = 1e-8;

/// Root structure of a real cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Case (i): three distinct real roots, ascending.
    Distinct([f64; 3]),
    /// Case (ii): one simple and one double real root.
    SimpleDouble { simple: f64, double: f64 },
    /// Case (iii): a triple real root.
    Triple(f64),
    /// Case (iv): one real root and the pair `re ± i·im`, `im > 0`.
    RealComplex { real: f64, re: f64, im: f64 },
}

impl CubicRoots {
    pub fn label(&self) -> &'static str {
        match self {
            CubicRoots::Distinct(_) => "three_distinct_real",
            CubicRoots::SimpleDouble { .. } => "simple_and_double_real",
            CubicRoots::Triple(_) => "triple_real",
            CubicRoots::RealComplex { .. } => "one_real_complex_pair",
        }
    }

    /// Case number (1–4) in the usual (i)–(iv) ordering.
    pub fn case(&self) -> u8 {
        match self {
            CubicRoots::Distinct(_) => 1,
            CubicRoots::SimpleDouble { .. } => 2,
            CubicRoots::Triple(_) => 3,
            CubicRoots::RealComplex { .. } => 4,
        }
    }

    /// Real roots, ascending, without multiplicity.
    pub fn real_roots(&self) -> alloc::vec::Vec<f64> {
        let mut v = match *self {
            CubicRoots::Distinct(r) => r.to_vec(),
            CubicRoots::SimpleDouble { simple, double } => alloc::vec![simple, double],
            CubicRoots::Triple(r) => alloc::vec![r],
            CubicRoots::RealComplex { real, .. } => alloc::vec![real],
        };
        v.sort_by(f64::total_cmp);
        v
    }
}

fn polish(p2: f64, p1: f64, p0: f64, mut r: f64) -> f64 {
    for _ in 0..4 {
        let f = ((r + p2) * r + p1) * r + p0;
        let d = (3.0 * r + 2.0 * p2) * r + p1;
        if d == 0.0 {
            break;
        }
        let next = r - f / d;
        if !next.is_finite() || (next - r).abs() >= (r.abs() + 1.0) * 1e-3 {
            break;
        }
        r = next;
    }
    r
}

/// Roots of the monic cubic `y³ + p2·y² + p1·y + p0`.
pub fn monic_roots(p2: f64, p1: f64, p0: f64) -> Result<CubicRoots> {
    if !(p2.is_finite() && p1.is_finite() && p0.is_finite()) {
        return Err(Error::invalid("non-finite cubic coefficient"));
    }
    // y = t − p2/3  ⇒  t³ + p t + q
    let shift = p2 / 3.0;
    let p = p1 - p2 * p2 / 3.0;
    let q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    let scale = 1.0f64.max(p.abs().sqrt()).max(q.abs().cbrt());
    // Discriminant of the depressed cubic: −(4p³ + 27q²), scaled to O(1).
    let disc = -(4.0 * p * p * p + 27.0 * q * q) / scale.powi(6);

    if disc.abs() <= DISCRIMINANT_TIE {
        if p.abs() <= ROOT_GAP_TIE * scale * scale {
            return Ok(CubicRoots::Triple(polish(p2, p1, p0, -shift)));
        }
        let simple = 3.0 * q / p - shift;
        let double = -1.5 * q / p - shift;
        if (simple - double).abs() <= ROOT_GAP_TIE * scale {
            return Ok(CubicRoots::Triple(0.5 * (simple + double)));
        }
        return Ok(CubicRoots::SimpleDouble { simple: polish(p2, p1, p0, simple), double });
    }
    if disc > 0.0 {
        // three real roots: trigonometric form
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut r = [0.0; 3];
        for (k, slot) in r.iter_mut().enumerate() {
            *slot = polish(p2, p1, p0, m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift);
        }
        r.sort_by(f64::total_cmp);
        Ok(CubicRoots::Distinct(r))
    } else {
        // one real root: Cardano
        let sq = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        let real = polish(p2, p1, p0, u + v - shift);
        // deflate: y² + (p2 + real) y + (p1 + real(p2 + real))
        let b = p2 + real;
        let c = p1 + real * b;
        let re = -b / 2.0;
        let im = (c - re * re).max(0.0).sqrt();
        Ok(CubicRoots::RealComplex { real, re, im })
    }
}

/// Roots of `a3·y³ + a2·y² + a1·y + a0`, `a3 ≠ 0`.
pub fn roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<CubicRoots> {
    if a3 == 0.0 {
        return Err(Error::precondition("leading cubic coefficient is zero"));
    }
    monic_roots(a2 / a3, a1 / a3, a0 / a3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cases() {
        // y(y−1)(y−2) = y³ − 3y² + 2y
        match monic_roots(-3.0, 2.0, 0.0).unwrap() {
            CubicRoots::Distinct(r) => {
                for (a, b) in r.iter().zip([0.0, 1.0, 2.0]) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
            other => panic!("{other:?}"),
        }
        // (y+1)(y−2)² = y³ − 3y² + 4
        match monic_roots(-3.0, 0.0, 4.0).unwrap() {
            CubicRoots::SimpleDouble { simple, double } => {
                assert!((simple + 1.0).abs() < 1e-14 && (double - 2.0).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        // (y−1)³
        assert_eq!(monic_roots(-3.0, 3.0, -1.0).unwrap(), CubicRoots::Triple(1.0));
        // (y−1)(y² + 2y + 5): roots 1, −1 ± 2i
        match monic_roots(1.0, 3.0, -5.0).unwrap() {
            CubicRoots::RealComplex { real, re, im } => {
                assert!((real - 1.0).abs() < 1e-14 && (re + 1.0).abs() < 1e-14 && (im - 2.0).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_leading_coefficient_is_rejected() {
        assert!(matches!(roots(0.0, 1.0, 1.0, 1.0), Err(Error::Precondition(_))));
    }
}

//! `dy/dx = A0 + A1·y + A2·y² + A3·y³` with constant coefficients, solved
//! through the implicit relation `G(y) = A3·x + C`, `G' = 1/P`, where `P` is
//! the monic cubic `(A0 + A1·y + A2·y² + A3·y³)/A3`.

use crate::cubic::{self, CubicRoots};
use crate::curve::SampledCurve;
use crate::roots::solve_on_branch;
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

/// Root search tolerance in `y` (mixed absolute/relative).
pub const Y_TOL: f64 = 1e-14;

/// `ln(1 − r/y)` for `|r/y| < 1`, accurate for large `|y|`.
fn ln_ratio(y: f64, r: f64) -> f64 {
    (-r / y).ln_1p()
}

/// Antiderivative of `1/P` for a given root structure, normalised so that its
/// limit at `±∞` is [`limit`](Self::limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Implicit {
    roots: CubicRoots,
}

impl Implicit {
    pub fn new(roots: CubicRoots) -> Self {
        Implicit { roots }
    }

    /// Monic cubic `P(y)`.
    pub fn p(&self, y: f64) -> f64 {
        match self.roots {
            CubicRoots::Distinct([a, b, c]) => (y - a) * (y - b) * (y - c),
            CubicRoots::SimpleDouble { simple, double } => (y - simple) * (y - double) * (y - double),
            CubicRoots::Triple(r) => (y - r).powi(3),
            CubicRoots::RealComplex { real, re, im } => (y - real) * ((y - re).powi(2) + im * im),
        }
    }

    /// `G(y)`. For large `|y|` the logarithms are evaluated relative to `y`
    /// (their coefficients sum to zero), which keeps `G − G(±∞)` accurate.
    pub fn g(&self, y: f64) -> f64 {
        let far = |r: f64| y.abs() > 2.0 * r.abs().max(1.0);
        match self.roots {
            CubicRoots::Distinct(r) => {
                let mut s = 0.0;
                for i in 0..3 {
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    let c = 1.0 / ((r[i] - r[j]) * (r[i] - r[k]));
                    let l = if r.iter().all(|&q| far(q)) { ln_ratio(y, r[i]) } else { (y - r[i]).abs().ln() };
                    s += c * l;
                }
                s
            }
            CubicRoots::SimpleDouble { simple: r1, double: r2 } => {
                let a = 1.0 / (r1 - r2).powi(2);
                let l = if far(r1) && far(r2) {
                    ln_ratio(y, r1) - ln_ratio(y, r2)
                } else {
                    ((y - r1) / (y - r2)).abs().ln()
                };
                a * l + 1.0 / ((r1 - r2) * (y - r2))
            }
            CubicRoots::Triple(r) => -0.5 / (y - r).powi(2),
            CubicRoots::RealComplex { real: r3, re: al, im: be } => {
                let a = 1.0 / ((r3 - al).powi(2) + be * be);
                let l = if far(r3) && far(al.hypot(be)) {
                    ln_ratio(y, r3) - 0.5 * (-2.0 * al / y + (al * al + be * be) / (y * y)).ln_1p()
                } else {
                    (y - r3).abs().ln() - 0.5 * ((y - al).powi(2) + be * be).ln()
                };
                a * (l + (al - r3) / be * ((y - al) / be).atan())
            }
        }
    }

    /// `lim G(y)` as `y → +∞` (`positive`) or `y → −∞`.
    pub fn limit(&self, positive: bool) -> f64 {
        match self.roots {
            CubicRoots::RealComplex { real: r3, re: al, im: be } => {
                let v = (al - r3) / be / ((r3 - al).powi(2) + be * be) * FRAC_PI_2;
                if positive {
                    v
                } else {
                    -v
                }
            }
            _ => 0.0,
        }
    }
}

/// Solution of a constant-coefficient equation through one initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantCoeffFlow {
    pub coeffs: [f64; 4],
    pub roots: CubicRoots,
    /// Open `y`-interval between consecutive real roots that contains `y0`.
    pub branch: (f64, f64),
    /// `C` in `G(y) = A3·x + C`.
    pub constant: f64,
    /// Set when `y0` is itself a root.
    pub equilibrium: Option<f64>,
    implicit: Implicit,
    x0: f64,
    y0: f64,
}

impl ConstantCoeffFlow {
    pub fn new(coeffs: [f64; 4], x0: f64, y0: f64) -> Result<Self> {
        let [a0, a1, a2, a3] = coeffs;
        if a3 == 0.0 {
            return Err(Error::precondition("A3 = 0: the equation is of Riccati type"));
        }
        if !(coeffs.iter().all(|c| c.is_finite()) && x0.is_finite() && y0.is_finite()) {
            return Err(Error::invalid("coefficients and initial values must be finite"));
        }
        let roots = cubic::roots(a3, a2, a1, a0)?;
        let implicit = Implicit::new(roots);
        let real = roots.real_roots();
        let equilibrium = real.iter().copied().find(|&r| (y0 - r).abs() <= Y_TOL * r.abs().max(1.0));
        let lo = real.iter().copied().filter(|&r| r < y0).fold(f64::NEG_INFINITY, f64::max);
        let hi = real.iter().copied().filter(|&r| r > y0).fold(f64::INFINITY, f64::min);
        let constant = if equilibrium.is_some() { f64::NAN } else { implicit.g(y0) - a3 * x0 };
        Ok(ConstantCoeffFlow { coeffs, roots, branch: (lo, hi), constant, equilibrium, implicit, x0, y0 })
    }

    pub fn label(&self) -> &'static str {
        self.roots.label()
    }

    pub fn implicit(&self) -> &Implicit {
        &self.implicit
    }

    /// `G(y) − A3·x − C`; zero along the solution.
    pub fn relation(&self, x: f64, y: f64) -> f64 {
        self.implicit.g(y) - self.coeffs[3] * x - self.constant
    }

    /// The finite-time blow-up abscissa, if the branch is unbounded.
    pub fn blow_up(&self) -> Option<f64> {
        if self.equilibrium.is_some() {
            return None;
        }
        let (lo, hi) = self.branch;
        let end = if hi.is_infinite() {
            true
        } else if lo.is_infinite() {
            false
        } else {
            return None;
        };
        Some((self.implicit.limit(end) - self.constant) / self.coeffs[3])
    }

    /// Reachable `x` range of the solution on its branch.
    pub fn reachable(&self) -> (f64, f64) {
        match self.blow_up() {
            None => (f64::NEG_INFINITY, f64::INFINITY),
            Some(xc) if xc > self.x0 => (f64::NEG_INFINITY, xc),
            Some(xc) => (xc, f64::INFINITY),
        }
    }

    fn solve(&self, x: f64, start: f64) -> Result<f64> {
        if let Some(r) = self.equilibrium {
            return Ok(r);
        }
        if let CubicRoots::Triple(r) = self.roots {
            // y = r ± 1/√(−2(A3·x + c))
            let t = self.coeffs[3] * x + self.constant;
            if t >= 0.0 {
                return Err(Error::BlowUp { critical: self.blow_up().unwrap_or(f64::NAN) });
            }
            let sign = if self.y0 > r { 1.0 } else { -1.0 };
            return Ok(r + sign / (-2.0 * t).sqrt());
        }
        let (lo, hi) = self.reachable();
        if !(lo < x && x < hi) {
            return Err(Error::BlowUp { critical: if x >= hi { hi } else { lo } });
        }
        let target = self.coeffs[3] * x + self.constant;
        let imp = self.implicit;
        let g = |y: f64| Ok((imp.g(y), 1.0 / imp.p(y)));
        let (blo, bhi) = self.branch;
        match solve_on_branch(g, blo, bhi, start, target, Y_TOL) {
            // The equilibrium is approached to within rounding.
            Err(Error::BranchExit { boundary }) if boundary.is_finite() => Ok(boundary),
            Err(Error::BranchExit { .. }) => Err(Error::BlowUp { critical: self.blow_up().unwrap_or(f64::NAN) }),
            other => other,
        }
    }

    /// `y(x)`.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        self.solve(x, self.y0)
    }

    /// Curve at increasing `targets`; consecutive solves are warm-started.
    pub fn curve(&self, targets: &[f64]) -> Result<SampledCurve> {
        let mut pts = Vec::with_capacity(targets.len());
        let mut start = self.y0;
        let (blo, bhi) = self.branch;
        for &x in targets {
            let y = self.solve(x, start)?;
            if blo < y && y < bhi {
                start = y;
            }
            pts.push((x, y));
        }
        SampledCurve::new(pts)
    }
}

/// Curve through `(x0, y0)` at `targets` plus the root-structure report.
pub fn solve_constant_coeffs(coeffs: [f64; 4], x0: f64, y0: f64, targets: &[f64]) -> Result<(SampledCurve, ConstantCoeffFlow)> {
    let flow = ConstantCoeffFlow::new(coeffs, x0, y0)?;
    Ok((flow.curve(targets)?, flow))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abel::{residual, AbelFirstKind};
    use std::vec::Vec;

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + i as f64 * h).collect()
    }

    /// `G'` against `1/P` by a five-point difference.
    fn check_derivative(imp: &Implicit, ys: &[f64]) {
        for &y in ys {
            let h = 1e-4 * y.abs().max(1.0);
            let d = (8.0 * (imp.g(y + h) - imp.g(y - h)) - (imp.g(y + 2.0 * h) - imp.g(y - 2.0 * h))) / (12.0 * h);
            let e = 1.0 / imp.p(y);
            assert!((d - e).abs() < 1e-7 * e.abs().max(1.0), "{:?} y={y}: {d} vs {e}", imp.roots);
        }
    }

    #[test]
    fn implicit_relation_differentiates_to_reciprocal_cubic() {
        let cases = [
            CubicRoots::Distinct([-1.0, 0.5, 2.0]),
            CubicRoots::SimpleDouble { simple: -1.0, double: 1.5 },
            CubicRoots::SimpleDouble { simple: 2.0, double: 0.0 },
            CubicRoots::Triple(0.7),
            CubicRoots::RealComplex { real: 1.0, re: -0.5, im: 2.0 },
            CubicRoots::RealComplex { real: -3.0, re: 1.0, im: 0.5 },
        ];
        let ys = [-40.0, -5.2, -2.1, -0.8, 0.2, 0.9, 1.2, 2.5, 3.7, 8.0, 25.0, 300.0];
        for r in cases {
            let imp = Implicit::new(r);
            let ys: Vec<f64> = ys.iter().copied().filter(|y| r.real_roots().iter().all(|q| (y - q).abs() > 0.05)).collect();
            check_derivative(&imp, &ys);
        }
    }

    #[test]
    fn limits_at_infinity() {
        for r in [CubicRoots::Distinct([-1.0, 0.5, 2.0]), CubicRoots::RealComplex { real: 1.0, re: -0.5, im: 2.0 }] {
            let imp = Implicit::new(r);
            for s in [true, false] {
                let y = if s { 1e9 } else { -1e9 };
                assert!((imp.g(y) - imp.limit(s)).abs() < 1e-12, "{r:?} {s}");
            }
        }
    }

    #[test]
    fn three_distinct_roots_example() {
        // y(y − 2)/(y − 1)² = C·e^{2x}
        let xs = grid(-2.0, 2.0, 1e-3);
        let (curve, flow) = solve_constant_coeffs([0.0, 2.0, -3.0, 1.0], 0.0, 0.5, &xs).unwrap();
        assert_eq!(flow.roots.case(), 1);
        assert_eq!(flow.branch, (0.0, 1.0));
        let c0 = 0.5 * (0.5 - 2.0) / 0.25;
        for &(x, y) in curve.points() {
            let lhs = y * (y - 2.0) / (y - 1.0).powi(2);
            assert!((lhs - c0 * (2.0 * x).exp()).abs() < 1e-10 * (2.0 * x).exp(), "{x} {y}");
        }
        let eq = AbelFirstKind::constants([0.0, 2.0, -3.0, 1.0]);
        assert!(residual(&eq, &curve).unwrap() < 1e-6);
        assert_eq!(flow.blow_up(), None);
    }

    #[test]
    fn triple_root_closed_form() {
        let flow = ConstantCoeffFlow::new([0.0, 0.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        assert_eq!(flow.constant, -0.5);
        assert_eq!(flow.label(), "triple_real");
        for x in [-3.0, -1.0, 0.0, 0.3] {
            assert_eq!(flow.value_at(x).unwrap(), 1.0 / (-2.0 * (x - 0.5)).sqrt());
        }
        assert_eq!(flow.blow_up(), Some(0.5));
        assert!(matches!(flow.value_at(0.6), Err(Error::BlowUp { critical }) if critical == 0.5));
        let below = ConstantCoeffFlow::new([-1.0, 3.0, -3.0, 1.0], 0.0, 0.5).unwrap();
        assert!(matches!(below.roots, CubicRoots::Triple(_)));
        let xs = grid(-1.0, 0.1, 1e-3);
        let eq = AbelFirstKind::constants([-1.0, 3.0, -3.0, 1.0]);
        assert!(residual(&eq, &below.curve(&xs).unwrap()).unwrap() < 1e-6);
    }

    #[test]
    fn equilibria_are_constant() {
        let xs = grid(0.0, 1.0, 1e-3);
        for y0 in [0.0, 1.0, 2.0] {
            let (curve, flow) = solve_constant_coeffs([0.0, 2.0, -3.0, 1.0], 0.0, y0, &xs).unwrap();
            assert_eq!(flow.equilibrium, Some(y0));
            assert!(curve.ys().all(|y| y == y0));
            assert_eq!(residual(&AbelFirstKind::constants([0.0, 2.0, -3.0, 1.0]), &curve).unwrap(), 0.0);
        }
    }

    #[test]
    fn blow_up_is_reported_with_its_abscissa() {
        // dy/dx = y³ + y, y(0) = 1: y = 1/√(2e^{−2x} − 1), blow-up at ln(2)/2
        let flow = ConstantCoeffFlow::new([0.0, 1.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        assert_eq!(flow.roots.case(), 4);
        let xc = flow.blow_up().unwrap();
        assert!((xc - 0.5 * 2f64.ln()).abs() < 1e-14, "{xc}");
        for x in [-2.0, -0.3, 0.2, 0.34] {
            let y = flow.value_at(x).unwrap();
            let exact = 1.0 / (2.0 * (-2.0 * x).exp() - 1.0).sqrt();
            assert!((y - exact).abs() < 1e-12 * exact, "{x}: {y} {exact}");
        }
        assert!(matches!(flow.value_at(0.4), Err(Error::BlowUp { critical }) if critical == xc));
    }

    #[test]
    fn simple_and_double_root_curve() {
        // (y − 1)²(y + 1) = y³ − y² − y + 1
        let eq = AbelFirstKind::constants([1.0, -1.0, -1.0, 1.0]);
        for (y0, lo, hi) in [(0.0, -1.0, 3.0), (1.5, -3.0, 0.2), (-2.0, -0.2, 3.0)] {
            let flow = ConstantCoeffFlow::new([1.0, -1.0, -1.0, 1.0], 0.0, y0).unwrap();
            assert_eq!(flow.roots.case(), 2);
            let (a, b) = flow.reachable();
            let xs: Vec<f64> = grid(lo, hi, 1e-3).into_iter().filter(|&x| x > a + 0.05 && x < b - 0.05).collect();
            let curve = flow.curve(&xs).unwrap();
            assert!(residual(&eq, &curve).unwrap() < 1e-6, "{y0}");
        }
    }

    #[test]
    fn riccati_case_is_refused() {
        assert!(matches!(ConstantCoeffFlow::new([1.0, 2.0, 3.0, 0.0], 0.0, 0.0), Err(Error::Precondition(_))));
    }
}

//! Canonical form `dη̃/dζ = η̃² + g·η̃³` of `dy/dx = f1·y + f2·y² + f3·y³`
//! under `y = ω̃·η̃`, `ω̃ = exp(∫f1)`, `ζ = ∫f2·ω̃`, with the Appell invariant
//! `g = (f3/f2)·ω̃`. A constant `g = 1/k` makes the equation separable.

use super::normal::require_nonvanishing;
use crate::abel::AbelFirstKind;
use crate::curve::SampledCurve;
use crate::function::{Anchor, ScalarFunction};
use crate::roots::solve_on_branch;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Relative tolerance for "the Appell invariant is constant".
pub const APPELL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub omega_t: ScalarFunction,
    pub zeta: ScalarFunction,
    /// `g(ζ(x))` as a function of `x`.
    pub appell: ScalarFunction,
}

pub fn to_canonical_form(eq: &AbelFirstKind, anchor: &Anchor) -> Result<CanonicalForm> {
    if !eq.coefficient_vanishes(0)? {
        return Err(Error::precondition("the canonical form needs f0 ≡ 0"));
    }
    require_nonvanishing(eq.f2(), "f2", eq)?;
    let d = eq.domain();
    let omega_t = eq.f1().exp_antiderivative(anchor)?.with_domain(d);
    let zeta = (eq.f2() * &omega_t).antiderivative(anchor)?.with_domain(d);
    let appell = (&(eq.f3() / eq.f2()) * &omega_t).with_domain(d);
    Ok(CanonicalForm { omega_t, zeta, appell })
}

/// `H(u) = (1/k)·ln|u + 1/k| − u` with `u = 1/η̃`; `H(u) = ζ + C` along
/// solutions of `dη̃/dζ = η̃² + η̃³/k`.
pub fn lemma2_relation(k: f64, u: f64) -> f64 {
    (u + 1.0 / k).abs().ln() / k - u
}

/// `H'(u) = −k·u/(k·u + 1)`.
pub fn lemma2_slope(k: f64, u: f64) -> f64 {
    -k * u / (k * u + 1.0)
}

/// Solution of an equation with constant Appell invariant `1/k`.
#[derive(Debug, Clone)]
pub struct ConstantAppellSolution {
    pub form: CanonicalForm,
    pub k: f64,
    /// `C` in `H(u) = ζ + C`; NaN for the constant members.
    pub constant: f64,
    /// Monotone branch of `H` containing `u0`.
    pub branch: (f64, f64),
    /// `η̃ ≡ −k` or `η̃ ≡ 0`.
    pub stationary: Option<f64>,
    u0: f64,
}

impl ConstantAppellSolution {
    pub fn new(eq: &AbelFirstKind, anchor: &Anchor, k: f64, x0: f64, y0: f64) -> Result<Self> {
        if !(k.is_finite() && k != 0.0) {
            return Err(Error::invalid("k must be finite and nonzero"));
        }
        let form = to_canonical_form(eq, anchor)?;
        for x in eq.probe_grid(64) {
            let g = form.appell.eval(x)?;
            if (g * k - 1.0).abs() > APPELL_TOL {
                return Err(Error::precondition(format!("Appell invariant is not 1/k: g({x}) = {g}")));
            }
        }
        let eta0 = y0 / form.omega_t.eval(x0)?;
        let tie = 1e-14 * k.abs().max(1.0);
        if eta0 == 0.0 || (eta0 + k).abs() <= tie {
            let stationary = Some(if eta0 == 0.0 { 0.0 } else { -k });
            return Ok(ConstantAppellSolution { form, k, constant: f64::NAN, branch: (0.0, 0.0), stationary, u0: f64::NAN });
        }
        let u0 = 1.0 / eta0;
        let mut cuts = [-1.0 / k, 0.0];
        cuts.sort_by(f64::total_cmp);
        let lo = cuts.iter().copied().filter(|&c| c < u0).fold(f64::NEG_INFINITY, f64::max);
        let hi = cuts.iter().copied().filter(|&c| c > u0).fold(f64::INFINITY, f64::min);
        let constant = lemma2_relation(k, u0) - form.zeta.eval(x0)?;
        Ok(ConstantAppellSolution { form, k, constant, branch: (lo, hi), stationary: None, u0 })
    }

    /// `η̃` at the branch end `u`, for branch-exit reports.
    fn eta_of_end(u: f64) -> f64 {
        if u.is_infinite() {
            0.0
        } else if u == 0.0 {
            f64::INFINITY
        } else {
            1.0 / u
        }
    }

    /// `η̃(x)`.
    pub fn eta_at(&self, x: f64) -> Result<f64> {
        self.eta_from(x, self.u0)
    }

    fn eta_from(&self, x: f64, start: f64) -> Result<f64> {
        if let Some(s) = self.stationary {
            return Ok(s);
        }
        let k = self.k;
        let target = self.form.zeta.eval(x)? + self.constant;
        let (lo, hi) = self.branch;
        match solve_on_branch(|u| Ok((lemma2_relation(k, u), lemma2_slope(k, u))), lo, hi, start, target, 1e-15) {
            Ok(u) => Ok(1.0 / u),
            Err(Error::BranchExit { boundary }) => Err(Error::BranchExit { boundary: Self::eta_of_end(boundary) }),
            Err(e) => Err(e),
        }
    }

    /// `y = ω̃·η̃` at increasing `targets`.
    pub fn curve(&self, targets: &[f64]) -> Result<SampledCurve> {
        let mut pts = Vec::with_capacity(targets.len());
        let mut start = self.u0;
        for &x in targets {
            let eta = self.eta_from(x, start)?;
            let u = 1.0 / eta;
            if self.stationary.is_none() && self.branch.0 < u && u < self.branch.1 {
                start = u;
            }
            pts.push((x, self.form.omega_t.eval(x)? * eta));
        }
        SampledCurve::new(pts)
    }
}

pub fn solve_constant_appell(eq: &AbelFirstKind, anchor: &Anchor, k: f64, x0: f64, y0: f64, targets: &[f64]) -> Result<SampledCurve> {
    ConstantAppellSolution::new(eq, anchor, k, x0, y0)?.curve(targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abel::residual;
    use crate::function::Interval;
    use crate::integrability::factor::{integrating_factor_check, potential_psi};
    use crate::ode::{solve_at, StepControl};
    use std::vec::Vec;

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + i as f64 * h).collect()
    }

    #[test]
    fn relation_slope_matches_difference() {
        for k in [1.0f64, 2.0, 0.5, -1.5] {
            for u in [-7.0, -0.9, -0.3, 0.2, 3.0] {
                if (u + 1.0 / k).abs() < 0.05 {
                    continue;
                }
                let h = 1e-5;
                let fd = (lemma2_relation(k, u + h) - lemma2_relation(k, u - h)) / (2.0 * h);
                assert!((fd - lemma2_slope(k, u)).abs() < 1e-7, "{k} {u}");
            }
        }
    }

    #[test]
    fn constant_coefficients_give_constant_appell() {
        let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 0.5]);
        let cf = to_canonical_form(&eq, &Anchor::at(0.0)).unwrap();
        assert_eq!(cf.appell.eval(3.0).unwrap(), 0.5);
        assert_eq!(cf.omega_t.eval(3.0).unwrap(), 1.0);
        assert!((cf.zeta.eval(3.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_derivative() {
        let x = ScalarFunction::identity;
        let eq = AbelFirstKind::new(ScalarFunction::zero(), x().sin(), x().powi(2) + 1.0, x().cos())
            .on(Interval::new(-2.0, 2.0).unwrap())
            .unwrap();
        let cf = to_canonical_form(&eq, &Anchor::at(0.0)).unwrap();
        for t in [-1.5, 0.2, 1.1] {
            let h = 1e-3;
            let z = |s: f64| cf.zeta.eval(s).unwrap();
            let fd = (8.0 * (z(t + h) - z(t - h)) - (z(t + 2.0 * h) - z(t - 2.0 * h))) / (12.0 * h);
            let e = eq.f2().eval(t).unwrap() * cf.omega_t.eval(t).unwrap();
            assert!((fd - e).abs() < 1e-8);
        }
    }

    #[test]
    fn lemma2_agrees_with_direct_integration() {
        // η̃(0) = 0.5 blows up at x ≈ 0.61 for k = 1/2; −k/2 stays bounded
        for (k, y0, x1) in [(1.0, 0.5, 0.4), (2.0, 0.5, 0.4), (0.5, 0.5, 0.4), (1.0, -0.5, 2.0), (2.0, -1.0, 2.0), (0.5, -0.25, 2.0)] {
            let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 1.0 / k]);
            let sol = ConstantAppellSolution::new(&eq, &Anchor::at(0.0), k, 0.0, y0).unwrap();
            let xs = grid(0.0, x1, 1e-3);
            let curve = sol.curve(&xs).unwrap();
            assert!(residual(&eq, &curve).unwrap() < 1e-6);
            let direct = solve_at(
                |_, e: &[f64; 1]| Ok([e[0] * e[0] + e[0].powi(3) / k]),
                0.0,
                [y0],
                &xs[1..],
                StepControl::tolerances(1e-12, 1e-14),
            )
            .unwrap();
            for (&(_, y), d) in curve.points()[1..].iter().zip(direct) {
                assert!((y - d[0]).abs() < 1e-6, "{k}");
            }
        }
    }

    #[test]
    fn equilibrium_and_branch_exit() {
        let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 1.0]);
        let xs = grid(0.0, 1.0, 1e-3);
        let curve = solve_constant_appell(&eq, &Anchor::at(0.0), 1.0, 0.0, -1.0, &xs).unwrap();
        assert!(curve.ys().all(|y| y == -1.0));
        assert_eq!(residual(&eq, &curve).unwrap(), 0.0);
        // η̃(0) = 1 blows up at ζ = H(0) − H(1) = ln 2... not reached before x = 0.3
        let sol = ConstantAppellSolution::new(&eq, &Anchor::at(0.0), 1.0, 0.0, 1.0).unwrap();
        let blow = lemma2_relation(1.0, 0.0) - sol.constant;
        assert!(sol.eta_at(0.9 * blow).is_ok());
        assert!(matches!(sol.eta_at(blow + 0.1), Err(Error::BranchExit { boundary }) if boundary == f64::INFINITY));
    }

    #[test]
    fn non_constant_invariant_is_refused() {
        let z = ScalarFunction::zero;
        let eq = AbelFirstKind::new(z(), z(), ScalarFunction::constant(1.0), ScalarFunction::identity());
        assert!(matches!(ConstantAppellSolution::new(&eq, &Anchor::at(0.0), 1.0, 0.0, 0.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn potential_is_constant_along_the_implicit_solution() {
        let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 0.5]);
        let sol = ConstantAppellSolution::new(&eq, &Anchor::at(0.0), 2.0, 0.0, 0.3).unwrap();
        let cert = integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().unwrap();
        assert_eq!(cert.k, 2.0);
        let psi0 = potential_psi(&cert, 0.0, 1.0 / 0.3).unwrap();
        for x in grid(0.0, 1.0, 0.05) {
            let nu = 1.0 / sol.eta_at(x).unwrap();
            assert!((potential_psi(&cert, x, nu).unwrap() - psi0).abs() < 1e-6 * psi0.abs().max(1.0));
        }
    }
}

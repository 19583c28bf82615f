//! Integrating factor for `dy/dx = f1·y + f2·y² + f3·y³`.
//!
//! With `E = exp(∫f1)`, `P = f3·E²`, `Q = f2·E` and `ν = E/y`, the equation
//! becomes `ν·dν/dx = −(P + Q·ν)`. When `Q = k·P` the form has an integrating
//! factor and `Ψ(x, ν) = (1 + kν)·exp(−k(ν + k∫P))` is conserved.

use super::normal::to_normal_form;
use crate::abel::AbelFirstKind;
use crate::function::{Anchor, ScalarFunction};
use crate::{Error, Result};
use alloc::format;

/// Relative tolerance of the condition `Q = k·P`.
pub const CONDITION_TOL: f64 = 1e-8;
/// Relative tolerance of the invariant cross-check.
pub const CROSS_CHECK_TOL: f64 = 1e-6;
const GRID: usize = 100;
const RELOCATIONS: usize = 64;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone)]
pub struct IntegratingFactorCertificate {
    pub k: f64,
    pub p: ScalarFunction,
    pub q: ScalarFunction,
    /// `∫P`, zero at the anchor.
    pub int_p: ScalarFunction,
    /// `E = exp(∫f1)`.
    pub multiplier: ScalarFunction,
    pub anchor: Anchor,
}

/// `Some` certificate when `Q/P` is constant on the working interval.
pub fn integrating_factor_check(eq: &AbelFirstKind, anchor: &Anchor) -> Result<Option<IntegratingFactorCertificate>> {
    if !eq.coefficient_vanishes(0)? {
        return Err(Error::precondition("the integrating-factor test needs f0 ≡ 0"));
    }
    let d = eq.domain();
    let e = eq.f1().exp_antiderivative(anchor)?.with_domain(d);
    let p = (eq.f3() * &(&e * &e)).with_domain(d);
    let q = (eq.f2() * &e).with_domain(d);

    // probe: midpoint, then golden-ratio steps through the window
    let (lo, hi) = d.window();
    let mut probe = None;
    let mut frac: f64 = 0.5;
    for _ in 0..RELOCATIONS {
        let x = lo + frac * (hi - lo);
        if let Ok(pv) = p.eval(x) {
            if pv.abs() > 1e-300 && pv.is_finite() && eq.singularities().iter().all(|s| (x - s).abs() > 1e-6) {
                probe = Some((x, pv));
                break;
            }
        }
        frac = (frac + GOLDEN).fract();
    }
    let (x_star, p_star) = probe.ok_or_else(|| Error::precondition("P vanishes at every probe point"))?;
    let k = q.eval(x_star)? / p_star;

    for x in eq.probe_grid(GRID) {
        let (pv, qv) = (p.eval(x)?, q.eval(x)?);
        let kp = k * pv;
        if (qv - kp).abs() > CONDITION_TOL * qv.abs().max(kp.abs()).max(1e-300) && (qv - kp).abs() > 1e-15 {
            return Ok(None);
        }
    }
    let int_p = p.antiderivative(anchor)?.with_domain(d);
    Ok(Some(IntegratingFactorCertificate { k, p, q, int_p, multiplier: e, anchor: *anchor }))
}

impl IntegratingFactorCertificate {
    /// `ν = E(x)/y`.
    pub fn nu(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.multiplier.eval(x)? / y)
    }

    /// `dν/dx = −Q − P/ν`.
    pub fn nu_rhs(&self, x: f64, nu: f64) -> Result<f64> {
        Ok(-self.q.eval(x)? - self.p.eval(x)? / nu)
    }
}

/// `Ψ(x, ν) = (1 + kν)·exp(−k(ν + k·∫P))`.
pub fn potential_psi(cert: &IntegratingFactorCertificate, x: f64, nu: f64) -> Result<f64> {
    let k = cert.k;
    Ok((1.0 + k * nu) * (-k * (nu + k * cert.int_p.eval(x)?)).exp())
}

/// `I(x) = (2k³/27)·exp(∫ f2²/f3 dx)`, cross-checked against the normal-form
/// invariant built with the certificate's anchor.
pub fn invariant_after_condition(cert: &IntegratingFactorCertificate, eq: &AbelFirstKind) -> Result<ScalarFunction> {
    let d = eq.domain();
    let k = cert.k;
    let integrand = &(eq.f2() * eq.f2()) / eq.f3();
    let inv = integrand.exp_antiderivative(&cert.anchor.with_scale(1.0))?.scale(2.0 * k * k * k / 27.0).with_domain(d);
    let nf = to_normal_form(eq, &cert.anchor)?;
    let mut worst: f64 = 0.0;
    for x in eq.probe_grid(50) {
        let (a, b) = (inv.eval(x)?, nf.invariant.eval(x)?);
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1e-300));
    }
    if worst > CROSS_CHECK_TOL {
        return Err(Error::Consistency(format!("closing invariant deviates from the normal-form invariant by {worst:e}")));
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Interval;
    use crate::ode::{Flow, Halt, Integrator, StepControl};

    #[test]
    fn constant_ratio_certificates() {
        let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 1.0]);
        let c = integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().unwrap();
        assert_eq!(c.k, 1.0);
        let q = ScalarFunction::identity().powi(2) + 1.0;
        let z = ScalarFunction::zero;
        let eq = AbelFirstKind::new(z(), z(), q.scale(2.0), q);
        let c = integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().unwrap();
        assert_eq!(c.k, 2.0);
    }

    #[test]
    fn non_constant_ratio_is_absent() {
        let z = ScalarFunction::zero;
        let eq = AbelFirstKind::new(z(), z(), ScalarFunction::identity(), ScalarFunction::constant(1.0));
        assert!(integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().is_none());
    }

    #[test]
    fn preconditions() {
        let eq = AbelFirstKind::constants([1.0, 0.0, 1.0, 1.0]);
        assert!(matches!(integrating_factor_check(&eq, &Anchor::at(0.0)), Err(Error::Precondition(_))));
        let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(integrating_factor_check(&eq, &Anchor::at(0.0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn probe_is_relocated_off_a_zero_of_p() {
        // f3 = x vanishes at the window midpoint; f2 = 3x keeps k = 3
        let z = ScalarFunction::zero;
        let x = ScalarFunction::identity;
        let eq = AbelFirstKind::new(z(), z(), x().scale(3.0), x());
        let c = integrating_factor_check(&eq, &Anchor::at(1.0)).unwrap().unwrap();
        assert!((c.k - 3.0).abs() < 1e-15);
    }

    #[test]
    fn potential_trivial_values() {
        let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 1.0]);
        let c = integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().unwrap();
        assert_eq!(potential_psi(&c, 0.0, 0.0).unwrap(), 1.0);
        for x in [-1.0, 0.5, 4.0] {
            assert_eq!(potential_psi(&c, x, -1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn potential_is_conserved_along_numerical_solutions() {
        let x = ScalarFunction::identity;
        let z = ScalarFunction::zero;
        let f3 = (x().scale(0.5)).cos() + 2.0;
        let f1 = x().sin().scale(0.3);
        // f2 = k·f3·E with E = exp(∫f1) anchored at 0, k = 0.8
        let e = f1.exp_antiderivative(&Anchor::at(0.0)).unwrap();
        let f2 = (&f3 * &e).scale(0.8);
        let eq = AbelFirstKind::new(z(), f1, f2, f3).on(Interval::new(-3.0, 3.0).unwrap()).unwrap();
        let c = integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().unwrap();
        assert!((c.k - 0.8).abs() < 1e-12);
        // ν < −1/k runs away linearly; ν > 0 reaches ν = 0 (y = ∞) forwards,
        // so it is followed backwards
        for (nu0, x1) in [(-3.0, 2.0), (1.0, -2.0), (-1.0, -2.0)] {
            let psi0 = potential_psi(&c, 0.0, nu0).unwrap();
            let mut drift: f64 = 0.0;
            let mut it = Integrator::new(0.0, [nu0], StepControl::tolerances(1e-11, 1e-13));
            let halt = it
                .advance(&mut |t, v: &[f64; 1]| Ok([c.nu_rhs(t, v[0])?]), x1, |t, v| {
                    drift = drift.max((potential_psi(&c, t, v[0]).unwrap() - psi0).abs());
                    Flow::Continue
                })
                .unwrap();
            assert_eq!(halt, Halt::Reached);
            assert!(drift < 1e-6, "{nu0}: {drift}");
        }
    }

    #[test]
    fn closing_invariant() {
        let eq = AbelFirstKind::constants([0.0, 0.0, 1.0, 1.0]).on(Interval::new(-2.0, 2.0).unwrap()).unwrap();
        let c = integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().unwrap();
        let inv = invariant_after_condition(&c, &eq).unwrap();
        for x in [-1.0, 0.0, 1.5] {
            assert!((inv.eval(x).unwrap() - 2.0 / 27.0 * x.exp()).abs() < 1e-12);
        }
        let eq = AbelFirstKind::constants([0.0, 0.7, 0.0, 1.0]).on(Interval::new(-2.0, 2.0).unwrap()).unwrap();
        let c = integrating_factor_check(&eq, &Anchor::at(0.0)).unwrap().unwrap();
        assert_eq!(c.k, 0.0);
        assert_eq!(invariant_after_condition(&c, &eq).unwrap().eval(1.0).unwrap(), 0.0);
    }
}

//! Normal form `dη/dξ = η³ + I(x)` under `y = ω·η − f2/(3f3)`,
//! `ξ = ∫ f3·ω² dx`, and the closed-form solution when `I ≡ 0`.

use crate::abel::AbelFirstKind;
use crate::curve::SampledCurve;
use crate::function::{Anchor, Interval, ScalarFunction};
use crate::roots::{bisect, solve_on_branch};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// `|I|` below this counts as a null invariant.
pub const NULL_TOL: f64 = 1e-8;
/// Sample count for nonvanishing checks.
pub const CHECK_SAMPLES: usize = 256;

#[derive(Debug, Clone)]
pub struct NormalForm {
    /// `ω = scale·exp(∫(f1 − f2²/(3f3)) dx)`.
    pub omega: ScalarFunction,
    /// `ξ = ∫ f3·ω² dx`, zero at the anchor.
    pub xi: ScalarFunction,
    /// `f2/(3f3)`.
    pub shift: ScalarFunction,
    /// `I(x)`.
    pub invariant: ScalarFunction,
    pub domain: Interval,
}

/// Fails with a singularity error naming `name` if `f` changes sign or
/// vanishes on the sampled working interval.
pub(crate) fn require_nonvanishing(f: &ScalarFunction, name: &'static str, eq: &AbelFirstKind) -> Result<()> {
    let grid = eq.probe_grid(CHECK_SAMPLES);
    let mut prev: Option<(f64, f64)> = None;
    for &x in &grid {
        let v = f.eval(x).map_err(|e| e.named(name))?;
        if v == 0.0 {
            return Err(Error::Singular { coefficient: name, x, pole: x });
        }
        if let Some((px, pv)) = prev {
            if pv.signum() != v.signum() {
                let z = bisect(|t| f.eval(t), px, x, 1e-12).unwrap_or(0.5 * (px + x));
                return Err(Error::Singular { coefficient: name, x: z, pole: z });
            }
        }
        prev = Some((x, v));
    }
    Ok(())
}

pub fn to_normal_form(eq: &AbelFirstKind, anchor: &Anchor) -> Result<NormalForm> {
    require_nonvanishing(eq.f3(), "f3", eq)?;
    let d = eq.domain();
    let f0 = eq.f0();
    let f1 = eq.f1();
    let f2 = eq.f2();
    let f3 = eq.f3();
    let ratio = f2 / f3;
    let shift = ratio.scale(1.0 / 3.0);
    let exponent = f1 - &(f2 * &shift);
    let omega = exponent.exp_antiderivative(anchor)?.with_domain(d);
    let xi = (f3 * &(&omega * &omega)).antiderivative(anchor)?.with_domain(d);
    let f2cube = f2.powi(3);
    let numer = f0 + &ratio.derivative().scale(1.0 / 3.0) - (f1 * &shift) + (&f2cube / &(f3 * f3)).scale(2.0 / 27.0);
    let invariant = (&numer / &(f3 * &omega.powi(3))).with_domain(d);
    Ok(NormalForm { omega, xi, shift: shift.with_domain(d), invariant, domain: d })
}

impl NormalForm {
    /// Largest `|I|` on `points`.
    pub fn max_invariant(&self, points: &[f64]) -> Result<f64> {
        points.iter().try_fold(0.0f64, |m, &x| Ok(m.max(self.invariant.eval(x)?.abs())))
    }

    /// `y = ω·η − f2/(3f3)`.
    pub fn to_y(&self, x: f64, eta: f64) -> Result<f64> {
        Ok(self.omega.eval(x)? * eta - self.shift.eval(x)?)
    }

    /// `η = (y + f2/(3f3))/ω`.
    pub fn to_eta(&self, x: f64, y: f64) -> Result<f64> {
        Ok((y + self.shift.eval(x)?) / self.omega.eval(x)?)
    }
}

/// `y = sign·ω/√(c − 2ξ) − f2/(3f3)`, a solution when `I ≡ 0`. The
/// degenerate member `η ≡ 0` has `sign = 0`.
#[derive(Debug, Clone)]
pub struct NullInvariantSolution {
    pub form: NormalForm,
    pub c: f64,
    pub sign: f64,
}

impl NullInvariantSolution {
    /// Checks `|I| < NULL_TOL` on `points` (at least a probe grid).
    pub fn new(form: NormalForm, c: f64, sign: f64, points: &[f64]) -> Result<Self> {
        let mut probe = form.domain.grid(64);
        probe.extend_from_slice(points);
        let worst = form.max_invariant(&probe)?;
        if !(worst < NULL_TOL) {
            return Err(Error::precondition(format!("invariant is not null (max |I| = {worst:e})")));
        }
        if !c.is_finite() {
            return Err(Error::invalid("c must be finite"));
        }
        Ok(NullInvariantSolution { form, c, sign: if sign == 0.0 { 0.0 } else { sign.signum() } })
    }

    /// Member through `(x0, y0)`: `c = 2ξ(x0) + 1/η0²`.
    pub fn through(form: NormalForm, x0: f64, y0: f64, points: &[f64]) -> Result<Self> {
        let eta = form.to_eta(x0, y0)?;
        let c = if eta == 0.0 { 0.0 } else { 2.0 * form.xi.eval(x0)? + 1.0 / (eta * eta) };
        Self::new(form, c, if eta == 0.0 { 0.0 } else { eta.signum() }, points)
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        if self.sign == 0.0 {
            return Ok(-self.form.shift.eval(x)?);
        }
        let gap = self.c - 2.0 * self.form.xi.eval(x)?;
        if !(gap > 0.0) {
            return Err(Error::BlowUp { critical: self.blow_up(x)?.unwrap_or(x) });
        }
        Ok(self.sign * self.form.omega.eval(x)? / gap.sqrt() - self.form.shift.eval(x)?)
    }

    /// Where `c − 2ξ(x) = 0`, searched from `from` towards the side where
    /// `c − 2ξ` decreases. `None` when the working interval is left first.
    pub fn blow_up(&self, from: f64) -> Result<Option<f64>> {
        if self.sign == 0.0 {
            return Ok(None);
        }
        let d = self.form.domain;
        let xi = &self.form.xi;
        let g = |x: f64| Ok((xi.eval(x)?, xi.deriv(x)?));
        match solve_on_branch(g, d.lo, d.hi, from, 0.5 * self.c, 1e-13) {
            Ok(x) => Ok(Some(x)),
            Err(Error::BranchExit { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn curve(&self, targets: &[f64]) -> Result<SampledCurve> {
        let pts = targets.iter().map(|&x| self.value_at(x).map(|y| (x, y))).collect::<Result<Vec<_>>>()?;
        SampledCurve::new(pts)
    }
}

/// Closed-form curve for an equation with null invariant.
pub fn solve_null_invariant(eq: &AbelFirstKind, anchor: &Anchor, c: f64, sign: f64, targets: &[f64]) -> Result<SampledCurve> {
    let nf = to_normal_form(eq, anchor)?;
    NullInvariantSolution::new(nf, c, sign, targets)?.curve(targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abel::residual;
    use crate::quadrature::integrate;
    use std::vec::Vec;

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + i as f64 * h).collect()
    }

    #[test]
    fn normal_form_of_an_already_normal_equation() {
        for i0 in [1.0, -0.4, 0.0] {
            let eq = AbelFirstKind::constants([i0, 0.0, 0.0, 1.0]);
            let nf = to_normal_form(&eq, &Anchor::at(0.5)).unwrap();
            for x in [-2.0, 0.1, 3.0] {
                assert_eq!(nf.omega.eval(x).unwrap(), 1.0);
                assert!((nf.xi.eval(x).unwrap() - (x - 0.5)).abs() < 1e-12);
                assert_eq!(nf.invariant.eval(x).unwrap(), i0);
            }
        }
    }

    #[test]
    fn xi_derivative_and_round_trip() {
        let x = ScalarFunction::identity;
        let eq = AbelFirstKind::new(x().scale(0.3), x().sin(), x().cos() + 2.0, x().powi(2) + 1.0)
            .on(Interval::new(-2.0, 2.0).unwrap())
            .unwrap();
        let nf = to_normal_form(&eq, &Anchor::at(0.0)).unwrap();
        for t in eq.probe_grid(20) {
            let h = 1e-4;
            let fd = (8.0 * (nf.xi.eval(t + h).unwrap() - nf.xi.eval(t - h).unwrap())
                - (nf.xi.eval(t + 2.0 * h).unwrap() - nf.xi.eval(t - 2.0 * h).unwrap()))
                / (12.0 * h);
            let w = nf.omega.eval(t).unwrap();
            assert!((fd - eq.f3().eval(t).unwrap() * w * w).abs() < 1e-8);
            let y = nf.to_y(t, 0.7).unwrap();
            assert!((nf.to_eta(t, y).unwrap() - 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn invariant_matches_direct_formula() {
        // f = (1, 0, 3, 1): ω = e^{−3x}, I = (1 + 2)/e^{−9x} = 3e^{9x}
        let eq = AbelFirstKind::constants([1.0, 0.0, 3.0, 1.0]).on(Interval::new(-1.0, 1.0).unwrap()).unwrap();
        let nf = to_normal_form(&eq, &Anchor::at(0.0)).unwrap();
        for x in [-0.5, 0.0, 0.4] {
            let i = nf.invariant.eval(x).unwrap();
            assert!((i / (3.0 * (9.0 * x).exp()) - 1.0).abs() < 1e-9, "{x} {i}");
        }
    }

    #[test]
    fn transformed_dynamics_reproduce_the_equation() {
        // solve dη/dξ = η³ + I(x(ξ)) along x, i.e. dη/dx = (η³ + I)·ξ'(x)
        use crate::ode::{solve_at, StepControl};
        let x = ScalarFunction::identity;
        let eq = AbelFirstKind::new(x().scale(0.2), x().scale(0.5), ScalarFunction::constant(0.6), x().cos() + 1.5)
            .on(Interval::new(-1.0, 1.0).unwrap())
            .unwrap();
        let nf = to_normal_form(&eq, &Anchor::at(0.0)).unwrap();
        let xs = grid(0.0, 0.5, 1e-3);
        let eta = solve_at(
            |t, e: &[f64; 1]| {
                let w = nf.omega.eval(t)?;
                Ok([(e[0].powi(3) + nf.invariant.eval(t)?) * eq.f3().eval(t)? * w * w])
            },
            0.0,
            [0.3],
            &xs[1..],
            StepControl::tolerances(1e-11, 1e-13),
        )
        .unwrap();
        let mut pts = alloc::vec![(0.0, nf.to_y(0.0, 0.3).unwrap())];
        for (&t, e) in xs[1..].iter().zip(eta) {
            pts.push((t, nf.to_y(t, e[0]).unwrap()));
        }
        let r = residual(&eq, &SampledCurve::new(pts).unwrap()).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn separable_cubic_null_solution() {
        let eq = AbelFirstKind::constants([0.0, 0.0, 0.0, 1.0]);
        let xs = grid(-1.0, 0.4, 1e-3);
        let curve = solve_null_invariant(&eq, &Anchor::at(0.0), 1.0, 1.0, &xs).unwrap();
        for &(x, y) in curve.points() {
            assert!((y - 1.0 / (1.0 - 2.0 * x).sqrt()).abs() < 1e-12);
        }
        assert!(residual(&eq, &curve).unwrap() < 1e-6);
        let nf = to_normal_form(&eq, &Anchor::at(0.0)).unwrap();
        let sol = NullInvariantSolution::new(nf, 1.0, 1.0, &[]).unwrap();
        assert!((sol.blow_up(0.0).unwrap().unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(sol.value_at(0.6), Err(Error::BlowUp { critical }) if (critical - 0.5).abs() < 1e-12));
    }

    #[test]
    fn exponential_multiplier_null_solution() {
        // f = (0, 1, 0, 1): ω = eˣ, ξ = (e^{2x} − 1)/2
        let eq = AbelFirstKind::constants([0.0, 1.0, 0.0, 1.0]).on(Interval::new(-3.0, 3.0).unwrap()).unwrap();
        let xs = grid(-1.0, 0.3, 1e-3);
        let curve = solve_null_invariant(&eq, &Anchor::at(0.0), 1.5, -1.0, &xs).unwrap();
        for &(x, y) in curve.points().iter().step_by(97) {
            let xi = integrate(|t| Ok((2.0 * t).exp()), 0.0, x, 1e-13).unwrap();
            assert!((y + x.exp() / (1.5 - 2.0 * xi).sqrt()).abs() < 1e-10);
        }
        assert!(residual(&eq, &curve).unwrap() < 1e-6);
    }

    #[test]
    fn initial_value_is_reproduced() {
        let eq = AbelFirstKind::constants([0.0, 1.0, 0.0, 1.0]).on(Interval::new(-3.0, 3.0).unwrap()).unwrap();
        for y0 in [0.8, -2.0, 0.0] {
            let nf = to_normal_form(&eq, &Anchor::at(0.0)).unwrap();
            let sol = NullInvariantSolution::through(nf, 0.25, y0, &[]).unwrap();
            assert!((sol.value_at(0.25).unwrap() - y0).abs() < 1e-14 * y0.abs().max(1.0));
        }
    }

    #[test]
    fn non_null_invariant_is_refused() {
        let eq = AbelFirstKind::constants([1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(solve_null_invariant(&eq, &Anchor::at(0.0), 1.0, 1.0, &[0.0]), Err(Error::Precondition(_))));
    }

    #[test]
    fn vanishing_cubic_coefficient_is_singular() {
        let eq = AbelFirstKind::new(
            ScalarFunction::zero(),
            ScalarFunction::zero(),
            ScalarFunction::zero(),
            ScalarFunction::identity() - 0.3,
        )
        .on(Interval::new(-1.0, 1.0).unwrap())
        .unwrap();
        match to_normal_form(&eq, &Anchor::at(0.0)) {
            Err(Error::Singular { coefficient, pole, .. }) => {
                assert_eq!(coefficient, "f3");
                assert!((pole - 0.3).abs() < 1e-10);
            }
            other => panic!("{other:?}"),
        }
    }
}

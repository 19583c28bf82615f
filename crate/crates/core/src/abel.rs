//! Abel equations of the first and second kind, their link to second-order
//! nonlinear oscillators, linear-term elimination, Riccati reduction and the
//! residual check every solution in the crate is verified with.

use crate::curve::SampledCurve;
use crate::function::{Anchor, Interval, ScalarFunction};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Minimum number of probe points for "identically zero" tests.
pub const ZERO_PROBES: usize = 16;
/// Absolute level under which a sampled coefficient counts as zero.
pub const ZERO_TOL: f64 = 1e-14;

const NAMES: [&str; 4] = ["f0", "f1", "f2", "f3"];

/// `dy/dx = f0(x) + f1(x)·y + f2(x)·y² + f3(x)·y³`.
#[derive(Debug, Clone)]
pub struct AbelFirstKind {
    f: [ScalarFunction; 4],
    domain: Interval,
}

impl AbelFirstKind {
    /// The working domain is the intersection of the coefficient domains.
    pub fn new(f0: ScalarFunction, f1: ScalarFunction, f2: ScalarFunction, f3: ScalarFunction) -> Self {
        let domain = f0.domain().intersect(&f1.domain()).intersect(&f2.domain()).intersect(&f3.domain());
        AbelFirstKind { f: [f0, f1, f2, f3], domain }
    }

    /// Constant coefficients `(A0, A1, A2, A3)`.
    pub fn constants(a: [f64; 4]) -> Self {
        Self::new(
            ScalarFunction::constant(a[0]),
            ScalarFunction::constant(a[1]),
            ScalarFunction::constant(a[2]),
            ScalarFunction::constant(a[3]),
        )
    }

    /// Restrict the working domain (e.g. to a pole-free subinterval).
    pub fn on(mut self, domain: Interval) -> Result<Self> {
        let d = self.domain.intersect(&domain);
        if d.is_empty() {
            return Err(Error::invalid("restricted domain is empty"));
        }
        self.domain = d;
        for f in &mut self.f {
            *f = f.clone().with_domain(d);
        }
        Ok(self)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn f0(&self) -> &ScalarFunction {
        &self.f[0]
    }
    pub fn f1(&self) -> &ScalarFunction {
        &self.f[1]
    }
    pub fn f2(&self) -> &ScalarFunction {
        &self.f[2]
    }
    pub fn f3(&self) -> &ScalarFunction {
        &self.f[3]
    }

    pub fn coefficients(&self) -> &[ScalarFunction; 4] {
        &self.f
    }

    /// All declared singular points of the coefficients.
    pub fn singularities(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.f.iter().flat_map(|f| f.singularities().iter().copied()).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }

    /// `(f0, f1, f2, f3)(x)`; a singular coefficient is reported by name.
    pub fn eval(&self, x: f64) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (i, f) in self.f.iter().enumerate() {
            out[i] = f.eval(x).map_err(|e| e.named(NAMES[i]))?;
        }
        Ok(out)
    }

    /// `F(x, y) = f0 + f1·y + f2·y² + f3·y³`.
    pub fn rhs(&self, x: f64, y: f64) -> Result<f64> {
        let [f0, f1, f2, f3] = self.eval(x)?;
        Ok(f0 + y * (f1 + y * (f2 + y * f3)))
    }

    /// Probe points of the working domain, skipping singular neighbourhoods.
    pub fn probe_grid(&self, n: usize) -> Vec<f64> {
        let sing = self.singularities();
        self.domain
            .grid(n)
            .into_iter()
            .filter(|x| sing.iter().all(|p| (x - p).abs() > 1e-6))
            .collect()
    }

    /// True when `f_i` vanishes at every probe point (at least
    /// [`ZERO_PROBES`] of them).
    pub fn coefficient_vanishes(&self, i: usize) -> Result<bool> {
        let grid = self.probe_grid(4 * ZERO_PROBES);
        self.f[i].vanishes_on(&grid, ZERO_TOL).map_err(|e| e.named(NAMES[i]))
    }

    /// Cubic-specific operations call this first; `f3 ≡ 0` belongs to
    /// [`reduce_to_riccati`].
    pub fn require_cubic(&self) -> Result<()> {
        if self.coefficient_vanishes(3)? {
            Err(Error::precondition("f3 vanishes identically; use the Riccati reduction"))
        } else {
            Ok(())
        }
    }
}

/// `(w + s)·dw/dx + p + q1·w + q2·w² + r·w³ = 0`.
#[derive(Debug, Clone)]
pub struct AbelSecondKind {
    pub p: ScalarFunction,
    pub q1: ScalarFunction,
    pub q2: ScalarFunction,
    pub r: ScalarFunction,
    pub s: ScalarFunction,
}

impl AbelSecondKind {
    pub fn new(p: ScalarFunction, q1: ScalarFunction, q2: ScalarFunction, r: ScalarFunction, s: ScalarFunction) -> Self {
        AbelSecondKind { p, q1, q2, r, s }
    }

    fn domain(&self) -> Result<Interval> {
        let d = self.p.domain();
        let all = [&self.q1, &self.q2, &self.r, &self.s];
        if all.iter().any(|f| f.domain() != d) {
            return Err(Error::invalid("second-kind coefficients must share one domain"));
        }
        Ok(d)
    }
}

/// First-kind form of a second-kind equation under `1/y = w + s`.
pub fn second_to_first(eq: &AbelSecondKind) -> Result<AbelFirstKind> {
    eq.domain()?;
    let AbelSecondKind { p, q1, q2, r, s } = eq;
    let s2 = s * s;
    let s3 = &s2 * s;
    let f0 = r.clone();
    let f1 = q2 - &(r * s).scale(3.0);
    let f2 = q1 - &s.derivative() - (q2 * s).scale(2.0) + (r * &s2).scale(3.0);
    let f3 = p - &(q1 * s) + (q2 * &s2) - (r * &s3);
    Ok(AbelFirstKind::new(f0, f1, f2, f3))
}

/// Second-kind equation with `s ≡ 0` carrying the same coefficients:
/// `p = f3, q1 = f2, q2 = f1, r = f0`.
pub fn first_to_second(eq: &AbelFirstKind) -> AbelSecondKind {
    let d = eq.domain();
    let [f0, f1, f2, f3] = eq.coefficients().clone();
    AbelSecondKind::new(
        f3.with_domain(d),
        f2.with_domain(d),
        f1.with_domain(d),
        f0.with_domain(d),
        ScalarFunction::zero().with_domain(d),
    )
}

/// `x'' + c2(x)·x' + c3(x) + c1(x)·x'² + c0(x)·x'³ = 0` with `' = d/dζ`.
///
/// Its solutions correspond to those of the first-kind equation with the same
/// coefficients through `dx/dζ = v(x)`, `v = 1/y`.
#[derive(Debug, Clone)]
pub struct OscillatorForm {
    pub c0: ScalarFunction,
    pub c1: ScalarFunction,
    pub c2: ScalarFunction,
    pub c3: ScalarFunction,
}

impl OscillatorForm {
    /// `x''` for given position and velocity.
    pub fn acceleration(&self, x: f64, v: f64) -> Result<f64> {
        let (c0, c1, c2, c3) = (self.c0.eval(x)?, self.c1.eval(x)?, self.c2.eval(x)?, self.c3.eval(x)?);
        Ok(-(c2 * v + c3 + c1 * v * v + c0 * v * v * v))
    }
}

pub fn oscillator_from_abel(eq: &AbelFirstKind) -> OscillatorForm {
    let [c0, c1, c2, c3] = eq.coefficients().clone();
    OscillatorForm { c0, c1, c2, c3 }
}

pub fn abel_from_oscillator(osc: &OscillatorForm) -> AbelFirstKind {
    AbelFirstKind::new(osc.c0.clone(), osc.c1.clone(), osc.c2.clone(), osc.c3.clone())
}

/// Result of removing the linear term with `y = z·E`, `E = exp(∫f1)`.
#[derive(Debug, Clone)]
pub struct LinearElimination {
    /// `dz/dx = h0 + h2·z² + h3·z³`.
    pub reduced: AbelFirstKind,
    /// `E(x)`, anchored so that `E(anchor.at) = anchor.scale`.
    pub multiplier: ScalarFunction,
}

impl LinearElimination {
    /// Map a solution of the reduced equation back: `y = z·E`.
    pub fn map_back(&self, z: &SampledCurve) -> Result<SampledCurve> {
        let pts = z
            .points()
            .iter()
            .map(|&(x, zv)| self.multiplier.eval(x).map(|e| (x, zv * e)))
            .collect::<Result<Vec<_>>>()?;
        SampledCurve::new(pts)
    }
}

/// `h0 = f0/E, h2 = f2·E, h3 = f3·E²`.
pub fn eliminate_linear(eq: &AbelFirstKind, anchor: &Anchor) -> Result<LinearElimination> {
    let e = eq.f1().exp_antiderivative(anchor).map_err(|e| e.named("f1"))?;
    let h0 = eq.f0() / &e;
    let h2 = eq.f2() * &e;
    let h3 = eq.f3() * &(&e * &e);
    Ok(LinearElimination { reduced: AbelFirstKind::new(h0, ScalarFunction::zero(), h2, h3), multiplier: e })
}

/// Reduced Riccati equation `dz/dx = h0 + h2·z²` of an equation with `f3 ≡ 0`.
#[derive(Debug, Clone)]
pub struct RiccatiForm {
    pub h0: ScalarFunction,
    pub h2: ScalarFunction,
    pub multiplier: ScalarFunction,
}

pub fn reduce_to_riccati(eq: &AbelFirstKind, anchor: &Anchor) -> Result<RiccatiForm> {
    if !eq.coefficient_vanishes(3)? {
        return Err(Error::precondition("Riccati reduction needs f3 ≡ 0"));
    }
    let LinearElimination { reduced, multiplier } = eliminate_linear(eq, anchor)?;
    let [h0, _, h2, _] = reduced.coefficients().clone();
    Ok(RiccatiForm { h0, h2, multiplier })
}

/// `max |dy/dx − F(x, y)|` over a sampled curve; slopes come from
/// [`SampledCurve::slopes`].
pub fn residual(eq: &AbelFirstKind, curve: &SampledCurve) -> Result<f64> {
    if curve.len() < 5 {
        return Err(Error::invalid(format!("residual needs at least 5 points, got {}", curve.len())));
    }
    let slopes = curve.slopes()?;
    let mut worst: f64 = 0.0;
    for (&(x, y), s) in curve.points().iter().zip(slopes) {
        worst = worst.max((s - eq.rhs(x, y)?).abs());
    }
    Ok(worst)
}

/// Residual at each point, for diagnostics.
pub fn pointwise_residual(eq: &AbelFirstKind, curve: &SampledCurve) -> Result<Vec<f64>> {
    let slopes = curve.slopes()?;
    curve.points().iter().zip(slopes).map(|(&(x, y), s)| Ok((s - eq.rhs(x, y)?).abs())).collect()
}

//! The nonlinear oscillator behind Vein's equation
//!
//! ```text
//! x'' + h2(x)·x' + h3(x) = 0,   h2 = 3(ax + b²)/(bx + a²)³,   h3 = K(x)/(bx + a²)⁵
//! ```
//!
//! with `K = x³ − 3abx − a³ − b³`, written as the planar system
//! `x' = v`, `v' = −h2·v − h3`. Fixed points sit at the roots of `K`: one
//! real (`a + b`, a stable spiral) and a complex-conjugate pair.

use crate::abel::eliminate_linear;
use crate::function::{Anchor, ScalarFunction};
use crate::ode::{Flow, Halt, Integrator, StepControl};
use crate::poly::{Polynomial, Rational};
use crate::vein::{vein_equation, VeinParams};
use crate::{Error, Result, SINGULARITY_EPS};
use alloc::vec;
use alloc::vec::Vec;
pub use num_complex::Complex64;

const SQRT3: f64 = 1.732_050_807_568_877_2;
/// Trajectories stop this close to the pole of the coefficients.
pub const POLE_PROXIMITY: f64 = 1e-6;
/// Trajectories stop this close to the real fixed point.
pub const CONVERGED: f64 = 1e-10;
/// `|δ2|` below this counts as a vanishing determinant.
const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct VeinOscillator {
    pub a: f64,
    pub b: f64,
    pub h2: ScalarFunction,
    pub h3: ScalarFunction,
    h2_rat: Rational,
    h3_rat: Rational,
    /// `K/(x − (a + b))`, so that `h3 = (x − a − b)·q/D⁵` without cancellation.
    quotient: Polynomial,
}

/// `h2` and `h3` as rational functions; `a = b = 0` leaves both `0/0`.
pub fn build(a: f64, b: f64) -> Result<VeinOscillator> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("a and b must be finite"));
    }
    if a == 0.0 && b == 0.0 {
        return Err(Error::DegenerateParameters("a = b = 0 makes h2 and h3 0/0".into()));
    }
    let d = Polynomial::new(vec![a * a, b]);
    let h2_rat = Rational::new(Polynomial::new(vec![3.0 * b * b, 3.0 * a]), d.powi(3));
    let k = Polynomial::new(vec![-(a * a * a + b * b * b), -3.0 * a * b, 0.0, 1.0]);
    let h3_rat = Rational::new(k, d.powi(5));
    let poles: Vec<f64> = (b != 0.0).then(|| -a * a / b).into_iter().collect();
    let (r2, r3) = (h2_rat.clone(), h3_rat.clone());
    let (d2, d3) = (h2_rat.derivative(), h3_rat.derivative());
    let h2 = ScalarFunction::from_parts(move |x| r2.eval(x), move |x| d2.eval(x)).with_singularities(poles.clone());
    let h3 = ScalarFunction::from_parts(move |x| r3.eval(x), move |x| d3.eval(x)).with_singularities(poles);
    let s = a + b;
    let quotient = Polynomial::new(vec![a * a - a * b + b * b, s, 1.0]);
    Ok(VeinOscillator { a, b, h2, h3, h2_rat, h3_rat, quotient })
}

impl VeinOscillator {
    pub fn params(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Zero of `bx + a²`, if `b ≠ 0`.
    pub fn pole(&self) -> Option<f64> {
        (self.b != 0.0).then(|| -self.a * self.a / self.b)
    }

    /// The real fixed point `a + b`.
    pub fn real_fixed_point(&self) -> f64 {
        self.a + self.b
    }

    pub fn h2_rational(&self) -> &Rational {
        &self.h2_rat
    }

    pub fn h3_rational(&self) -> &Rational {
        &self.h3_rat
    }

    /// `dh3/dx` by the quotient rule.
    pub fn dh3(&self, x: f64) -> f64 {
        self.h3_rat.derivative().eval(x)
    }

    fn d(&self, x: f64) -> f64 {
        self.b * x + self.a * self.a
    }

    /// `(h2, h3)` at `u = x − (a + b)`, accurate near the real fixed point.
    fn coefficients_offset(&self, u: f64) -> (f64, f64) {
        let x = self.a + self.b + u;
        let d = self.d(x);
        let d3 = d * d * d;
        (3.0 * (self.a * x + self.b * self.b) / d3, u * self.quotient.eval(x) / (d3 * d * d))
    }

    /// Largest relative deviation of `h2`, `h3` from the coefficients obtained
    /// by eliminating the linear term of Vein's equation, over `points`.
    ///
    /// The multiplier `exp∫f1` is anchored at the first point with scale
    /// `1/D²` there, which makes it equal to `1/D²` everywhere.
    pub fn cross_check(&self, points: &[f64]) -> Result<f64> {
        let x0 = *points.first().ok_or_else(|| Error::invalid("cross-check needs a point"))?;
        let vein = vein_equation(&VeinParams::new(self.a, self.b, 0.0)?)?;
        let eq = vein.abel_around(x0)?;
        let dx0 = self.d(x0);
        let reduced = eliminate_linear(&eq, &Anchor::at(x0).with_scale(1.0 / (dx0 * dx0)))?.reduced;
        let mut worst: f64 = 0.0;
        for &x in points {
            let (h2, h3) = (self.h2.eval(x)?, self.h3.eval(x)?);
            let (e2, e3) = (reduced.f2().eval(x)?, reduced.f3().eval(x)?);
            worst = worst.max((h2 - e2).abs() / h2.abs().max(1.0)).max((h3 - e3).abs() / h3.abs().max(1.0));
        }
        Ok(worst)
    }

    /// `h2` vanishes nowhere on `samples` except at isolated points: the
    /// friction term rules out a potential, so the system is not Hamiltonian.
    pub fn is_non_hamiltonian(&self, samples: &[f64]) -> Result<bool> {
        for &x in samples {
            if self.h2.eval(x)? != 0.0 {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `(dx/dζ, dv/dζ) = (v, −h2·v − h3)`.
pub fn vector_field(osc: &VeinOscillator, x: f64, v: f64) -> Result<(f64, f64)> {
    let h2 = osc.h2.eval(x).map_err(|e| e.named("h2"))?;
    let h3 = osc.h3.eval(x).map_err(|e| e.named("h3"))?;
    Ok((v, -h2 * v - h3))
}

/// Position of a fixed point in the trace–determinant chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    StableSpiral,
    UnstableSpiral,
    StableNode,
    UnstableNode,
    Saddle,
    Center,
    Degenerate,
    NoConclusion,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::StableSpiral => "stable spiral",
            Classification::UnstableSpiral => "unstable spiral",
            Classification::StableNode => "stable node",
            Classification::UnstableNode => "unstable node",
            Classification::Saddle => "saddle",
            Classification::Center => "center (linear)",
            Classification::Degenerate => "degenerate",
            Classification::NoConclusion => "no conclusion (complex data)",
        }
    }
}

/// Classify from the trace `δ1` and determinant `δ2` of a real Jacobian.
pub fn classify(delta1: f64, delta2: f64) -> Classification {
    let disc = delta1 * delta1 - 4.0 * delta2;
    if delta2.abs() <= DEGENERATE_TOL {
        Classification::Degenerate
    } else if delta2 < 0.0 {
        Classification::Saddle
    } else if disc < 0.0 {
        if delta1 < 0.0 {
            Classification::StableSpiral
        } else if delta1 > 0.0 {
            Classification::UnstableSpiral
        } else {
            Classification::Center
        }
    } else if delta1 < 0.0 {
        Classification::StableNode
    } else {
        Classification::UnstableNode
    }
}

/// Roots of `λ² − δ1·λ + δ2`, the one with larger imaginary part (then
/// larger real part) first.
pub fn eigenvalues(delta1: Complex64, delta2: Complex64) -> [Complex64; 2] {
    let root = (delta1 * delta1 - 4.0 * delta2).sqrt();
    let (p, m) = ((delta1 + root) * 0.5, (delta1 - root) * 0.5);
    if (m.im, m.re) > (p.im, p.re) {
        [m, p]
    } else {
        [p, m]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointReport {
    /// `x*`; the velocity coordinate is always 0.
    pub location: Complex64,
    pub delta1: Complex64,
    pub delta2: Complex64,
    /// `δ1² − 4δ2`.
    pub discriminant: Complex64,
    pub classification: Classification,
    pub eigenvalues: [Complex64; 2],
    /// The three fixed points coincide (`a = b`).
    pub collapsed: bool,
}

impl FixedPointReport {
    fn new(location: Complex64, delta1: Complex64, delta2: Complex64, classification: Classification) -> Self {
        FixedPointReport {
            location,
            delta1,
            delta2,
            discriminant: delta1 * delta1 - 4.0 * delta2,
            classification,
            eigenvalues: eigenvalues(delta1, delta2),
            collapsed: false,
        }
    }
}

fn k2(a: f64, b: f64) -> f64 {
    a * a + a * b + b * b
}

/// Jacobian data `(−h2, dh3/dx)` evaluated at a (possibly complex) point.
pub fn jacobian_data(osc: &VeinOscillator, at: Complex64) -> (Complex64, Complex64) {
    (-osc.h2_rat.eval_complex(at), osc.h3_rat.derivative().eval_complex(at))
}

/// The real fixed point `(a + b, 0)`: `δ1 = −3/K₂²`, `δ2 = 3/K₂⁴` with
/// `K₂ = a² + ab + b²`, a stable spiral.
pub fn classify_real(a: f64, b: f64) -> Result<FixedPointReport> {
    let osc = build(a, b)?;
    let k = k2(a, b);
    let delta1 = -3.0 / (k * k);
    let delta2 = 3.0 / (k * k * k * k);
    let (n1, n2) = jacobian_data(&osc, Complex64::new(a + b, 0.0));
    let scale = delta1.abs().max(delta2.abs());
    if (n1.re - delta1).abs() > 1e-9 * scale || (n2.re - delta2).abs() > 1e-9 * scale {
        return Err(Error::Consistency(alloc::format!(
            "closed-form Jacobian ({delta1}, {delta2}) differs from evaluated ({}, {})",
            n1.re,
            n2.re
        )));
    }
    let mut report = FixedPointReport::new(
        Complex64::new(a + b, 0.0),
        Complex64::new(delta1, 0.0),
        Complex64::new(delta2, 0.0),
        classify(delta1, delta2),
    );
    report.collapsed = a == b;
    Ok(report)
}

/// The complex pair `α ± iβ`, `α = −(a + b)/2`, `β = −√3(a − b)/2`.
///
/// `δ` values are closed forms; the classification is always
/// [`Classification::NoConclusion`].
pub fn classify_complex(a: f64, b: f64) -> Result<[FixedPointReport; 2]> {
    let m = a * a * a - b * b * b;
    if m == 0.0 {
        return Err(Error::DegenerateParameters("a³ = b³: the complex fixed points merge into a pole".into()));
    }
    let at = Complex64::new(-(a + b) / 2.0, -SQRT3 * (a - b) / 2.0);
    let delta1 = Complex64::new(a * a - 2.0 * a * b - 2.0 * b * b, SQRT3 * a * (a + 2.0 * b)) * (3.0 / (2.0 * m * m));
    let delta2 = Complex64::new(
        -a.powi(4) - 8.0 * a.powi(3) * b - 6.0 * a * a * b * b + 4.0 * a * b.powi(3) + 2.0 * b.powi(4),
        SQRT3 * a * (a.powi(3) - 6.0 * a * b * b - 4.0 * b.powi(3)),
    ) * (3.0 / (2.0 * m.powi(4)));
    let first = FixedPointReport::new(at, delta1, delta2, Classification::NoConclusion);
    let second = FixedPointReport::new(at.conj(), delta1.conj(), delta2.conj(), Classification::NoConclusion);
    Ok([first, second])
}

/// All fixed points: the real one followed by the complex pair, or a single
/// collapsed report at `(2a, 0)` when `a = b`.
pub fn fixed_points(a: f64, b: f64) -> Result<Vec<FixedPointReport>> {
    let real = classify_real(a, b)?;
    if a == b {
        return Ok(vec![real]);
    }
    let [c1, c2] = classify_complex(a, b)?;
    Ok(vec![real, c1, c2])
}

/// Damped oscillation solving the system linearised at `(a + b, 0)`:
/// `x̃ = e^{σζ}(c1 cos θ + c2 sin θ)`,
/// `ṽ = −(√3/K₂²)e^{σζ}(c1 sin(θ + π/3) − c2 cos(θ + π/3))`,
/// with `σ = −3/(2K₂²)`, `θ = √3ζ/(2K₂²)`.
pub fn linearized_solution(a: f64, b: f64, c1: f64, c2: f64, zeta: f64) -> Result<(f64, f64)> {
    if a == 0.0 && b == 0.0 {
        return Err(Error::DegenerateParameters("a = b = 0 has no linearisation".into()));
    }
    let kk = k2(a, b).powi(2);
    let decay = (-1.5 * zeta / kk).exp();
    let theta = SQRT3 * zeta / (2.0 * kk);
    let shifted = theta + core::f64::consts::FRAC_PI_3;
    let x = decay * (c1 * theta.cos() + c2 * theta.sin());
    let v = -SQRT3 / kk * decay * (c1 * shifted.sin() - c2 * shifted.cos());
    Ok((x, v))
}

/// Period `4πK₂²/√3` of the linearised oscillation.
pub fn linear_period(a: f64, b: f64) -> f64 {
    4.0 * core::f64::consts::PI * k2(a, b).powi(2) / SQRT3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `ζ_max` reached.
    Completed,
    RangeExit,
    PoleProximity,
    StepLimit,
    ConvergedToFixedPoint,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::RangeExit => "range-exit",
            Termination::PoleProximity => "pole-proximity",
            Termination::StepLimit => "step-limit",
            Termination::ConvergedToFixedPoint => "converged-to-fixed-point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub zeta: f64,
    pub x: f64,
    pub v: f64,
    /// `x − (a + b)`, carried separately so that it keeps full relative
    /// accuracy near the fixed point.
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `ζ` strictly increasing. For backward runs `ζ` is the time of the
    /// negated field.
    pub points: Vec<TrajectoryPoint>,
    pub reason: Termination,
    pub backward: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub control: StepControl,
    /// Stop once `x` leaves this range.
    pub x_range: (f64, f64),
    /// Stop once `v` leaves this range.
    pub v_range: (f64, f64),
    /// Integrate the negated field.
    pub backward: bool,
    /// Stop within this distance of the real fixed point (0 disables).
    pub converge_radius: f64,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings {
            control: StepControl::default(),
            x_range: (f64::NEG_INFINITY, f64::INFINITY),
            v_range: (f64::NEG_INFINITY, f64::INFINITY),
            backward: false,
            converge_radius: CONVERGED,
        }
    }
}

/// Integrate from `(x0, v0)` up to `ζ_max` with Dormand–Prince 5(4).
///
/// The state is `(x − (a + b), v)`, so tolerances are relative to the
/// distance from the real fixed point.
pub fn integrate(osc: &VeinOscillator, x0: f64, v0: f64, zeta_max: f64, settings: &IntegrationSettings) -> Result<Trajectory> {
    let pole = osc.pole();
    if let Some(p) = pole {
        if (x0 - p).abs() < SINGULARITY_EPS.max(POLE_PROXIMITY) {
            return Err(Error::Singular { coefficient: "h3", x: x0, pole: p });
        }
    }
    if !(zeta_max > 0.0) {
        return Err(Error::invalid("zeta_max must be positive"));
    }
    let centre = osc.real_fixed_point();
    let sign = if settings.backward { -1.0 } else { 1.0 };
    let mut field = |_: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let (h2, h3) = osc.coefficients_offset(y[0]);
        Ok([sign * y[1], sign * (-h2 * y[1] - h3)])
    };
    let u0 = x0 - centre;
    let point = |zeta: f64, y: &[f64; 2]| TrajectoryPoint { zeta, x: centre + y[0], v: y[1], dx: y[0] };
    let mut points = vec![point(0.0, &[u0, v0])];
    let (xr, vr) = (settings.x_range, settings.v_range);
    let stop_reason = |y: &[f64; 2]| -> Option<Termination> {
        let x = centre + y[0];
        if y[0].hypot(y[1]) < settings.converge_radius {
            Some(Termination::ConvergedToFixedPoint)
        } else if pole.is_some_and(|p| (x - p).abs() < POLE_PROXIMITY) {
            Some(Termination::PoleProximity)
        } else if !(xr.0..=xr.1).contains(&x) || !(vr.0..=vr.1).contains(&y[1]) {
            Some(Termination::RangeExit)
        } else {
            None
        }
    };
    if let Some(reason) = stop_reason(&[u0, v0]) {
        return Ok(Trajectory { points, reason, backward: settings.backward });
    }
    let mut reason = None;
    let mut it = Integrator::new(0.0, [u0, v0], settings.control);
    let halt = it.advance(&mut field, zeta_max, |t, y| {
        points.push(point(t, y));
        match stop_reason(y) {
            Some(r) => {
                reason = Some(r);
                Flow::Stop
            }
            None => Flow::Continue,
        }
    })?;
    let reason = match halt {
        Halt::Reached => Termination::Completed,
        Halt::StepLimit => Termination::StepLimit,
        Halt::Observer => reason.unwrap_or(Termination::Completed),
    };
    Ok(Trajectory { points, reason, backward: settings.backward })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitSettings {
    pub x_window: (f64, f64),
    pub v_window: (f64, f64),
    /// Seeds along `x` and along `v`.
    pub grid: (usize, usize),
    pub zeta_max: f64,
    /// Half-width of the band around the pole left out of seeds and samples.
    pub pole_band: f64,
    /// Coefficient and isocline samples across the window.
    pub samples: usize,
    pub control: StepControl,
}

impl PortraitSettings {
    pub fn new(x_window: (f64, f64), v_window: (f64, f64), grid: (usize, usize)) -> Self {
        PortraitSettings {
            x_window,
            v_window,
            grid,
            zeta_max: 50.0,
            pole_band: 1e-3,
            samples: 401,
            control: StepControl::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoclineKind {
    /// `h2·v + h3 = 0`.
    VNullcline,
    /// `v = 0`.
    XNullcline,
}

impl IsoclineKind {
    pub fn label(self) -> &'static str {
        match self {
            IsoclineKind::VNullcline => "v-nullcline",
            IsoclineKind::XNullcline => "x-nullcline",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeededTrajectory {
    pub seed_id: usize,
    pub seed: (f64, f64),
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitData {
    /// Forward then backward run for every seed, in seed order.
    pub trajectories: Vec<SeededTrajectory>,
    pub isoclines: Vec<(IsoclineKind, f64, f64)>,
    /// `(x, h2, h3)`.
    pub coefficients: Vec<(f64, f64, f64)>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Seeds of a portrait grid, row-major in `x`, skipping the pole band.
pub fn portrait_seeds(osc: &VeinOscillator, s: &PortraitSettings) -> Vec<(f64, f64)> {
    let near_pole = |x: f64| osc.pole().is_some_and(|p| (x - p).abs() < s.pole_band);
    let mut seeds = Vec::new();
    for x in linspace(s.x_window.0, s.x_window.1, s.grid.0) {
        if near_pole(x) {
            continue;
        }
        for v in linspace(s.v_window.0, s.v_window.1, s.grid.1) {
            seeds.push((x, v));
        }
    }
    seeds
}

/// Forward and backward trajectories of one seed, confined to the window.
pub fn seed_trajectories(osc: &VeinOscillator, seed: (f64, f64), s: &PortraitSettings) -> Result<[Trajectory; 2]> {
    let mut settings = IntegrationSettings {
        control: s.control,
        x_range: s.x_window,
        v_range: s.v_window,
        ..Default::default()
    };
    let forward = integrate(osc, seed.0, seed.1, s.zeta_max, &settings)?;
    settings.backward = true;
    let backward = integrate(osc, seed.0, seed.1, s.zeta_max, &settings)?;
    Ok([forward, backward])
}

/// Isoclines inside the window and coefficient samples across it.
pub fn portrait_curves(osc: &VeinOscillator, s: &PortraitSettings) -> Vec<(IsoclineKind, f64, f64)> {
    let mut iso = Vec::new();
    for x in linspace(s.x_window.0, s.x_window.1, s.samples) {
        if osc.pole().is_some_and(|p| (x - p).abs() < s.pole_band) {
            continue;
        }
        iso.push((IsoclineKind::XNullcline, x, 0.0));
        let (h2, h3) = osc.coefficients_offset(x - osc.real_fixed_point());
        if h2 != 0.0 {
            let v = -h3 / h2;
            if (s.v_window.0..=s.v_window.1).contains(&v) {
                iso.push((IsoclineKind::VNullcline, x, v));
            }
        }
    }
    iso
}

/// `(x, h2, h3)` across the window, skipping the pole band.
pub fn coefficient_samples(osc: &VeinOscillator, s: &PortraitSettings) -> Vec<(f64, f64, f64)> {
    linspace(s.x_window.0, s.x_window.1, s.samples)
        .into_iter()
        .filter(|&x| !osc.pole().is_some_and(|p| (x - p).abs() < s.pole_band))
        .map(|x| {
            let (h2, h3) = osc.coefficients_offset(x - osc.real_fixed_point());
            (x, h2, h3)
        })
        .collect()
}

/// Trajectory bundle, isoclines and `(h2, h3)` samples over the window.
pub fn portrait_data(osc: &VeinOscillator, s: &PortraitSettings) -> Result<PortraitData> {
    let (x0, x1) = s.x_window;
    let (v0, v1) = s.v_window;
    if !(x0 < x1 && v0 < v1) || s.grid.0 == 0 || s.grid.1 == 0 {
        return Err(Error::invalid("portrait window and grid must be non-empty"));
    }
    let mut trajectories = Vec::new();
    for (seed_id, seed) in portrait_seeds(osc, s).into_iter().enumerate() {
        for trajectory in seed_trajectories(osc, seed, s)? {
            trajectories.push(SeededTrajectory { seed_id, seed, trajectory });
        }
    }
    Ok(PortraitData { trajectories, isoclines: portrait_curves(osc, s), coefficients: coefficient_samples(osc, s) })
}

//! Real functions of one real variable, evaluated together with their first
//! derivative.

use crate::dual::Dual;
use crate::{quadrature, Error, Result, QUAD_TOL, SINGULARITY_EPS};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// Half-width used when an unbounded domain has to be sampled.
pub const PROBE_HALF_WIDTH: f64 = 10.0;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && !lo.is_nan() && !hi.is_nan() {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::invalid("interval needs lo < hi"))
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }

    /// Finite sub-window used for sampling; unbounded ends are clamped.
    pub fn window(&self) -> (f64, f64) {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi),
            (true, false) => (self.lo, self.lo + 2.0 * PROBE_HALF_WIDTH),
            (false, true) => (self.hi - 2.0 * PROBE_HALF_WIDTH, self.hi),
            (false, false) => (-PROBE_HALF_WIDTH, PROBE_HALF_WIDTH),
        }
    }

    pub fn midpoint(&self) -> f64 {
        let (lo, hi) = self.window();
        0.5 * (lo + hi)
    }

    /// `n` cell-centred sample points of [`window`](Self::window).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.window();
        let h = (hi - lo) / n as f64;
        (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
    }
}

/// Where and how an indefinite integral is pinned down.
///
/// `∫f dx` means `∫_{at}^{x} f`; exponential multipliers `exp(∫f)` are
/// additionally scaled so that they equal `scale` at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub at: f64,
    pub scale: f64,
    pub tol: f64,
}

impl Anchor {
    pub fn at(x: f64) -> Self {
        Anchor { at: x, scale: 1.0, tol: QUAD_TOL }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

type Repr = dyn Fn(f64) -> Result<Dual> + Send + Sync;

/// A coefficient function `x ↦ (f(x), f'(x))` on an open interval, with a
/// finite list of points where it must not be evaluated.
#[derive(Clone)]
pub struct ScalarFunction {
    repr: Arc<Repr>,
    singularities: Vec<f64>,
    domain: Interval,
    anchor: Option<f64>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("singularities", &self.singularities)
            .field("domain", &self.domain)
            .field("anchor", &self.anchor)
            .finish_non_exhaustive()
    }
}

impl ScalarFunction {
    /// Function given as an expression over dual numbers; the derivative is
    /// exact (forward mode).
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(Dual) -> Dual + Send + Sync + 'static,
    {
        Self::from_repr(move |x| Ok(f(Dual::var(x))))
    }

    /// Fallible dual-valued representation.
    pub fn from_repr<F>(f: F) -> Self
    where
        F: Fn(f64) -> Result<Dual> + Send + Sync + 'static,
    {
        ScalarFunction { repr: Arc::new(f), singularities: Vec::new(), domain: Interval::REAL, anchor: None }
    }

    /// Value and derivative supplied separately.
    pub fn from_parts<F, G>(value: F, derivative: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_repr(move |x| Ok(Dual::new(value(x), derivative(x))))
    }

    /// Black-box function: the derivative falls back to a central difference
    /// with step `max(1e-6, 1e-6·|x|)`.
    pub fn opaque<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_repr(move |x| {
            let h = 1e-6f64.max(1e-6 * x.abs());
            Ok(Dual::new(f(x), (f(x + h) - f(x - h)) / (2.0 * h)))
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::from_repr(move |_| Ok(Dual::cst(c)))
    }

    pub fn identity() -> Self {
        Self::from_repr(|x| Ok(Dual::var(x)))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn with_singularities(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.singularities.extend(points.into_iter().filter(|p| p.is_finite()));
        self.singularities.sort_by(f64::total_cmp);
        self.singularities.dedup();
        self
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = self.domain.intersect(&domain);
        self
    }

    pub fn singularities(&self) -> &[f64] {
        &self.singularities
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Anchor point of an antiderivative, if this function is one (or is
    /// derived from one by a pointwise map).
    pub fn anchor(&self) -> Option<f64> {
        self.anchor
    }

    /// Fails if `x` is outside the domain or within [`SINGULARITY_EPS`] of a
    /// declared singular point.
    pub fn check(&self, x: f64) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutOfDomain { x, lo: self.domain.lo, hi: self.domain.hi });
        }
        match self.singularities.iter().find(|&&p| (x - p).abs() < SINGULARITY_EPS) {
            Some(&pole) => Err(Error::Singular { coefficient: "f", x, pole }),
            None => Ok(()),
        }
    }

    pub fn dual(&self, x: f64) -> Result<Dual> {
        self.check(x)?;
        (self.repr)(x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.dual(x).map(|d| d.re)
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        self.dual(x).map(|d| d.du)
    }

    fn unary(&self, op: impl Fn(Dual) -> Dual + Send + Sync + 'static) -> Self {
        let inner = self.repr.clone();
        ScalarFunction {
            repr: Arc::new(move |x| inner(x).map(&op)),
            singularities: self.singularities.clone(),
            domain: self.domain,
            anchor: self.anchor,
        }
    }

    fn binary(&self, rhs: &Self, op: fn(Dual, Dual) -> Dual) -> Self {
        let (f, g) = (self.repr.clone(), rhs.repr.clone());
        let mut singularities = self.singularities.clone();
        singularities.extend_from_slice(&rhs.singularities);
        singularities.sort_by(f64::total_cmp);
        singularities.dedup();
        ScalarFunction {
            repr: Arc::new(move |x| Ok(op(f(x)?, g(x)?))),
            singularities,
            domain: self.domain.intersect(&rhs.domain),
            anchor: self.anchor.or(rhs.anchor),
        }
    }

    pub fn map(&self, op: impl Fn(Dual) -> Dual + Send + Sync + 'static) -> Self {
        self.unary(op)
    }

    pub fn exp(&self) -> Self {
        self.unary(Dual::exp)
    }

    pub fn ln(&self) -> Self {
        self.unary(Dual::ln)
    }

    pub fn sin(&self) -> Self {
        self.unary(Dual::sin)
    }

    pub fn cos(&self) -> Self {
        self.unary(Dual::cos)
    }

    pub fn sqrt(&self) -> Self {
        self.unary(Dual::sqrt)
    }

    pub fn atan(&self) -> Self {
        self.unary(Dual::atan)
    }

    pub fn recip(&self) -> Self {
        self.unary(Dual::recip)
    }

    pub fn powi(&self, n: i32) -> Self {
        self.unary(move |d| d.powi(n))
    }

    pub fn scale(&self, k: f64) -> Self {
        self.unary(move |d| d.scale(k))
    }

    /// `x ↦ f'(x)`. Its own derivative is a central difference of `f'`.
    pub fn derivative(&self) -> Self {
        let inner = self.repr.clone();
        let mut out = self.clone();
        out.anchor = None;
        out.repr = Arc::new(move |x| {
            let h = 1e-6f64.max(1e-6 * x.abs());
            let d = inner(x)?.du;
            let slope = (inner(x + h)?.du - inner(x - h)?.du) / (2.0 * h);
            Ok(Dual::new(d, slope))
        });
        out
    }

    /// `x ↦ ∫_{anchor.at}^{x} f`, computed by adaptive quadrature to
    /// `anchor.tol`. Its derivative is `f` itself. Integration paths that
    /// cross a singularity are rejected at evaluation time.
    pub fn antiderivative(&self, anchor: &Anchor) -> Result<Self> {
        let at = anchor.at;
        self.check(at)?;
        let tol = anchor.tol;
        let f = self.clone();
        let g = self.clone();
        let mut out = self.clone();
        out.anchor = Some(at);
        out.repr = Arc::new(move |x| {
            if f.singularities.iter().any(|&p| (p - at) * (p - x) <= 0.0) {
                return Err(Error::Quadrature { from: at, to: x, reason: "path crosses a singularity" });
            }
            let value = quadrature::integrate(|t| g.eval(t), at, x, tol)?;
            Ok(Dual::new(value, (f.repr)(x)?.re))
        });
        Ok(out)
    }

    /// `x ↦ scale · exp(∫_{anchor.at}^{x} f)`.
    pub fn exp_antiderivative(&self, anchor: &Anchor) -> Result<Self> {
        Ok(self.antiderivative(anchor)?.exp().scale(anchor.scale))
    }

    /// True when `|f| <= tol` at every sample point.
    pub fn vanishes_on(&self, points: &[f64], tol: f64) -> Result<bool> {
        for &x in points {
            if self.eval(x)?.abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

macro_rules! binops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<&ScalarFunction> for &ScalarFunction {
            type Output = ScalarFunction;
            fn $m(self, rhs: &ScalarFunction) -> ScalarFunction {
                self.binary(rhs, <Dual as $tr>::$m)
            }
        }
        impl $tr<ScalarFunction> for ScalarFunction {
            type Output = ScalarFunction;
            fn $m(self, rhs: ScalarFunction) -> ScalarFunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ScalarFunction> for ScalarFunction {
            type Output = ScalarFunction;
            fn $m(self, rhs: &ScalarFunction) -> ScalarFunction {
                (&self).$m(rhs)
            }
        }
        impl $tr<f64> for &ScalarFunction {
            type Output = ScalarFunction;
            fn $m(self, rhs: f64) -> ScalarFunction {
                self.unary(move |d| <Dual as $tr<f64>>::$m(d, rhs))
            }
        }
        impl $tr<f64> for ScalarFunction {
            type Output = ScalarFunction;
            fn $m(self, rhs: f64) -> ScalarFunction {
                (&self).$m(rhs)
            }
        }
        impl $tr<&ScalarFunction> for f64 {
            type Output = ScalarFunction;
            fn $m(self, rhs: &ScalarFunction) -> ScalarFunction {
                rhs.unary(move |d| <f64 as $tr<Dual>>::$m(self, d))
            }
        }
        impl $tr<ScalarFunction> for f64 {
            type Output = ScalarFunction;
            fn $m(self, rhs: ScalarFunction) -> ScalarFunction {
                self.$m(&rhs)
            }
        }
    )*};
}
binops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &ScalarFunction {
    type Output = ScalarFunction;
    fn neg(self) -> ScalarFunction {
        self.unary(Dual::neg)
    }
}

impl Neg for ScalarFunction {
    type Output = ScalarFunction;
    fn neg(self) -> ScalarFunction {
        -&self
    }
}

//! Integrability machinery for Abel differential equations.
//!
//! The crate is `no_std` (it needs `alloc`) and purely numerical. It covers
//!
//! * first/second-kind Abel equations, their mutual conversion, the link to
//!   second-order oscillators, linear-term elimination and Riccati reduction
//!   ([`abel`]);
//! * constant-coefficient solutions, the normal form and its invariant,
//!   integrating factors and the canonical (Appell) form ([`integrability`]);
//! * the third-order hyperbolic functions ([`hyperbolic3`]);
//! * Vein's integrable Abel equation and its explicit solutions ([`vein`]);
//! * phase-plane analysis of the associated nonlinear oscillator
//!   ([`oscillator`]).
//!
//! Coefficient functions are [`ScalarFunction`]s: values and first
//! derivatives are propagated with [`Dual`] numbers, indefinite integrals are
//! anchored adaptive quadratures.

#![no_std]
// `!(x < tol)` is deliberate: NaN must fail these checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod abel;
pub mod cubic;
pub mod curve;
pub mod dual;
mod error;
pub mod function;
pub mod hyperbolic3;
pub mod integrability;
pub mod ode;
pub mod oscillator;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod vein;

pub use abel::{AbelFirstKind, AbelSecondKind, OscillatorForm};
pub use curve::SampledCurve;
pub use dual::Dual;
pub use error::{Error, Result};
pub use function::{Anchor, Interval, ScalarFunction};

/// Points closer than this to a declared singularity are never evaluated.
pub const SINGULARITY_EPS: f64 = 1e-9;

/// Default absolute tolerance of anchored antiderivatives.
pub const QUAD_TOL: f64 = 1e-10;

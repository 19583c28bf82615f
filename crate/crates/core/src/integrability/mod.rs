//! Integrable classes of Abel equations: constant coefficients, null normal
//! invariant, integrating factor and constant Appell invariant.

pub mod canonical;
pub mod constant;
pub mod factor;
pub mod normal;

pub use canonical::{solve_constant_appell, to_canonical_form, CanonicalForm, ConstantAppellSolution};
pub use constant::{solve_constant_coeffs, ConstantCoeffFlow};
pub use factor::{integrating_factor_check, invariant_after_condition, potential_psi, IntegratingFactorCertificate};
pub use normal::{solve_null_invariant, to_normal_form, NormalForm, NullInvariantSolution};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed arguments (too few points, empty window, mismatched domains...).
    InvalidInput(String),
    /// Evaluation requested within [`SINGULARITY_EPS`](crate::SINGULARITY_EPS)
    /// of a declared singular point.
    Singular {
        coefficient: &'static str,
        x: f64,
        pole: f64,
    },
    /// Point outside the open interval a function is defined on.
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    /// Adaptive quadrature could not meet its tolerance or hit a singularity.
    Quadrature { from: f64, to: f64, reason: &'static str },
    /// A documented precondition of an operation does not hold.
    Precondition(String),
    /// The solution leaves every finite value before the requested abscissa.
    BlowUp { critical: f64 },
    /// An implicit solution leaves its monotone branch.
    BranchExit { boundary: f64 },
    /// Target outside the image of the selected branch.
    OutOfRange { x: f64, admissible: Vec<(f64, f64)> },
    /// A solution or map runs into a pole (division by a vanishing quantity).
    Pole { at: f64 },
    /// The requested point is an equilibrium of the flow.
    Equilibrium { value: f64 },
    /// Parameters for which the requested construction is undefined.
    DegenerateParameters(String),
    /// Two routes to the same quantity disagree.
    Consistency(String),
    /// Iteration budget exhausted.
    NoConvergence(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Attach a coefficient name to a singularity error.
    pub(crate) fn named(self, coefficient: &'static str) -> Self {
        match self {
            Error::Singular { x, pole, .. } => Error::Singular { coefficient, x, pole },
            other => other,
        }
    }

    /// Stable lower_snake_case tag, used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Singular { .. } => "singularity",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::Quadrature { .. } => "quadrature_failure",
            Error::Precondition(_) => "precondition",
            Error::BlowUp { .. } => "blow_up",
            Error::BranchExit { .. } => "branch_exit",
            Error::OutOfRange { .. } => "out_of_range",
            Error::Pole { .. } => "pole",
            Error::Equilibrium { .. } => "equilibrium",
            Error::DegenerateParameters(_) => "degenerate_parameters",
            Error::Consistency(_) => "internal_consistency",
            Error::NoConvergence(_) => "no_convergence",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Singular { coefficient, x, pole } => {
                write!(f, "coefficient {coefficient} is singular at x = {pole} (evaluated at {x})")
            }
            Error::OutOfDomain { x, lo, hi } => write!(f, "x = {x} outside the domain ({lo}, {hi})"),
            Error::Quadrature { from, to, reason } => {
                write!(f, "quadrature over [{from}, {to}] failed: {reason}")
            }
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::BlowUp { critical } => write!(f, "solution blows up at x = {critical}"),
            Error::BranchExit { boundary } => {
                write!(f, "solution leaves its branch at the boundary {boundary}")
            }
            Error::OutOfRange { x, admissible } => {
                write!(f, "x = {x} is outside the branch image; admissible ranges: {admissible:?}")
            }
            Error::Pole { at } => write!(f, "pole at {at}"),
            Error::Equilibrium { value } => write!(f, "{value} is an equilibrium"),
            Error::DegenerateParameters(m) => write!(f, "degenerate parameters: {m}"),
            Error::Consistency(m) => write!(f, "internal consistency check failed: {m}"),
            Error::NoConvergence(what) => write!(f, "{what} did not converge"),
        }
    }
}

impl core::error::Error for Error {}

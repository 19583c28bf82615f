//! Third-order hyperbolic functions
//!
//! ```text
//! φ1 = (eˣ + 2e^{−x/2}·cos(x√3/2))/3
//! φ2 = (eˣ − 2e^{−x/2}·cos(x√3/2 + π/3))/3
//! φ3 = (eˣ − 2e^{−x/2}·cos(x√3/2 − π/3))/3
//! ```
//!
//! with `φ1' = φ3`, `φ2' = φ1`, `φ3' = φ2`, and the cyclic t-functions built
//! from them.

use crate::{Error, Result};
use core::f64::consts::FRAC_PI_3;

const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// `(φ1, φ2, φ3)` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl Triad {
    pub fn as_array(&self) -> [f64; 3] {
        [self.phi1, self.phi2, self.phi3]
    }

    /// One derivative: `(φ1, φ2, φ3) ↦ (φ3, φ1, φ2)`.
    pub fn rotate(&self) -> Triad {
        Triad { phi1: self.phi3, phi2: self.phi1, phi3: self.phi2 }
    }

    pub fn sum(&self) -> f64 {
        self.phi1 + self.phi2 + self.phi3
    }

    /// `φ1³ + φ2³ + φ3³ − 3φ1φ2φ3`, evaluated as
    /// `(φ1 + φ2 + φ3)·½[(φ1 − φ2)² + (φ2 − φ3)² + (φ3 − φ1)²]`, which avoids
    /// cancelling the large cubes against each other.
    pub fn cubic_identity(&self) -> f64 {
        let [a, b, c] = self.as_array();
        self.sum() * 0.5 * ((a - b).powi(2) + (b - c).powi(2) + (c - a).powi(2))
    }
}

fn finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("argument must be finite"))
    }
}

pub fn phi(x: f64) -> Result<Triad> {
    finite(x)?;
    let grow = x.exp();
    let decay = 2.0 * (-0.5 * x).exp();
    let th = HALF_SQRT3 * x;
    Ok(Triad {
        phi1: (grow + decay * th.cos()) / 3.0,
        phi2: (grow - decay * (th + FRAC_PI_3).cos()) / 3.0,
        phi3: (grow - decay * (th - FRAC_PI_3).cos()) / 3.0,
    })
}

/// `φi = grow + decay·psi[i]` with `grow = eˣ/3`, `decay = e^{−x/2}`.
///
/// Differences `φi − φj = decay·(psi[i] − psi[j])` computed this way stay
/// accurate where `eˣ` dominates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub grow: f64,
    pub decay: f64,
    pub psi: [f64; 3],
}

pub fn split(x: f64) -> Result<Split> {
    finite(x)?;
    let th = HALF_SQRT3 * x;
    Ok(Split {
        grow: x.exp() / 3.0,
        decay: (-0.5 * x).exp(),
        psi: [2.0 / 3.0 * th.cos(), -2.0 / 3.0 * (th + FRAC_PI_3).cos(), -2.0 / 3.0 * (th - FRAC_PI_3).cos()],
    })
}

/// `order`-th derivative of the triad, by rotation (`order` mod 3).
pub fn phi_derivative(x: f64, order: u32) -> Result<Triad> {
    let mut t = phi(x)?;
    for _ in 0..order % 3 {
        t = t.rotate();
    }
    Ok(t)
}

/// Determinant of the rows `(φ1, φ2, φ3)`, `(φ1', φ2', φ3')`,
/// `(φ1'', φ2'', φ3'')`, by LU with partial pivoting.
pub fn wronskian(x: f64) -> Result<f64> {
    let t0 = phi(x)?;
    let t1 = t0.rotate();
    let t2 = t1.rotate();
    Ok(det3([t0.as_array(), t1.as_array(), t2.as_array()]))
}

fn det3(mut m: [[f64; 3]; 3]) -> f64 {
    let mut det = 1.0;
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (v, p) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * p;
            }
        }
    }
    det
}

/// `t1 = cφ1 + φ2`, `t2 = cφ2 + φ3`, `t3 = cφ3 + φ1` at argument `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TFunctions {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub c: f64,
}

impl TFunctions {
    pub fn from_triad(p: &Triad, c: f64) -> Self {
        TFunctions { t1: c * p.phi1 + p.phi2, t2: c * p.phi2 + p.phi3, t3: c * p.phi3 + p.phi1, c }
    }

    /// `(t, t', t'')` for the chosen member: `t1' = t3`, `t1'' = t2`;
    /// `t2' = t1`, `t2'' = t3`; `t3' = t2`, `t3'' = t1`.
    pub fn derivatives(&self, which: TIndex) -> [f64; 3] {
        match which {
            TIndex::One => [self.t1, self.t3, self.t2],
            TIndex::Two => [self.t2, self.t1, self.t3],
            TIndex::Three => [self.t3, self.t2, self.t1],
        }
    }
}

/// Which cyclic t-function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TIndex {
    One,
    Two,
    Three,
}

pub fn t_functions(s: f64, c: f64) -> Result<TFunctions> {
    finite(c)?;
    Ok(TFunctions::from_triad(&phi(s)?, c))
}

/// `(t, t', t'')` for `t = cφ1 + φ2`.
pub fn t_derivatives(s: f64, c: f64) -> Result<[f64; 3]> {
    Ok(t_functions(s, c)?.derivatives(TIndex::One))
}

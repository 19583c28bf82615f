use super::{linspace, Outcome};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Artifacts, Table};
use abelkit_core::hyperbolic3::phi as triad;

/// `(x, φ1, φ2, φ3)` over the x-window.
pub fn phi(s: &Settings) -> CliResult<Outcome> {
    let (lo, hi) = s.x_window_or((-3.0, 3.0))?;
    let n = s.samples_or(601)?;
    let mut t = Table::new(&["x", "phi1", "phi2", "phi3"]);
    for x in linspace(lo, hi, n) {
        let p = triad(x)?;
        t.push(vec![x.into(), p.phi1.into(), p.phi2.into(), p.phi3.into()]);
    }
    let mut a = Artifacts::default();
    a.table("phi", &t, s.table_format())?;
    Ok(Outcome::ok(a, vec![format!("phi: {n} samples on [{lo}, {hi}]")]))
}

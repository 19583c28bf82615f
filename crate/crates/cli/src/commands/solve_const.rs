use super::{linspace, Outcome};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Artifacts, Table};
use abelkit_core::abel::residual;
use abelkit_core::cubic::CubicRoots;
use abelkit_core::integrability::ConstantCoeffFlow;
use abelkit_core::{AbelFirstKind, Error};
use serde::Serialize;

#[derive(Serialize)]
struct Report {
    coefficients: [f64; 4],
    case: u8,
    label: &'static str,
    real_roots: Vec<f64>,
    complex_pair: Option<[f64; 2]>,
    x0: f64,
    y0: f64,
    equilibrium: Option<f64>,
    blow_up: Option<f64>,
    /// Window end replaced by the blow-up abscissa, if any.
    truncated_at: Option<f64>,
    samples: usize,
    residual: Option<f64>,
}

/// Curve of `y' = A0 + A1 y + A2 y² + A3 y³` through `(x0, y0)`.
pub fn solve_const(s: &Settings) -> CliResult<Outcome> {
    let coeffs = [s.a0.unwrap_or(0.0), s.a1.unwrap_or(0.0), s.a2.unwrap_or(0.0), Settings::require(&s.a3, "A3")?];
    let (lo, hi) = s.x_window_or((0.0, 1.0))?;
    let n = s.samples_or(201)?;
    let x0 = s.x0.unwrap_or(lo);
    let y0 = Settings::require(&s.y0, "y0")?;
    let flow = ConstantCoeffFlow::new(coeffs, x0, y0)?;
    let (rlo, rhi) = flow.reachable();
    let xs: Vec<f64> = linspace(lo, hi, n).into_iter().filter(|&x| rlo < x && x < rhi).collect();
    if xs.len() < 2 {
        return Err(Error::BlowUp { critical: if rhi < hi { rhi } else { rlo } }.into());
    }
    let truncated_at = flow.blow_up().filter(|&xc| lo <= xc && xc <= hi);
    let curve = flow.curve(&xs)?;
    let res = if curve.len() >= 5 { Some(residual(&AbelFirstKind::constants(coeffs), &curve)?) } else { None };
    let mut t = Table::new(&["x", "y"]);
    for &(x, y) in curve.points() {
        t.push(vec![x.into(), y.into()]);
    }
    let complex_pair = match flow.roots {
        CubicRoots::RealComplex { re, im, .. } => Some([re, im]),
        _ => None,
    };
    let report = Report {
        coefficients: coeffs,
        case: flow.roots.case(),
        label: flow.label(),
        real_roots: flow.roots.real_roots(),
        complex_pair,
        x0,
        y0,
        equilibrium: flow.equilibrium,
        blow_up: flow.blow_up(),
        truncated_at,
        samples: curve.len(),
        residual: res,
    };
    let mut a = Artifacts::default();
    a.table("solve_const", &t, s.table_format())?;
    a.json("solve_const_report.json", &report)?;
    let mut summary = vec![format!("root case ({}) {}", report.case, report.label)];
    if let Some(xc) = truncated_at {
        summary.push(format!("solution blows up at x = {xc:?}; curve truncated"));
    }
    Ok(Outcome::ok(a, summary))
}

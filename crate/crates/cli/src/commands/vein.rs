use super::{linspace, step_grid, Outcome};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{Artifacts, Table};
use abelkit_core::abel::residual;
use abelkit_core::hyperbolic3::{phi, wronskian};
use abelkit_core::vein::{
    omega_xi, phi_point, reciprocal_relation, rejected_candidate, vein_equation, xi_quadrature, BranchTable, Family,
    VeinEquation, VeinParams, SCAN_STEP,
};
use abelkit_core::{Error, Interval, SampledCurve};
use serde::Serialize;

/// Samples per working interval in the checks.
const CHECK_SAMPLES: usize = 40;

fn params(s: &Settings) -> CliResult<VeinParams> {
    Ok(VeinParams::new(s.a.unwrap_or(1.0), s.b.unwrap_or(-2.0), s.c.unwrap_or(1.0))?)
}

fn family(s: &Settings) -> CliResult<Family> {
    Ok(Family::from_number(s.family.unwrap_or(1))?)
}

#[derive(Serialize)]
struct BranchInfo {
    s: [f64; 2],
    x: [f64; 2],
    increasing: bool,
}

#[derive(Serialize)]
struct SolveReport {
    a: f64,
    b: f64,
    c: f64,
    family: u8,
    branch: usize,
    branches: Vec<BranchInfo>,
    window: [f64; 2],
    samples: usize,
    residual: f64,
    tolerance: f64,
    residual_ok: bool,
}

/// `y = 1/Φ'(Φ⁻¹(x))` on one branch.
pub fn vein_solve(s: &Settings) -> CliResult<Outcome> {
    let p = params(s)?;
    let fam = family(s)?;
    let ve = vein_equation(&p)?;
    let (s_lo, s_hi) = s.s_window_or((-5.0, 5.0))?;
    let table = BranchTable::scan(&p, fam, s_lo, s_hi)?;
    let auto = |i: usize| table.window(i, &ve.singularities, 1.0, 0.2, 0.05);
    let branch = match s.branch {
        Some(i) => i,
        None => (0..table.branches.len())
            .find(|&i| matches!(auto(i), Ok(Some(_))))
            .ok_or_else(|| CliError::config("no branch has a usable x-window; widen the s-window"))?,
    };
    let (lo, hi) = match (s.x_min, s.x_max) {
        (None, None) => auto(branch)?.ok_or_else(|| CliError::config(format!("branch {branch} has no usable x-window")))?,
        _ => {
            let br = table.branch(branch)?;
            s.x_window_or(br.x)?
        }
    };
    let xs = match s.samples {
        Some(_) => linspace(lo, hi, s.samples_or(2)?),
        None => step_grid(lo, hi, 1e-3),
    };
    let curve = table.solve(branch, &xs)?;
    let tol = s.tol_or(1e-6)?;
    let res = residual(&ve.abel_around(0.5 * (lo + hi))?, &curve)?;
    let mut t = Table::new(&["x", "y"]);
    for &(x, y) in curve.points() {
        t.push(vec![x.into(), y.into()]);
    }
    let report = SolveReport {
        a: p.a,
        b: p.b,
        c: p.c,
        family: fam.number(),
        branch,
        branches: table.branches.iter().map(|b| BranchInfo { s: [b.s.0, b.s.1], x: [b.x.0, b.x.1], increasing: b.increasing }).collect(),
        window: [lo, hi],
        samples: curve.len(),
        residual: res,
        tolerance: tol,
        residual_ok: res < tol,
    };
    let mut a = Artifacts::default();
    a.table("vein_solve", &t, s.table_format())?;
    a.json("vein_solve_report.json", &report)?;
    let summary = vec![format!("branch {branch} on [{lo:?}, {hi:?}]: residual {res:e}")];
    Ok(Outcome::ok(a, summary))
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured deviation (for the negative control, the smallest
    /// residual, which must exceed the threshold).
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

fn check(name: &'static str, measured: f64, threshold: f64, above: bool, detail: String) -> Check {
    let passed = measured.is_finite() && if above { measured > threshold } else { measured < threshold };
    Check { name, passed, measured, threshold, detail }
}

fn failed(name: &'static str, threshold: f64, e: impl std::fmt::Display) -> Check {
    Check { name, passed: false, measured: f64::NAN, threshold, detail: e.to_string() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn invariant_check(ve: &VeinEquation, tol: f64) -> Check {
    let run = || -> Result<f64, Error> {
        let mut worst = 0.0f64;
        for iv in ve.working_intervals() {
            let nf = ve.normal_form(iv.midpoint())?;
            for x in iv.grid(CHECK_SAMPLES) {
                worst = worst.max((nf.invariant.eval(x)? + 1.0).abs());
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(m) => check("invariant_is_minus_one", m, tol, false, "max |I + 1| over every working interval".into()),
        Err(e) => failed("invariant_is_minus_one", tol, e),
    }
}

fn determinant_check(ve: &VeinEquation) -> Check {
    let run = || -> Result<f64, Error> {
        let mut worst = 0.0f64;
        for iv in ve.working_intervals() {
            for x in iv.grid(CHECK_SAMPLES) {
                let direct = ve.equation.eval(x)?;
                let det = ve.determinant_coefficients(x);
                for i in 0..4 {
                    worst = worst.max(rel(direct[i], det[i]));
                }
                worst = worst.max(rel(ve.params.k(x), ve.params.k_factored(x)));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(m) => check("determinant_form", m, 1e-12, false, "coefficients vs determinants, K vs its factorisation".into()),
        Err(e) => failed("determinant_form", 1e-12, e),
    }
}

fn xi_check(ve: &VeinEquation) -> Option<Check> {
    let p = ve.params;
    if p.a == p.b {
        return None;
    }
    let run = || -> Result<f64, Error> {
        let mut worst = 0.0f64;
        for iv in ve.working_intervals() {
            let anchor = iv.midpoint();
            for x in iv.grid(CHECK_SAMPLES / 4) {
                let (_, closed) = omega_xi(&p, x, anchor)?;
                worst = worst.max((closed - xi_quadrature(&p, x, anchor)?).abs());
            }
        }
        Ok(worst)
    };
    Some(match run() {
        Ok(m) => check("xi_closed_form", m, 1e-8, false, "closed-form ξ vs quadrature of ω".into()),
        Err(e) => failed("xi_closed_form", 1e-8, e),
    })
}

fn triad_check(s_window: (f64, f64)) -> [Check; 2] {
    let run = || -> Result<(f64, f64), Error> {
        let (mut cubic, mut wr) = (0.0f64, 0.0f64);
        for s in linspace(s_window.0, s_window.1, 201) {
            cubic = cubic.max((phi(s)?.cubic_identity() - 1.0).abs());
            wr = wr.max((wronskian(s)? - 1.0).abs());
        }
        Ok((cubic, wr))
    };
    match run() {
        Ok((c, w)) => [
            check("triad_cubic_identity", c, 1e-10, false, "|φ1³ + φ2³ + φ3³ − 3φ1φ2φ3 − 1|".into()),
            check("triad_wronskian", w, 1e-8, false, "|W − 1|".into()),
        ],
        Err(e) => [failed("triad_cubic_identity", 1e-10, &e), failed("triad_wronskian", 1e-8, e)],
    }
}

fn reciprocal_check(ve: &VeinEquation, fam: Family, s_window: (f64, f64)) -> Option<Check> {
    let p = ve.params;
    if p.b == 0.0 {
        return None;
    }
    let run = || -> Result<f64, Error> {
        let table = BranchTable::scan(&p, fam, s_window.0, s_window.1)?;
        let mut worst = 0.0f64;
        for br in &table.branches {
            let w = br.s.1 - br.s.0;
            for s in linspace(br.s.0 + 0.2 * w, br.s.1 - 0.2 * w, 20) {
                let pt = phi_point(&p, fam, s)?;
                let y = 1.0 / pt.dx_ds;
                worst = worst.max(rel(p.b / y, reciprocal_relation(&p, pt.x, pt.ratio)));
            }
        }
        Ok(worst)
    };
    Some(match run() {
        Ok(m) => check("reciprocal_relation", m, 1e-8, false, "b/y vs (ax + b²) − (bx + a²)·t'/t".into()),
        Err(e) => failed("reciprocal_relation", 1e-8, e),
    })
}

/// Window of length at most 1 in the working interval just above `a + b`.
fn control_window(ve: &VeinEquation) -> Result<(f64, f64), Error> {
    let r = ve.params.a + ve.params.b;
    let iv = ve.interval_of(r + 1e-6)?;
    let (_, hi) = iv.window();
    let w = (hi - r).min(2.0);
    Interval::new(r + 0.25 * w, r + 0.75 * w).map(|i| i.window())
}

fn control_check(ve: &VeinEquation) -> Option<Check> {
    let p = ve.params;
    if p.a == p.b {
        return None;
    }
    let run = || -> Result<f64, Error> {
        let (lo, hi) = control_window(ve)?;
        let curve = SampledCurve::tabulate(&step_grid(lo, hi, 1e-3), |x| rejected_candidate(&p, x))?;
        residual(&ve.abel_around(0.5 * (lo + hi))?, &curve)
    };
    Some(match run() {
        Ok(m) => check("rejected_candidate_fails", m, 0.1, true, "residual of b/((x − (a + b))(a − b)) must be large".into()),
        Err(e) => failed("rejected_candidate_fails", 0.1, e),
    })
}

/// Every identity check for the given parameters.
pub fn vein_checks(p: &VeinParams, fam: Family, s_window: (f64, f64), tol: f64) -> CliResult<Vec<Check>> {
    let ve = vein_equation(p)?;
    let mut out = vec![invariant_check(&ve, tol), determinant_check(&ve)];
    out.extend(xi_check(&ve));
    out.extend(triad_check(s_window));
    out.extend(reciprocal_check(&ve, fam, s_window));
    out.extend(control_check(&ve));
    Ok(out)
}

#[derive(Serialize)]
struct CheckReport<'a> {
    a: f64,
    b: f64,
    c: f64,
    family: u8,
    scan_step: f64,
    passed: bool,
    checks: &'a [Check],
}

pub fn vein_check(s: &Settings) -> CliResult<Outcome> {
    let p = params(s)?;
    let fam = family(s)?;
    let checks = vein_checks(&p, fam, s.s_window_or((-5.0, 5.0))?, s.tol_or(1e-8)?)?;
    let passed = checks.iter().all(|c| c.passed);
    let report = CheckReport { a: p.a, b: p.b, c: p.c, family: fam.number(), scan_step: SCAN_STEP, passed, checks: &checks };
    let mut a = Artifacts::default();
    a.json("vein_check.json", &report)?;
    let summary = checks
        .iter()
        .map(|c| format!("{}: {} (measured {:e}, threshold {:e})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.measured, c.threshold))
        .collect();
    Ok(Outcome { artifacts: a, summary, success: passed })
}

use super::Outcome;
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Artifacts, Table};
use abelkit_core::oscillator::{
    build, coefficient_samples, fixed_points, portrait_curves, portrait_seeds, seed_trajectories, FixedPointReport,
    PortraitSettings, Trajectory,
};
use abelkit_core::Result as CoreResult;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
}

impl ComplexValue {
    fn of(z: abelkit_core::oscillator::Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct FixedPoint {
    location: ComplexValue,
    velocity: f64,
    delta1: ComplexValue,
    delta2: ComplexValue,
    discriminant: ComplexValue,
    classification: &'static str,
    eigenvalues: [ComplexValue; 2],
    collapsed: bool,
}

impl From<&FixedPointReport> for FixedPoint {
    fn from(r: &FixedPointReport) -> Self {
        FixedPoint {
            location: ComplexValue::of(r.location),
            velocity: 0.0,
            delta1: ComplexValue::of(r.delta1),
            delta2: ComplexValue::of(r.delta2),
            discriminant: ComplexValue::of(r.discriminant),
            classification: r.classification.label(),
            eigenvalues: [ComplexValue::of(r.eigenvalues[0]), ComplexValue::of(r.eigenvalues[1])],
            collapsed: r.collapsed,
        }
    }
}

#[derive(Serialize)]
struct PortraitReport {
    a: f64,
    b: f64,
    x_window: [f64; 2],
    v_window: [f64; 2],
    grid: [usize; 2],
    zeta_max: f64,
    trajectories: usize,
    terminations: BTreeMap<&'static str, usize>,
    fixed_points: Vec<FixedPoint>,
}

/// Backward runs are written with `ζ` negated and reversed, so each seed
/// reads as one curve in increasing `ζ` through the seed at `ζ = 0`.
fn push_rows(t: &mut Table, seed_id: usize, tr: &Trajectory) {
    let rows: Box<dyn Iterator<Item = _>> =
        if tr.backward { Box::new(tr.points.iter().rev().map(|p| (-p.zeta, p))) } else { Box::new(tr.points.iter().map(|p| (p.zeta, p))) };
    for (zeta, p) in rows {
        t.push(vec![seed_id.into(), zeta.into(), p.x.into(), p.v.into()]);
    }
}

pub fn portrait(s: &Settings) -> CliResult<Outcome> {
    let (a, b) = (s.a.unwrap_or(1.0), s.b.unwrap_or(-2.0));
    let osc = build(a, b)?;
    let xs = osc.real_fixed_point();
    let xw = s.x_window_or((xs - 1.5, xs + 1.5))?;
    let vw = s.v_window_or((-1.5, 1.5))?;
    let mut ps = PortraitSettings::new(xw, vw, s.grid_or((5, 5))?);
    ps.zeta_max = s.zeta_max.unwrap_or(30.0);
    ps.samples = s.samples_or(ps.samples)?;
    let seeds = portrait_seeds(&osc, &ps);
    let runs: Vec<[Trajectory; 2]> =
        seeds.par_iter().map(|&seed| seed_trajectories(&osc, seed, &ps)).collect::<CoreResult<_>>()?;

    let mut traj = Table::new(&["seed_id", "zeta", "x", "v"]);
    let mut terminations: BTreeMap<&'static str, usize> = BTreeMap::new();
    for (id, [fwd, bwd]) in runs.iter().enumerate() {
        push_rows(&mut traj, id, bwd);
        // the seed itself is already the last backward row
        let mut f = fwd.clone();
        f.points.remove(0);
        push_rows(&mut traj, id, &f);
        for r in [fwd.reason, bwd.reason] {
            *terminations.entry(r.label()).or_default() += 1;
        }
    }
    let mut iso = Table::new(&["kind", "x", "v"]);
    for (kind, x, v) in portrait_curves(&osc, &ps) {
        iso.push(vec![kind.label().into(), x.into(), v.into()]);
    }
    let mut coef = Table::new(&["x", "h2", "h3"]);
    for (x, h2, h3) in coefficient_samples(&osc, &ps) {
        coef.push(vec![x.into(), h2.into(), h3.into()]);
    }
    let fps = fixed_points(a, b)?;
    let fixed: Vec<FixedPoint> = fps.iter().map(FixedPoint::from).collect();
    let summary = fixed
        .iter()
        .map(|f| format!("fixed point x = {:?}{:+?}i: {}", f.location.re, f.location.im, f.classification))
        .collect();
    let report = PortraitReport {
        a,
        b,
        x_window: [xw.0, xw.1],
        v_window: [vw.0, vw.1],
        grid: [ps.grid.0, ps.grid.1],
        zeta_max: ps.zeta_max,
        trajectories: runs.len() * 2,
        terminations,
        fixed_points: fixed,
    };
    let fmt = s.table_format();
    let mut out = Artifacts::default();
    out.table("trajectories", &traj, fmt)?;
    out.table("isoclines", &iso, fmt)?;
    out.table("coefficients", &coef, fmt)?;
    out.json("fixed_points.json", &report)?;
    Ok(Outcome::ok(out, summary))
}

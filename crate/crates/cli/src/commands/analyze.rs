use super::Outcome;
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::expr::parse_expression;
use crate::output::Artifacts;
use abelkit_core::integrability::{integrating_factor_check, to_canonical_form, to_normal_form};
use abelkit_core::integrability::normal::NULL_TOL;
use abelkit_core::{AbelFirstKind, Anchor, Interval, ScalarFunction};
use serde::Serialize;

#[derive(Serialize)]
struct Sample {
    x: f64,
    value: f64,
}

#[derive(Serialize)]
struct Section {
    samples: Vec<Sample>,
    /// Set when the quantity could not be formed.
    unavailable: Option<String>,
}

#[derive(Serialize)]
struct Report {
    coefficients: [String; 4],
    window: [f64; 2],
    anchor: f64,
    scale: f64,
    normal_form_invariant: Section,
    max_abs_invariant: Option<f64>,
    null_invariant: bool,
    appell_invariant: Section,
    integrating_factor_k: Option<f64>,
    integrating_factor_note: Option<String>,
}

fn section(f: impl Fn(f64) -> abelkit_core::Result<f64>, xs: &[f64]) -> Section {
    match xs.iter().map(|&x| f(x).map(|value| Sample { x, value })).collect() {
        Ok(samples) => Section { samples, unavailable: None },
        Err(e) => Section { samples: Vec::new(), unavailable: Some(e.to_string()) },
    }
}

/// Normal-form and Appell invariants, integrating factor and null-invariant
/// flag of the equation with coefficients `--f0 .. --f3`.
pub fn analyze(s: &Settings) -> CliResult<Outcome> {
    let params = s.parameters();
    let texts = [
        s.f0.clone().unwrap_or_else(|| "0".into()),
        s.f1.clone().unwrap_or_else(|| "0".into()),
        s.f2.clone().unwrap_or_else(|| "0".into()),
        Settings::require(&s.f3, "f3")?,
    ];
    let mut fs: Vec<ScalarFunction> = Vec::with_capacity(4);
    for t in &texts {
        let ast = parse_expression(t, &params).map_err(|error| CliError::Parse { source_text: t.clone(), error })?;
        fs.push(ast.to_function());
    }
    let (lo, hi) = s.x_window_or((-1.0, 1.0))?;
    let n = s.samples_or(101)?;
    let anchor_x = s.anchor.unwrap_or(0.5 * (lo + hi));
    let scale_text = s.scale.clone().unwrap_or_else(|| "1".into());
    let scale_ast =
        parse_expression(&scale_text, &params).map_err(|error| CliError::Parse { source_text: scale_text.clone(), error })?;
    let scale = scale_ast.eval(anchor_x);
    if !(scale.is_finite() && scale != 0.0) {
        return Err(CliError::config(format!("--scale evaluates to {scale} at the anchor")));
    }
    let [f0, f1, f2, f3]: [ScalarFunction; 4] = fs.try_into().expect("four coefficients");
    let eq = AbelFirstKind::new(f0, f1, f2, f3).on(Interval::new(lo, hi)?)?;
    let anchor = Anchor::at(anchor_x).with_scale(scale);
    // cell centres: the window is open
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect();

    let normal = match to_normal_form(&eq, &anchor) {
        Ok(nf) => section(|x| nf.invariant.eval(x), &xs),
        Err(e) => Section { samples: Vec::new(), unavailable: Some(e.to_string()) },
    };
    let max_abs = (normal.unavailable.is_none()).then(|| normal.samples.iter().fold(0.0f64, |m, p| m.max(p.value.abs())));
    let appell = match to_canonical_form(&eq, &anchor) {
        Ok(cf) => section(|x| cf.appell.eval(x), &xs),
        Err(e) => Section { samples: Vec::new(), unavailable: Some(e.to_string()) },
    };
    let (k, note) = match integrating_factor_check(&eq, &anchor) {
        Ok(Some(cert)) => (Some(cert.k), None),
        Ok(None) => (None, Some("f2·exp(∫f1) is not a constant multiple of f3".to_string())),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = Report {
        coefficients: texts,
        window: [lo, hi],
        anchor: anchor_x,
        scale,
        normal_form_invariant: normal,
        max_abs_invariant: max_abs,
        null_invariant: max_abs.is_some_and(|m| m < NULL_TOL),
        appell_invariant: appell,
        integrating_factor_k: k,
        integrating_factor_note: note,
    };
    let mut a = Artifacts::default();
    a.json("analyze.json", &report)?;
    let mut summary = Vec::new();
    match report.max_abs_invariant {
        Some(m) => summary.push(format!("max |I| = {m:e} (null invariant: {})", report.null_invariant)),
        None => summary.push("normal form unavailable".into()),
    }
    if let Some(k) = k {
        summary.push(format!("integrating factor with k = {k:?}"));
    }
    Ok(Outcome::ok(a, summary))
}

//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Subintervals are kept in a work list; the one with the largest error
//! estimate is bisected until the summed estimate meets the absolute
//! tolerance.

use crate::{Error, Result};
use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], 0.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<Piece> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let value = k * half;
    let error = ((k - g) * half).abs();
    if !value.is_finite() {
        return Err(Error::Quadrature { from: a, to: b, reason: "non-finite integrand" });
    }
    Ok(Piece { a, b, value, error })
}

/// Integral of `f` over `[a, b]` (either orientation) to absolute tolerance `tol`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_with_error(&mut f, a, b, tol).map(|(v, _)| v)
}

/// Like [`integrate`], also returning the final error estimate.
pub fn integrate_with_error<F>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature { from: a, to: b, reason: "infinite limits" });
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pieces: Vec<Piece> = Vec::with_capacity(16);
    pieces.push(kronrod(f, lo, hi)?);
    loop {
        let (value, error) = pieces
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if error <= tol.max(4.0 * f64::EPSILON * value.abs()) {
            return Ok((sign * value, error));
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { from: a, to: b, reason: "subdivision limit reached" });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature { from: a, to: b, reason: "interval collapsed" });
        }
        pieces.push(kronrod(f, p.a, mid)?);
        pieces.push(kronrod(f, mid, p.b)?);
    }
}

/// Running integrals `∫_anchor^{x_i} f` for abscissae sorted ascending.
///
/// Consecutive gaps are integrated once each, so the cost is linear in the
/// number of points rather than quadratic.
pub fn cumulative<F>(mut f: F, anchor: f64, xs: &[f64], tol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if xs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("cumulative quadrature needs ascending abscissae"));
    }
    let mut out = alloc::vec![0.0; xs.len()];
    // Split at the anchor: integrate outwards in both directions.
    let split = xs.partition_point(|&x| x < anchor);
    let per_piece = tol / (xs.len().max(1) as f64);
    let mut acc = 0.0;
    let mut prev = anchor;
    for i in split..xs.len() {
        acc += integrate(&mut f, prev, xs[i], per_piece)?;
        prev = xs[i];
        out[i] = acc;
    }
    acc = 0.0;
    prev = anchor;
    for i in (0..split).rev() {
        acc += integrate(&mut f, prev, xs[i], per_piece)?;
        prev = xs[i];
        out[i] = acc;
    }
    Ok(out)
}

//! Bracketed scalar root finding: safeguarded Newton with bisection
//! fallback, bracket expansion along monotone branches, and sign-change
//! scanning.

use crate::{Error, Result};
use alloc::vec::Vec;

/// Newton steps allowed before the search gives up.
pub const MAX_NEWTON: usize = 50;
const MAX_BISECT: usize = 2000;

/// Root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// `f` returns the value and derivative. Newton steps are taken while they
/// stay inside the shrinking bracket and contract fast enough; otherwise the
/// bracket is bisected. Stops when the step falls below
/// `xtol · max(1, |x|)`.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let flo = f(lo)?.0;
    let fhi = f(hi)?.0;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::invalid("root bracket without a sign change"));
    }
    // orientation: sign * f < 0 on the `lo` side
    let sign = if flo < 0.0 { 1.0 } else { -1.0 };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = hi - lo;
    let mut newton_steps = 0;
    for _ in 0..MAX_BISECT {
        let (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if sign * fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let candidate = x - fx / dfx;
        let use_newton = newton_steps < MAX_NEWTON
            && dfx != 0.0
            && candidate > lo
            && candidate < hi
            && (2.0 * fx).abs() <= (dx_old * dfx).abs();
        let next = if use_newton {
            newton_steps += 1;
            candidate
        } else {
            0.5 * (lo + hi)
        };
        dx_old = next - x;
        x = next;
        if dx_old.abs() <= xtol * x.abs().max(1.0) || hi - lo <= xtol * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence("bracketed root search"))
}

/// Plain bisection on a sign change, down to `xtol` absolute width.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence("bisection"))
}

/// Solve `g(u) = target` on a branch `(lo, hi)` on which `g` is strictly
/// monotone, starting from `start` inside it. Ends may be infinite.
///
/// The bracket is grown from `start` towards the side where the target lies:
/// geometrically towards an infinite end, by halving the remaining gap towards
/// a finite one. If the branch end is reached without crossing the target,
/// the solution has left the branch and [`Error::BranchExit`] names the end.
pub fn solve_on_branch<G>(mut g: G, lo: f64, hi: f64, start: f64, target: f64, xtol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
{
    if !(lo < start && start < hi) {
        return Err(Error::invalid("branch start outside the branch"));
    }
    let (g0, dg0) = g(start)?;
    if g0 == target {
        return Ok(start);
    }
    let rightwards = (target - g0) * dg0 > 0.0;
    let end = if rightwards { hi } else { lo };
    let dir = if rightwards { 1.0 } else { -1.0 };
    let step0 = 1e-2 * start.abs().max(1.0);
    let mut prev = start;
    for k in 0..1100 {
        let u = if end.is_finite() {
            end - (end - start) * 0.5f64.powi(k + 1)
        } else {
            start + dir * step0 * 2.0f64.powi(k)
        };
        if !u.is_finite() || u == end || u == prev {
            break;
        }
        let (gu, _) = g(u)?;
        if gu.is_nan() {
            break;
        }
        if (gu - target).signum() != (g0 - target).signum() || gu == target {
            return newton_bisect(|t| g(t).map(|(v, d)| (v - target, d)), prev, u, xtol);
        }
        prev = u;
    }
    Err(Error::BranchExit { boundary: end })
}

/// Abscissae in `grid` (sorted) between which `f` changes sign, refined by
/// bisection to `xtol`.
pub fn sign_changes<F>(mut f: F, grid: &[f64], xtol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let v = f(x)?;
        if let Some((px, pv)) = prev {
            if pv != 0.0 && v != 0.0 && pv.signum() != v.signum() {
                out.push(bisect(&mut f, px, x, xtol)?);
            } else if v == 0.0 {
                out.push(x);
            }
        }
        prev = Some((x, v));
    }
    Ok(out)
}

//! Dormand–Prince 5(4) embedded Runge–Kutta integration with adaptive step
//! size control, for small fixed-size systems.

use crate::{Error, Result};
use alloc::vec::Vec;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights equal the last row of A (FSAL); error weights are b5 − b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Largest step magnitude allowed (`f64::INFINITY` for none).
    pub h_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-9, atol: 1e-12, max_steps: 1_000_000, h_max: f64::INFINITY }
    }
}

impl StepControl {
    pub fn tolerances(rtol: f64, atol: f64) -> Self {
        StepControl { rtol, atol, ..Default::default() }
    }
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Why [`Integrator::advance`] returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    Reached,
    Observer,
    StepLimit,
}

/// One explicit Dormand–Prince step; returns the 5th-order solution and the
/// embedded error estimate.
pub fn dopri_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> Result<([f64; N], [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, y)?;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        if s == 6 {
            // stage 7 is evaluated at the new solution
            let k6 = f(t + h, &ys)?;
            k[6] = k6;
            let mut err = [0.0; N];
            for i in 0..N {
                err[i] = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            }
            return Ok((ys, err));
        }
        k[s] = f(t + C[s] * h, &ys)?;
    }
    unreachable!()
}

/// Stateful adaptive integrator: keeps `(t, y)` and the last good step size
/// so that successive calls continue seamlessly.
#[derive(Debug, Clone)]
pub struct Integrator<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    control: StepControl,
    h: Option<f64>,
    steps: usize,
}

impl<const N: usize> Integrator<N> {
    pub fn new(t0: f64, y0: [f64; N], control: StepControl) -> Self {
        Integrator { t: t0, y: y0, control, h: None, steps: 0 }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn error_norm(&self, y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = self.control.atol + self.control.rtol * self.y[i].abs().max(y_new[i].abs());
            let r = if sc > 0.0 { err[i] / sc } else if err[i] == 0.0 { 0.0 } else { f64::INFINITY };
            acc += r * r;
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step<F>(&self, f: &mut F, span: f64) -> Result<f64>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let f0 = f(self.t, &self.y)?;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (y, f) in self.y.iter().zip(&f0) {
            let sc = self.control.atol + self.control.rtol * y.abs();
            let sc = if sc > 0.0 { sc } else { 1e-300 };
            d0 += (y / sc).powi(2);
            d1 += (f / sc).powi(2);
        }
        let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        Ok(h.min(span.abs()).min(self.control.h_max))
    }

    /// Integrate to `t_end` (either direction). The observer sees every
    /// accepted state and may stop the integration early.
    pub fn advance<F, O>(&mut self, f: &mut F, t_end: f64, mut observer: O) -> Result<Halt>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
        O: FnMut(f64, &[f64; N]) -> Flow,
    {
        let span = t_end - self.t;
        if span == 0.0 {
            return Ok(Halt::Reached);
        }
        let dir = span.signum();
        let mut h = match self.h {
            Some(h) => h.abs(),
            None => self.initial_step(f, span)?,
        };
        let mut rejected_in_a_row = 0;
        loop {
            let remaining = (t_end - self.t) * dir;
            if remaining <= 0.0 {
                return Ok(Halt::Reached);
            }
            if self.steps >= self.control.max_steps {
                return Ok(Halt::StepLimit);
            }
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let (y_new, err) = dopri_step(f, self.t, &self.y, dir * step)?;
            let norm = self.error_norm(&y_new, &err);
            if !norm.is_finite() && step <= f64::EPSILON * self.t.abs().max(1.0) {
                return Err(Error::NoConvergence("adaptive step size"));
            }
            if norm <= 1.0 {
                self.t = if last { t_end } else { self.t + dir * step };
                self.y = y_new;
                self.steps += 1;
                rejected_in_a_row = 0;
                let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                // Do not let a short final step shrink the remembered step.
                h = (if last { h.max(step) } else { step * grow }).min(self.control.h_max);
                self.h = Some(h);
                if observer(self.t, &self.y) == Flow::Stop {
                    return Ok(Halt::Observer);
                }
            } else {
                rejected_in_a_row += 1;
                if rejected_in_a_row > 60 {
                    return Err(Error::NoConvergence("adaptive step size"));
                }
                let shrink = if norm.is_finite() { (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = step * shrink;
            }
        }
    }
}

/// States at each of `targets` (monotone, all on one side of `t0`).
pub fn solve_at<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    targets: &[f64],
    control: StepControl,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut it = Integrator::new(t0, y0, control);
    let mut out = Vec::with_capacity(targets.len());
    for &t in targets {
        match it.advance(&mut f, t, |_, _| Flow::Continue)? {
            Halt::Reached => out.push(it.y),
            _ => return Err(Error::NoConvergence("step budget exhausted")),
        }
    }
    Ok(out)
}

/// `n` equal Dormand–Prince steps (5th-order solution, no error control).
pub fn fixed_steps<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, n: usize) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = dopri_step(&mut f, t0 + i as f64 * h, &y, h)?.0;
    }
    Ok(y)
}

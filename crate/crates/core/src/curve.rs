//! Sampled solution curves and finite-difference slopes on them.

use crate::{Error, Result};
use alloc::vec::Vec;

/// Points `(x, y)` with strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    points: Vec<(f64, f64)>,
}

impl SampledCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::invalid("curve points must be finite"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("curve abscissae must be strictly increasing"));
        }
        Ok(SampledCurve { points })
    }

    /// Sample `f` at each abscissa.
    pub fn tabulate(xs: &[f64], mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let points = xs.iter().map(|&x| f(x).map(|y| (x, y))).collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// `dy/dx` at every point from a sliding stencil of up to seven
    /// neighbours: centred in the interior, one-sided near the ends. Sixth
    /// order on smooth data; works on non-uniform grids.
    pub fn slopes(&self) -> Result<Vec<f64>> {
        let n = self.points.len();
        if n < 2 {
            return Err(Error::invalid("need at least two points for a slope"));
        }
        let width = n.min(7);
        let xs: Vec<f64> = self.xs().collect();
        Ok((0..n)
            .map(|i| {
                let start = i.saturating_sub(width / 2).min(n - width);
                let nodes = &xs[start..start + width];
                let w = first_derivative_weights(xs[i], nodes);
                // the weights sum to zero; differencing against the centre
                // value makes constant data exact
                let yi = self.points[i].1;
                w.iter().zip(&self.points[start..start + width]).map(|(c, p)| c * (p.1 - yi)).sum()
            })
            .collect())
    }
}

/// Finite-difference weights for the first derivative at `z` on arbitrary
/// `nodes` (Fornberg's recursion).
pub fn first_derivative_weights(z: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    // c[j] = (weight for 0th derivative, weight for 1st derivative)
    let mut c = alloc::vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                if mn >= 1 {
                    c[i][1] = c1 * (c[i - 1][0] - c5 * c[i - 1][1]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            if mn >= 1 {
                c[j][1] = (c4 * c[j][1] - c[j][0]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;


    #[test]
    fn centred_weights_are_classical() {
        let w = first_derivative_weights(0.0, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = first_derivative_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn slopes_are_exact_on_low_degree_polynomials() {
        let xs: Vec<f64> = (0..12).map(|i| 0.1 * i as f64 + 0.01 * (i * i) as f64).collect();
        let c = SampledCurve::tabulate(&xs, |x| Ok(x.powi(5) - 3.0 * x * x)).unwrap();
        for (x, s) in xs.iter().zip(c.slopes().unwrap()) {
            assert!((s - (5.0 * x.powi(4) - 6.0 * x)).abs() < 1e-9, "{x} {s}");
        }
    }

    #[test]
    fn rejects_non_monotone_abscissae() {
        assert!(SampledCurve::new(alloc::vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(SampledCurve::new(alloc::vec![(1.0, 1.0), (0.5, 2.0)]).is_err());
    }
}

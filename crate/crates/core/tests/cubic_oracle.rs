//! Cubic root classification against companion-matrix eigenvalues.

use abelkit_core::cubic::{monic_roots, roots, CubicRoots};
use nalgebra::Matrix3;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

/// Eigenvalues of the companion matrix of `y³ + p2 y² + p1 y + p0`.
fn companion(p2: f64, p1: f64, p0: f64) -> Vec<(f64, f64)> {
    let m = Matrix3::new(0.0, 0.0, -p0, 1.0, 0.0, -p1, 0.0, 1.0, -p2);
    m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

fn discriminant(p2: f64, p1: f64, p0: f64) -> f64 {
    18.0 * p2 * p1 * p0 - 4.0 * p2.powi(3) * p0 + p2 * p2 * p1 * p1 - 4.0 * p1.powi(3) - 27.0 * p0 * p0
}

proptest! {
    #![proptest_config(ProptestConfig { rng_seed: RngSeed::Fixed(3), ..ProptestConfig::default() })]
    #[test]
    fn case_and_real_roots_match_companion(p2 in -5.0f64..5.0, p1 in -5.0f64..5.0, p0 in -5.0f64..5.0) {
        let scale = 1.0 + p2.abs().powi(6) + p1.abs().powi(3) + p0 * p0;
        let disc = discriminant(p2, p1, p0);
        // ties are excluded from the comparison
        prop_assume!(disc.abs() > 1e-6 * scale);
        let eig = companion(p2, p1, p0);
        let mut real: Vec<f64> = eig.iter().filter(|z| z.1.abs() < 1e-7).map(|z| z.0).collect();
        real.sort_by(f64::total_cmp);
        let got = monic_roots(p2, p1, p0).unwrap();
        let expected_case = if disc > 0.0 { 1 } else { 4 };
        prop_assert_eq!(got.case(), expected_case);
        prop_assert_eq!(got.real_roots().len(), real.len());
        for (r, e) in got.real_roots().iter().zip(&real) {
            prop_assert!((r - e).abs() < 1e-6 * (1.0 + e.abs()), "{} vs {}", r, e);
        }
        if let CubicRoots::RealComplex { re, im, .. } = got {
            let z = eig.iter().find(|z| z.1 > 1e-7).unwrap();
            prop_assert!((re - z.0).abs() < 1e-6 * (1.0 + z.0.abs()));
            prop_assert!((im - z.1).abs() < 1e-6 * (1.0 + z.1.abs()));
        }
    }

    #[test]
    fn constructed_multiplicities(r8 in -24i32..=24, s8 in -24i32..=24, lead2 in 1i32..=8) {
        // dyadic roots and leading coefficient: every coefficient below is
        // exact, so the multiplicity is exact too
        let (r, s, lead) = (r8 as f64 / 8.0, s8 as f64 / 8.0, lead2 as f64 / 2.0);
        prop_assume!((r - s).abs() > 0.1);
        // lead·(y − r)²(y − s)
        let c = [lead, -lead * (2.0 * r + s), lead * (r * r + 2.0 * r * s), -lead * r * r * s];
        match roots(c[0], c[1], c[2], c[3]).unwrap() {
            CubicRoots::SimpleDouble { simple, double } => {
                prop_assert!((simple - s).abs() < 1e-6 && (double - r).abs() < 1e-6, "{} {} vs {} {}", simple, double, s, r);
            }
            other => prop_assert!(false, "expected a double root, got {:?}", other),
        }
        // lead·(y − r)³
        let t = [lead, -3.0 * lead * r, 3.0 * lead * r * r, -lead * r.powi(3)];
        match roots(t[0], t[1], t[2], t[3]).unwrap() {
            CubicRoots::Triple(x) => prop_assert!((x - r).abs() < 1e-6, "{} vs {}", x, r),
            other => prop_assert!(false, "expected a triple root, got {:?}", other),
        }
    }
}

#[test]
fn leading_zero_is_refused() {
    assert!(roots(0.0, 1.0, 2.0, 3.0).is_err());
}

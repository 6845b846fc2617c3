mod common;

use proptest::prelude::*;
use zeroset::topology::{extract_zero_set, interval_roots, isotopy_signature_equal, zero_set_signature};
use zeroset::ScalarField;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn root_count_parity(r1 in -1.5f64..1.5, r2 in -1.5f64..1.5, r3 in -1.5f64..1.5, a in -1.0f64..-0.1, b in 0.1f64..1.0) {
        // roots well separated from each other and from the endpoints
        let roots = [r1, r2, r3];
        for (i, r) in roots.iter().enumerate() {
            prop_assume!((r - a).abs() > 1e-3 && (r - b).abs() > 1e-3);
            for s in &roots[i + 1..] {
                prop_assume!((r - s).abs() > 1e-2);
            }
        }
        let text = format!("(x1-({r1}))*(x1-({r2}))*(x1-({r3}))");
        let f = ScalarField::parse(&text, 1).unwrap();
        let found = interval_roots(&f, a, b, 1e-3).unwrap();
        let fa = f.value(&[a, 0.0, 0.0]).unwrap();
        let fb = f.value(&[b, 0.0, 0.0]).unwrap();
        prop_assert_eq!(found.len().is_multiple_of(2), fa * fb > 0.0);
        prop_assert_eq!(found.len(), roots.iter().filter(|r| **r > a && **r < b).count());
    }
}

#[test]
fn closed_contours_turn_once() {
    for s in common::corpus().into_iter().filter(|s| s.disk.n == 2) {
        let h = s.disk.default_resolution();
        let c = extract_zero_set(&s.field, &s.disk, h).unwrap();
        for p in c.polylines.iter().filter(|p| p.closed) {
            let turning = p.turning().abs();
            assert!(
                (turning - std::f64::consts::TAU).abs() < 10.0 * h.max(1e-3) * std::f64::consts::TAU,
                "{}: turning {turning}",
                s.name
            );
        }
    }
}

#[test]
fn signatures_are_stable_under_refinement() {
    for s in common::corpus() {
        let h = s.disk.default_resolution();
        let coarse = zero_set_signature(&s.field, &s.disk, h).unwrap();
        let fine = zero_set_signature(&s.field, &s.disk, 0.5 * h).unwrap();
        assert!(isotopy_signature_equal(&coarse, &fine), "{}", s.name);
    }
}

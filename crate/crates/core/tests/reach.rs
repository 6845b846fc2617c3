use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeroset::reach::{build_bump, defining_function, Hypersurface, MIN_FEASIBLE_SECOND_DERIVATIVE};
use zeroset::topology::extract_zero_set;
use zeroset::Disk;

fn surfaces() -> Vec<Hypersurface> {
    vec![
        Hypersurface::circle(0.1, -0.2, 0.6).unwrap(),
        Hypersurface::ellipse(1.0, 0.5).unwrap(),
        Hypersurface::torus(1.0, 3.0).unwrap(),
    ]
}

#[test]
fn jets_match_finite_differences_in_the_tube() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for z in surfaces() {
        let f = defining_function(z);
        let rho = z.reach();
        let samples = z.sample(100);
        for base in samples.iter().take(100) {
            let proj = z.project(base).unwrap();
            let t = rho * rng.gen_range(-0.85..0.85);
            let mut x = *base;
            for (xi, ni) in x.iter_mut().zip(proj.normal).take(z.n()) {
                *xi += t * ni;
            }
            let j = f.jet(&x, 2).unwrap();
            let h = 1e-5;
            for i in 0..z.n() {
                let (mut a, mut b) = (x, x);
                a[i] += h;
                b[i] -= h;
                let (ja, jb) = (f.jet(&a, 1).unwrap(), f.jet(&b, 1).unwrap());
                let fd = (f.value(&a).unwrap() - f.value(&b).unwrap()) / (2.0 * h);
                assert!((j.gradient[i] - fd).abs() < 1e-6, "{z}: gradient");
                for k in 0..z.n() {
                    let fd2 = (ja.gradient[k] - jb.gradient[k]) / (2.0 * h);
                    assert!((j.hessian[i][k] - fd2).abs() < 1e-6 * (1.0 + fd2.abs()), "{z}: hessian");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn profile_derivative_bounds(t in -3.0f64..3.0, rho in 0.1f64..4.0) {
        let g = build_bump();
        let [v, d1, d2] = g.eval_scaled(rho, t);
        prop_assert!(d1.abs() <= 1.0 + 1e-12);
        prop_assert!(d2.abs() <= g.max_second_derivative() / rho + 1e-12);
        prop_assert!(v.abs() <= 0.75 * rho + 1e-12);
        let [w, e1, _] = g.eval_scaled(rho, -t);
        prop_assert!((v + w).abs() < 1e-12 && (d1 - e1).abs() < 1e-12);
    }
}

#[test]
fn second_derivative_peak_is_near_the_feasible_minimum() {
    let g = build_bump();
    let m = g.max_second_derivative();
    assert!((MIN_FEASIBLE_SECOND_DERIVATIVE..=32.0 / 7.0 + 1e-12).contains(&m), "{m}");
}

#[test]
fn curvature_ratio_is_bounded_in_the_tube() {
    for z in surfaces() {
        let rho = z.reach();
        for x in z.sample(200) {
            let p = z.project(&x).unwrap();
            for lam in p.curvatures.iter().take(z.n() - 1).map(|c| -c).filter(|l| *l > 0.0) {
                for k in 0..=7 {
                    let t = k as f64 / 8.0 * rho;
                    assert!(1.0 / (1.0 - lam * t).abs() <= 8.0 + 1e-9, "{z}");
                }
            }
        }
    }
}

#[test]
fn extracted_circle_is_within_one_cell() {
    let z = Hypersurface::circle(0.1, -0.2, 0.6).unwrap();
    let disk = Disk::new(&[0.0, 0.0], 1.5).unwrap();
    let h = disk.default_resolution();
    let c = extract_zero_set(&defining_function(z), &disk, h).unwrap();
    assert_eq!(c.polylines.len(), 1);
    for q in &c.polylines[0].points {
        let r = (q[0] - 0.1).hypot(q[1] + 0.2);
        assert!((r - 0.6).abs() < h, "{r}");
    }
}

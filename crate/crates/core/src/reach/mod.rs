//! Defining functions `g_rho(d*_Z)` for hypersurfaces with known reach.

mod bump;
mod surface;

pub use bump::{
    build_bump, BumpProfile, LINEAR_END, MIN_FEASIBLE_SECOND_DERIVATIVE, PLATEAU_START,
    PLATEAU_VALUE,
};
pub use surface::{Hypersurface, Projection};

use std::sync::Arc;

use serde::Serialize;

use crate::condition::{self, SingularityKind};
use crate::jets::{Jet, ScalarField};
use crate::jets::FieldKind;
use crate::{Disk, Error, Point, Result};

/// `x -> scale * g_rho(d*_Z(x))`, constant `+-3/4 rho scale` off the tube.
#[derive(Debug, Clone)]
pub struct DefiningFunction {
    surface: Hypersurface,
    profile: BumpProfile,
    rho: f64,
    scale: f64,
}

impl DefiningFunction {
    pub fn new(surface: Hypersurface) -> Self {
        Self { surface, profile: build_bump(), rho: surface.reach(), scale: 1.0 }
    }

    /// Multiplies the field by `scale`.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn surface(&self) -> &Hypersurface {
        &self.surface
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    fn plateau(&self, t: f64) -> Option<f64> {
        (t.abs() >= PLATEAU_START * self.rho)
            .then(|| t.signum() * PLATEAU_VALUE * self.rho * self.scale)
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        let t = self.surface.signed_distance_value(x);
        Ok(self
            .plateau(t)
            .unwrap_or_else(|| self.scale * self.profile.eval_scaled(self.rho, t)[0]))
    }

    /// Jet up to order 2: `g'' grad d grad d^T + g' He(d)`, times `scale`.
    pub fn jet(&self, x: &Point, order: usize) -> Result<Jet> {
        if order > 2 {
            return Err(Error::OrderTooHigh { order, max: 2 });
        }
        let n = self.surface.n();
        let t = self.surface.signed_distance_value(x);
        if let Some(c) = self.plateau(t) {
            return Ok(Jet::constant(n, c).truncate(order));
        }
        let d = self.surface.signed_distance(x, order)?;
        let [g, dg, ddg] = self.profile.eval_scaled(self.rho, t);
        Ok(d.compose([g, dg, ddg, 0.0]).scale(self.scale).truncate(order))
    }
}

/// The composite field `g_rho(d*_Z)` with `rho` the reach of `Z`.
pub fn defining_function(surface: Hypersurface) -> ScalarField {
    ScalarField::new(surface.n(), FieldKind::Composite(Arc::new(DefiningFunction::new(surface))))
}

/// Measured constituents and the bounds they are compared with.
#[derive(Debug, Clone, Serialize)]
pub struct ReachReport {
    pub surface: String,
    pub n: usize,
    pub rho: f64,
    pub boundary_distance: f64,
    pub resolution: f64,
    pub tolerance: f64,
    pub delta: f64,
    pub delta_lower_bound: f64,
    pub kappa1: f64,
    pub kappa1_bound: f64,
    pub kappa2: f64,
    pub kappa2_bound: f64,
    pub delta_ok: bool,
    pub kappa1_ok: bool,
    pub kappa2_ok: bool,
}

impl ReachReport {
    pub fn passed(&self) -> bool {
        self.delta_ok && self.kappa1_ok && self.kappa2_ok
    }
}

/// Grid slack applied to every bound.
pub const BOUND_TOLERANCE: f64 = 0.02;

/// Measures `delta`, `kappa^(1)` and `kappa^(2)` of the defining function and
/// compares them with `rho / 2`, `2(1 + 1/rho)` and `2(1 + 1/rho + 5n/rho^2)`.
///
/// `check_kappa2 = false` skips the second-order norm (reported as NaN), which
/// keeps three-dimensional runs cheap.
pub fn verify_condition_bounds(
    surface: Hypersurface,
    disk: &Disk,
    resolution: Option<f64>,
    check_kappa2: bool,
) -> Result<ReachReport> {
    let n = surface.n();
    if disk.n != n {
        return Err(Error::InvalidArgument(format!(
            "surface lives in dimension {n}, disk in dimension {}",
            disk.n
        )));
    }
    let rho = surface.reach();
    let boundary_distance = disk.radius - surface.max_distance_from(&disk.center);
    if !(boundary_distance > rho) {
        return Err(Error::Hypothesis(format!(
            "dist(Z, boundary) = {boundary_distance} must exceed the reach {rho}"
        )));
    }
    let h = resolution.unwrap_or_else(|| disk.default_resolution());
    let f = defining_function(surface);
    let r1 = condition::kappa(&f, disk, 1, SingularityKind::Hypersurface, h)?;
    let kappa2 = if check_kappa2 {
        let norm2 = crate::jets::c_norm(&f, disk, 2, h)?;
        norm2.value / r1.delta
    } else {
        f64::NAN
    };
    let tol = BOUND_TOLERANCE;
    let delta_lower_bound = rho / 2.0;
    let kappa1_bound = 2.0 * (1.0 + 1.0 / rho);
    let kappa2_bound = 2.0 * (1.0 + 1.0 / rho + 5.0 * n as f64 / (rho * rho));
    Ok(ReachReport {
        surface: surface.to_string(),
        n,
        rho,
        boundary_distance,
        resolution: h,
        tolerance: tol,
        delta: r1.delta,
        delta_lower_bound,
        kappa1: r1.kappa,
        kappa1_bound,
        kappa2,
        kappa2_bound,
        delta_ok: r1.delta >= delta_lower_bound * (1.0 - tol),
        kappa1_ok: r1.kappa <= kappa1_bound * (1.0 + tol),
        kappa2_ok: !check_kappa2 || kappa2 <= kappa2_bound * (1.0 + tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64) -> Hypersurface {
        Hypersurface::circle(0.0, 0.0, r).unwrap()
    }

    #[test]
    fn circle_example_point() {
        let f = defining_function(circle(0.5));
        let j = f.jet(&[0.75, 0.0, 0.0], 2).unwrap();
        assert!((j.value - 0.25).abs() < 1e-15);
        assert!((j.gradient[0] - 1.0).abs() < 1e-15);
        assert!(j.gradient[1].abs() < 1e-15);
        // linear zone: Hessian equals the distance Hessian, tangent eigenvalue 1/|x|
        assert!((j.hessian[1][1] - 4.0 / 3.0).abs() < 1e-12);
        assert!(j.hessian[0][0].abs() < 1e-12);
    }

    #[test]
    fn distance_hessian_matches_second_differences() {
        let s = circle(0.5);
        let x = [0.75, 0.0, 0.0];
        let h = 1e-4;
        let d = |y: [f64; 3]| s.signed_distance_value(&y);
        let fd = (d([x[0], h, 0.0]) - 2.0 * d(x) + d([x[0], -h, 0.0])) / (h * h);
        let j = s.signed_distance(&x, 2).unwrap();
        assert!((j.hessian[1][1] - fd).abs() < 1e-6, "{} vs {fd}", j.hessian[1][1]);
    }

    #[test]
    fn plateau_and_zero_set() {
        let f = defining_function(circle(0.5));
        assert_eq!(f.value(&[2.0, 0.0, 0.0]).unwrap(), 0.375);
        assert_eq!(f.value(&[0.0, 0.0, 0.0]).unwrap(), -0.375);
        assert_eq!(f.value(&[0.5 + 0.4375, 0.0, 0.0]).unwrap(), 0.375);
        for z in circle(0.5).sample(12) {
            assert!(f.value(&z).unwrap().abs() < 1e-15);
        }
    }

    fn fd_check(surface: Hypersurface, pts: &[Point]) {
        let f = DefiningFunction::new(surface);
        let n = surface.n();
        let h = 1e-5;
        for x in pts {
            let j = f.jet(x, 2).unwrap();
            for i in 0..n {
                let mut xp = *x;
                let mut xm = *x;
                xp[i] += h;
                xm[i] -= h;
                let gp = f.jet(&xp, 1).unwrap().gradient;
                let gm = f.jet(&xm, 1).unwrap().gradient;
                let fd_grad = (f.value(&xp).unwrap() - f.value(&xm).unwrap()) / (2.0 * h);
                assert!((fd_grad - j.gradient[i]).abs() < 1e-6, "grad {x:?}");
                for k in 0..n {
                    let fd = (gp[k] - gm[k]) / (2.0 * h);
                    assert!((fd - j.hessian[i][k]).abs() < 1e-5, "hess {x:?} {i}{k}: {fd} vs {}", j.hessian[i][k]);
                }
            }
        }
    }

    #[test]
    fn chain_rule_against_differences() {
        fd_check(circle(0.5), &[[0.6, 0.1, 0.0], [0.2, -0.45, 0.0], [0.8, 0.3, 0.0]]);
        fd_check(
            Hypersurface::ellipse(1.0, 0.5).unwrap(),
            &[[1.05, 0.1, 0.0], [0.3, 0.5, 0.0], [-0.6, -0.35, 0.0]],
        );
        fd_check(
            Hypersurface::torus(1.0, 3.0).unwrap(),
            &[[3.5, 0.2, 0.4], [1.0, 2.2, -0.3], [-2.5, 0.0, 0.6]],
        );
    }

    #[test]
    fn curvature_ratio_is_at_most_eight() {
        for s in [circle(0.5), Hypersurface::ellipse(1.0, 0.5).unwrap()] {
            let rho = s.reach();
            for z in s.sample(64) {
                let p = s.project(&z).unwrap();
                for k in 1..=7 {
                    let t = k as f64 / 8.0 * rho;
                    let lam = -p.curvatures[0]; // positive for convex curves
                    assert!(1.0 / (1.0 - lam * t).abs() <= 8.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn hypothesis_is_enforced() {
        // R - max|z| = 0.4 < rho = 0.5
        let d = Disk::centered(2, 0.9).unwrap();
        let e = verify_condition_bounds(circle(0.5), &d, None, false).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
    }

    #[test]
    fn order_three_rejected() {
        let f = defining_function(circle(0.5));
        assert!(matches!(f.jet(&[0.6, 0.0, 0.0], 3), Err(Error::OrderTooHigh { .. })));
    }
}

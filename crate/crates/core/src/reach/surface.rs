//! Primitive hypersurfaces with closed-form reach, projection and curvature.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::geometry::{dot, norm, sub};
use crate::jets::Jet;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Hypersurface {
    /// Circle in the plane.
    Circle { center: [f64; 2], radius: f64 },
    /// Axis-aligned ellipse centered at the origin, `a >= b`.
    Ellipse { a: f64, b: f64 },
    /// Torus around the x3 axis: tube radius `tube`, ring radius `ring`.
    Torus { tube: f64, ring: f64 },
}

/// Closest point data for a point inside the tube of a hypersurface.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    pub closest: Point,
    /// Signed distance, negative inside.
    pub distance: f64,
    /// Outward unit normal at `closest`.
    pub normal: Point,
    /// Orthonormal principal directions at `closest` (first `n - 1` used).
    pub directions: [Point; 2],
    /// Principal curvatures `lambda_i` along `directions`, signed so that the
    /// Hessian of the signed distance has eigenvalues
    /// `-lambda_i / (1 - lambda_i t)`. Convex surfaces have `lambda_i < 0`.
    pub curvatures: [f64; 2],
}

impl Hypersurface {
    pub fn circle(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("circle radius must be positive".into()));
        }
        Ok(Self::Circle { center: [cx, cy], radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a >= b && b > 0.0) {
            return Err(Error::InvalidArgument("ellipse needs a >= b > 0".into()));
        }
        Ok(Self::Ellipse { a, b })
    }

    pub fn torus(tube: f64, ring: f64) -> Result<Self> {
        if !(tube > 0.0 && ring > tube) {
            return Err(Error::InvalidArgument("torus needs ring > tube > 0".into()));
        }
        Ok(Self::Torus { tube, ring })
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Circle { .. } | Self::Ellipse { .. } => 2,
            Self::Torus { .. } => 3,
        }
    }

    pub fn reach(&self) -> f64 {
        match *self {
            Self::Circle { radius, .. } => radius,
            Self::Ellipse { a, b } => b * b / a,
            Self::Torus { tube, ring } => tube.min(ring - tube),
        }
    }

    /// Largest distance from `center` to a point of the surface.
    pub fn max_distance_from(&self, center: &Point) -> f64 {
        match *self {
            Self::Circle { center: c, radius } => {
                norm(&sub(&[c[0], c[1], 0.0], center), 2) + radius
            }
            Self::Ellipse { a, b } => {
                // Dense parametric scan; exact when center is the origin.
                if center[0] == 0.0 && center[1] == 0.0 {
                    return a;
                }
                (0..4096)
                    .map(|i| {
                        let t = std::f64::consts::TAU * i as f64 / 4096.0;
                        norm(&sub(&[a * t.cos(), b * t.sin(), 0.0], center), 2)
                    })
                    .fold(0.0, f64::max)
                    + a * 1e-6
            }
            Self::Torus { tube, ring } => {
                if center.iter().all(|&c| c == 0.0) {
                    return ring + tube;
                }
                self.sample(1 << 16)
                    .iter()
                    .map(|z| norm(&sub(z, center), 3))
                    .fold(0.0, f64::max)
                    + tube * 1e-3
            }
        }
    }

    /// Signed distance (negative inside) without smoothness restrictions.
    pub fn signed_distance_value(&self, x: &Point) -> f64 {
        match *self {
            Self::Circle { center, radius } => (x[0] - center[0]).hypot(x[1] - center[1]) - radius,
            Self::Ellipse { a, b } => {
                let q = ellipse_closest(a, b, x[0], x[1]);
                let d = (x[0] - q[0]).hypot(x[1] - q[1]);
                if (x[0] / a).powi(2) + (x[1] / b).powi(2) < 1.0 {
                    -d
                } else {
                    d
                }
            }
            Self::Torus { tube, ring } => {
                let rho = x[0].hypot(x[1]);
                (rho - ring).hypot(x[2]) - tube
            }
        }
    }

    /// Closest point, normal and principal frame. Fails outside the open tube
    /// `|d*| < reach`.
    pub fn project(&self, x: &Point) -> Result<Projection> {
        let t = self.signed_distance_value(x);
        if !(t.abs() < self.reach()) {
            return Err(Error::Domain(format!(
                "|signed distance| = {} is not below the reach {}",
                t.abs(),
                self.reach()
            )));
        }
        Ok(match *self {
            Self::Circle { center, radius } => {
                let v = [x[0] - center[0], x[1] - center[1], 0.0];
                let r = norm(&v, 2);
                let nu = [v[0] / r, v[1] / r, 0.0];
                Projection {
                    closest: [center[0] + radius * nu[0], center[1] + radius * nu[1], 0.0],
                    distance: t,
                    normal: nu,
                    directions: [[-nu[1], nu[0], 0.0], [0.0; 3]],
                    curvatures: [-1.0 / radius, 0.0],
                }
            }
            Self::Ellipse { a, b } => {
                let q = ellipse_closest(a, b, x[0], x[1]);
                let g = [q[0] / (a * a), q[1] / (b * b), 0.0];
                let gn = norm(&g, 2);
                let nu = [g[0] / gn, g[1] / gn, 0.0];
                let kappa = 1.0 / (a * a * b * b * gn.powi(3));
                Projection {
                    closest: [q[0], q[1], 0.0],
                    distance: t,
                    normal: nu,
                    directions: [[-nu[1], nu[0], 0.0], [0.0; 3]],
                    curvatures: [-kappa, 0.0],
                }
            }
            Self::Torus { tube, ring } => {
                let rho = x[0].hypot(x[1]);
                let e_rho = [x[0] / rho, x[1] / rho, 0.0];
                let e_phi = [-e_rho[1], e_rho[0], 0.0];
                let w = [x[0] - ring * e_rho[0], x[1] - ring * e_rho[1], x[2]];
                let wn = norm(&w, 3);
                let nu = [w[0] / wn, w[1] / wn, w[2] / wn];
                // meridian direction: nu x e_phi
                let e_mer = [
                    nu[1] * e_phi[2] - nu[2] * e_phi[1],
                    nu[2] * e_phi[0] - nu[0] * e_phi[2],
                    nu[0] * e_phi[1] - nu[1] * e_phi[0],
                ];
                let cos_theta = dot(&nu, &e_rho, 3);
                let closest = [
                    ring * e_rho[0] + tube * nu[0],
                    ring * e_rho[1] + tube * nu[1],
                    tube * nu[2],
                ];
                Projection {
                    closest,
                    distance: t,
                    normal: nu,
                    directions: [e_mer, e_phi],
                    curvatures: [-1.0 / tube, -cos_theta / (ring + tube * cos_theta)],
                }
            }
        })
    }

    /// Jet of order at most 2 of the signed distance.
    ///
    /// The Hessian is assembled in the principal frame with eigenvalues
    /// `-lambda_i / (1 - lambda_i t)` on the tangent directions and `0` on
    /// the normal.
    pub fn signed_distance(&self, x: &Point, order: usize) -> Result<Jet> {
        if order > 2 {
            return Err(Error::OrderTooHigh { order, max: 2 });
        }
        let n = self.n();
        let p = self.project(x)?;
        let mut j = Jet::constant(n, p.distance);
        j.gradient = p.normal;
        for k in 0..n - 1 {
            let lam = p.curvatures[k];
            let beta = -lam / (1.0 - lam * p.distance);
            let e = p.directions[k];
            for a in 0..n {
                for b in 0..n {
                    j.hessian[a][b] += beta * e[a] * e[b];
                }
            }
        }
        Ok(j.truncate(order))
    }

    /// Points on the surface, for plotting and zero-set comparisons.
    pub fn sample(&self, m: usize) -> Vec<Point> {
        match *self {
            Self::Circle { center, radius } => (0..m)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / m as f64;
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin(), 0.0]
                })
                .collect(),
            Self::Ellipse { a, b } => (0..m)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / m as f64;
                    [a * t.cos(), b * t.sin(), 0.0]
                })
                .collect(),
            Self::Torus { tube, ring } => {
                let k = (m as f64).sqrt().ceil() as usize;
                let mut out = Vec::with_capacity(k * k);
                for i in 0..k {
                    for j in 0..k {
                        let u = std::f64::consts::TAU * i as f64 / k as f64;
                        let v = std::f64::consts::TAU * j as f64 / k as f64;
                        let r = ring + tube * v.cos();
                        out.push([r * u.cos(), r * u.sin(), tube * v.sin()]);
                    }
                }
                out
            }
        }
    }
}

/// Closest point on the ellipse `(x/a)^2 + (y/b)^2 = 1` to `(x, y)`.
///
/// Reduces to the first quadrant and solves the monotone secular equation
/// `(a x / (s + a^2))^2 + (b y / (s + b^2))^2 = 1` by Newton steps guarded
/// with bisection.
fn ellipse_closest(a: f64, b: f64, x: f64, y: f64) -> [f64; 2] {
    let (sx, sy) = (x.signum(), y.signum());
    let (y0, y1) = (x.abs(), y.abs());
    let (e0, e1) = (a, b);
    let (q0, q1) = if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = e0 * y0;
            let z1 = e1 * y1;
            let g = |s: f64| (z0 / (s + e0 * e0)).powi(2) + (z1 / (s + e1 * e1)).powi(2) - 1.0;
            let dg = |s: f64| {
                -2.0 * z0 * z0 / (s + e0 * e0).powi(3) - 2.0 * z1 * z1 / (s + e1 * e1).powi(3)
            };
            // g is decreasing on (-e1^2, inf) with a single root.
            let mut lo = -e1 * e1;
            let mut hi = -e1 * e1 + (z0 * z0 + z1 * z1).sqrt();
            let mut s = 0.5 * (lo + hi);
            for _ in 0..200 {
                let v = g(s);
                if v.abs() < 1e-15 {
                    break;
                }
                if v > 0.0 {
                    lo = s;
                } else {
                    hi = s;
                }
                let step = s - v / dg(s);
                s = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
                if hi - lo < 1e-15 * (1.0 + hi.abs()) {
                    break;
                }
            }
            (e0 * e0 * y0 / (s + e0 * e0), e1 * e1 * y1 / (s + e1 * e1))
        } else {
            (0.0, e1)
        }
    } else {
        let denom = e0 * e0 - e1 * e1;
        if denom > 0.0 && y0 < denom / e0 {
            let x0 = e0 * e0 * y0 / denom;
            (x0, e1 * (1.0 - (x0 / e0).powi(2)).max(0.0).sqrt())
        } else {
            (e0, 0.0)
        }
    };
    let fx = if sx < 0.0 { -q0 } else { q0 };
    let fy = if sy < 0.0 { -q1 } else { q1 };
    [fx, fy]
}

impl FromStr for Hypersurface {
    type Err = Error;

    /// `circle:cx,cy,r`, `ellipse:a,b` or `torus:r,R`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("surface spec `{s}` lacks `kind:`")))?;
        let vals: Vec<f64> = args
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("surface spec `{s}`: {e}")))?;
        match (kind.trim(), vals.as_slice()) {
            ("circle", [cx, cy, r]) => Self::circle(*cx, *cy, *r),
            ("ellipse", [a, b]) => Self::ellipse(*a, *b),
            ("torus", [r, big]) => Self::torus(*r, *big),
            _ => Err(Error::InvalidArgument(format!("unrecognised surface spec `{s}`"))),
        }
    }
}

impl fmt::Display for Hypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Circle { center, radius } => write!(f, "circle:{},{},{}", center[0], center[1], radius),
            Self::Ellipse { a, b } => write!(f, "ellipse:{a},{b}"),
            Self::Torus { tube, ring } => write!(f, "torus:{tube},{ring}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert_eq!(
            "circle:0,0,1".parse::<Hypersurface>().unwrap(),
            Hypersurface::Circle { center: [0.0, 0.0], radius: 1.0 }
        );
        assert_eq!("ellipse:1,0.5".parse::<Hypersurface>().unwrap().reach(), 0.25);
        assert_eq!("torus:1,3".parse::<Hypersurface>().unwrap().reach(), 1.0);
        assert!("ellipse:0.5,1".parse::<Hypersurface>().is_err());
        assert!("square:1".parse::<Hypersurface>().is_err());
    }

    #[test]
    fn circle_closest_point() {
        let c = Hypersurface::circle(0.1, -0.2, 0.5).unwrap();
        let x = [0.4, 0.1, 0.0];
        let p = c.project(&x).unwrap();
        let v = [0.3, 0.3];
        let r = (0.18f64).sqrt();
        assert!((p.closest[0] - (0.1 + 0.5 * v[0] / r)).abs() < 1e-15);
        assert!((p.closest[1] - (-0.2 + 0.5 * v[1] / r)).abs() < 1e-15);
    }

    #[test]
    fn ellipse_projection_is_orthogonal() {
        let e = Hypersurface::ellipse(1.0, 0.5).unwrap();
        for &(x, y) in &[(1.1, 0.2), (0.3, 0.6), (-0.8, -0.3), (0.0, 0.6), (1.2, 0.0), (0.2, -0.55)] {
            let p = e.project(&[x, y, 0.0]).unwrap();
            let q = p.closest;
            assert!(((q[0]).powi(2) + (q[1] / 0.5).powi(2) - 1.0).abs() < 1e-12);
            // x - q parallel to the normal
            let d = [x - q[0], y - q[1]];
            let cross = d[0] * p.normal[1] - d[1] * p.normal[0];
            assert!(cross.abs() < 1e-12, "({x},{y}) cross {cross}");
            assert!((d[0] * p.normal[0] + d[1] * p.normal[1] - p.distance).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipse_curvature_at_vertices() {
        let e = Hypersurface::ellipse(1.0, 0.5).unwrap();
        // radius of curvature b^2/a at (a, 0), a^2/b at (0, b)
        let p = e.project(&[1.05, 0.0, 0.0]).unwrap();
        assert!((p.curvatures[0] + 4.0).abs() < 1e-9);
        let q = e.project(&[0.0, 0.55, 0.0]).unwrap();
        assert!((q.curvatures[0] + 0.5).abs() < 1e-9);
    }

    #[test]
    fn tube_violation_is_a_domain_error() {
        let c = Hypersurface::circle(0.0, 0.0, 0.5).unwrap();
        let x = [0.5 + 0.5 * 1.01, 0.0, 0.0];
        assert!(matches!(c.signed_distance(&x, 2), Err(Error::Domain(_))));
        assert!(matches!(c.signed_distance(&[0.0; 3], 0), Err(Error::Domain(_))));
    }

    #[test]
    fn on_surface_unit_gradient() {
        for s in [
            Hypersurface::circle(0.2, 0.1, 0.7).unwrap(),
            Hypersurface::ellipse(1.0, 0.5).unwrap(),
            Hypersurface::torus(1.0, 3.0).unwrap(),
        ] {
            for z in s.sample(16) {
                let j = s.signed_distance(&z, 1).unwrap();
                assert!(j.value.abs() < 1e-12);
                assert!((j.gradient_norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_max_distance() {
        let t = Hypersurface::torus(1.0, 3.0).unwrap();
        assert!((t.max_distance_from(&[0.0; 3]) - 4.0).abs() < 1e-12);
    }
}

//! Pointwise discriminant distances `delta`, condition numbers `kappa` and the
//! critical-value gap `gamma`.
//!
//! Two singularity kinds are supported. For `Hypersurface` the interior
//! quantity is `sqrt(f^2 + |grad f|^2)` and the boundary quantity replaces the
//! gradient by its tangential part. For `CriticalPoints` the quantity is
//! `sqrt(|grad f|^2 + sigma_1(He f)^2)`, with `sigma_1` the smallest absolute
//! eigenvalue of the Hessian.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::geometry::{dot, norm, DiskGrid};
use crate::jets::{c_norm, Jet, NormEstimate, ScalarField, MAX_ORDER};
use crate::{par, Disk, Error, Point, Result};

/// Number of pattern-search iterations applied to the best grid point.
pub const REFINE_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    /// Zero set of `f` (`r = 0`).
    Hypersurface,
    /// Critical points of `f` (`r = 1`).
    CriticalPoints,
}

impl SingularityKind {
    /// Jet order `r` of the singularity condition.
    pub fn r(self) -> usize {
        match self {
            Self::Hypersurface => 0,
            Self::CriticalPoints => 1,
        }
    }
}

impl FromStr for SingularityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypersurface" => Ok(Self::Hypersurface),
            "critical" | "critical_points" | "critical-points" => Ok(Self::CriticalPoints),
            _ => Err(Error::InvalidArgument(format!("unknown singularity kind `{s}`"))),
        }
    }
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hypersurface => "hypersurface",
            Self::CriticalPoints => "critical",
        })
    }
}

/// `delta` together with its interior/boundary split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub interior_term: f64,
    pub boundary_term: f64,
    pub argmin: Point,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub n: usize,
    pub delta: f64,
    pub interior_term: f64,
    pub boundary_term: f64,
    pub argmin: Point,
    pub norm: NormEstimate,
    pub resolution: f64,
    /// `norm / delta`, infinite when `delta = 0`.
    pub kappa: f64,
    pub kind: SingularityKind,
    pub ell: usize,
}

impl Serialize for ConditionReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ConditionReport", 9)?;
        st.serialize_field("delta", &self.delta)?;
        st.serialize_field("interior_term", &self.interior_term)?;
        st.serialize_field("boundary_term", &finite_or_none(self.boundary_term))?;
        st.serialize_field("argmin", &self.argmin[..self.n])?;
        st.serialize_field("norm", &self.norm.value)?;
        st.serialize_field("resolution", &self.resolution)?;
        st.serialize_field("kappa", &finite_or_none(self.kappa))?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("ell", &self.ell)?;
        st.end()
    }
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `sqrt(f^2 + |grad f|^2)`.
pub fn hypersurface_interior(j: &Jet) -> f64 {
    (j.value * j.value + j.gradient_norm().powi(2)).sqrt()
}

/// `sqrt(f^2 + |grad_T f|^2)` at a boundary point with outward normal `nu`.
/// For `n = 1` the tangent space is trivial and this is `|f|`.
pub fn hypersurface_boundary(j: &Jet, nu: &Point) -> f64 {
    if j.n == 1 {
        return j.value.abs();
    }
    let gt = tangential(j, nu);
    (j.value * j.value + dot(&gt, &gt, j.n)).sqrt()
}

/// `sqrt(|grad f|^2 + sigma_1(He f)^2)`.
pub fn critical_pointwise(j: &Jet) -> f64 {
    let s = smallest_abs_eigenvalue(&j.hessian, j.n);
    (j.gradient_norm().powi(2) + s * s).sqrt()
}

fn tangential(j: &Jet, nu: &Point) -> Point {
    let gn = dot(&j.gradient, nu, j.n);
    let mut g = j.gradient;
    for i in 0..j.n {
        g[i] -= gn * nu[i];
    }
    g
}

/// Smallest `|lambda|` over the eigenvalues of the leading `n x n` block.
pub fn smallest_abs_eigenvalue(h: &[[f64; 3]; 3], n: usize) -> f64 {
    if n == 1 {
        return h[0][0].abs();
    }
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (h[i][j] + h[j][i]));
    m.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &l| a.min(l.abs()))
}

/// Pattern search from `start`: try `+-step` along each axis, move to the best
/// improvement, halve the step when none improves. `project` keeps iterates
/// on the admissible set.
fn refine<F, P>(start: Point, value: f64, n: usize, h: f64, eval: F, project: P) -> Result<(Point, f64)>
where
    F: Fn(&Point) -> Result<f64>,
    P: Fn(&Point) -> Point,
{
    let (mut x, mut best) = (start, value);
    let mut step = 0.25 * h;
    for _ in 0..REFINE_STEPS {
        let mut cand = None;
        for i in 0..n {
            for sgn in [-1.0, 1.0] {
                let mut y = x;
                y[i] += sgn * step;
                let y = project(&y);
                let v = eval(&y)?;
                if v < best && cand.is_none_or(|(_, bv)| v < bv) {
                    cand = Some((y, v));
                }
            }
        }
        match cand {
            Some((y, v)) => {
                x = y;
                best = v;
            }
            None => step *= 0.5,
        }
    }
    Ok((x, best))
}

fn min_over<F>(pts: &[Point], f: F) -> Result<Option<(Point, f64)>>
where
    F: Fn(&Point) -> Result<f64> + Sync + Send,
{
    let vals = par::try_map(pts, |z| f(z))?;
    Ok(par::argmin(&vals).map(|(i, v)| (pts[i], v)))
}

/// `delta` for the zero set of `f` on `disk`.
pub fn delta_hypersurface(f: &ScalarField, disk: &Disk, resolution: f64) -> Result<DeltaEstimate> {
    let grid = disk.grid(resolution);
    delta_hypersurface_on(f, disk, &grid)
}

pub fn delta_hypersurface_on(f: &ScalarField, disk: &Disk, grid: &DiskGrid) -> Result<DeltaEstimate> {
    let n = disk.n;
    let h = grid.resolution;
    let all: Vec<Point> = grid.all().copied().collect();
    let interior_at = |z: &Point| f.jet(z, 1).map(|j| hypersurface_interior(&j));
    let boundary_at = |z: &Point| {
        let nu = disk.outward_normal(z);
        f.jet(z, 1).map(|j| hypersurface_boundary(&j, &nu))
    };
    let (zi, vi) = min_over(&all, interior_at)?.ok_or_else(empty_grid)?;
    let (zi, vi) = refine(zi, vi, n, h, interior_at, |y| disk.project(y))?;
    let (zb, vb) = min_over(&grid.boundary, boundary_at)?.ok_or_else(empty_grid)?;
    let (zb, vb) = if n == 1 {
        (zb, vb)
    } else {
        refine(zb, vb, n, h, boundary_at, |y| disk.project_to_boundary(y))?
    };
    let (delta, argmin) = if vi <= vb { (vi, zi) } else { (vb, zb) };
    Ok(DeltaEstimate { delta, interior_term: vi, boundary_term: vb, argmin, resolution: h })
}

/// `delta` for the critical points of `f` on `disk`.
///
/// The boundary form of this quantity is not used. Instead the scan checks
/// that no point within two grid cells of the boundary has
/// `|grad f| < delta / 2`, and fails with
/// [`Error::BoundaryTransversalityUnverified`] otherwise. The boundary term is
/// reported as infinite.
pub fn delta_critical(f: &ScalarField, disk: &Disk, resolution: f64) -> Result<DeltaEstimate> {
    let n = disk.n;
    let grid = disk.grid(resolution);
    let h = grid.resolution;
    let all: Vec<Point> = grid.all().copied().collect();
    let at = |z: &Point| f.jet(z, 2).map(|j| critical_pointwise(&j));
    let (z, v) = min_over(&all, at)?.ok_or_else(empty_grid)?;
    let (z, v) = refine(z, v, n, h, at, |y| disk.project(y))?;
    let collar: Vec<Point> = all
        .iter()
        .copied()
        .filter(|p| disk.radius - disk.distance_from_center(p) <= 2.0 * h)
        .collect();
    let grads = par::try_map(&collar, |p| f.jet(p, 1).map(|j| j.gradient_norm()))?;
    if let Some((i, g)) = par::argmin(&grads) {
        if g < 0.5 * v {
            return Err(Error::BoundaryTransversalityUnverified {
                witness: collar[i][..n].to_vec(),
            });
        }
    }
    Ok(DeltaEstimate {
        delta: v,
        interior_term: v,
        boundary_term: f64::INFINITY,
        argmin: z,
        resolution: h,
    })
}

pub fn delta(f: &ScalarField, disk: &Disk, kind: SingularityKind, resolution: f64) -> Result<DeltaEstimate> {
    match kind {
        SingularityKind::Hypersurface => delta_hypersurface(f, disk, resolution),
        SingularityKind::CriticalPoints => delta_critical(f, disk, resolution),
    }
}

/// `kappa^(ell) = ||f||_{C^ell} / delta`.
pub fn kappa(
    f: &ScalarField,
    disk: &Disk,
    ell: usize,
    kind: SingularityKind,
    resolution: f64,
) -> Result<ConditionReport> {
    if ell < kind.r() + 1 {
        return Err(Error::InvalidArgument(format!(
            "ell = {ell} is below r + 1 = {} for {kind}",
            kind.r() + 1
        )));
    }
    if ell > MAX_ORDER {
        return Err(Error::OrderTooHigh { order: ell, max: MAX_ORDER });
    }
    check_dims(f, disk)?;
    let d = delta(f, disk, kind, resolution)?;
    let norm = c_norm(f, disk, ell, resolution)?;
    let kappa = if d.delta > 0.0 { norm.value / d.delta } else { f64::INFINITY };
    Ok(ConditionReport {
        n: disk.n,
        delta: d.delta,
        interior_term: d.interior_term,
        boundary_term: d.boundary_term,
        argmin: d.argmin,
        norm,
        resolution: d.resolution,
        kappa,
        kind,
        ell,
    })
}

/// Smallest `|f|` over critical points of `f` and of `f` restricted to the
/// boundary; infinite when none is detected.
///
/// Interior candidates are grid points whose gradient is small relative to
/// the local Hessian (`|grad f| <= sqrt(n) h |He f| + 1e-12`), polished by
/// Newton steps on `grad f`. On a circle boundary, sign changes of the
/// tangential derivative are bisected in angle.
pub fn gamma_critical_values(f: &ScalarField, disk: &Disk, resolution: f64) -> Result<f64> {
    check_dims(f, disk)?;
    let n = disk.n;
    let grid = disk.grid(resolution);
    let h = grid.resolution;
    let sqrt_n = (n as f64).sqrt();
    let interior = par::try_map(&grid.interior, |z| -> Result<f64> {
        let j = f.jet(z, 2)?;
        let hess = frobenius(&j.hessian, n);
        if j.gradient_norm() > sqrt_n * h * hess + 1e-12 {
            return Ok(f64::INFINITY);
        }
        match newton_critical(f, disk, *z, &j, h)? {
            Some(z) => Ok(f.value(&z)?.abs()),
            None => Ok(f64::INFINITY),
        }
    })?;
    let mut gamma = interior.into_iter().fold(f64::INFINITY, f64::min);
    let boundary = match n {
        1 => grid
            .boundary
            .iter()
            .map(|z| f.value(z).map(f64::abs))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min),
        2 => gamma_circle_boundary(f, disk, &grid.boundary)?,
        _ => gamma_sphere_boundary(f, disk, &grid.boundary, h)?,
    };
    gamma = gamma.min(boundary);
    Ok(gamma)
}

pub(crate) fn frobenius(m: &[[f64; 3]; 3], n: usize) -> f64 {
    let mut s = 0.0;
    for row in m.iter().take(n) {
        for v in row.iter().take(n) {
            s += v * v;
        }
    }
    s.sqrt()
}

/// Newton iteration on `grad f = 0` from a candidate. Returns `None` unless
/// the gradient is driven to rounding level without leaving the disk or a
/// ball of radius `2 h + 2 |first step|` around the candidate.
pub(crate) fn newton_critical(f: &ScalarField, disk: &Disk, z0: Point, j0: &Jet, h: f64) -> Result<Option<Point>> {
    let n = disk.n;
    let mut z = z0;
    let mut j = *j0;
    let mut radius = f64::INFINITY;
    for _ in 0..16 {
        let scale = 1.0 + frobenius(&j.hessian, n);
        if j.gradient_norm() <= 1e-11 * scale {
            return Ok(Some(z));
        }
        let m = DMatrix::from_fn(n, n, |a, b| j.hessian[a][b]);
        let g = nalgebra::DVector::from_fn(n, |a, _| j.gradient[a]);
        let Some(step) = m.lu().solve(&g) else {
            return Ok(None);
        };
        if radius.is_infinite() {
            radius = 2.0 * h + 2.0 * step.norm();
        }
        let mut y = z;
        for a in 0..n {
            y[a] -= step[a];
        }
        if !disk.contains(&y) || norm(&crate::geometry::sub(&y, &z0), n) > radius {
            return Ok(None);
        }
        z = y;
        j = f.jet(&z, 2)?;
    }
    let scale = 1.0 + frobenius(&j.hessian, n);
    Ok((j.gradient_norm() <= 1e-9 * scale).then_some(z))
}

fn gamma_circle_boundary(f: &ScalarField, disk: &Disk, ring: &[Point]) -> Result<f64> {
    let c = disk.center;
    let r = disk.radius;
    let at = |theta: f64| [c[0] + r * theta.cos(), c[1] + r * theta.sin(), 0.0];
    let tangential_derivative = |theta: f64| -> Result<f64> {
        let j = f.jet(&at(theta), 1)?;
        Ok(-theta.sin() * j.gradient[0] + theta.cos() * j.gradient[1])
    };
    let m = ring.len();
    let thetas: Vec<f64> = (0..m).map(|i| std::f64::consts::TAU * i as f64 / m as f64).collect();
    let dt = par::try_map(&thetas, |&t| tangential_derivative(t))?;
    let mut best = f64::INFINITY;
    for i in 0..m {
        let k = (i + 1) % m;
        let (t0, t1) = (thetas[i], if k == 0 { std::f64::consts::TAU } else { thetas[k] });
        let (d0, d1) = (dt[i], dt[k]);
        let root = if d0 == 0.0 {
            Some(t0)
        } else if d0 * d1 < 0.0 {
            let (mut lo, mut hi, mut dlo) = (t0, t1, d0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let dm = tangential_derivative(mid)?;
                if (dm < 0.0) == (dlo < 0.0) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        } else {
            None
        };
        if let Some(t) = root {
            best = best.min(f.value(&at(t))?.abs());
        }
    }
    // A tangential derivative that vanishes identically (rotation-invariant
    // fields) has no sign changes: every boundary point is critical.
    let scale = dt.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if best.is_infinite() && scale < 1e-12 {
        for z in ring {
            best = best.min(f.value(z)?.abs());
        }
    }
    Ok(best)
}

fn gamma_sphere_boundary(f: &ScalarField, disk: &Disk, pts: &[Point], h: f64) -> Result<f64> {
    let vals = par::try_map(pts, |z| -> Result<f64> {
        let nu = disk.outward_normal(z);
        let j = f.jet(z, 2)?;
        let gt = tangential(&j, &nu);
        let hess = frobenius(&j.hessian, 3) + j.gradient_norm() / disk.radius;
        if norm(&gt, 3) <= 2.0 * h * hess + 1e-12 {
            Ok(j.value.abs())
        } else {
            Ok(f64::INFINITY)
        }
    })?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

fn check_dims(f: &ScalarField, disk: &Disk) -> Result<()> {
    if f.n() != disk.n {
        return Err(Error::InvalidArgument(format!(
            "field dimension {} does not match disk dimension {}",
            f.n(),
            disk.n
        )));
    }
    Ok(())
}

fn empty_grid() -> Error {
    Error::InvalidArgument("empty grid".into())
}

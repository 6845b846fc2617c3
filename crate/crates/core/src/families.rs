//! Replicated shrunken copies of a base zero set and their Betti growth.
//!
//! For a base field `f` with `f = 1` outside the unit disk and a packing of
//! disjoint disks `D(z_i, 1/m)`, the replicated field is
//! `f_m = 1 - N + sum_i f(m (x - z_i))`. On each packed disk it equals the
//! corresponding rescaled copy, elsewhere it is `1`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::condition::{self, SingularityKind};
use crate::jets::{c_norm, FieldKind, Jet, ScalarField};
use crate::reach::{DefiningFunction, Hypersurface, PLATEAU_VALUE};
use crate::topology::zero_set_signature;
use crate::{Disk, Error, Point, Result};

/// Fraction of the ideal hexagonal density retained after clipping at the
/// disk margin.
pub const HEX_CLIPPING_SLACK: f64 = 0.75;
/// Radius of the zero circle of the default base field.
pub const BASE_CIRCLE_RADIUS: f64 = 0.4;

/// Centers of disjoint disks of radius `1/m` inside a disk.
#[derive(Debug, Clone, Serialize)]
pub struct Packing {
    pub n: usize,
    pub m: usize,
    pub centers: Vec<Point>,
    pub count: usize,
    /// Lattice density constant: `count / m^n` is expected within a factor
    /// two of it.
    pub h_est: f64,
    spacing: f64,
    origin: Point,
    #[serde(skip)]
    index: HashMap<[i64; 2], usize>,
}

impl Packing {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.m as f64
    }

    fn lattice_point(&self, k: [i64; 2]) -> Point {
        let s = self.spacing;
        let mut p = self.origin;
        match self.n {
            1 => p[0] += k[0] as f64 * s,
            _ => {
                p[0] += s * (k[0] as f64 + 0.5 * k[1] as f64);
                p[1] += s * k[1] as f64 * 3f64.sqrt() / 2.0;
            }
        }
        p
    }

    /// Index of the packed disk containing `x`, if any.
    pub fn locate(&self, x: &Point) -> Option<usize> {
        let s = self.spacing;
        let r = self.radius();
        let (ci, cj) = match self.n {
            1 => (((x[0] - self.origin[0]) / s).round() as i64, 0),
            _ => {
                let v = (x[1] - self.origin[1]) / (s * 3f64.sqrt() / 2.0);
                let u = (x[0] - self.origin[0]) / s - 0.5 * v;
                (u.round() as i64, v.round() as i64)
            }
        };
        let dj: &[i64] = if self.n == 1 { &[0] } else { &[-1, 0, 1] };
        for di in [-1i64, 0, 1] {
            for &dj in dj {
                if let Some(&k) = self.index.get(&[ci + di, cj + dj]) {
                    let c = self.centers[k];
                    let d2: f64 = (0..self.n).map(|i| (x[i] - c[i]).powi(2)).sum();
                    if d2 < r * r {
                        return Some(k);
                    }
                }
            }
        }
        None
    }
}

/// Interval (`n = 1`) or hexagonal (`n = 2`) lattice with spacing `2/m`,
/// keeping centers at distance at most `R - 1/m` from the disk center.
///
/// Two lattice placements are tried, one with a node at the disk center and
/// one shifted by half a bond; the one with more centers wins (ties keep the
/// centered lattice).
pub fn pack_disks(disk: &Disk, m: usize) -> Result<Packing> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if disk.n > 2 {
        return Err(Error::InvalidArgument("packings are implemented for n <= 2".into()));
    }
    let s = 2.0 / m as f64;
    let r = 1.0 / m as f64;
    let limit = disk.radius - r;
    let h_est = match disk.n {
        1 => disk.radius,
        _ => std::f64::consts::PI / (2.0 * 3f64.sqrt()) * disk.radius * disk.radius * HEX_CLIPPING_SLACK,
    };
    let mut best: Option<Packing> = None;
    for shift in [0.0, 0.5] {
        let mut origin = disk.center;
        origin[0] += shift * s;
        let mut p = Packing {
            n: disk.n,
            m,
            centers: Vec::new(),
            count: 0,
            h_est,
            spacing: s,
            origin,
            index: HashMap::new(),
        };
        let kmax = (disk.radius / s).ceil() as i64 + 2;
        let jrange = if disk.n == 1 { 0..=0 } else { -kmax..=kmax };
        for j in jrange {
            for i in -2 * kmax..=2 * kmax {
                let z = p.lattice_point([i, j]);
                if disk.distance_from_center(&z) <= limit + 1e-12 {
                    p.index.insert([i, j], p.centers.len());
                    p.centers.push(z);
                }
            }
        }
        p.count = p.centers.len();
        if best.as_ref().is_none_or(|b| p.count > b.count) {
            best = Some(p);
        }
    }
    Ok(best.expect("two placements tried"))
}

/// The field `f_m` over a packing.
#[derive(Debug, Clone)]
pub struct Replicated {
    base: ScalarField,
    packing: Packing,
}

impl Replicated {
    pub fn base(&self) -> &ScalarField {
        &self.base
    }

    pub fn packing(&self) -> &Packing {
        &self.packing
    }

    fn local(&self, x: &Point, k: usize) -> Point {
        let c = self.packing.centers[k];
        let m = self.packing.m as f64;
        [m * (x[0] - c[0]), m * (x[1] - c[1]), m * (x[2] - c[2])]
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        match self.packing.locate(x) {
            Some(k) => self.base.value(&self.local(x, k)),
            None => Ok(1.0),
        }
    }

    pub fn jet(&self, x: &Point, order: usize) -> Result<Jet> {
        match self.packing.locate(x) {
            Some(k) => Ok(self
                .base
                .jet(&self.local(x, k), order)?
                .chain_scale(self.packing.m as f64)),
            None => Ok(Jet::constant(self.packing.n, 1.0).truncate(order)),
        }
    }
}

/// Checks that `f_base` is identically one on a band around the unit sphere.
fn check_base(base: &ScalarField) -> Result<()> {
    let n = base.n();
    let order = base.max_order().min(2);
    for &r in &[0.95, 1.0, 1.05, 1.5] {
        let ring = crate::geometry::boundary_samples(&Disk::centered(n, r)?, 0.05);
        for z in ring {
            let j = base.jet(&z, order)?;
            if (j.value - 1.0).abs() > 1e-12 || j.norm(order) - j.value.abs() > 1e-12 {
                return Err(Error::Hypothesis(format!(
                    "base field is not identically 1 near the unit sphere (at {:?})",
                    &z[..n]
                )));
            }
        }
    }
    Ok(())
}

/// `f_m` as a scalar field.
pub fn replicate(base: &ScalarField, packing: &Packing) -> Result<ScalarField> {
    if base.n() != packing.n {
        return Err(Error::InvalidArgument("base and packing dimensions differ".into()));
    }
    check_base(base)?;
    Ok(ScalarField::new(
        packing.n,
        FieldKind::Replicated(Arc::new(Replicated { base: base.clone(), packing: packing.clone() })),
    ))
}

/// The circle defining function with zero set `|x| = 0.4`, rescaled to
/// plateau at `+-1`.
pub fn circle_base(n: usize) -> Result<ScalarField> {
    if n != 2 {
        return Err(Error::InvalidArgument("the circle base lives in the plane".into()));
    }
    let surface = Hypersurface::circle(0.0, 0.0, BASE_CIRCLE_RADIUS)?;
    let rho = surface.reach();
    let f = DefiningFunction::new(surface).with_scale(1.0 / (PLATEAU_VALUE * rho));
    Ok(ScalarField::new(2, FieldKind::Composite(Arc::new(f))))
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub m: usize,
    pub count: usize,
    pub kappa1: f64,
    pub betti: usize,
    pub delta: f64,
    pub c0_norm: f64,
    pub resolution: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `log betti` against `log kappa1`.
    pub slope: f64,
    pub intercept: f64,
    pub base_betti: usize,
    pub base_delta: f64,
    pub h_est: f64,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,count,kappa1,betti\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{:e},{}\n", r.m, r.count, r.kappa1, r.betti));
        }
        s
    }
}

/// Grid spacing used for scale `m`: fine enough to resolve copies of radius
/// `1/m`.
pub fn scan_resolution(disk: &Disk, m: usize) -> f64 {
    disk.default_resolution().min(1.0 / (32.0 * m as f64))
}

/// Rows `(m, count, kappa^(1)(f_m), b(Z(f_m)))` and the log-log slope.
pub fn growth_scan(base: &ScalarField, disk: &Disk, ms: &[usize]) -> Result<GrowthTable> {
    if ms.is_empty() {
        return Err(Error::InvalidArgument("empty m list".into()));
    }
    let unit = Disk::centered(disk.n, 1.0)?;
    let h0 = unit.default_resolution();
    let base_delta = condition::delta_hypersurface(base, &unit, h0)?.delta;
    if base_delta <= 0.0 {
        return Err(Error::Degenerate);
    }
    let base_betti = zero_set_signature(base, &unit, h0)?.total_betti;
    let mut rows = Vec::with_capacity(ms.len());
    let mut h_est = 0.0;
    for &m in ms {
        let packing = pack_disks(disk, m)?;
        h_est = packing.h_est;
        let f = replicate(base, &packing)?;
        let h = scan_resolution(disk, m);
        let report = condition::kappa(&f, disk, 1, SingularityKind::Hypersurface, h)?;
        if report.delta <= 0.0 {
            return Err(Error::Hypothesis(format!("delta(f_m) = 0 at m = {m}")));
        }
        let sig = zero_set_signature(&f, disk, h)?;
        let c0 = c_norm(&f, disk, 0, h)?.value;
        rows.push(GrowthRow {
            m,
            count: packing.count,
            kappa1: report.kappa,
            betti: sig.total_betti,
            delta: report.delta,
            c0_norm: c0,
            resolution: h,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.betti > 0)
        .map(|r| (r.kappa1.ln(), (r.betti as f64).ln()))
        .collect();
    let (slope, intercept) = least_squares(&pts);
    Ok(GrowthTable { rows, slope, intercept, base_betti, base_delta, h_est })
}

/// Ordinary least-squares line through `pts`; NaN with fewer than two
/// distinct abscissae.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

//! Disks, points and the sample grids every scan in the crate shares.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point in R^n stored in a fixed 3-slot array; unused slots are zero.
pub type Point = [f64; 3];

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub n: usize,
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: &[f64], radius: f64) -> Result<Self> {
        let n = center.len();
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "disk dimension must be 1..=3, got {n}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        let mut c = [0.0; 3];
        c[..n].copy_from_slice(center);
        Ok(Self { n, center: c, radius })
    }

    /// Disk of radius `radius` centered at the origin of R^n.
    pub fn centered(n: usize, radius: f64) -> Result<Self> {
        Self::new(&vec![0.0; n], radius)
    }

    /// Same center, different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(&self.center[..self.n], radius)
    }

    /// Default grid spacing: radius/512, /256, /64 for n = 1, 2, 3.
    pub fn default_resolution(&self) -> f64 {
        match self.n {
            1 => self.radius / 512.0,
            2 => self.radius / 256.0,
            _ => self.radius / 64.0,
        }
    }

    pub fn distance_from_center(&self, x: &Point) -> f64 {
        norm(&sub(x, &self.center), self.n)
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.distance_from_center(x) <= self.radius * (1.0 + 1e-12)
    }

    /// Nearest point of the closed disk.
    pub fn project(&self, x: &Point) -> Point {
        let r = self.distance_from_center(x);
        if r <= self.radius {
            return *x;
        }
        let mut p = self.center;
        for i in 0..self.n {
            p[i] += (x[i] - self.center[i]) * self.radius / r;
        }
        p
    }

    /// Nearest point of the boundary sphere; the center maps to +e1.
    pub fn project_to_boundary(&self, x: &Point) -> Point {
        let r = self.distance_from_center(x);
        let mut p = self.center;
        if r == 0.0 {
            p[0] += self.radius;
            return p;
        }
        for i in 0..self.n {
            p[i] += (x[i] - self.center[i]) * self.radius / r;
        }
        p
    }

    /// Outward unit normal at (the projection of) `x` onto the boundary.
    pub fn outward_normal(&self, x: &Point) -> Point {
        let b = self.project_to_boundary(x);
        let mut nu = [0.0; 3];
        for i in 0..self.n {
            nu[i] = (b[i] - self.center[i]) / self.radius;
        }
        nu
    }

    /// Interior lattice points plus boundary samples at spacing `h`.
    pub fn grid(&self, h: f64) -> DiskGrid {
        DiskGrid::new(self, h)
    }
}

/// Regular lattice of a disk (aligned with its center) plus a boundary ring.
///
/// Enumeration order is fixed: interior points in lexicographic lattice
/// order, then boundary points.
#[derive(Debug, Clone)]
pub struct DiskGrid {
    pub resolution: f64,
    pub interior: Vec<Point>,
    pub boundary: Vec<Point>,
}

impl DiskGrid {
    pub fn new(disk: &Disk, h: f64) -> Self {
        assert!(h > 0.0, "grid spacing must be positive");
        let r = disk.radius;
        let k = (r / h).floor() as i64;
        let c = disk.center;
        let mut interior = Vec::new();
        match disk.n {
            1 => {
                for i in -k..=k {
                    interior.push([c[0] + i as f64 * h, 0.0, 0.0]);
                }
            }
            2 => {
                for i in -k..=k {
                    for j in -k..=k {
                        let (dx, dy) = (i as f64 * h, j as f64 * h);
                        if dx * dx + dy * dy <= r * r {
                            interior.push([c[0] + dx, c[1] + dy, 0.0]);
                        }
                    }
                }
            }
            _ => {
                for i in -k..=k {
                    for j in -k..=k {
                        for l in -k..=k {
                            let (dx, dy, dz) = (i as f64 * h, j as f64 * h, l as f64 * h);
                            if dx * dx + dy * dy + dz * dz <= r * r {
                                interior.push([c[0] + dx, c[1] + dy, c[2] + dz]);
                            }
                        }
                    }
                }
            }
        }
        let boundary = boundary_samples(disk, h);
        Self { resolution: h, interior, boundary }
    }

    pub fn all(&self) -> impl Iterator<Item = &Point> {
        self.interior.iter().chain(self.boundary.iter())
    }

    pub fn len(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Points on the boundary sphere with spacing about `h`.
pub fn boundary_samples(disk: &Disk, h: f64) -> Vec<Point> {
    let r = disk.radius;
    let c = disk.center;
    match disk.n {
        1 => vec![[c[0] - r, 0.0, 0.0], [c[0] + r, 0.0, 0.0]],
        2 => {
            let m = ((std::f64::consts::TAU * r / h).ceil() as usize).max(8);
            (0..m)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / m as f64;
                    [c[0] + r * t.cos(), c[1] + r * t.sin(), 0.0]
                })
                .collect()
        }
        _ => {
            // Fibonacci sphere.
            let m = ((4.0 * std::f64::consts::PI * r * r / (h * h)).ceil() as usize).max(32);
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let t = golden * i as f64;
                    [c[0] + r * rho * t.cos(), c[1] + r * rho * t.sin(), c[2] + r * z]
                })
                .collect()
        }
    }
}

/// Axis-aligned box grid covering `[center - half, center + half]^n`, used by
/// contour extraction. `offset` shifts the lattice by a fraction of `h`.
#[derive(Debug, Clone)]
pub struct BoxGrid {
    pub n: usize,
    pub origin: Point,
    pub h: f64,
    pub counts: [usize; 3],
}

impl BoxGrid {
    pub fn new(n: usize, center: &Point, half: f64, h: f64, offset: &Point) -> Self {
        let steps = (2.0 * half / h).ceil() as usize + 2;
        let mut origin = [0.0; 3];
        let mut counts = [1; 3];
        for i in 0..n {
            origin[i] = center[i] - half - h + offset[i] * h;
            counts[i] = steps + 1;
        }
        Self { n, origin, h, counts }
    }

    pub fn point(&self, idx: [usize; 3]) -> Point {
        let mut p = [0.0; 3];
        for i in 0..self.n {
            p[i] = self.origin[i] + idx[i] as f64 * self.h;
        }
        p
    }

    pub fn len(&self) -> usize {
        self.counts[..self.n].iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index with x1 varying fastest.
    pub fn flat(&self, idx: [usize; 3]) -> usize {
        idx[0] + self.counts[0] * (idx[1] + self.counts[1] * idx[2])
    }

    pub fn unflat(&self, mut k: usize) -> [usize; 3] {
        let i = k % self.counts[0];
        k /= self.counts[0];
        let j = k % self.counts[1];
        k /= self.counts[1];
        [i, j, k]
    }
}

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Point, b: &Point, n: usize) -> f64 {
    (0..n).map(|i| a[i] * b[i]).sum()
}

pub(crate) fn norm(a: &Point, n: usize) -> f64 {
    dot(a, a, n).sqrt()
}

/// Converts a slice of length n <= 3 into a padded point.
pub fn point(coords: &[f64]) -> Point {
    let mut p = [0.0; 3];
    p[..coords.len().min(3)].copy_from_slice(&coords[..coords.len().min(3)]);
    p
}

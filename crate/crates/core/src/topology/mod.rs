//! Zero-set extraction, isotopy signatures and perturbation stability.

mod extract;
mod render;
mod stability;

pub use extract::{extract_on_square, extract_zero_set, interval_roots, ROOT_TOL, ZERO_NODE};
pub use render::{to_csv, to_svg, SvgLayer};
pub use stability::{
    critical_signature, perturbation_stability_test, perturbation_trials, random_bumps, BumpSpec,
    CriticalSignature, StabilityReport, TrialOutcome,
};

use serde::Serialize;

use crate::{Disk, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    /// Closed polylines repeat their first vertex at the end.
    pub closed: bool,
}

impl Polyline {
    /// Shoelace area, positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        let p = &self.points;
        let mut s = 0.0;
        for k in 0..p.len().saturating_sub(1) {
            s += p[k][0] * p[k + 1][1] - p[k + 1][0] * p[k][1];
        }
        0.5 * s
    }

    /// Even-odd ray casting against the polyline treated as a closed polygon.
    pub fn contains(&self, q: [f64; 2]) -> bool {
        let p = &self.points;
        let mut inside = false;
        for k in 0..p.len().saturating_sub(1) {
            let (a, b) = (p[k], p[k + 1]);
            if (a[1] > q[1]) != (b[1] > q[1]) {
                let x = a[0] + (q[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if q[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Sum of signed exterior angles of a closed polyline.
    pub fn turning(&self) -> f64 {
        let p = &self.points;
        if !self.closed || p.len() < 4 {
            return 0.0;
        }
        let m = p.len() - 1;
        let mut total = 0.0;
        for k in 0..m {
            let a = p[(k + m - 1) % m];
            let b = p[k];
            let c = p[(k + 1) % m];
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - b[0], c[1] - b[1]];
            total += (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
        }
        total
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Discrete zero set: polylines for `n = 2`, roots for `n = 1`, a component
/// count for `n = 3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet {
    pub n: usize,
    pub resolution: f64,
    pub polylines: Vec<Polyline>,
    pub roots: Vec<f64>,
    pub region_components: Option<usize>,
    /// The zero set reaches the disk boundary at grid scale.
    pub meets_boundary: bool,
}

impl ContourSet {
    pub fn component_count(&self) -> usize {
        match self.n {
            1 => self.roots.len(),
            2 => self.polylines.len(),
            _ => self.region_components.unwrap_or(0),
        }
    }
}

/// Isotopy-invariant summary of a zero set in a disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroSetSignature {
    pub n: usize,
    pub components: usize,
    /// `parent[i]` is the innermost contour enclosing contour `i` (`n = 2`).
    pub parent: Vec<Option<usize>>,
    /// Canonical encoding of the nesting forest; equal strings mean
    /// isomorphic forests.
    pub nesting: String,
    pub depth: usize,
    pub betti: Vec<usize>,
    pub total_betti: usize,
    /// Betti numbers beyond `b0` are only known for `n <= 2`.
    pub betti_complete: bool,
}

/// Signature of an extracted zero set.
pub fn signature(c: &ContourSet, disk: &Disk) -> Result<ZeroSetSignature> {
    if c.n != disk.n {
        return Err(Error::InvalidArgument("contour and disk dimensions differ".into()));
    }
    if c.meets_boundary {
        return Err(Error::ZeroSetMeetsBoundary);
    }
    let k = c.component_count();
    Ok(match c.n {
        1 => ZeroSetSignature {
            n: 1,
            components: k,
            parent: vec![None; k],
            nesting: "()".repeat(k),
            depth: usize::from(k > 0),
            betti: vec![k],
            total_betti: k,
            betti_complete: true,
        },
        2 => {
            let parent = nesting_parents(&c.polylines);
            let (nesting, depth) = canonical_forest(&parent);
            ZeroSetSignature {
                n: 2,
                components: k,
                parent,
                nesting,
                depth,
                betti: vec![k, k],
                total_betti: 2 * k,
                betti_complete: true,
            }
        }
        _ => ZeroSetSignature {
            n: 3,
            components: k,
            parent: vec![None; k],
            nesting: String::new(),
            depth: 0,
            betti: vec![k],
            total_betti: k,
            betti_complete: false,
        },
    })
}

/// Innermost enclosing contour of each contour, by ray casting one vertex.
fn nesting_parents(polys: &[Polyline]) -> Vec<Option<usize>> {
    let areas: Vec<f64> = polys.iter().map(|p| p.signed_area().abs()).collect();
    (0..polys.len())
        .map(|i| {
            let q = polys[i].points[0];
            (0..polys.len())
                .filter(|&j| j != i && areas[j] > areas[i] && polys[j].contains(q))
                .min_by(|&a, &b| areas[a].total_cmp(&areas[b]))
        })
        .collect()
}

/// AHU encoding of a forest given parent pointers, plus its depth.
fn canonical_forest(parent: &[Option<usize>]) -> (String, usize) {
    let k = parent.len();
    let mut children = vec![Vec::new(); k];
    let mut roots = Vec::new();
    for (i, p) in parent.iter().enumerate() {
        match p {
            Some(j) => children[*j].push(i),
            None => roots.push(i),
        }
    }
    fn encode(v: usize, children: &[Vec<usize>]) -> (String, usize) {
        let mut parts: Vec<(String, usize)> = children[v].iter().map(|&c| encode(c, children)).collect();
        parts.sort();
        let depth = 1 + parts.iter().map(|p| p.1).max().unwrap_or(0);
        let inner: String = parts.into_iter().map(|p| p.0).collect();
        (format!("({inner})"), depth)
    }
    let mut parts: Vec<(String, usize)> = roots.iter().map(|&r| encode(r, &children)).collect();
    parts.sort();
    let depth = parts.iter().map(|p| p.1).max().unwrap_or(0);
    (parts.into_iter().map(|p| p.0).collect(), depth)
}

/// Equal component counts and isomorphic nesting forests.
pub fn isotopy_signature_equal(a: &ZeroSetSignature, b: &ZeroSetSignature) -> bool {
    a.n == b.n && a.components == b.components && a.nesting == b.nesting
}

/// Extraction followed by [`signature`].
pub fn zero_set_signature(f: &crate::ScalarField, disk: &Disk, resolution: f64) -> Result<ZeroSetSignature> {
    signature(&extract_zero_set(f, disk, resolution)?, disk)
}

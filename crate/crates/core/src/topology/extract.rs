//! Grid-scale zero-set extraction: bracketed roots on an interval, marching
//! squares in the plane, sign-region flood fill in space.

use std::collections::HashMap;

use crate::geometry::BoxGrid;
use crate::jets::ScalarField;
use crate::{par, Disk, Error, Point, Result};

use super::{ContourSet, Polyline};

/// Node values below this magnitude trigger a jittered resample.
pub const ZERO_NODE: f64 = 1e-12;
/// Root bracketing tolerance.
pub const ROOT_TOL: f64 = 1e-12;
/// Lattice offsets (in units of `h`) tried in turn when a node hits zero.
const JITTERS: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [0.131_966, 0.316_227, 0.271_828],
    [0.414_213, 0.173_205, 0.223_606],
    [0.267_949, 0.447_213, 0.161_803],
];

/// Zero set of `f` inside `disk` at grid spacing `resolution`.
///
/// Planar contours that leave the disk are clipped into open polylines.
pub fn extract_zero_set(f: &ScalarField, disk: &Disk, resolution: f64) -> Result<ContourSet> {
    if f.n() != disk.n {
        return Err(Error::InvalidArgument(format!(
            "field dimension {} does not match disk dimension {}",
            f.n(),
            disk.n
        )));
    }
    match disk.n {
        1 => {
            let roots = interval_roots(f, disk.center[0] - disk.radius, disk.center[0] + disk.radius, resolution)?;
            let meets = [disk.center[0] - disk.radius, disk.center[0] + disk.radius]
                .iter()
                .map(|&x| f.value(&[x, 0.0, 0.0]).map(|v| v.abs() < ZERO_NODE))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .any(|b| b);
            Ok(ContourSet {
                n: 1,
                resolution,
                polylines: Vec::new(),
                roots,
                region_components: None,
                meets_boundary: meets,
            })
        }
        2 => {
            let raw = marching_squares(f, &disk.center, disk.radius, resolution)?;
            let polylines: Vec<Polyline> = raw.into_iter().flat_map(|p| clip_to_disk(p, disk)).collect();
            let meets = polylines.iter().any(|p| !p.closed);
            Ok(ContourSet {
                n: 2,
                resolution,
                polylines,
                roots: Vec::new(),
                region_components: None,
                meets_boundary: meets,
            })
        }
        _ => {
            let (components, meets) = sign_regions(f, disk, resolution)?;
            Ok(ContourSet {
                n: 3,
                resolution,
                polylines: Vec::new(),
                roots: Vec::new(),
                region_components: Some(components),
                meets_boundary: meets,
            })
        }
    }
}

/// Zero set on the square `[center - half, center + half]^2` without clipping.
pub fn extract_on_square(f: &ScalarField, center: &Point, half: f64, resolution: f64) -> Result<ContourSet> {
    if f.n() != 2 {
        return Err(Error::InvalidArgument("square extraction needs a planar field".into()));
    }
    let polylines = marching_squares(f, center, half, resolution)?;
    Ok(ContourSet {
        n: 2,
        resolution,
        meets_boundary: polylines.iter().any(|p| !p.closed),
        polylines,
        roots: Vec::new(),
        region_components: None,
    })
}

/// Sign changes of `f` on `[a, b]` refined by bisection.
pub fn interval_roots(f: &ScalarField, a: f64, b: f64, h: f64) -> Result<Vec<f64>> {
    let steps = ((b - a) / h).ceil().max(1.0) as usize;
    let val = |x: f64| f.value(&[x, 0.0, 0.0]);
    for jitter in JITTERS.iter().map(|j| j[0]) {
        // Interior nodes are shifted; the endpoints stay fixed.
        let mut xs = vec![a];
        for k in 1..steps {
            xs.push(a + (k as f64 + jitter) * (b - a) / steps as f64);
        }
        xs.push(b);
        xs.dedup();
        let vals = par::try_map(&xs, |&x| val(x))?;
        let interior_zero = vals[1..vals.len() - 1].iter().any(|v| v.abs() < ZERO_NODE);
        if interior_zero {
            continue;
        }
        let mut roots = Vec::new();
        for k in 0..xs.len() - 1 {
            let (mut lo, mut hi) = (xs[k], xs[k + 1]);
            let (flo, fhi) = (vals[k], vals[k + 1]);
            if flo == 0.0 || fhi == 0.0 || (flo < 0.0) == (fhi < 0.0) {
                continue;
            }
            let neg_lo = flo < 0.0;
            while hi - lo > ROOT_TOL {
                let mid = 0.5 * (lo + hi);
                let fm = val(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == neg_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        return Ok(roots);
    }
    Err(Error::NonTransverseGrid)
}

/// Node values on a box grid, retrying with jittered offsets while any node
/// is numerically zero. Returns the grid and values treating residual tiny
/// values as positive, or fails when a whole cell is tiny.
fn sample_box(f: &ScalarField, n: usize, center: &Point, half: f64, h: f64) -> Result<(BoxGrid, Vec<f64>)> {
    let mut last = None;
    for offset in &JITTERS {
        let grid = BoxGrid::new(n, center, half, h, offset);
        let vals = par::try_map_range(grid.len(), |k| f.value(&grid.point(grid.unflat(k))))?;
        if vals.iter().all(|v| v.abs() >= ZERO_NODE) {
            return Ok((grid, vals));
        }
        last = Some((grid, vals));
    }
    let (grid, vals) = last.expect("at least one attempt");
    if has_tiny_cell(&grid, &vals) {
        return Err(Error::NonTransverseGrid);
    }
    Ok((grid, vals))
}

fn has_tiny_cell(grid: &BoxGrid, vals: &[f64]) -> bool {
    let n = grid.n;
    let c = grid.counts;
    let tiny = |idx: [usize; 3]| vals[grid.flat(idx)].abs() < ZERO_NODE;
    let corners = 1usize << n;
    for k in 0..grid.len() {
        let idx = grid.unflat(k);
        if (0..n).any(|i| idx[i] + 1 >= c[i]) {
            continue;
        }
        if (0..corners).all(|m| {
            let mut q = idx;
            for (i, qi) in q.iter_mut().enumerate().take(n) {
                *qi += (m >> i) & 1;
            }
            tiny(q)
        }) {
            return true;
        }
    }
    false
}

fn positive(v: f64) -> bool {
    v >= 0.0
}

/// Marching squares with linear interpolation along cell edges; saddle cells
/// are resolved by the sign of `f` at the cell center.
fn marching_squares(f: &ScalarField, center: &Point, half: f64, h: f64) -> Result<Vec<Polyline>> {
    let (grid, vals) = sample_box(f, 2, center, half, h)?;
    let [nx, ny, _] = grid.counts;
    let v = |i: usize, j: usize| vals[i + nx * j];
    let node = |i: usize, j: usize| grid.point([i, j, 0]);
    // Edge ids: horizontal (i,j)-(i+1,j) -> 2(i + nx j); vertical (i,j)-(i,j+1) -> 2(i + nx j) + 1.
    let h_edge = |i: usize, j: usize| 2 * (i + nx * j);
    let v_edge = |i: usize, j: usize| 2 * (i + nx * j) + 1;
    let crossing = |a: (usize, usize), b: (usize, usize)| -> [f64; 2] {
        let (va, vb) = (v(a.0, a.1), v(b.0, b.1));
        let t = va / (va - vb);
        let (pa, pb) = (node(a.0, a.1), node(b.0, b.1));
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    };

    let mut points: HashMap<usize, [f64; 2]> = HashMap::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let s = [
                positive(v(i, j)),
                positive(v(i + 1, j)),
                positive(v(i + 1, j + 1)),
                positive(v(i, j + 1)),
            ];
            // bottom, right, top, left
            let edges = [
                (h_edge(i, j), (i, j), (i + 1, j)),
                (v_edge(i + 1, j), (i + 1, j), (i + 1, j + 1)),
                (h_edge(i, j + 1), (i, j + 1), (i + 1, j + 1)),
                (v_edge(i, j), (i, j), (i, j + 1)),
            ];
            let cut = [s[0] != s[1], s[1] != s[2], s[2] != s[3], s[3] != s[0]];
            let ncut = cut.iter().filter(|&&c| c).count();
            if ncut == 0 {
                continue;
            }
            for (k, e) in edges.iter().enumerate() {
                if cut[k] {
                    points.entry(e.0).or_insert_with(|| crossing(e.1, e.2));
                }
            }
            let (b, r, t, l) = (edges[0].0, edges[1].0, edges[2].0, edges[3].0);
            if ncut == 2 {
                let ids: Vec<usize> = (0..4).filter(|&k| cut[k]).map(|k| edges[k].0).collect();
                segments.push((ids[0], ids[1]));
            } else {
                let p0 = node(i, j);
                let mid = [p0[0] + 0.5 * grid.h, p0[1] + 0.5 * grid.h, 0.0];
                let center_positive = positive(f.value(&mid)?);
                if center_positive == s[0] {
                    // v00 and v11 connect through the center; cut off v10 and v01.
                    segments.push((b, r));
                    segments.push((t, l));
                } else {
                    segments.push((l, b));
                    segments.push((r, t));
                }
            }
        }
    }
    Ok(link_segments(&points, &segments))
}

/// Joins segments sharing edge points into polylines. Chains with a free end
/// become open polylines; the rest are cycles.
fn link_segments(points: &HashMap<usize, [f64; 2]>, segments: &[(usize, usize)]) -> Vec<Polyline> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start_seg: usize, start_pt: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut ids = vec![start_pt];
        let mut seg = start_seg;
        let mut cur = start_pt;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == cur { b } else { a };
            ids.push(next);
            if next == start_pt {
                return (ids, true);
            }
            cur = next;
            match adj[&cur].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => return (ids, false),
            }
        }
    };
    // Open chains first, from endpoints of degree one, in a fixed order.
    let mut ends: Vec<usize> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(&k, _)| k).collect();
    ends.sort_unstable();
    for e in ends {
        let s = adj[&e][0];
        if used[s] {
            continue;
        }
        let (ids, closed) = walk(s, e, &mut used);
        out.push(make_polyline(points, &ids, closed));
    }
    for s in 0..segments.len() {
        if !used[s] {
            let (ids, closed) = walk(s, segments[s].0, &mut used);
            out.push(make_polyline(points, &ids, closed));
        }
    }
    out
}

fn make_polyline(points: &HashMap<usize, [f64; 2]>, ids: &[usize], closed: bool) -> Polyline {
    Polyline { points: ids.iter().map(|i| points[i]).collect(), closed }
}

/// Splits a polyline into the runs of vertices inside the closed disk.
fn clip_to_disk(p: Polyline, disk: &Disk) -> Vec<Polyline> {
    let inside: Vec<bool> = p
        .points
        .iter()
        .map(|q| disk.contains(&[q[0], q[1], 0.0]))
        .collect();
    if inside.iter().all(|&b| b) {
        return vec![p];
    }
    let len = p.points.len();
    let Some(start) = inside.iter().position(|&b| !b) else {
        return vec![p];
    };
    // Rotate closed loops so runs do not wrap around the seam.
    let order: Vec<usize> = if p.closed {
        (0..len - 1).map(|k| (start + k) % (len - 1)).collect()
    } else {
        (0..len).collect()
    };
    let mut out = Vec::new();
    let mut run: Vec<[f64; 2]> = Vec::new();
    for &k in &order {
        if inside[k] {
            run.push(p.points[k]);
        } else if !run.is_empty() {
            out.push(Polyline { points: std::mem::take(&mut run), closed: false });
        }
    }
    if !run.is_empty() {
        out.push(Polyline { points: run, closed: false });
    }
    out
}

/// Counts zero-set components in a ball as `#(sign regions) - 1` using
/// 6-connected flood fill over grid nodes inside the disk. Also reports
/// whether both signs occur on the outermost shell of nodes.
fn sign_regions(f: &ScalarField, disk: &Disk, h: f64) -> Result<(usize, bool)> {
    let (grid, vals) = sample_box(f, 3, &disk.center, disk.radius, h)?;
    let inside: Vec<bool> = (0..grid.len()).map(|k| disk.contains(&grid.point(grid.unflat(k)))).collect();
    let mut label = vec![usize::MAX; grid.len()];
    let mut regions = 0;
    let c = grid.counts;
    let mut stack = Vec::new();
    for seed in 0..grid.len() {
        if !inside[seed] || label[seed] != usize::MAX {
            continue;
        }
        let sign = positive(vals[seed]);
        label[seed] = regions;
        stack.push(seed);
        while let Some(k) = stack.pop() {
            let idx = grid.unflat(k);
            for axis in 0..3 {
                for delta in [-1i64, 1] {
                    let m = idx[axis] as i64 + delta;
                    if m < 0 || m >= c[axis] as i64 {
                        continue;
                    }
                    let mut q = idx;
                    q[axis] = m as usize;
                    let kq = grid.flat(q);
                    if inside[kq] && label[kq] == usize::MAX && positive(vals[kq]) == sign {
                        label[kq] = regions;
                        stack.push(kq);
                    }
                }
            }
        }
        regions += 1;
    }
    // Shell: inside nodes with an outside neighbour.
    let mut shell_signs = [false; 2];
    for k in 0..grid.len() {
        if !inside[k] {
            continue;
        }
        let idx = grid.unflat(k);
        let on_shell = (0..3).any(|axis| {
            [-1i64, 1].iter().any(|&delta| {
                let m = idx[axis] as i64 + delta;
                if m < 0 || m >= c[axis] as i64 {
                    return true;
                }
                let mut q = idx;
                q[axis] = m as usize;
                !inside[grid.flat(q)]
            })
        });
        if on_shell {
            shell_signs[positive(vals[k]) as usize] = true;
        }
    }
    Ok((regions.saturating_sub(1), shell_signs[0] && shell_signs[1]))
}

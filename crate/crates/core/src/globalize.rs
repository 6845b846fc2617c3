//! Extension of a disk-certified polynomial to one whose whole real zero set
//! is the approximated hypersurface: `p = p0 + a (|x - z0|^2 / s^2)^ell`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{approximate_with_certificate, c_error, monomial_count, monomials, ApproxCertificate, Polynomial};
use crate::condition::{self, SingularityKind};
use crate::geometry::{boundary_samples, BoxGrid};
use crate::jets::{c_norm, c_norm_on, ScalarField};
use crate::reach::Hypersurface;
use crate::topology::{extract_zero_set, isotopy_signature_equal, zero_set_signature, ContourSet};
use crate::{par, Disk, Error, Point, Result};

/// Default number of random polynomials in [`growth_constant`].
pub const GROWTH_SAMPLES: usize = 2000;
/// Cap on the half-exponent search.
pub const MAX_ELL: usize = 256;

/// Estimate of `c_ell(n, d) = dim(V_{n,d}) a_1(n, d)`.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthConstant {
    pub n: usize,
    pub d: usize,
    pub ell: usize,
    /// Largest observed `||p||_coeff / ||p||_{C^ell(D_1)}`.
    pub a1: f64,
    pub dim: usize,
    pub value: f64,
    pub resolution: f64,
    /// Sampled maximum; the true constant is at least this large.
    pub is_lower_bound: bool,
}

fn growth_resolution(n: usize, d: usize) -> f64 {
    let k = (d + 1) as f64;
    match n {
        1 => (1.0 / (16.0 * k * k)).min(1.0 / 64.0),
        2 => (1.0 / (4.0 * k)).min(1.0 / 16.0),
        _ => (1.0 / (2.0 * k)).min(1.0 / 8.0),
    }
}

/// `a_1` as the largest coefficient-to-`C^ell` ratio over random
/// polynomials, Chebyshev-type seeds and a coordinate-ascent polish.
pub fn growth_constant(n: usize, d: usize, ell: usize, samples: usize, seed: u64) -> Result<GrowthConstant> {
    if !(1..=3).contains(&n) || d > 32 || ell > 2 {
        return Err(Error::InvalidArgument(format!(
            "growth constant needs n <= 3, d <= 32, ell <= 2 (got {n}, {d}, {ell})"
        )));
    }
    let dim = monomial_count(n, d);
    let disk = Disk::centered(n, 1.0)?;
    let h = growth_resolution(n, d);
    let grid = disk.grid(h);
    let ratio = |coeffs: &[f64]| -> Result<f64> {
        let p = Polynomial::from_dense(n, coeffs.to_vec())?;
        let norm = c_norm_on(&ScalarField::polynomial(p.clone()), &grid, ell)?.value;
        Ok(if norm > 0.0 { p.coeff_norm() / norm } else { 0.0 })
    };
    let mut candidates: Vec<Vec<f64>> = chebyshev_seeds(n, d);
    for t in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        candidates.push((0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    }
    let ratios = par::try_map(&candidates, |c| ratio(c))?;
    let (best_i, mut best) = par::argmax(&ratios).unwrap_or((0, 0.0));
    let mut coeffs = candidates[best_i].clone();
    // Coordinate ascent.
    let mut step = 0.25;
    for _ in 0..4 {
        let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(1e-300);
        let mut improved = false;
        for k in 0..dim {
            for sgn in [-1.0, 1.0] {
                let mut trial = coeffs.clone();
                trial[k] += sgn * step * scale;
                let r = ratio(&trial)?;
                if r > best {
                    best = r;
                    coeffs = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let a1 = best.max(1.0);
    Ok(GrowthConstant {
        n,
        d,
        ell,
        a1,
        dim,
        value: dim as f64 * a1,
        resolution: h,
        is_lower_bound: true,
    })
}

/// Monomials and tensor Chebyshev products of total degree `<= d`, whose
/// coefficients are large relative to their sup norm.
fn chebyshev_seeds(n: usize, d: usize) -> Vec<Vec<f64>> {
    let mons = monomials(n, d);
    let dim = mons.len();
    // cheb[k][j]: coefficient of u^j in T_k(u)
    let mut cheb = vec![vec![0.0; d + 1]; d + 1];
    cheb[0][0] = 1.0;
    if d >= 1 {
        cheb[1][1] = 1.0;
    }
    for k in 2..=d {
        for j in 0..=d {
            cheb[k][j] = if j > 0 { 2.0 * cheb[k - 1][j - 1] } else { 0.0 } - cheb[k - 2][j];
        }
    }
    let mut out = Vec::with_capacity(2 * dim);
    for (i, alpha) in mons.iter().enumerate() {
        let mut mono = vec![0.0; dim];
        mono[i] = 1.0;
        out.push(mono);
        let mut coeffs = vec![0.0; dim];
        for (j, beta) in mons.iter().enumerate() {
            let mut c = 1.0;
            for v in 0..n {
                c *= cheb[alpha[v] as usize][beta[v] as usize];
            }
            coeffs[j] = c;
        }
        out.push(coeffs);
    }
    out
}

/// `tau = ln(R / max |z - z0|) / 3` over sample points of the zero set.
pub fn tau_from_points(points: &[Point], disk: &Disk) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyZeroSet);
    }
    let far = points
        .iter()
        .map(|z| disk.distance_from_center(z))
        .fold(0.0, f64::max);
    if !(far < disk.radius) {
        return Err(Error::Hypothesis(format!(
            "zero set reaches distance {far} >= R = {} from the center",
            disk.radius
        )));
    }
    if far == 0.0 {
        return Err(Error::Hypothesis("zero set is the center point".into()));
    }
    Ok((disk.radius / far).ln() / 3.0)
}

/// [`tau_from_points`] for an extracted contour set.
pub fn tau_of_contours(c: &ContourSet, disk: &Disk) -> Result<f64> {
    let pts: Vec<Point> = match c.n {
        1 => c.roots.iter().map(|&x| [x, 0.0, 0.0]).collect(),
        _ => c
            .polylines
            .iter()
            .flat_map(|p| p.points.iter().map(|q| [q[0], q[1], 0.0]))
            .collect(),
    };
    tau_from_points(&pts, disk)
}

/// Exact `tau` for a primitive hypersurface.
pub fn tau_of_surface(z: &Hypersurface, disk: &Disk) -> Result<f64> {
    let far = z.max_distance_from(&disk.center);
    tau_from_points(&[[disk.center[0] + far, disk.center[1], disk.center[2]]], disk)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured quantity; the check passes when it is below `bound`
    /// (or above it for positivity checks).
    pub value: f64,
    pub bound: f64,
    pub witness: Vec<f64>,
    /// Failing gating checks abort [`globalize`]; the others are diagnostics.
    pub gating: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalizeParams {
    pub tau: f64,
    pub s: f64,
    pub r_in: f64,
    pub a: f64,
    pub ell: usize,
    /// Smallest integer meeting the closed-form lower bound on `2 ell`.
    pub ell_formula: usize,
    pub degree: usize,
    pub c1: f64,
    pub kappa_tilde: f64,
    pub delta: f64,
    pub checks: Vec<Check>,
}

/// Sup of `q + |grad q|` on `D_r` for `q = a (|x|^2 / s^2)^ell`, namely
/// `a (r/s)^(2 ell) (1 + 2 ell / r)`. It bounds `|p - p0|_C1(D_r)`.
pub fn damping_bound(a: f64, r: f64, s: f64, ell: usize) -> f64 {
    a * (r / s).powi(2 * ell as i32) * (1.0 + 2.0 * ell as f64 / r)
}

/// The commonly quoted form `a (1 + 2 / (r ln(s/r))) (r/s)^(2 ell)`. It
/// undercounts the gradient once `ell ln(s/r) > 1`, so it is only reported.
pub fn stated_damping_bound(a: f64, r: f64, s: f64, ell: usize) -> f64 {
    a * (1.0 + 2.0 / (r * (s / r).ln())) * (r / s).powi(2 * ell as i32)
}

/// `a (1 + 2 / (r ln(s/r))) (r/s)^ell`, which follows from
/// `ell ln(rho) <= rho^ell - 1` and always dominates [`damping_bound`].
pub fn corrected_damping_bound(a: f64, r: f64, s: f64, ell: usize) -> f64 {
    a * (1.0 + 2.0 / (r * (s / r).ln())) * (r / s).powi(ell as i32)
}

/// Builds `p = p0 + a (|x - z0|^2 / s^2)^ell` and verifies positivity
/// outside the disk and closeness to `p0` on the inner disk `D_{r_in}`.
///
/// `delta` is `min(delta(f, D), delta(f, D_{r_in}))`; `tau` comes from the
/// zero set of `f`.
pub fn globalize(
    p0: &Polynomial,
    f: &ScalarField,
    disk: &Disk,
    delta: f64,
    tau: f64,
    c1: &GrowthConstant,
) -> Result<(Polynomial, GlobalizeParams)> {
    let n = disk.n;
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau = {tau} must be positive")));
    }
    if !(delta > 0.0) {
        return Err(Error::Degenerate);
    }
    let big_r = disk.radius;
    let s = (-tau).exp() * big_r;
    let r_in = (-2.0 * tau).exp() * big_r;
    let inner = disk.with_radius(r_in)?;
    let h = disk.default_resolution();
    let d = p0.degree();

    let f_norm = c_norm(f, disk, 1, h)?.value;
    let a = c1.value * (1.0 + s) * 2.0 * f_norm;
    let kappa_tilde = condition::kappa(f, disk, 1, SingularityKind::Hypersurface, h)?
        .kappa
        .max(condition::kappa(f, &inner, 1, SingularityKind::Hypersurface, inner.default_resolution())?.kappa);

    let rhs = (kappa_tilde.ln() + c1.value.ln() + ((1.0 + s) * (8.0 / (s * tau) + 4.0)).ln()) / tau;
    let ell_formula = (rhs / 2.0).ceil().max(0.0) as usize;
    let mut ell = (d / 2 + 1).max(ell_formula).max(1);
    let target = 0.5 * delta;
    while damping_bound(a, r_in, s, ell) > target {
        ell += 1;
        if ell > MAX_ELL {
            return Err(Error::CheckFailed {
                inequality: "a (r/s)^(2l) (1 + 2l/r) <= delta/2".into(),
                witness: vec![],
                value: damping_bound(a, r_in, s, ell),
            });
        }
    }

    let term = Polynomial::squared_distance(n, &disk.center)
        .scale(1.0 / (s * s))
        .powi(ell as u32)
        .scale(a);
    let p = p0.add(&term);

    let mut checks = Vec::new();

    // (1) positivity on spheres of radius R, 1.1R and 2R.
    let mut worst = (f64::INFINITY, [0.0; 3]);
    for k in [1.0, 1.1, 2.0] {
        let sphere = disk.with_radius(k * big_r)?;
        let pts = sphere_points(&sphere, 1000);
        let vals = par::map(&pts, |z| p.value(z));
        if let Some((i, v)) = par::argmin(&vals) {
            if v < worst.0 {
                worst = (v, pts[i]);
            }
        }
    }
    checks.push(Check {
        name: "p > 0 on sampled spheres of radius R, 1.1R, 2R".into(),
        passed: worst.0 > 0.0,
        value: worst.0,
        bound: 0.0,
        witness: worst.1[..n].to_vec(),
        gating: true,
    });

    // (1') tail beyond 2R from the growth bound with a doubled constant.
    let ds = disk.with_radius(s)?;
    let p0_norm = c_norm(&ScalarField::polynomial(p0.clone()), &ds, 1, ds.default_resolution())?.value;
    let q = 2.0 * big_r / s;
    let tail = a * q.powi(2 * ell as i32) - 2.0 * c1.value * (1.0 + s) * p0_norm * q.powi(d as i32);
    checks.push(Check {
        name: "a (2R/s)^(2l) - 2 c1 (1+s) |p0|_C1(D_s) (2R/s)^d > 0 with 2l > d".into(),
        passed: tail > 0.0 && 2 * ell > d,
        value: tail,
        bound: 0.0,
        witness: vec![],
        gating: true,
    });

    // (2) closeness on the inner disk.
    let err = c_error(&ScalarField::polynomial(p0.clone()), &p, &inner, 1, inner.default_resolution())?;
    checks.push(Check {
        name: "|p - p0|_C1(D_r) < delta/2".into(),
        passed: err.value < target,
        value: err.value,
        bound: target,
        witness: err.witness[..n].to_vec(),
        gating: true,
    });
    for (name, bound, gating) in [
        ("|p - p0|_C1(D_r) <= a (r/s)^(2l) (1 + 2l/r)", damping_bound(a, r_in, s, ell), true),
        (
            "|p - p0|_C1(D_r) <= a (1 + 2/(r log(s/r))) (r/s)^l",
            corrected_damping_bound(a, r_in, s, ell),
            true,
        ),
        (
            "|p - p0|_C1(D_r) <= a (1 + 2/(r log(s/r))) (r/s)^(2l)",
            stated_damping_bound(a, r_in, s, ell),
            false,
        ),
    ] {
        checks.push(Check {
            name: name.into(),
            passed: err.value <= bound * 1.05,
            value: err.value,
            bound,
            witness: err.witness[..n].to_vec(),
            gating,
        });
    }

    let params = GlobalizeParams {
        tau,
        s,
        r_in,
        a,
        ell,
        ell_formula,
        degree: p.degree(),
        c1: c1.value,
        kappa_tilde,
        delta,
        checks,
    };
    if let Some(bad) = params.checks.iter().find(|c| c.gating && !c.passed) {
        return Err(Error::CheckFailed {
            inequality: bad.name.clone(),
            witness: bad.witness.clone(),
            value: bad.value,
        });
    }
    Ok((p, params))
}

/// Outcome of [`globalize_pipeline`].
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub tau: f64,
    pub delta_disk: f64,
    pub delta_inner: f64,
    pub certificate: ApproxCertificate,
    pub p0_degree: usize,
    pub growth: GrowthConstant,
    pub params: GlobalizeParams,
    /// Half-width of the box scanned for zeros outside the disk.
    pub scan_half_width: f64,
    /// Smallest value of `p` on box-grid nodes outside the disk.
    pub outside_min: f64,
    pub outside_nonpositive: usize,
    /// `Z(p)` and `Z(f)` have equal signatures in the disk.
    pub signature_equal: bool,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.outside_nonpositive == 0 && self.signature_equal
    }
}

/// Certifies `p0` on the disk with margin `delta / 2`, then globalizes it and
/// scans the box of half-width `1.5 R` for nonpositive values outside.
pub fn globalize_pipeline(
    f: &ScalarField,
    disk: &Disk,
    d_max: usize,
    samples: usize,
    seed: u64,
) -> Result<(Polynomial, PipelineReport)> {
    if disk.n > 2 {
        return Err(Error::InvalidArgument("globalize supports n <= 2".into()));
    }
    let h = disk.default_resolution();
    let contours = extract_zero_set(f, disk, h)?;
    let tau = tau_of_contours(&contours, disk)?;
    let inner = disk.with_radius((-2.0 * tau).exp() * disk.radius)?;
    let delta_disk = condition::delta_hypersurface(f, disk, h)?.delta;
    let delta_inner = condition::delta_hypersurface(f, &inner, inner.default_resolution())?.delta;
    let delta = delta_disk.min(delta_inner);
    if !(delta > 0.0) {
        return Err(Error::Degenerate);
    }
    let safety = 0.5 * delta / delta_disk;
    let (p0, certificate) =
        approximate_with_certificate(f, disk, SingularityKind::Hypersurface, safety, d_max, h)?;
    let growth = growth_constant(disk.n, p0.degree(), 1, samples, seed)?;
    let (p, params) = globalize(&p0, f, disk, delta, tau, &growth)?;

    let half = 1.5 * disk.radius;
    let grid = BoxGrid::new(disk.n, &disk.center, half, h, &[0.0; 3]);
    let outside: Vec<f64> = par::map_range(grid.len(), |k| {
        let x = grid.point(grid.unflat(k));
        if disk.distance_from_center(&x) > disk.radius {
            p.value(&x)
        } else {
            f64::INFINITY
        }
    });
    let outside_min = outside.iter().copied().fold(f64::INFINITY, f64::min);
    let outside_nonpositive = outside.iter().filter(|v| **v <= 0.0).count();
    let pf = ScalarField::polynomial(p.clone());
    let signature_equal = isotopy_signature_equal(
        &zero_set_signature(f, disk, h)?,
        &zero_set_signature(&pf, disk, h)?,
    );
    let report = PipelineReport {
        tau,
        delta_disk,
        delta_inner,
        certificate,
        p0_degree: p0.degree(),
        growth,
        params,
        scan_half_width: half,
        outside_min,
        outside_nonpositive,
        signature_equal,
    };
    Ok((p, report))
}

/// Roughly `count` points on the boundary sphere of `disk`.
fn sphere_points(disk: &Disk, count: usize) -> Vec<Point> {
    let h = match disk.n {
        1 => disk.radius,
        2 => std::f64::consts::TAU * disk.radius / count as f64,
        _ => (4.0 * std::f64::consts::PI * disk.radius * disk.radius / count as f64).sqrt(),
    };
    boundary_samples(disk, h)
}

//! Polynomials, Chebyshev fitting and the certified degree-escalation loop.

mod fit;
mod poly;

pub use fit::{chebyshev_fit, fit_polynomial, Fit, MAX_CONDITION};
pub use poly::{monomial_count, monomial_index, monomials, MultiIndex, Polynomial};

use serde::Serialize;

use crate::condition::{self, SingularityKind};
use crate::jets::{c_norm, Jet, NormEstimate, ScalarField};
use crate::{Disk, Error, Point, Result};

/// Default fraction of `delta` the `C^{r+1}` fit error must stay below.
pub const DEFAULT_SAFETY: f64 = 0.5;
/// Default degree budget.
pub const DEFAULT_DMAX: usize = 48;

pub fn poly_eval_jet(p: &Polynomial, z: &Point, order: usize) -> Jet {
    p.jet(z, order)
}

/// `||f - p||_{C^ell}` on a disk grid.
pub fn c_error(
    f: &ScalarField,
    p: &Polynomial,
    disk: &Disk,
    ell: usize,
    resolution: f64,
) -> Result<NormEstimate> {
    let diff = f.minus(&ScalarField::polynomial(p.clone()));
    c_norm(&diff, disk, ell, resolution)
}

/// Degrees tried by [`approximate_with_certificate`]: steps of one up to 16,
/// then steps of four.
pub fn degree_schedule(start: usize, d_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = start;
    while d <= d_max {
        out.push(d);
        d += if d < 16 { 1 } else { 4 };
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproxCertificate {
    pub degree_used: usize,
    pub measured_error: f64,
    pub delta_used: f64,
    /// `measured_error / delta_used`.
    pub margin: f64,
    /// `max(r + 1, ||f||_{C^k} / delta)` with `k = min(r + 2, max jet order)`.
    pub degree_bound_rhs: f64,
    pub norm_order: usize,
    pub kind: SingularityKind,
    pub safety: f64,
    pub resolution: f64,
    pub fit_condition: f64,
    /// `(degree, C^{r+1} error)` for every degree tried.
    pub trace: Vec<(usize, f64)>,
}

/// Smallest degree in the schedule whose fit has
/// `||f - p||_{C^{r+1}} < safety * delta`.
pub fn approximate_with_certificate(
    f: &ScalarField,
    disk: &Disk,
    kind: SingularityKind,
    safety: f64,
    d_max: usize,
    resolution: f64,
) -> Result<(Polynomial, ApproxCertificate)> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::InvalidArgument(format!("safety {safety} must lie in (0, 1)")));
    }
    let r = kind.r();
    if d_max < r + 1 {
        return Err(Error::InvalidArgument(format!("d_max {d_max} is below r + 1 = {}", r + 1)));
    }
    let delta = condition::delta(f, disk, kind, resolution)?.delta;
    if delta <= 0.0 {
        return Err(Error::Degenerate);
    }
    let mut trace = Vec::new();
    let mut best = (r + 1, f64::INFINITY);
    for d in degree_schedule(r + 1, d_max) {
        let fit = chebyshev_fit(f, disk, d)?;
        if fit.condition > MAX_CONDITION {
            // Higher degrees only amplify rounding further.
            break;
        }
        let err = c_error(f, &fit.polynomial, disk, r + 1, resolution)?.value;
        trace.push((d, err));
        if err < best.1 {
            best = (d, err);
        }
        if err < safety * delta {
            let norm_order = (r + 2).min(f.max_order());
            let norm = c_norm(f, disk, norm_order, resolution)?.value;
            let cert = ApproxCertificate {
                degree_used: d,
                measured_error: err,
                delta_used: delta,
                margin: err / delta,
                degree_bound_rhs: ((r + 1) as f64).max(norm / delta),
                norm_order,
                kind,
                safety,
                resolution,
                fit_condition: fit.condition,
                trace,
            };
            return Ok((fit.polynomial, cert));
        }
    }
    Err(Error::BudgetExhausted { best, trace })
}

/// `d (2d - 1)^(n - 1)`, the bound on the number of connected components of
/// a real algebraic set of degree `d` in `R^n`.
pub fn milnor_thom_bound(d: usize, n: usize) -> u64 {
    let d = d as u64;
    d * (2 * d - 1).pow(n.saturating_sub(1) as u32)
}

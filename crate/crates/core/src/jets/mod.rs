//! Scalar fields, exact jets and grid estimates of `C^l` norms.

mod expr;
mod field;
mod jet;

pub use expr::{parse_expr, Expr, Func, DEFAULT_ABS_EPS};
pub use field::{FieldKind, GaussianBump, ScalarField};
pub use jet::{Jet, MAX_ORDER};

use serde::{Deserialize, Serialize};

use crate::geometry::{Disk, DiskGrid};
use crate::{par, Error, Point, Result};

/// Parses a field expression; see [`parse_expr`] for the grammar.
pub fn parse_field(text: &str, n: usize) -> Result<ScalarField> {
    ScalarField::parse(text, n)
}

pub fn eval_jet(f: &ScalarField, z: &Point, order: usize) -> Result<Jet> {
    f.jet(z, order)
}

/// Grid estimate of a sup norm. The true supremum is at least `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub resolution: f64,
    pub is_lower_bound: bool,
    pub witness: Point,
}

/// Max over a disk grid of the Euclidean norm of the order-`ell` jet.
pub fn c_norm(f: &ScalarField, disk: &Disk, ell: usize, resolution: f64) -> Result<NormEstimate> {
    if ell > MAX_ORDER {
        return Err(Error::OrderTooHigh { order: ell, max: MAX_ORDER });
    }
    let grid = disk.grid(resolution);
    c_norm_on(f, &grid, ell)
}

/// [`c_norm`] on a precomputed grid.
pub fn c_norm_on(f: &ScalarField, grid: &DiskGrid, ell: usize) -> Result<NormEstimate> {
    let pts: Vec<Point> = grid.all().copied().collect();
    let norms = par::try_map(&pts, |z| f.jet(z, ell).map(|j| j.norm(ell)))?;
    let (i, value) = par::argmax(&norms).ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    Ok(NormEstimate {
        value,
        resolution: grid.resolution,
        is_lower_bound: true,
        witness: pts[i],
    })
}

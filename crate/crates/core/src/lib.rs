//! Condition numbers, polynomial approximation and zero-set topology for
//! smooth scalar fields on a disk.
//!
//! The crate is organised bottom-up:
//!
//! * [`jets`] evaluates fields and their derivatives up to order three and
//!   estimates `C^l` norms on disk grids.
//! * [`condition`] computes the pointwise discriminant distance `delta`, the
//!   condition number `kappa` and the critical-value gap `gamma`.
//! * [`approx`] holds dense multivariate polynomials, Chebyshev fitting and the
//!   degree-escalation loop that certifies an isotopic polynomial.
//! * [`topology`] extracts zero sets (marching squares, root bracketing, sign
//!   flood fill) and compares isotopy signatures.
//! * [`reach`] builds defining functions `g_rho(d*_Z)` for primitive
//!   hypersurfaces with known reach.
//! * [`globalize`] turns a disk-certified polynomial into a global one.
//! * [`families`] builds the replicated-bump families used for Betti growth.
//!
//! Grid scans run on rayon when the `parallel` feature is enabled (default);
//! every reduction is ordered so results do not depend on the thread count.

// Index loops mirror the formulas; `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod condition;
mod error;
pub mod families;
pub mod geometry;
pub mod globalize;
pub mod jets;
pub mod par;
pub mod reach;
pub mod report;
pub mod topology;

pub use error::{Error, Result};
pub use geometry::{Disk, Point};
pub use jets::{Jet, NormEstimate, ScalarField};

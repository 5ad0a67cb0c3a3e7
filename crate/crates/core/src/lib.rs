//! Extremal approximately convex sets in finite-dimensional normed spaces.
//!
//! The crate builds the entropy-graph sets `A_M` in `ℓp`, measures their
//! convexity defect, Hausdorff distance to the hull and diameter, evaluates
//! the sharp-constant formulas that bound those quantities, and realises a
//! finite window of the tree-like space in which `diam(A) = 𝓗(A, Co(A))`.
//!
//! Every distance computation reduces to one of three kernels in [`optim`]:
//! a dense simplex LP solver, a Frank–Wolfe quadratic minimiser over the
//! probability simplex, and a multi-start projected gradient method.

// `!(x > 0.0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod entropy;
pub mod entropy_opt;
mod error;
pub mod hulls;
pub mod optim;
pub mod simplexgeo;
pub mod treespace;
pub mod vector;

pub use error::{Error, Result};
pub use treespace::TreeLabel;
pub use vector::{NormSpec, SimplexPoint, Vector};

/// Default comparison tolerance used when callers do not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

//! Optimisation kernels shared by every distance computation.

mod frank_wolfe;
mod lp;
mod projected;

pub use frank_wolfe::{min_quadratic_over_simplex, QuadResult, DEFAULT_FW_STEPS};
pub use lp::{lp_solve, Constraint, LpInstance, LpSolution, LpStatus, Relation, Sense};
pub use projected::{min_smooth_over_simplex, project_to_simplex, SmoothResult, DEFAULT_PG_STEPS};

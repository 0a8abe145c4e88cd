//! Convex subproblem representation and the interior-point solver.

mod barrier;
mod embed;
mod problem;

pub use barrier::{solve, BarrierOptions, SolveReport, SolveStatus};
pub use embed::{embed_hermitian, embed_vector, real_embed, real_unembed};
pub use problem::{is_psd, Constraint, ConstraintForm, ConvexSubproblem, QuadBlock};

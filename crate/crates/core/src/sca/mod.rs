//! Successive convex approximation over the digital information and AN beamformers.
//!
//! Each iteration replaces the convex quadratic powers on the "greater than" side of the
//! slack constraints by tangent minorants and the exponentials on the "less than" side by
//! tangent lines, giving a convex restriction that contains the previous iterate. The
//! restriction is solved by [`crate::convex::solve`].
//!
//! After every solve the slacks are re-tightened to their defining log-powers, so the
//! recorded objective is the exact weighted secrecy sum of the current beams. The iterations
//! run in the reduced coordinates of [`ReducedBasis`], which loses nothing.

mod feasibility;
mod reduce;
mod solve;
mod subproblem;
mod terms;

pub use feasibility::{
    digital_power, init_digital, max_harvestable_energy, received_energy, restore_feasibility, RESTORE_MARGIN,
};
pub use reduce::ReducedBasis;
pub use solve::{sca_solve, sca_solve_with_analog, ScaTrace, SolverOptions};
pub use subproblem::{assemble_subproblem, IteratePoint, ScaSubproblem, SlackPoint, VarLayout};
pub use terms::{
    effective_channels, exp_tangent_lb, quad_terms, taylor_quad_lb_coeffs, EffectiveChannels, ExpTangent,
    QuadLowerBound, QuadTerms,
};

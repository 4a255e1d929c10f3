//! Projected SOR for the discrete thin obstacle problem, the complementarity
//! check, and recentring at free-boundary points with nonzero obstacles.

mod complementarity;
mod normalize;
mod problem;
mod psor;

pub use complementarity::{complementarity_check, ComplementarityReport, PlaneNodeCheck};
pub use normalize::normalize;
pub use problem::{
    default_max_iters, optimal_omega, Boundary, BoundaryTerm, Omega, SignoriniProblem, DEFAULT_OMEGA,
    DEFAULT_TOL,
};
pub use psor::{psor_solve, Checkpoint, SolveStats, CHECKPOINT_EVERY};

//! Saddle-point solves, the active-set loop, the load-stepped Newton method
//! and the discrete inf-sup estimate.

mod infsup;
mod large;
mod problem;
mod saddle;
mod settings;

pub use infsup::{inf_sup_estimate, trace_matrices};
pub use large::{solve_large_deformation, LargeDeformationProblem};
pub use problem::{solve_small_deformation, ContactProblem};
pub use saddle::{saddle_solve, SaddleSolution, SaddleSystem};
pub use settings::{IterationRecord, LinearSolver, SolutionBundle, SolveSettings};

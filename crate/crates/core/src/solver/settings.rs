use std::fmt;

use crate::contact::ContactState;
use crate::error::{Error, Result};

/// Linear solver used for the saddle systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSolver {
    /// Sparse LDL^T of the (augmented) saddle matrix.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSettings {
    pub max_active_set_iters: usize,
    pub max_newton_iters: usize,
    /// Relative residual tolerance of Newton's method.
    pub newton_tol: f64,
    /// Penetration tolerance of the activity test (length units).
    pub gap_tol: f64,
    pub linear_solver: LinearSolver,
    /// Equal load increments for large deformation.
    pub load_steps: usize,
    /// Maximum number of step halvings per run.
    pub max_halvings: usize,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            max_active_set_iters: 100,
            max_newton_iters: 40,
            newton_tol: 1e-10,
            gap_tol: 1e-10,
            linear_solver: LinearSolver::Direct,
            load_steps: 10,
            max_halvings: 20,
        }
    }
}

impl SolveSettings {
    /// Settings with the gap tolerance scaled by the domain size.
    pub fn for_length_scale(length: f64) -> Self {
        SolveSettings { gap_tol: 1e-10 * length, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_active_set_iters < 1 || self.max_newton_iters < 1 || self.load_steps < 1 {
            return Err(Error::InvalidArgument("iteration caps and load steps must be at least 1".into()));
        }
        if !(self.newton_tol > 0.0) || !(self.gap_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One line of the iteration log.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Load step (1-based; 0 for small deformation).
    pub step: usize,
    pub iter: usize,
    pub active: usize,
    pub residual_u: f64,
    pub residual_lambda: f64,
    pub changed: usize,
}

impl fmt::Display for IterationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {:.6e} {:.6e} {}",
            self.step, self.iter, self.active, self.residual_u, self.residual_lambda, self.changed
        )
    }
}

/// Converged discrete solution.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    pub state: ContactState,
    pub log: Vec<IterationRecord>,
}

impl SolutionBundle {
    /// Iteration log as text, one record per line.
    pub fn log_text(&self) -> String {
        let mut s = String::from("step iter active residual_u residual_lambda changed\n");
        for r in &self.log {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

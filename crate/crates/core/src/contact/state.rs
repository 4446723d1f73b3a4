use std::io::Write;

use crate::error::Result;
use crate::sparse::CsrMatrix;

/// Activity of one multiplier function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Active,
    Inactive,
}

/// Multiplier coefficients with their weighted gaps and activity.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactState {
    /// `lambda_K` (normal traction, non-positive in contact).
    pub lambda: Vec<f64>,
    /// `(Pi g)_K`.
    pub weighted_gap: Vec<f64>,
    pub status: Vec<Status>,
}

impl ContactState {
    pub fn inactive(n: usize) -> Self {
        ContactState { lambda: vec![0.0; n], weighted_gap: vec![0.0; n], status: vec![Status::Inactive; n] }
    }

    pub fn active_indices(&self) -> Vec<usize> {
        self.status.iter().enumerate().filter(|(_, s)| **s == Status::Active).map(|(k, _)| k).collect()
    }

    pub fn num_active(&self) -> usize {
        self.status.iter().filter(|s| **s == Status::Active).count()
    }

    /// Largest violation of the discrete complementarity conditions:
    /// `(max lambda_K, min inactive (Pi g)_K, max |lambda_K (Pi g)_K|)`.
    pub fn complementarity(&self) -> (f64, f64, f64) {
        let max_lambda = self.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_gap = self
            .status
            .iter()
            .zip(&self.weighted_gap)
            .filter(|(s, _)| **s == Status::Inactive)
            .map(|(_, g)| *g)
            .fold(f64::INFINITY, f64::min);
        let prod = self.lambda.iter().zip(&self.weighted_gap).map(|(l, g)| (l * g).abs()).fold(0.0, f64::max);
        (max_lambda, min_gap, prod)
    }

    /// CSV dump: `K,lambda,weighted_gap,status,measure`.
    pub fn write_csv<W: Write>(&self, measures: &[f64], mut out: W) -> Result<()> {
        writeln!(out, "K,lambda,weighted_gap,status,measure")?;
        for k in 0..self.lambda.len() {
            let st = if self.status[k] == Status::Active { "active" } else { "inactive" };
            writeln!(out, "{k},{:.9e},{:.9e},{st},{:.9e}", self.lambda[k], self.weighted_gap[k], measures[k])?;
        }
        Ok(())
    }
}

/// Status from `(lambda_K, (Pi g)_K)`: negative multipliers stay active,
/// positive ones are released, zero multipliers activate on penetration
/// beyond `gap_tol`.
pub fn status_of(lambda: f64, weighted_gap: f64, gap_tol: f64) -> Status {
    if lambda < 0.0 {
        Status::Active
    } else if lambda > 0.0 {
        Status::Inactive
    } else if weighted_gap < -gap_tol {
        Status::Active
    } else {
        Status::Inactive
    }
}

/// New status per `K` and the number of changes relative to `state`.
pub fn active_set_update(state: &ContactState, gap_tol: f64) -> (Vec<Status>, usize) {
    let new: Vec<Status> = state.lambda.iter().zip(&state.weighted_gap).map(|(&l, &g)| status_of(l, g, gap_tol)).collect();
    let changed = new.iter().zip(&state.status).filter(|(a, b)| a != b).count();
    (new, changed)
}

/// `R_u = sum_{K active} lambda_K B_K-row`, `R_lambda[K] = (Pi g)_K K_K`
/// for the active `K` (in increasing order).
pub fn contact_residual(state: &ContactState, coupling: &CsrMatrix, measures: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let act = state.active_indices();
    let mut lam = vec![0.0; state.lambda.len()];
    for &k in &act {
        lam[k] = state.lambda[k];
    }
    let ru = coupling.mul_transpose_vec(&lam);
    let rl = act.iter().map(|&k| state.weighted_gap[k] * measures[k]).collect();
    (ru, rl)
}

/// Active rows of the coupling matrix, i.e. the block `int B_act N^T dGamma`.
pub fn contact_tangent(state: &ContactState, coupling: &CsrMatrix) -> CsrMatrix {
    coupling.select_rows(&state.active_indices())
}

use std::collections::{BTreeMap, HashSet};

use crate::assembly::eliminate;
use crate::contact::{active_set_update, ContactState, Status};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

use super::{IterationRecord, SaddleSolution, SaddleSystem, SolutionBundle, SolveSettings};

/// Linear elastic body in frictionless contact with a rigid plane.
#[derive(Debug, Clone)]
pub struct ContactProblem {
    /// Stiffness before constraint elimination.
    pub stiffness: CsrMatrix,
    pub load: Vec<f64>,
    pub constraints: BTreeMap<usize, f64>,
    /// Full coupling matrix `B` (multipliers x dofs).
    pub coupling: CsrMatrix,
    /// `int (X . n - offset) B_K dGamma`.
    pub gap0: Vec<f64>,
    /// `K_K`.
    pub measures: Vec<f64>,
    /// Unknowns per node.
    pub block: usize,
    /// Outward unit normal of the rigid body.
    pub normal: [f64; 3],
}

/// `B` with the constrained columns removed and their contribution
/// `B_c v_c`.
pub(crate) fn restrict_coupling(b: &CsrMatrix, cons: &BTreeMap<usize, f64>) -> (CsrMatrix, Vec<f64>) {
    let mut shift = vec![0.0; b.n_rows()];
    let rows = (0..b.n_rows())
        .map(|k| {
            let (c, v) = b.row(k);
            c.iter()
                .zip(v)
                .filter_map(|(&c, &v)| match cons.get(&c) {
                    Some(&val) => {
                        shift[k] += v * val;
                        None
                    }
                    None => Some((c, v)),
                })
                .collect()
        })
        .collect();
    (CsrMatrix::from_rows(b.n_cols(), rows), shift)
}

/// Rigid translation along `normal` with the constrained dofs zeroed.
pub(crate) fn normal_translation(n: usize, block: usize, normal: [f64; 3], cons: &BTreeMap<usize, f64>) -> Vec<f64> {
    (0..n).map(|i| if cons.contains_key(&i) { 0.0 } else { normal[i % block] }).collect()
}

/// Whether `translation` is a zero-energy mode of `k`, i.e. the body is only
/// held by contact.
pub(crate) fn is_floating(k: &CsrMatrix, translation: &[f64]) -> bool {
    let kt = k.mul_vec(translation);
    kt.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= 1e-9 * k.max_abs()
}

/// Saddle solve on the active rows. A floating body never gets an empty
/// active set: the multiplier with the smallest weighted gap is activated
/// instead, which is reported by the flag. The same happens when the solve
/// detects a singular stiffness without active rows.
pub(crate) fn active_solve(
    sys: &mut SaddleSystem,
    f: &[f64],
    g_rhs: &[f64],
    status: &mut [Status],
    weighted_gap: &[f64],
    floating: bool,
) -> Result<(SaddleSolution, bool)> {
    let mut fallback = false;
    loop {
        let active: Vec<bool> = status.iter().map(|s| *s == Status::Active).collect();
        let none = !active.iter().any(|&a| a);
        if none && floating && !status.is_empty() {
            activate_closest(status, weighted_gap);
            fallback = true;
            continue;
        }
        match sys.solve(f, g_rhs, &active) {
            Err(Error::ConstraintDeficiency) if none && !status.is_empty() => {
                activate_closest(status, weighted_gap);
                fallback = true;
            }
            other => return other.map(|s| (s, fallback)),
        }
    }
}

fn activate_closest(status: &mut [Status], weighted_gap: &[f64]) {
    let kmin = (0..status.len()).min_by(|&a, &b| weighted_gap[a].total_cmp(&weighted_gap[b])).expect("non-empty");
    status[kmin] = Status::Active;
}

/// Initial activity: non-positive initial weighted gap.
pub(crate) fn initial_status(gap0: &[f64], measures: &[f64], gap_tol: f64) -> (Vec<Status>, Vec<f64>) {
    let wg: Vec<f64> = gap0.iter().zip(measures).map(|(g, m)| g / m).collect();
    let st = wg.iter().map(|&g| if g <= gap_tol { Status::Active } else { Status::Inactive }).collect();
    (st, wg)
}

pub(crate) fn weighted_gaps(b: &CsrMatrix, gap0: &[f64], measures: &[f64], u: &[f64]) -> Vec<f64> {
    b.mul_vec(u).iter().zip(gap0).zip(measures).map(|((bu, g0), m)| (bu + g0) / m).collect()
}

/// Tracks visited active sets; on a repeat keeps the larger of the two
/// candidate sets and tightens the gap tolerance.
pub(crate) struct CycleGuard {
    seen: HashSet<Vec<bool>>,
}

impl CycleGuard {
    pub fn new() -> Self {
        CycleGuard { seen: HashSet::new() }
    }

    pub fn check(&mut self, current: &[Status], proposed: Vec<Status>, gap_tol: &mut f64) -> Vec<Status> {
        let key: Vec<bool> = proposed.iter().map(|s| *s == Status::Active).collect();
        if self.seen.insert(key) {
            return proposed;
        }
        *gap_tol *= 0.1;
        let count = |v: &[Status]| v.iter().filter(|s| **s == Status::Active).count();
        if count(&proposed) >= count(current) {
            proposed
        } else {
            current.to_vec()
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Active-set iteration for the small-deformation contact problem.
pub fn solve_small_deformation(problem: &ContactProblem, settings: &SolveSettings) -> Result<SolutionBundle> {
    settings.validate()?;
    let mut k = problem.stiffness.clone();
    let mut f = problem.load.clone();
    eliminate(&mut k, &mut f, &problem.constraints);
    let (b_free, shift) = restrict_coupling(&problem.coupling, &problem.constraints);
    let g_rhs: Vec<f64> = problem.gap0.iter().zip(&shift).map(|(g, s)| -(g + s)).collect();
    let translation = normal_translation(k.n_rows(), problem.block, problem.normal, &problem.constraints);
    let floating = is_floating(&k, &translation);
    let mut sys = SaddleSystem::new(&k, &b_free, problem.block)?;
    let mut gap_tol = settings.gap_tol;
    let (mut status, mut wg) = initial_status(&problem.gap0, &problem.measures, gap_tol);
    let mut guard = CycleGuard::new();
    guard.check(&[], status.clone(), &mut gap_tol.clone());
    let mut log = Vec::new();
    for iter in 1..=settings.max_active_set_iters {
        let (sol, fallback) = active_solve(&mut sys, &f, &g_rhs, &mut status, &wg, floating)?;
        let lambda = sol.lambda.clone();
        wg = weighted_gaps(&problem.coupling, &problem.gap0, &problem.measures, &sol.u);
        let state = ContactState { lambda, weighted_gap: wg.clone(), status: status.clone() };
        let (proposed, mut changed) = active_set_update(&state, gap_tol);
        if fallback && proposed.iter().all(|s| *s == Status::Inactive) {
            // releasing the only support would leave the body floating
            changed = 0;
        }
        let res_l = state.active_indices().iter().map(|&kk| wg[kk].abs()).fold(0.0, f64::max);
        log.push(IterationRecord {
            step: 0,
            iter,
            active: state.num_active(),
            residual_u: sol.residual * norm(&f).max(f64::MIN_POSITIVE),
            residual_lambda: res_l,
            changed,
        });
        if changed == 0 {
            return Ok(SolutionBundle { u: sol.u, lambda: state.lambda.clone(), state, log });
        }
        status = guard.check(&status, proposed, &mut gap_tol);
    }
    Err(Error::ActiveSetNotConverged(settings.max_active_set_iters))
}

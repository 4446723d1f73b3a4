use std::collections::BTreeMap;

use crate::assembly::{eliminate, neo_hookean_forces, DofMap, NeoHookeanMaterial, QuadratureRule};
use crate::contact::{active_set_update, ContactState, Status};
use crate::error::{Error, Result};
use crate::geometry::NurbsPatch;
use crate::sparse::CsrMatrix;

use super::problem::{active_solve, initial_status, is_floating, normal_translation, restrict_coupling, weighted_gaps, CycleGuard};
use super::{IterationRecord, SaddleSystem, SolutionBundle, SolveSettings};

/// Neo-Hookean body against a rigid plane under a dead load and/or
/// prescribed displacements, both applied proportionally to the load factor.
pub struct LargeDeformationProblem<'a> {
    pub patch: &'a NurbsPatch<f64>,
    pub dofs: &'a DofMap,
    pub material: NeoHookeanMaterial,
    pub quad: &'a QuadratureRule<f64>,
    /// External load at load factor 1.
    pub load: Vec<f64>,
    /// Prescribed values at load factor 1.
    pub constraints: BTreeMap<usize, f64>,
    pub coupling: CsrMatrix,
    pub gap0: Vec<f64>,
    pub measures: Vec<f64>,
    /// Outward unit normal of the rigid body.
    pub normal: [f64; 3],
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct StepOutcome {
    u: Vec<f64>,
    state: ContactState,
}

/// Load-stepped semismooth Newton method with the active set updated after
/// every linear solve.
pub fn solve_large_deformation(problem: &LargeDeformationProblem, settings: &SolveSettings) -> Result<SolutionBundle> {
    settings.validate()?;
    let n = problem.dofs.num_dofs();
    let nk = problem.measures.len();
    let mut u = vec![0.0; n];
    let (status0, wg0) = initial_status(&problem.gap0, &problem.measures, settings.gap_tol);
    let mut state = ContactState { lambda: vec![0.0; nk], weighted_gap: wg0, status: status0 };
    let mut log = Vec::new();
    let mut t = 0.0;
    let mut dt = 1.0 / settings.load_steps as f64;
    let mut halvings = 0;
    let mut step = 0;
    while t < 1.0 - 1e-14 {
        let t_next = (t + dt).min(1.0);
        step += 1;
        match newton_step(problem, settings, &u, &state, t_next, step, &mut log) {
            Ok(out) => {
                u = out.u;
                state = out.state;
                t = t_next;
            }
            Err(e @ (Error::ElementInversion(_) | Error::NewtonDiverged { .. } | Error::ActiveSetNotConverged(_))) => {
                halvings += 1;
                if halvings > settings.max_halvings {
                    return Err(match e {
                        Error::ElementInversion(_) => Error::StepHalvingExhausted(settings.max_halvings),
                        other => other,
                    });
                }
                dt *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SolutionBundle { lambda: state.lambda.clone(), u, state, log })
}

fn newton_step(
    problem: &LargeDeformationProblem,
    settings: &SolveSettings,
    u0: &[f64],
    state0: &ContactState,
    t: f64,
    step: usize,
    log: &mut Vec<IterationRecord>,
) -> Result<StepOutcome> {
    let n = u0.len();
    let fext: Vec<f64> = problem.load.iter().map(|v| t * v).collect();
    let mut u = u0.to_vec();
    let mut state = state0.clone();
    let mut gap_tol = settings.gap_tol;
    let mut guard = CycleGuard::new();
    let mut changed_last = usize::MAX;
    let mut system: Option<SaddleSystem> = None;
    for iter in 0..=settings.max_newton_iters {
        let (fint, mut kt) = neo_hookean_forces(problem.patch, problem.dofs, &problem.material, &u, problem.quad)?;
        let blam = problem.coupling.mul_transpose_vec(&state.lambda);
        let mut r: Vec<f64> = (0..n).map(|i| fext[i] - fint[i] - blam[i]).collect();
        for &c in problem.constraints.keys() {
            r[c] = 0.0;
        }
        let scale = norm(&fext).max(norm(&fint));
        let res_u = if scale > 0.0 { norm(&r) / scale } else { 0.0 };
        // internal forces at small strain carry cancellation error of order eps * |K|
        let floor = 64.0 * f64::EPSILON * kt.max_abs() * (n as f64).sqrt();
        let res_ok = res_u <= settings.newton_tol || norm(&r) <= floor;
        let wg = weighted_gaps(&problem.coupling, &problem.gap0, &problem.measures, &u);
        let res_l = state.active_indices().iter().map(|&k| wg[k].abs()).fold(0.0, f64::max);
        state.weighted_gap = wg;
        let cons_err = problem.constraints.iter().map(|(&c, &v)| (u[c] - t * v).abs()).fold(0.0, f64::max);
        let gap_ok = res_l <= settings.gap_tol.max(1e-13);
        if iter > 0 && changed_last == 0 && res_ok && gap_ok && cons_err <= 1e-14 {
            return Ok(StepOutcome { u, state });
        }
        if iter > 0 && scale == 0.0 && changed_last == 0 && cons_err == 0.0 {
            return Ok(StepOutcome { u, state });
        }
        if iter == settings.max_newton_iters {
            return Err(Error::NewtonDiverged { step, residual: res_u });
        }
        // increments for prescribed dofs
        let du_cons: BTreeMap<usize, f64> = problem.constraints.iter().map(|(&c, &v)| (c, t * v - u[c])).collect();
        let mut rhs: Vec<f64> = (0..n).map(|i| fext[i] - fint[i]).collect();
        eliminate(&mut kt, &mut rhs, &du_cons);
        let (b_free, shift) = restrict_coupling(&problem.coupling, &du_cons);
        let bu = problem.coupling.mul_vec(&u);
        let g_rhs: Vec<f64> = (0..problem.measures.len()).map(|k| -(problem.gap0[k] + bu[k] + shift[k])).collect();
        let mut status = state.status.clone();
        let translation = normal_translation(n, problem.dofs.dim(), problem.normal, &du_cons);
        let floating = is_floating(&kt, &translation);
        let sys = match system.as_mut() {
            Some(sys) => {
                sys.set_stiffness(&kt)?;
                sys
            }
            None => system.insert(SaddleSystem::new(&kt, &b_free, problem.dofs.dim())?),
        };
        let (sol, fallback) = active_solve(sys, &rhs, &g_rhs, &mut status, &state.weighted_gap, floating)?;
        u.iter_mut().zip(&sol.u).for_each(|(a, d)| *a += d);
        let lambda = sol.lambda.clone();
        let wg = weighted_gaps(&problem.coupling, &problem.gap0, &problem.measures, &u);
        let new_state = ContactState { lambda, weighted_gap: wg, status: status.clone() };
        let (mut proposed, mut changed) = active_set_update(&new_state, gap_tol);
        if fallback && proposed.iter().all(|s| *s == Status::Inactive) {
            proposed = status.clone();
            changed = 0;
        }
        log.push(IterationRecord { step, iter: iter + 1, active: new_state.num_active(), residual_u: res_u, residual_lambda: res_l, changed });
        changed_last = changed;
        let next = if changed == 0 { proposed } else { guard.check(&status, proposed, &mut gap_tol) };
        state = new_state;
        for k in 0..next.len() {
            if next[k] == Status::Inactive {
                state.lambda[k] = 0.0;
            }
        }
        state.status = next;
    }
    Err(Error::NewtonDiverged { step, residual: f64::NAN })
}

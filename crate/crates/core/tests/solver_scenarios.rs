use iga_contact::assembly::{
    assemble_load, assemble_stiffness, face_constraints, gauss_rule, merge_constraints, DofMap, LinearMaterial, NeoHookeanMaterial,
    QuadratureRule, Traction,
};
use iga_contact::contact::{coupling_matrix, MultiplierBasis};
use iga_contact::geometry::{identity_patch, quarter_disc, FaceId, NurbsPatch};
use iga_contact::solver::{
    solve_large_deformation, solve_small_deformation, ContactProblem, LargeDeformationProblem, SolutionBundle, SolveSettings,
};

const UP: [f64; 3] = [0.0, 1.0, 0.0];
const BOTTOM: FaceId = FaceId::new(1, false);
const TOP: FaceId = FaceId::new(1, true);
const LEFT: FaceId = FaceId::new(0, false);

struct Setup {
    patch: NurbsPatch<f64>,
    dofs: DofMap,
    quad: QuadratureRule<f64>,
    basis: MultiplierBasis,
}

fn unit_square(refinements: usize) -> Setup {
    let mut patch = identity_patch::<f64>(2, 2).unwrap();
    for _ in 0..refinements {
        patch = patch.bisect().unwrap();
    }
    let dofs = DofMap::new(&patch);
    let quad = gauss_rule(3).unwrap();
    let basis = MultiplierBasis::new(&patch, BOTTOM, UP, &quad).unwrap();
    Setup { patch, dofs, quad, basis }
}

fn small_problem(s: &Setup, load: Vec<f64>, cons: &[(usize, f64)], offset: f64) -> ContactProblem {
    let mat = LinearMaterial::new(1.0, 0.3).unwrap();
    ContactProblem {
        stiffness: assemble_stiffness(&s.patch, &s.dofs, &mat, &s.quad).unwrap().stiffness,
        load,
        constraints: merge_constraints(cons).unwrap(),
        coupling: coupling_matrix(&s.basis, &s.dofs),
        gap0: s.basis.initial_gap_integrals(offset),
        measures: s.basis.measures().to_vec(),
        block: 2,
        normal: UP,
    }
}

fn large_problem<'a>(s: &'a Setup, load: Vec<f64>, cons: &[(usize, f64)], offset: f64) -> LargeDeformationProblem<'a> {
    LargeDeformationProblem {
        patch: &s.patch,
        dofs: &s.dofs,
        material: NeoHookeanMaterial::new(1.0, 0.3).unwrap(),
        quad: &s.quad,
        load,
        constraints: merge_constraints(cons).unwrap(),
        coupling: coupling_matrix(&s.basis, &s.dofs),
        gap0: s.basis.initial_gap_integrals(offset),
        measures: s.basis.measures().to_vec(),
        normal: UP,
    }
}

/// Square resting on the plane, pressed from the top, free to expand.
fn punch(s: &Setup, pressure: f64) -> (Vec<f64>, Vec<(usize, f64)>) {
    let load = assemble_load(&s.patch, &s.dofs, None, &[(TOP, Traction::Pressure(pressure))], &s.quad).unwrap();
    (load, face_constraints(&s.patch, &s.dofs, LEFT, 0, 0.0).unwrap())
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d / b.iter().map(|y| y * y).sum::<f64>().sqrt()
}

#[test]
fn flat_punch_gives_uniform_pressure() {
    let s = unit_square(2);
    let p = 0.02;
    let (load, cons) = punch(&s, p);
    let sol = solve_small_deformation(&small_problem(&s, load, &cons, 0.0), &SolveSettings::default()).unwrap();
    assert_eq!(sol.state.num_active(), s.basis.len());
    for l in &sol.lambda {
        assert!((l + p).abs() <= 1e-10 * p, "{l}");
    }
    let (max_l, _, prod) = sol.state.complementarity();
    assert!(max_l < 0.0 && prod < 1e-14);
}

#[test]
fn clamped_body_pulled_away_never_touches() {
    let s = unit_square(2);
    let lift = |_: [f64; 3]| [0.0, 0.05, 0.0];
    let load = assemble_load(&s.patch, &s.dofs, Some(&lift), &[], &s.quad).unwrap();
    let mut cons = face_constraints(&s.patch, &s.dofs, TOP, 0, 0.0).unwrap();
    cons.extend(face_constraints(&s.patch, &s.dofs, TOP, 1, 0.0).unwrap());
    let sol = solve_small_deformation(&small_problem(&s, load, &cons, -0.01), &SolveSettings::default()).unwrap();
    assert_eq!(sol.log.len(), 1);
    assert_eq!(sol.state.num_active(), 0);
    assert!(sol.lambda.iter().all(|l| *l == 0.0));
    assert!(sol.state.weighted_gap.iter().all(|g| *g > 0.01));
}

#[test]
fn zero_load_large_deformation_stays_at_rest() {
    let s = unit_square(1);
    let mut cons = face_constraints(&s.patch, &s.dofs, TOP, 0, 0.0).unwrap();
    cons.extend(face_constraints(&s.patch, &s.dofs, TOP, 1, 0.0).unwrap());
    let problem = large_problem(&s, vec![0.0; s.dofs.num_dofs()], &cons, -0.01);
    let settings = SolveSettings { load_steps: 1, ..SolveSettings::default() };
    let sol = solve_large_deformation(&problem, &settings).unwrap();
    assert!(sol.u.iter().all(|v| *v == 0.0));
    assert_eq!(sol.log.len(), 1);
    assert_eq!(sol.state.num_active(), 0);
}

#[test]
fn tiny_load_large_matches_small() {
    let s = unit_square(2);
    let (load, cons) = punch(&s, 1e-6);
    let small = solve_small_deformation(&small_problem(&s, load.clone(), &cons, 0.0), &SolveSettings::default()).unwrap();
    let settings = SolveSettings { load_steps: 1, ..SolveSettings::default() };
    let large = solve_large_deformation(&large_problem(&s, load, &cons, 0.0), &settings).unwrap();
    assert_eq!(small.state.status, large.state.status);
    assert!(rel_diff(&large.u, &small.u) < 1e-4);
    assert!(rel_diff(&large.lambda, &small.lambda) < 1e-4);
}

fn hertz_disc(pressure: f64) -> (ContactProblem, SolutionBundle) {
    let dom = quarter_disc::<f64>(1.0).unwrap();
    let patch = dom.patch.bisect().unwrap().bisect().unwrap().bisect().unwrap();
    let dofs = DofMap::new(&patch);
    let quad = gauss_rule(3).unwrap();
    let basis = MultiplierBasis::new(&patch, dom.contact_face, dom.rigid_normal, &quad).unwrap();
    let load = assemble_load(&patch, &dofs, None, &[(dom.load_face, Traction::Pressure(pressure))], &quad).unwrap();
    let mut cons = Vec::new();
    for &(face, comp) in &dom.symmetry {
        cons.extend(face_constraints(&patch, &dofs, face, comp, 0.0).unwrap());
    }
    let problem = ContactProblem {
        stiffness: assemble_stiffness(&patch, &dofs, &LinearMaterial::new(1.0, 0.3).unwrap(), &quad).unwrap().stiffness,
        load,
        constraints: merge_constraints(&cons).unwrap(),
        coupling: coupling_matrix(&basis, &dofs),
        gap0: basis.initial_gap_integrals(dom.plane_offset),
        measures: basis.measures().to_vec(),
        block: 2,
        normal: dom.rigid_normal,
    };
    let sol = solve_small_deformation(&problem, &SolveSettings::for_length_scale(1.0)).unwrap();
    (problem, sol)
}

#[test]
fn hertz_solution_satisfies_virtual_work() {
    let (problem, sol) = hertz_disc(0.003);
    let ku = problem.stiffness.mul_vec(&sol.u);
    let uku: f64 = ku.iter().zip(&sol.u).map(|(a, b)| a * b).sum();
    let fu: f64 = problem.load.iter().zip(&sol.u).map(|(a, b)| a * b).sum();
    let lg: f64 = sol.lambda.iter().zip(&problem.gap0).map(|(a, b)| a * b).sum();
    assert!(sol.state.num_active() > 0);
    assert!((uku - fu - lg).abs() <= 1e-8 * uku.abs(), "{uku} {fu} {lg}");
    // contact force balances the applied load per unit depth
    let force: f64 = sol.lambda.iter().zip(&problem.measures).map(|(l, m)| -l * m).sum();
    assert!((force - 0.003).abs() <= 1e-9, "{force}");
}

#[test]
fn active_set_loop_terminates_with_settled_log() {
    let (_, sol) = hertz_disc(0.01);
    let last = sol.log.last().unwrap();
    assert_eq!(last.changed, 0);
    assert_eq!(last.active, sol.state.num_active());
    assert!(sol.log.len() <= 20);
    let (max_l, min_gap, _) = sol.state.complementarity();
    assert!(max_l <= 0.0 && min_gap >= -1e-10);
    assert!(sol.lambda.iter().any(|l| *l < 0.0));
}


#[test]
fn newton_tail_is_superlinear() {
    let s = unit_square(2);
    let (load, cons) = punch(&s, 0.05);
    let settings = SolveSettings { load_steps: 1, ..SolveSettings::default() };
    let sol = solve_large_deformation(&large_problem(&s, load, &cons, 0.0), &settings).unwrap();
    let res: Vec<f64> = sol.log.iter().filter(|r| r.changed == 0).map(|r| r.residual_u).filter(|r| *r > 0.0).collect();
    assert!(res.len() >= 3, "{res:?}");
    let n = res.len();
    assert!(res[n - 1] <= 0.1 * res[n - 2] && res[n - 2] <= 0.1 * res[n - 3], "{res:?}");
}

use crate::assembly::{
    assemble_load, assemble_stiffness, face_constraints, gauss_rule, merge_constraints, DofMap, LinearMaterial, NeoHookeanMaterial,
    QuadratureRule, Traction,
};
use crate::contact::{coupling_matrix, MultiplierBasis, Status};
use crate::error::Result;
use crate::geometry::{graded_breakpoints, quarter_disc, sphere_octant, subdivide, BenchmarkDomain, MeshView, NurbsPatch};
use crate::solver::{solve_large_deformation, solve_small_deformation, ContactProblem, LargeDeformationProblem, SolutionBundle, SolveSettings};

use super::{Benchmark, RunConfig};

/// The benchmark geometry of a run.
pub fn domain(cfg: &RunConfig) -> Result<BenchmarkDomain<f64>> {
    if cfg.benchmark.dim() == 3 {
        sphere_octant(cfg.radius)
    } else {
        quarter_disc(cfg.radius)
    }
}

/// Graded mesh `level` times bisected, degree-elevated to `cfg.degree`.
pub fn level_patch(cfg: &RunConfig, dom: &BenchmarkDomain<f64>, level: usize) -> Result<NurbsPatch<f64>> {
    let base = graded_breakpoints(cfg.base_spans, cfg.grading.0, cfg.grading.1)?;
    let uniform: Vec<f64> = (0..=cfg.base_spans).map(|i| i as f64 / cfg.base_spans as f64).collect();
    let bps: Vec<Vec<f64>> = (0..dom.patch.dim())
        .map(|d| {
            let graded = dom.graded_dirs.contains(&d) && (cfg.grade_normal || d != dom.contact_face.dir);
            subdivide(if graded { &base } else { &uniform }, level)
        })
        .collect();
    dom.patch.elevate_to(cfg.degree)?.with_breakpoints(&bps)
}

/// One solved mesh.
pub struct LevelSolution {
    pub level: usize,
    pub patch: NurbsPatch<f64>,
    pub dofs: DofMap,
    pub basis: MultiplierBasis,
    pub bundle: SolutionBundle,
    /// Largest element diameter.
    pub h: f64,
    /// Largest contact-face element inside the active support.
    pub h_mult: f64,
}

impl LevelSolution {
    /// Largest parametric coordinate (first surface direction) reached by
    /// the support of an active multiplier function.
    pub fn active_extent_param(&self) -> Option<f64> {
        self.bundle
            .state
            .status
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Status::Active)
            .map(|(k, _)| self.basis.support(k)[0].1)
            .reduce(f64::max)
    }
}

pub fn quadrature(cfg: &RunConfig) -> Result<QuadratureRule<f64>> {
    gauss_rule(cfg.quadrature_points())
}

/// Assembles and solves the contact problem on one level.
pub fn solve_level(cfg: &RunConfig, dom: &BenchmarkDomain<f64>, level: usize) -> Result<LevelSolution> {
    let patch = level_patch(cfg, dom, level)?;
    let quad = quadrature(cfg)?;
    let dofs = DofMap::new(&patch);
    let basis = MultiplierBasis::new(&patch, dom.contact_face, dom.rigid_normal, &quad)?;
    let coupling = coupling_matrix(&basis, &dofs);
    let gap0 = basis.initial_gap_integrals(dom.plane_offset);

    let mut cons = Vec::new();
    for &(face, comp) in &dom.symmetry {
        cons.extend(face_constraints(&patch, &dofs, face, comp, 0.0)?);
    }
    let tractions = if cfg.benchmark == Benchmark::Hertz2dLargeDirichlet {
        cons.extend(face_constraints(&patch, &dofs, dom.load_face, 1, cfg.displacement)?);
        vec![]
    } else {
        vec![(dom.load_face, Traction::Pressure(cfg.pressure))]
    };
    let constraints = merge_constraints(&cons)?;
    let load = assemble_load(&patch, &dofs, None, &tractions, &quad)?;

    let mut settings = SolveSettings::for_length_scale(cfg.radius);
    settings.load_steps = cfg.load_steps;
    settings.newton_tol = cfg.newton_tol;

    let bundle = if cfg.benchmark.large_deformation() {
        let problem = LargeDeformationProblem {
            patch: &patch,
            dofs: &dofs,
            material: NeoHookeanMaterial::new(cfg.young, cfg.poisson)?,
            quad: &quad,
            load,
            constraints,
            coupling,
            gap0,
            measures: basis.measures().to_vec(),
            normal: dom.rigid_normal,
        };
        solve_large_deformation(&problem, &settings)?
    } else {
        let sys = assemble_stiffness(&patch, &dofs, &LinearMaterial::new(cfg.young, cfg.poisson)?, &quad)?;
        let problem = ContactProblem {
            stiffness: sys.stiffness,
            load,
            constraints,
            coupling,
            gap0,
            measures: basis.measures().to_vec(),
            block: patch.dim(),
            normal: dom.rigid_normal,
        };
        solve_small_deformation(&problem, &settings)?
    };

    let h = MeshView::new(&patch).h();
    let h_mult = active_element_size(&basis, &bundle);
    Ok(LevelSolution { level, patch, dofs, basis, bundle, h, h_mult })
}

fn active_element_size(basis: &MultiplierBasis, bundle: &SolutionBundle) -> f64 {
    let mesh = MeshView::from_trace(basis.trace());
    let supports: Vec<Vec<(f64, f64)>> =
        bundle.state.active_indices().into_iter().map(|k| basis.support(k)).collect();
    let inside = |lo: &[f64; 3], hi: &[f64; 3]| {
        supports.iter().any(|s| s.iter().enumerate().all(|(d, &(a, b))| lo[d] >= a - 1e-12 && hi[d] <= b + 1e-12))
    };
    let sizes = mesh.elements().iter().filter(|e| inside(&e.lower, &e.upper)).map(|e| e.size);
    sizes.reduce(f64::max).unwrap_or_else(|| mesh.h())
}

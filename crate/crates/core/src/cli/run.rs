use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::assembly::gauss_rule;
use crate::contact::MultiplierBasis;
use crate::error::{Error, Result};
use crate::geometry::{identity_patch, FaceId};
use crate::solver::{inf_sup_estimate, trace_matrices};
use crate::verification::{
    displacement_errors, fit_rate, hertz_2d, hertz_3d, multiplier_errors, pressure_profile, ArcCoordinate, DiscreteField,
    HertzAnalytic, MultiplierReference,
};

use super::levels::{domain, solve_level, LevelSolution};
use super::{Benchmark, RunConfig};

/// Errors of one reported mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelErrors {
    pub h: f64,
    pub l2: f64,
    pub h1: f64,
    pub h_mult: f64,
    pub mult_analytic: f64,
    pub mult_reference: f64,
}

/// Fitted convergence rates (least squares over all reported meshes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub l2: f64,
    pub h1: f64,
    pub mult_analytic: f64,
    pub mult_reference: f64,
    /// Slopes over the last two reported meshes.
    pub mult_analytic_last: f64,
    pub mult_reference_last: f64,
}

/// Per-level diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    pub level: usize,
    pub h: f64,
    pub num_dofs: usize,
    pub num_multipliers: usize,
    pub num_active: usize,
    /// `(max lambda, min inactive weighted gap, max |lambda g|)`.
    pub complementarity: (f64, f64, f64),
    /// Largest pressure at the contact quadrature points.
    pub peak_pressure: f64,
    /// Largest control-point pressure `-lambda_K`.
    pub peak_coefficient: f64,
    /// Arc distance from the pole reached by the active supports (2D).
    pub contact_extent: Option<f64>,
    /// Arc length of the contact element containing the analytic edge (2D).
    pub edge_element: Option<f64>,
    pub iterations: usize,
}

/// Everything a benchmark run produces.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub benchmark: Benchmark,
    pub hertz: HertzAnalytic<f64>,
    pub errors: Vec<LevelErrors>,
    pub rates: Option<Rates>,
    /// `(r / a, p / p0)` on the finest mesh.
    pub profile: Vec<(f64, f64)>,
    pub levels: Vec<LevelSummary>,
}

fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

/// Runs a contact benchmark and writes its outputs into `cfg.out`.
pub fn run_benchmark(cfg: &RunConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    if cfg.benchmark == Benchmark::InfSup {
        return Err(Error::Config("use run_infsup for the inf-sup study".into()));
    }
    fs::create_dir_all(&cfg.out)?;
    let _ = fs::remove_file(cfg.out.join("FAILED"));
    let result = compute(cfg);
    if let Err(e) = &result {
        fs::write(cfg.out.join("FAILED"), format!("{e}\n"))?;
    }
    result
}

fn compute(cfg: &RunConfig) -> Result<BenchmarkReport> {
    let dom = domain(cfg)?;
    let quad_err = gauss_rule(cfg.degree + 2)?;
    let quad_hi = gauss_rule(10)?;
    let coord = ArcCoordinate::new(dom.pole, dom.rigid_normal, dom.radius);

    let reported = cfg.levels - 1;
    let mesh_levels: Vec<usize> = (0..reported).chain(std::iter::once(reported - 1 + cfg.reference_offset)).collect();
    let solutions = mesh_levels.par_iter().map(|&level| solve_level(cfg, &dom, level)).collect::<Result<Vec<_>>>()?;
    let mut log = String::new();
    for sol in &solutions {
        let _ = writeln!(log, "# level {} dofs {} h {}", sol.level, sol.dofs.num_dofs(), sci(sol.h));
        log.push_str(&sol.bundle.log_text());
    }
    let reference = solutions.last().expect("reference level");

    let hertz = analytic(cfg, reference);
    let mut errors = Vec::with_capacity(reported);
    let ref_field = DiscreteField { patch: &reference.patch, dofs: &reference.dofs, u: &reference.bundle.u };
    for sol in &solutions[..reported] {
        let field = DiscreteField { patch: &sol.patch, dofs: &sol.dofs, u: &sol.bundle.u };
        let (l2, h1) = displacement_errors(&field, &ref_field, &quad_err)?;
        let ana = MultiplierReference::Analytic { hertz: &hertz, coordinate: coord };
        let mult_analytic = multiplier_errors(&sol.bundle.lambda, &sol.basis, &ana, &quad_hi)?;
        let disc = MultiplierReference::Discrete { basis: &reference.basis, lambda: &reference.bundle.lambda };
        let mult_reference = multiplier_errors(&sol.bundle.lambda, &sol.basis, &disc, &quad_err)?;
        errors.push(LevelErrors { h: sol.h, l2, h1, h_mult: sol.h_mult, mult_analytic, mult_reference });
    }

    let rates = if errors.len() >= 2 {
        let last = &errors[errors.len() - 2..];
        let fit = |f: &dyn Fn(&LevelErrors) -> (f64, f64)| fit_rate(&errors.iter().map(f).collect::<Vec<_>>());
        Some(Rates {
            l2: fit(&|e| (e.h, e.l2))?,
            h1: fit(&|e| (e.h, e.h1))?,
            mult_analytic: fit(&|e| (e.h_mult, e.mult_analytic))?,
            mult_reference: fit(&|e| (e.h_mult, e.mult_reference))?,
            mult_analytic_last: fit_rate(&last.iter().map(|e| (e.h_mult, e.mult_analytic)).collect::<Vec<_>>())?,
            mult_reference_last: fit_rate(&last.iter().map(|e| (e.h_mult, e.mult_reference)).collect::<Vec<_>>())?,
        })
    } else {
        None
    };

    let levels: Vec<LevelSummary> = solutions.iter().map(|s| summarize(s, &hertz, &coord)).collect();
    let profile = pressure_profile(&reference.bundle.lambda, &reference.basis, &hertz, &coord);
    let report = BenchmarkReport { benchmark: cfg.benchmark, hertz, errors, rates, profile, levels };
    write_outputs(&cfg.out, &report, reference, &log)?;
    Ok(report)
}

/// Hertz solution the multipliers are compared with. With a prescribed
/// displacement the equivalent pressure is the contact force per unit
/// length of the loaded face.
fn analytic(cfg: &RunConfig, reference: &LevelSolution) -> HertzAnalytic<f64> {
    let pressure = if cfg.benchmark == Benchmark::Hertz2dLargeDirichlet {
        let force: f64 = reference.bundle.lambda.iter().zip(reference.basis.measures()).map(|(l, m)| -l * m).sum();
        force / cfg.radius
    } else {
        cfg.pressure
    };
    if cfg.benchmark.dim() == 3 {
        hertz_3d(cfg.radius, cfg.young, cfg.poisson, pressure)
    } else {
        hertz_2d(cfg.radius, cfg.young, cfg.poisson, pressure)
    }
}

fn summarize(sol: &LevelSolution, hertz: &HertzAnalytic<f64>, coord: &ArcCoordinate) -> LevelSummary {
    let lambda = &sol.bundle.lambda;
    let peak_pressure = sol
        .basis
        .points()
        .iter()
        .map(|cp| -cp.mult_basis.iter().zip(&cp.mult_values).map(|(&k, &b)| lambda[k] * b).sum::<f64>())
        .fold(0.0, f64::max);
    let peak_coefficient = lambda.iter().map(|l| -l).fold(0.0, f64::max);
    let (contact_extent, edge_element) = if sol.patch.dim() == 2 {
        let trace = sol.basis.trace();
        let extent = sol.active_extent_param().map(|s| coord.at(&trace.eval(&[s]).expect("support end on face").x));
        let kv = trace.surface().space().direction(0);
        let edge = kv
            .knots()
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let lo = coord.at(&trace.eval(&[w[0]]).expect("knot on face").x);
                let hi = coord.at(&trace.eval(&[w[1]]).expect("knot on face").x);
                (lo, hi)
            })
            .find(|&(lo, hi)| lo <= hertz.a && hertz.a <= hi)
            .map(|(lo, hi)| hi - lo);
        (extent, edge)
    } else {
        (None, None)
    };
    LevelSummary {
        level: sol.level,
        h: sol.h,
        num_dofs: sol.dofs.num_dofs(),
        num_multipliers: sol.basis.len(),
        num_active: sol.bundle.state.num_active(),
        complementarity: sol.bundle.state.complementarity(),
        peak_pressure,
        peak_coefficient,
        contact_extent,
        edge_element,
        iterations: sol.bundle.log.len(),
    }
}

fn write_outputs(out: &Path, report: &BenchmarkReport, reference: &LevelSolution, log: &str) -> Result<()> {
    let mut disp = String::from("h,L2_abs,H1_abs\n");
    let mut mult = String::from("h_mult_ana,L2_mult_abs_ana,h_mult_ref,L2_mult_abs_ref\n");
    for e in &report.errors {
        let _ = writeln!(disp, "{},{},{}", sci(e.h), sci(e.l2), sci(e.h1));
        let _ = writeln!(mult, "{},{},{},{}", sci(e.h_mult), sci(e.mult_analytic), sci(e.h_mult), sci(e.mult_reference));
    }
    fs::write(out.join("disp.csv"), disp)?;
    fs::write(out.join("mult.csv"), mult)?;

    let mut rates = format!("benchmark {}\n", report.benchmark);
    if let Some(r) = &report.rates {
        let _ = writeln!(rates, "L2_disp {:.4}", r.l2);
        let _ = writeln!(rates, "H1_disp {:.4}", r.h1);
        let _ = writeln!(rates, "L2_mult_ana {:.4}", r.mult_analytic);
        let _ = writeln!(rates, "L2_mult_ref {:.4}", r.mult_reference);
        let _ = writeln!(rates, "L2_mult_ana_last {:.4}", r.mult_analytic_last);
        let _ = writeln!(rates, "L2_mult_ref_last {:.4}", r.mult_reference_last);
    } else {
        rates.push_str("fewer than two reported meshes: no rates\n");
    }
    let _ = writeln!(rates, "contact_half_width {}", sci(report.hertz.a));
    let _ = writeln!(rates, "peak_pressure {}", sci(report.hertz.p0));
    fs::write(out.join("rates.txt"), rates)?;

    let mut prof = String::from("r_over_a,p_over_p0\n");
    for (r, p) in &report.profile {
        let _ = writeln!(prof, "{},{}", sci(*r), sci(*p));
    }
    fs::write(out.join("pressure_profile.csv"), prof)?;

    let mut lv = String::from(
        "level,h,dofs,multipliers,active,max_lambda,min_inactive_gap,max_complementarity,peak_pressure,peak_coefficient,contact_extent,edge_element,iterations\n",
    );
    let opt = |v: Option<f64>| v.map(sci).unwrap_or_else(|| "nan".into());
    for l in &report.levels {
        let (ml, mg, mc) = l.complementarity;
        let _ = writeln!(
            lv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            l.level,
            sci(l.h),
            l.num_dofs,
            l.num_multipliers,
            l.num_active,
            sci(ml),
            sci(mg),
            sci(mc),
            sci(l.peak_pressure),
            sci(l.peak_coefficient),
            opt(l.contact_extent),
            opt(l.edge_element),
            l.iterations
        );
    }
    fs::write(out.join("levels.csv"), lv)?;

    let mut state = Vec::new();
    reference.bundle.state.write_csv(reference.basis.measures(), &mut state)?;
    fs::write(out.join("contact_state.csv"), state)?;
    fs::write(out.join("solver_log.txt"), log)?;
    Ok(())
}

/// Inf-sup study on the bottom face of the unit square: `beta_h` per level.
#[derive(Debug, Clone, PartialEq)]
pub struct InfSupReport {
    pub rows: Vec<(f64, f64)>,
}

impl InfSupReport {
    /// `max beta / min beta`.
    pub fn ratio(&self) -> f64 {
        let max = self.rows.iter().map(|r| r.1).fold(0.0, f64::max);
        let min = self.rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        max / min
    }
}

pub fn run_infsup(cfg: &RunConfig) -> Result<InfSupReport> {
    cfg.validate()?;
    let quad = gauss_rule(cfg.quadrature_points())?;
    let base: Vec<f64> = (1..cfg.base_spans).map(|i| i as f64 / cfg.base_spans as f64).collect();
    let mut patch = identity_patch::<f64>(2, cfg.degree)?.insert_knots(0, &base)?.insert_knots(1, &base)?;
    let mut rows = Vec::with_capacity(cfg.levels);
    for level in 0..cfg.levels {
        if level > 0 {
            patch = patch.bisect()?;
        }
        let basis = MultiplierBasis::new(&patch, FaceId::new(1, false), [0.0, 1.0, 0.0], &quad)?;
        let (mu, ml, b) = trace_matrices(&basis);
        let beta = inf_sup_estimate(&mu, &ml, &b)?;
        rows.push((1.0 / (cfg.base_spans << level) as f64, beta));
    }
    let report = InfSupReport { rows };
    fs::create_dir_all(&cfg.out)?;
    let mut csv = String::from("h,beta\n");
    for (h, b) in &report.rows {
        let _ = writeln!(csv, "{},{}", sci(*h), sci(*b));
    }
    fs::write(cfg.out.join("infsup.csv"), csv)?;
    let mut rates = String::from("benchmark infsup\n");
    if report.rows.len() > 1 {
        let _ = writeln!(rates, "beta_ratio {:.6}", report.ratio());
    }
    fs::write(cfg.out.join("rates.txt"), rates)?;
    Ok(report)
}

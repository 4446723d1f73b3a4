use crate::assembly::{DofMap, QuadratureRule};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryTrace, FaceId, NurbsPatch};
use crate::small;
use crate::spline::{multiplier_space, TensorSpace};
use crate::sparse::CsrMatrix;

/// Quadrature point on the contact face.
#[derive(Debug, Clone)]
pub struct ContactPoint {
    /// Surface parameter.
    pub s: Vec<f64>,
    pub x: [f64; 3],
    /// Quadrature weight times surface measure.
    pub weight: f64,
    /// Volume basis indices and values of the displacement space.
    pub disp_basis: Vec<usize>,
    pub disp_values: Vec<f64>,
    /// Multiplier basis indices and values.
    pub mult_basis: Vec<usize>,
    pub mult_values: Vec<f64>,
}

/// Degree `p - 2` multiplier basis `B_K` on the contact face with the
/// basis measures `K_K = int B_K dGamma`.
#[derive(Debug, Clone)]
pub struct MultiplierBasis {
    trace: BoundaryTrace<f64>,
    space: TensorSpace<f64>,
    measures: Vec<f64>,
    points: Vec<ContactPoint>,
}

impl MultiplierBasis {
    pub fn new(patch: &NurbsPatch<f64>, face: FaceId, rigid_normal: [f64; 3], quad: &QuadratureRule<f64>) -> Result<Self> {
        let trace = BoundaryTrace::extract(patch, face, rigid_normal)?;
        let space = multiplier_space(trace.surface().space())?;
        let mut basis = MultiplierBasis { trace, space, measures: Vec::new(), points: Vec::new() };
        basis.points = basis.quadrature_points(quad)?;
        let mut measures = vec![0.0; basis.space.dimension()];
        for cp in &basis.points {
            for (&k, &b) in cp.mult_basis.iter().zip(&cp.mult_values) {
                measures[k] += b * cp.weight;
            }
        }
        if let Some(k) = measures.iter().position(|m| !(*m > 0.0)) {
            return Err(Error::DegenerateMultiplier(k));
        }
        basis.measures = measures;
        Ok(basis)
    }

    /// Quadrature points of `quad` on every element of the contact face.
    pub fn quadrature_points(&self, quad: &QuadratureRule<f64>) -> Result<Vec<ContactPoint>> {
        let surf = self.trace.surface().space();
        let pd = surf.param_dim();
        let mut out = Vec::new();
        for spans in surf.elements() {
            let mut lower = [0.0; 3];
            let mut upper = [0.0; 3];
            for d in 0..pd {
                let k = surf.direction(d).knots();
                lower[d] = k[spans[d]];
                upper[d] = k[spans[d] + 1];
            }
            for (s, w) in quad.element_points(&lower, &upper, pd) {
                let tp = self.trace.eval_at_spans(spans, &s)?;
                let mb = self.space.eval(&s, 0)?;
                let disp_basis = tp.basis.indices.iter().map(|&i| self.trace.volume_indices()[i]).collect();
                out.push(ContactPoint {
                    s,
                    x: tp.x,
                    weight: w * tp.measure,
                    disp_basis,
                    disp_values: tp.basis.values,
                    mult_basis: mb.indices,
                    mult_values: mb.values,
                });
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> &BoundaryTrace<f64> {
        &self.trace
    }

    pub fn space(&self) -> &TensorSpace<f64> {
        &self.space
    }

    /// Number of multiplier functions.
    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    /// `K_K = int B_K dGamma`.
    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn points(&self) -> &[ContactPoint] {
        &self.points
    }

    pub fn normal(&self) -> [f64; 3] {
        self.trace.normal()
    }

    /// `(Pi v)_K = int v B_K dGamma / K_K`.
    pub fn project(&self, v: impl Fn(&ContactPoint) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for cp in &self.points {
            let val = v(cp);
            for (&k, &b) in cp.mult_basis.iter().zip(&cp.mult_values) {
                out[k] += val * b * cp.weight;
            }
        }
        out.iter_mut().zip(&self.measures).for_each(|(o, m)| *o /= m);
        out
    }

    /// `sum_K coeffs_K B_K(s)`.
    pub fn eval(&self, coeffs: &[f64], s: &[f64]) -> Result<f64> {
        let ev = self.space.eval(s, 0)?;
        Ok(ev.indices.iter().zip(&ev.values).map(|(&k, &b)| coeffs[k] * b).sum())
    }

    /// Parametric support `[lo, hi]` of `B_K` along each surface direction.
    pub fn support(&self, k: usize) -> Vec<(f64, f64)> {
        let m = self.space.unflatten(k);
        (0..self.space.param_dim())
            .map(|d| {
                let kv = self.space.direction(d);
                let q = kv.degree();
                (kv.knots()[m[d]], kv.knots()[m[d] + q + 1])
            })
            .collect()
    }

    /// `int (X . n - offset) B_K dGamma` on the reference configuration.
    pub fn initial_gap_integrals(&self, plane_offset: f64) -> Vec<f64> {
        let n = self.normal();
        let mut g = self.project(|cp| small::dot(&cp.x, &n) - plane_offset);
        g.iter_mut().zip(&self.measures).for_each(|(v, m)| *v *= m);
        g
    }

    /// Multiplier mass (Gram) matrix `int B_K B_L dGamma`, dense.
    pub fn mass_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for cp in &self.points {
            for (&k, &bk) in cp.mult_basis.iter().zip(&cp.mult_values) {
                for (&l, &bl) in cp.mult_basis.iter().zip(&cp.mult_values) {
                    m[k][l] += bk * bl * cp.weight;
                }
            }
        }
        m
    }
}

/// `B[K, (A, c)] = int B_K N_A n_c dGamma` over the displacement dofs.
pub fn coupling_matrix(basis: &MultiplierBasis, dofs: &DofMap) -> CsrMatrix {
    let n = basis.normal();
    let dim = dofs.dim();
    let mut trip = Vec::new();
    for cp in basis.points() {
        for (&k, &bk) in cp.mult_basis.iter().zip(&cp.mult_values) {
            for (&a, &na) in cp.disp_basis.iter().zip(&cp.disp_values) {
                for (c, &nc) in n.iter().enumerate().take(dim) {
                    if nc != 0.0 {
                        trip.push((k, dofs.dof(a, c), bk * na * nc * cp.weight));
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(basis.len(), dofs.num_dofs(), &trip)
}

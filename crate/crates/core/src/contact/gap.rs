use crate::assembly::DofMap;
use crate::error::Result;
use crate::geometry::BoundaryTrace;
use crate::small;

use super::{ContactPoint, MultiplierBasis};

/// Normal gap `g = (x + u) . n - offset` between the contact face and the
/// rigid plane `{x . n = offset}`.
#[derive(Debug, Clone)]
pub struct GapField {
    trace: BoundaryTrace<f64>,
    /// Displacement per volume basis function.
    displacement: Vec<[f64; 3]>,
    normal: [f64; 3],
    offset: f64,
}

impl GapField {
    /// Gap of the undeformed body.
    pub fn new(trace: BoundaryTrace<f64>, n_basis: usize, plane_offset: f64) -> Self {
        let normal = trace.normal();
        GapField { trace, displacement: vec![[0.0; 3]; n_basis], normal, offset: plane_offset }
    }

    pub fn with_displacement(mut self, dofs: &DofMap, u: &[f64]) -> Self {
        self.displacement = dofs.basis_values(u);
        self
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn displacement_at(&self, basis: &[usize], values: &[f64]) -> [f64; 3] {
        let mut u = [0.0; 3];
        for (&a, &na) in basis.iter().zip(values) {
            for (uc, dc) in u.iter_mut().zip(&self.displacement[a]) {
                *uc += na * dc;
            }
        }
        u
    }

    /// Gap at a contact quadrature point.
    pub fn at_point(&self, cp: &ContactPoint) -> f64 {
        let u = self.displacement_at(&cp.disp_basis, &cp.disp_values);
        small::dot(&[cp.x[0] + u[0], cp.x[1] + u[1], cp.x[2] + u[2]], &self.normal) - self.offset
    }
}

/// Gap at the surface parameter `s`.
pub fn gap_value(gap: &GapField, s: &[f64]) -> Result<f64> {
    let tp = gap.trace.eval(s)?;
    let vol: Vec<usize> = tp.basis.indices.iter().map(|&i| gap.trace.volume_indices()[i]).collect();
    let u = gap.displacement_at(&vol, &tp.basis.values);
    Ok(small::dot(&[tp.x[0] + u[0], tp.x[1] + u[1], tp.x[2] + u[2]], &gap.normal) - gap.offset)
}

/// Weighted gaps `(Pi g)_K`.
pub fn weighted_gap(gap: &GapField, basis: &MultiplierBasis) -> Vec<f64> {
    basis.project(|cp| gap.at_point(cp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::gauss_rule;
    use crate::contact::coupling_matrix;
    use crate::geometry::quarter_disc;

    fn setup() -> (crate::geometry::BenchmarkDomain<f64>, crate::geometry::NurbsPatch<f64>, DofMap, MultiplierBasis) {
        let dom = quarter_disc::<f64>(1.0).unwrap();
        let p = dom.patch.bisect().unwrap().bisect().unwrap();
        let d = DofMap::new(&p);
        let b = MultiplierBasis::new(&p, dom.contact_face, dom.rigid_normal, &gauss_rule(4).unwrap()).unwrap();
        (dom, p, d, b)
    }

    #[test]
    fn circle_gaps() {
        let (dom, p, d, b) = setup();
        let g = GapField::new(b.trace().clone(), d.num_basis(), dom.plane_offset);
        assert!(gap_value(&g, &[0.0]).unwrap().abs() < 1e-15);
        // 45 degrees sits at the parameter midpoint of the symmetric arc
        let g45 = gap_value(&g, &[0.5]).unwrap();
        assert!((g45 - (1.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-14);
        // rigid translation by delta along -n
        let delta = 0.013;
        let u = d.interpolate(&p, |_| [0.0, -delta, 0.0]);
        let gu = g.clone().with_displacement(&d, &u);
        for s in [0.0, 0.2, 0.77, 1.0] {
            let diff = gap_value(&g, &[s]).unwrap() - gap_value(&gu, &[s]).unwrap();
            assert!((diff - delta).abs() < 1e-15);
        }
    }

    #[test]
    fn weighted_gap_is_affine_through_coupling() {
        let (dom, p, d, b) = setup();
        let u: Vec<f64> = (0..d.num_dofs()).map(|i| 1e-3 * (i as f64).sin()).collect();
        let g = GapField::new(b.trace().clone(), d.num_basis(), dom.plane_offset).with_displacement(&d, &u);
        let direct = weighted_gap(&g, &b);
        let bu = coupling_matrix(&b, &d).mul_vec(&u);
        let g0 = b.initial_gap_integrals(dom.plane_offset);
        for k in 0..b.len() {
            let via = (g0[k] + bu[k]) / b.measures()[k];
            assert!((via - direct[k]).abs() < 1e-15);
        }
        let _ = p;
    }
}

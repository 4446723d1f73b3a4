use crate::error::{Error, Result};
use crate::geometry::{BoundaryTrace, FaceId, NurbsPatch};
use crate::small;

use super::elasticity::for_each_element;
use super::{DofMap, QuadratureRule};

/// Surface load on one face.
pub enum Traction {
    /// Pressure `P` acting against the outward normal: `l = -P n`.
    Pressure(f64),
    /// Constant traction vector.
    Uniform([f64; 3]),
    /// Traction as a function of the physical point.
    Field(Box<dyn Fn([f64; 3]) -> [f64; 3] + Sync>),
}

/// Quadrature point on a face of the patch.
pub struct FacePoint {
    /// Volume basis indices and values.
    pub basis: Vec<usize>,
    pub values: Vec<f64>,
    pub x: [f64; 3],
    /// Outward unit normal of the body.
    pub normal: [f64; 3],
    /// Quadrature weight times surface measure.
    pub weight: f64,
}

/// All quadrature points of a face, element by element.
pub fn face_points(patch: &NurbsPatch<f64>, face: FaceId, quad: &QuadratureRule<f64>) -> Result<Vec<FacePoint>> {
    let dim = patch.dim();
    if face.dir >= dim {
        return Err(Error::InvalidFace(face.to_string()));
    }
    let trace = BoundaryTrace::extract(patch, face, [0.0, 1.0, 0.0])?;
    let surf = trace.surface().space();
    let sign = if face.high { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    for spans in surf.elements() {
        let mut lower = [0.0; 3];
        let mut upper = [0.0; 3];
        for d in 0..dim - 1 {
            let k = surf.direction(d).knots();
            lower[d] = k[spans[d]];
            upper[d] = k[spans[d] + 1];
        }
        for (s, w) in quad.element_points(&lower, &upper, dim - 1) {
            let tp = trace.eval_at_spans(spans, &s)?;
            let pp = patch.eval(&trace.volume_param(&s))?;
            let inv = small::inverse(dim, &pp.jac);
            let mut n = [0.0; 3];
            n[..dim].copy_from_slice(&inv[face.dir][..dim]);
            let len = small::norm(&n);
            if !(len.is_finite() && len > 0.0) || !(pp.det > 0.0) {
                return Err(Error::SingularJacobian { det: pp.det, point: trace.volume_param(&s) });
            }
            let normal = n.map(|c| sign * c / len);
            let basis = tp.basis.indices.iter().map(|&i| trace.volume_indices()[i]).collect();
            out.push(FacePoint { basis, values: tp.basis.values, x: tp.x, normal, weight: w * tp.measure });
        }
    }
    Ok(out)
}

/// Consistent load vector `L(v) = int f.v dOmega + sum int l.v dGamma`.
pub fn assemble_load(
    patch: &NurbsPatch<f64>,
    dofs: &DofMap,
    body: Option<&(dyn Fn([f64; 3]) -> [f64; 3] + Sync)>,
    tractions: &[(FaceId, Traction)],
    quad: &QuadratureRule<f64>,
) -> Result<Vec<f64>> {
    let dim = patch.dim();
    let mut f = vec![0.0; dofs.num_dofs()];
    if let Some(body) = body {
        for_each_element(
            patch,
            quad,
            |basis, points| {
                let mut local = vec![0.0; basis.len() * dim];
                for q in points {
                    let b = body(q.x);
                    for (a, &na) in q.values.iter().enumerate() {
                        for c in 0..dim {
                            local[a * dim + c] += b[c] * na * q.weight;
                        }
                    }
                }
                Ok((dofs.element_dofs(basis), local))
            },
            |(ld, local)| {
                for (g, v) in ld.into_iter().zip(local) {
                    f[g] += v;
                }
                Ok(())
            },
        )?;
    }
    for (face, traction) in tractions {
        for fp in face_points(patch, *face, quad)? {
            let l = match traction {
                Traction::Pressure(p) => fp.normal.map(|c| -p * c),
                Traction::Uniform(v) => *v,
                Traction::Field(g) => g(fp.x),
            };
            for (&b, &nb) in fp.basis.iter().zip(&fp.values) {
                for c in 0..dim {
                    f[dofs.dof(b, c)] += l[c] * nb * fp.weight;
                }
            }
        }
    }
    Ok(f)
}

/// Total force per component carried by a load vector.
pub fn total_force(dofs: &DofMap, f: &[f64]) -> [f64; 3] {
    let mut t = [0.0; 3];
    for (i, v) in f.iter().enumerate() {
        t[i % dofs.dim()] += v;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::gauss_rule;
    use crate::geometry::{identity_patch, quarter_disc, sphere_octant};

    #[test]
    fn pressure_on_flat_top() {
        let p = identity_patch::<f64>(2, 2).unwrap().bisect().unwrap();
        let d = DofMap::new(&p);
        let f = assemble_load(&p, &d, None, &[(FaceId::new(1, true), Traction::Pressure(2.5))], &gauss_rule(3).unwrap()).unwrap();
        let t = total_force(&d, &f);
        assert!((t[1] + 2.5).abs() < 1e-12 && t[0].abs() < 1e-14);
    }

    #[test]
    fn zero_data_gives_zero_load() {
        let p = identity_patch::<f64>(3, 2).unwrap();
        let d = DofMap::new(&p);
        let zero = |_: [f64; 3]| [0.0; 3];
        let f = assemble_load(&p, &d, Some(&zero), &[(FaceId::new(0, false), Traction::Uniform([0.0; 3]))], &gauss_rule(3).unwrap())
            .unwrap();
        assert!(f.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn quarter_disc_top_load() {
        let dom = quarter_disc::<f64>(1.0).unwrap();
        let p = dom.patch.bisect().unwrap();
        let d = DofMap::new(&p);
        let f = assemble_load(&p, &d, None, &[(dom.load_face, Traction::Pressure(0.003))], &gauss_rule(3).unwrap()).unwrap();
        let t = total_force(&d, &f);
        assert!((t[1] + 0.003).abs() < 1e-10, "{t:?}");
        assert!(t[0].abs() < 1e-14);
    }

    #[test]
    fn octant_top_load_is_quarter_disc_area() {
        let dom = sphere_octant::<f64>(1.0).unwrap();
        let p = dom.patch.bisect().unwrap();
        let d = DofMap::new(&p);
        let f = assemble_load(&p, &d, None, &[(dom.load_face, Traction::Pressure(1.0))], &gauss_rule(4).unwrap()).unwrap();
        let t = total_force(&d, &f);
        assert!((t[1] + std::f64::consts::FRAC_PI_4).abs() < 1e-6, "{t:?}");
    }

    #[test]
    fn body_force_total() {
        let p = quarter_disc::<f64>(2.0).unwrap().patch.bisect().unwrap();
        let d = DofMap::new(&p);
        let g = |_: [f64; 3]| [0.0, -1.0, 0.0];
        let f = assemble_load(&p, &d, Some(&g), &[], &gauss_rule(4).unwrap()).unwrap();
        let t = total_force(&d, &f)[1];
        assert!((t + std::f64::consts::PI).abs() < 1e-6, "{t}");
    }

    #[test]
    fn unknown_face() {
        let p = identity_patch::<f64>(2, 2).unwrap();
        let d = DofMap::new(&p);
        assert!(matches!(
            assemble_load(&p, &d, None, &[(FaceId::new(2, true), Traction::Pressure(1.0))], &gauss_rule(3).unwrap()),
            Err(Error::InvalidFace(_))
        ));
    }
}

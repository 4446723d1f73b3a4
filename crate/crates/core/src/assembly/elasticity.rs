use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::NurbsPatch;
use crate::small;
use crate::sparse::CsrMatrix;

use super::{DofMap, LinearMaterial, QuadratureRule};

/// Assembled linear system together with its dof layout and constraints.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub stiffness: CsrMatrix,
    pub load: Vec<f64>,
    pub dofs: DofMap,
    /// Prescribed values, keyed by global dof.
    pub constrained: std::collections::BTreeMap<usize, f64>,
}

/// Basis data at one volume quadrature point, gradients in physical space.
#[derive(Debug, Clone)]
pub struct QPoint {
    pub zeta: Vec<f64>,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 3]>,
    pub x: [f64; 3],
    /// Quadrature weight times Jacobian determinant.
    pub weight: f64,
}

const CHUNK: usize = 256;

/// Runs `kernel` on every element (in parallel, chunk by chunk) and hands
/// the results to `sink` in element order.
pub fn for_each_element<R, F, S>(patch: &NurbsPatch<f64>, quad: &QuadratureRule<f64>, kernel: F, mut sink: S) -> Result<()>
where
    R: Send,
    F: Fn(&[usize], &[QPoint]) -> Result<R> + Sync,
    S: FnMut(R) -> Result<()>,
{
    let dim = patch.dim();
    let tensor = patch.tensor();
    let elements = tensor.elements();
    for chunk in elements.chunks(CHUNK) {
        let results: Vec<Result<R>> = chunk
            .par_iter()
            .map(|&spans| {
                let mut lower = [0.0; 3];
                let mut upper = [0.0; 3];
                for d in 0..dim {
                    let k = tensor.direction(d).knots();
                    lower[d] = k[spans[d]];
                    upper[d] = k[spans[d] + 1];
                }
                let mut basis = Vec::new();
                let mut points = Vec::with_capacity(quad.len().pow(dim as u32));
                for (zeta, w) in quad.element_points(&lower, &upper, dim) {
                    let pp = patch.eval_at_spans(spans, &zeta)?;
                    if !(pp.det > 0.0) {
                        return Err(Error::SingularJacobian { det: pp.det, point: zeta.clone() });
                    }
                    let inv = small::inverse(dim, &pp.jac);
                    let grads = pp
                        .basis
                        .grads
                        .iter()
                        .map(|g| {
                            let mut gx = [0.0; 3];
                            for (i, gxi) in gx.iter_mut().enumerate().take(dim) {
                                for j in 0..dim {
                                    *gxi += g[j] * inv[j][i];
                                }
                            }
                            gx
                        })
                        .collect();
                    if basis.is_empty() {
                        basis = pp.basis.indices.clone();
                    }
                    points.push(QPoint { values: pp.basis.values, grads, x: pp.x, weight: w * pp.det, zeta });
                }
                kernel(&basis, &points)
            })
            .collect();
        for r in results {
            sink(r?)?;
        }
    }
    Ok(())
}

/// Node-to-node coupling through shared elements (self loops excluded).
pub fn node_adjacency(patch: &NurbsPatch<f64>, dofs: &DofMap) -> Vec<Vec<usize>> {
    let tensor = patch.tensor();
    let dim = patch.dim();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); dofs.num_nodes()];
    for spans in tensor.elements() {
        let nodes: Vec<usize> = element_basis(tensor, dim, spans).into_iter().map(|b| dofs.node(b)).collect();
        for &a in &nodes {
            let v = &mut adj[a];
            v.extend(nodes.iter().copied().filter(|&b| b != a));
            if v.len() > 1024 {
                v.sort_unstable();
                v.dedup();
            }
        }
    }
    for v in adj.iter_mut() {
        v.sort_unstable();
        v.dedup();
    }
    adj
}

/// Volume basis functions supported on the element with the given spans.
pub fn element_basis(tensor: &crate::spline::TensorSpace<f64>, dim: usize, spans: [usize; 3]) -> Vec<usize> {
    let mut ranges = [(0usize, 1usize); 3];
    for (d, r) in ranges.iter_mut().enumerate().take(dim) {
        let p = tensor.direction(d).degree();
        *r = (spans[d] - p, p + 1);
    }
    let mut out = Vec::new();
    for c in 0..ranges[2].1 {
        for b in 0..ranges[1].1 {
            for a in 0..ranges[0].1 {
                out.push(tensor.flatten([ranges[0].0 + a, ranges[1].0 + b, ranges[2].0 + c]));
            }
        }
    }
    out
}

/// Zero matrix with the dof-level pattern of the stiffness.
pub fn stiffness_pattern(patch: &NurbsPatch<f64>, dofs: &DofMap) -> CsrMatrix {
    let dim = dofs.dim();
    let adj = node_adjacency(patch, dofs);
    let mut rows = Vec::with_capacity(dofs.num_dofs());
    for (n, nb) in adj.iter().enumerate() {
        let mut cols: Vec<usize> = Vec::with_capacity((nb.len() + 1) * dim);
        let mut nodes = nb.clone();
        nodes.push(n);
        nodes.sort_unstable();
        for m in nodes {
            cols.extend(m * dim..m * dim + dim);
        }
        for _ in 0..dim {
            rows.push(cols.clone());
        }
    }
    CsrMatrix::from_pattern(dofs.num_dofs(), rows)
}

/// Fills the blocks `(b, a)`, `b > a`, from the transposed blocks `(a, b)`
/// and symmetrizes the diagonal blocks, so local matrices are exactly symmetric.
pub(crate) fn mirror_blocks(local: &mut [f64], nb: usize, dim: usize) {
    let nl = nb * dim;
    for a in 0..nb {
        for b in a..nb {
            for i in 0..dim {
                for k in 0..dim {
                    let (r, c) = (a * dim + i, b * dim + k);
                    if a == b && k <= i {
                        continue;
                    }
                    let v = if a == b { 0.5 * (local[r * nl + c] + local[c * nl + r]) } else { local[r * nl + c] };
                    local[r * nl + c] = v;
                    local[c * nl + r] = v;
                }
            }
        }
    }
}

/// Scatters a dense local matrix (row-major over `ldofs`) into `k`.
pub(crate) fn scatter(k: &mut CsrMatrix, ldofs: &[usize], local: &[f64]) {
    let n = ldofs.len();
    for (a, &ra) in ldofs.iter().enumerate() {
        for (b, &cb) in ldofs.iter().enumerate() {
            let v = local[a * n + b];
            if v != 0.0 {
                k.add(ra, cb, v);
            }
        }
    }
}

/// Linear-elastic stiffness `a(u, v)` with a zero load vector.
pub fn assemble_stiffness(patch: &NurbsPatch<f64>, dofs: &DofMap, mat: &LinearMaterial, quad: &QuadratureRule<f64>) -> Result<GlobalSystem> {
    let dim = patch.dim();
    let (mu, lambda) = mat.lame();
    let mut k = stiffness_pattern(patch, dofs);
    for_each_element(
        patch,
        quad,
        |basis, points| {
            let nl = basis.len() * dim;
            let mut local = vec![0.0; nl * nl];
            for q in points {
                for (a, ga) in q.grads.iter().enumerate() {
                    for (b, gb) in q.grads.iter().enumerate().skip(a) {
                        let gg: f64 = (0..dim).map(|t| ga[t] * gb[t]).sum();
                        for i in 0..dim {
                            let row = (a * dim + i) * nl + b * dim;
                            for kk in 0..dim {
                                let mut v = lambda * ga[i] * gb[kk] + mu * ga[kk] * gb[i];
                                if i == kk {
                                    v += mu * gg;
                                }
                                local[row + kk] += v * q.weight;
                            }
                        }
                    }
                }
            }
            mirror_blocks(&mut local, basis.len(), dim);
            Ok((dofs.element_dofs(basis), local))
        },
        |(ld, local)| {
            scatter(&mut k, &ld, &local);
            Ok(())
        },
    )?;
    Ok(GlobalSystem { stiffness: k, load: vec![0.0; dofs.num_dofs()], dofs: dofs.clone(), constrained: Default::default() })
}

/// Strain energy density integrated over the patch: `a(u, u) / 2`.
pub fn strain_energy(k: &CsrMatrix, u: &[f64]) -> f64 {
    0.5 * k.mul_vec(u).iter().zip(u).map(|(a, b)| a * b).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::gauss_rule;
    use crate::geometry::{identity_patch, quarter_disc, sphere_octant};

    fn rel_norm(v: &[f64], scale: f64) -> f64 {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs())) / scale
    }

    fn rigid_modes(dim: usize) -> Vec<Box<dyn Fn([f64; 3]) -> [f64; 3]>> {
        let mut out: Vec<Box<dyn Fn([f64; 3]) -> [f64; 3]>> = Vec::new();
        for c in 0..dim {
            out.push(Box::new(move |_| {
                let mut v = [0.0; 3];
                v[c] = 1.0;
                v
            }));
        }
        out.push(Box::new(|x| [-x[1], x[0], 0.0]));
        if dim == 3 {
            out.push(Box::new(|x| [0.0, -x[2], x[1]]));
            out.push(Box::new(|x| [x[2], 0.0, -x[0]]));
        }
        out
    }

    #[test]
    fn rigid_modes_are_in_the_kernel() {
        let q = quarter_disc::<f64>(1.0).unwrap().patch.bisect().unwrap().bisect().unwrap();
        let o = sphere_octant::<f64>(1.0).unwrap().patch.bisect().unwrap();
        let mat = LinearMaterial::new(1.0, 0.3).unwrap();
        for p in [q, o] {
            let d = DofMap::new(&p);
            let rule = gauss_rule(3).unwrap();
            let sys = assemble_stiffness(&p, &d, &mat, &rule).unwrap();
            assert!(sys.stiffness.asymmetry() <= 1e-12 * sys.stiffness.max_abs());
            for mode in rigid_modes(p.dim()) {
                let u = d.interpolate(&p, &mode);
                let ku = sys.stiffness.mul_vec(&u);
                assert!(rel_norm(&ku, sys.stiffness.max_abs()) < 1e-10);
            }
        }
    }

    #[test]
    fn uniaxial_strain_energy() {
        let p = identity_patch::<f64>(2, 2).unwrap().bisect().unwrap();
        let d = DofMap::new(&p);
        let mat = LinearMaterial::new(3.0, 0.25).unwrap();
        let sys = assemble_stiffness(&p, &d, &mat, &gauss_rule(3).unwrap()).unwrap();
        let u = d.interpolate(&p, |x| [x[0], 0.0, 0.0]);
        let (mu, la) = mat.lame();
        let auu = 2.0 * strain_energy(&sys.stiffness, &u);
        assert!((auu - (la + 2.0 * mu)).abs() < 1e-12, "{auu}");
    }

    #[test]
    fn energy_is_nonnegative() {
        let p = quarter_disc::<f64>(1.0).unwrap().patch.bisect().unwrap();
        let d = DofMap::new(&p);
        let sys = assemble_stiffness(&p, &d, &LinearMaterial::new(1.0, 0.3).unwrap(), &gauss_rule(3).unwrap()).unwrap();
        for s in 0..5 {
            let u: Vec<f64> = (0..d.num_dofs()).map(|i| ((i * 7 + s * 13) as f64 * 0.61).sin()).collect();
            assert!(strain_energy(&sys.stiffness, &u) >= 0.0);
        }
    }
}

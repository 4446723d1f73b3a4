use crate::geometry::NurbsPatch;
use crate::scalar::Real;
use crate::small;

/// Map between (basis function, component) pairs and global unknowns.
///
/// Basis functions whose control points coincide (collapsed faces of a
/// degenerate patch) share one node, which keeps the discrete field
/// single-valued there. Node `n` owns dofs `n * dim .. n * dim + dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    dim: usize,
    node_of_basis: Vec<usize>,
    n_nodes: usize,
}

impl DofMap {
    /// One node per basis function.
    pub fn unmerged(n_basis: usize, dim: usize) -> Self {
        DofMap { dim, node_of_basis: (0..n_basis).collect(), n_nodes: n_basis }
    }

    /// Merges basis functions with coincident control points
    /// (within `1e-10` of the bounding-box diagonal).
    pub fn new<T: Real>(patch: &NurbsPatch<T>) -> Self {
        let cps: Vec<[f64; 3]> = patch.control_points().iter().map(|p| [p[0].as_f64(), p[1].as_f64(), p[2].as_f64()]).collect();
        let n = cps.len();
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &cps {
            for c in 0..3 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        let tol = 1e-10 * small::distance(&lo, &hi).max(f64::MIN_POSITIVE);
        let mut sorted: Vec<usize> = (0..n).collect();
        sorted.sort_by(|&a, &b| cps[a][0].total_cmp(&cps[b][0]).then(a.cmp(&b)));
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (k, &a) in sorted.iter().enumerate() {
            for &b in &sorted[k + 1..] {
                if cps[b][0] - cps[a][0] > tol {
                    break;
                }
                if (0..3).all(|c| (cps[a][c] - cps[b][c]).abs() <= tol) {
                    let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let mut node_of_root = vec![usize::MAX; n];
        let mut node_of_basis = vec![0; n];
        let mut n_nodes = 0;
        for i in 0..n {
            let r = root(&mut parent, i);
            if node_of_root[r] == usize::MAX {
                node_of_root[r] = n_nodes;
                n_nodes += 1;
            }
            node_of_basis[i] = node_of_root[r];
        }
        DofMap { dim: patch.dim(), node_of_basis, n_nodes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_basis(&self) -> usize {
        self.node_of_basis.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn num_dofs(&self) -> usize {
        self.n_nodes * self.dim
    }

    pub fn node(&self, basis: usize) -> usize {
        self.node_of_basis[basis]
    }

    pub fn dof(&self, basis: usize, comp: usize) -> usize {
        self.node_of_basis[basis] * self.dim + comp
    }

    /// Global dofs of a list of basis functions, basis-major.
    pub fn element_dofs(&self, basis: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(basis.len() * self.dim);
        for &b in basis {
            for c in 0..self.dim {
                out.push(self.dof(b, c));
            }
        }
        out
    }

    /// Per-basis displacement vectors from a global coefficient vector.
    pub fn basis_values(&self, u: &[f64]) -> Vec<[f64; 3]> {
        self.node_of_basis
            .iter()
            .map(|&n| {
                let mut v = [0.0; 3];
                v[..self.dim].copy_from_slice(&u[n * self.dim..n * self.dim + self.dim]);
                v
            })
            .collect()
    }

    /// Global vector interpolating `f` at the control points (exact for
    /// fields that are affine in the physical coordinates).
    pub fn interpolate<T: Real>(&self, patch: &NurbsPatch<T>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Vec<f64> {
        let mut u = vec![0.0; self.num_dofs()];
        for (b, p) in patch.control_points().iter().enumerate() {
            let v = f([p[0].as_f64(), p[1].as_f64(), p[2].as_f64()]);
            for c in 0..self.dim {
                u[self.dof(b, c)] = v[c];
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{identity_patch, quarter_disc, sphere_octant};

    #[test]
    fn identity_patch_has_no_merges() {
        let p = identity_patch::<f64>(2, 2).unwrap().bisect().unwrap();
        let d = DofMap::new(&p);
        assert_eq!(d.num_nodes(), p.control_points().len());
        assert_eq!(d.num_dofs(), 2 * 16);
        assert_eq!(d.dof(3, 1), 7);
    }

    #[test]
    fn collapsed_faces_share_nodes() {
        let q = quarter_disc::<f64>(1.0).unwrap().patch.bisect().unwrap();
        let d = DofMap::new(&q);
        // the last row of control points (zeta_1 = 1) collapses onto the centre
        let shape = q.tensor().shape();
        assert_eq!(d.num_nodes(), shape[0] * (shape[1] - 1) + 1);
        let o = sphere_octant::<f64>(1.0).unwrap().patch;
        let d = DofMap::new(&o);
        // 27 control points; centre layer (9) -> 1, edge zeta_1 = 1 (3 per layer, 2 layers) -> 1 per layer
        assert_eq!(d.num_nodes(), 27 - 8 - 2 * 2);
    }
}

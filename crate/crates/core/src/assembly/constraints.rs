use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{face_indices, FaceId, NurbsPatch};
use crate::sparse::CsrMatrix;

use super::{DofMap, GlobalSystem};

/// Fixes component `comp` of every control point on `face` to `value`.
pub fn face_constraints(patch: &NurbsPatch<f64>, dofs: &DofMap, face: FaceId, comp: usize, value: f64) -> Result<Vec<(usize, f64)>> {
    if face.dir >= patch.dim() {
        return Err(Error::InvalidFace(face.to_string()));
    }
    if comp >= patch.dim() {
        return Err(Error::InvalidArgument(format!("component {comp}")));
    }
    Ok(face_indices(patch.tensor(), face).into_iter().map(|b| (dofs.dof(b, comp), value)).collect())
}

/// Merges constraint lists; repeated dofs must agree.
pub fn merge_constraints(list: &[(usize, f64)]) -> Result<BTreeMap<usize, f64>> {
    let mut out = BTreeMap::new();
    for &(dof, v) in list {
        if let Some(&old) = out.get(&dof) {
            if old != v {
                return Err(Error::ContradictoryConstraint { dof, first: old, second: v });
            }
        }
        out.insert(dof, v);
    }
    Ok(out)
}

/// Symmetric elimination in place: constrained rows and columns become
/// unit vectors, the right-hand side picks up `-K[:, c] * value`.
pub fn eliminate(k: &mut CsrMatrix, f: &mut [f64], constrained: &BTreeMap<usize, f64>) {
    let n = k.n_rows();
    let mut fixed = vec![None; n];
    for (&d, &v) in constrained {
        fixed[d] = Some(v);
    }
    let rp = k.row_ptr().to_vec();
    let ci = k.col_idx().to_vec();
    let vals = k.values_mut();
    for r in 0..n {
        match fixed[r] {
            Some(vr) => {
                for p in rp[r]..rp[r + 1] {
                    vals[p] = if ci[p] == r { 1.0 } else { 0.0 };
                }
                f[r] = vr;
            }
            None => {
                for p in rp[r]..rp[r + 1] {
                    if let Some(vc) = fixed[ci[p]] {
                        f[r] -= vals[p] * vc;
                        vals[p] = 0.0;
                    }
                }
            }
        }
    }
}

/// Applies Dirichlet constraints to an assembled system.
pub fn apply_constraints(sys: &mut GlobalSystem, constraints: &[(usize, f64)]) -> Result<()> {
    let n = sys.dofs.num_dofs();
    if let Some(&(d, _)) = constraints.iter().find(|(d, _)| *d >= n) {
        return Err(Error::InvalidArgument(format!("constrained dof {d} out of range")));
    }
    let mut all: Vec<(usize, f64)> = sys.constrained.iter().map(|(&d, &v)| (d, v)).collect();
    all.extend_from_slice(constraints);
    let merged = merge_constraints(&all)?;
    eliminate(&mut sys.stiffness, &mut sys.load, &merged);
    sys.constrained = merged;
    Ok(())
}

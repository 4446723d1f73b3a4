use nalgebra::{DMatrix, SymmetricEigen};

use crate::contact::MultiplierBasis;
use crate::error::{Error, Result};

/// Dense scalar trace mass `M_u`, multiplier mass `M_lambda` and coupling
/// `B[K, A] = int B_K N_A dGamma` over the contact face.
pub fn trace_matrices(basis: &MultiplierBasis) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let vol = basis.trace().volume_indices();
    let n_u = vol.len();
    let mut local = std::collections::HashMap::new();
    for (i, &v) in vol.iter().enumerate() {
        local.insert(v, i);
    }
    let n_l = basis.len();
    let mut mu = DMatrix::zeros(n_u, n_u);
    let mut b = DMatrix::zeros(n_l, n_u);
    for cp in basis.points() {
        let idx: Vec<usize> = cp.disp_basis.iter().map(|v| local[v]).collect();
        for (a, &na) in idx.iter().zip(&cp.disp_values) {
            for (c, &nc) in idx.iter().zip(&cp.disp_values) {
                mu[(*a, *c)] += na * nc * cp.weight;
            }
            for (&k, &bk) in cp.mult_basis.iter().zip(&cp.mult_values) {
                b[(k, *a)] += bk * na * cp.weight;
            }
        }
    }
    let ml = DMatrix::from_fn(n_l, n_l, |i, j| basis.mass_matrix()[i][j]);
    (mu, ml, b)
}

/// `beta_h`: square root of the smallest non-zero eigenvalue of
/// `M_lambda^{-1/2} B M_u^{-1} B^T M_lambda^{-1/2}`.
pub fn inf_sup_estimate(mass_u: &DMatrix<f64>, mass_lambda: &DMatrix<f64>, coupling: &DMatrix<f64>) -> Result<f64> {
    let lu = mass_u.clone().cholesky().ok_or_else(|| Error::Eigensolve("trace mass matrix is not positive definite".into()))?;
    let ll = mass_lambda
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Eigensolve("multiplier mass matrix is not positive definite".into()))?;
    // S = L^{-1} B M_u^{-1} B^T L^{-T}
    let x = lu.solve(&coupling.transpose());
    let inner = coupling * x;
    let l = ll.l();
    let y = l
        .solve_lower_triangular(&inner)
        .ok_or_else(|| Error::Eigensolve("triangular solve failed".into()))?;
    let s = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::Eigensolve("triangular solve failed".into()))?;
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
    if !(max > 0.0) {
        return Err(Error::Eigensolve("coupling operator vanishes".into()));
    }
    let min = eig.eigenvalues.iter().copied().filter(|v| *v > 1e-12 * max).fold(f64::INFINITY, f64::min);
    Ok(min.sqrt())
}

use crate::error::{Error, Result};
use crate::geometry::NurbsPatch;
use crate::small::{self, Mat3};
use crate::sparse::CsrMatrix;

use super::elasticity::{for_each_element, mirror_blocks, scatter, stiffness_pattern, QPoint};
use super::{DofMap, NeoHookeanMaterial, QuadratureRule};

fn deformation_gradient(dim: usize, q: &QPoint, ue: &[[f64; 3]]) -> Mat3<f64> {
    let mut f = small::identity(dim);
    for (g, u) in q.grads.iter().zip(ue) {
        for i in 0..dim {
            for j in 0..dim {
                f[i][j] += u[i] * g[j];
            }
        }
    }
    f
}

fn local_displacements(dofs: &DofMap, basis: &[usize], u: &[f64]) -> Vec<[f64; 3]> {
    let dim = dofs.dim();
    basis
        .iter()
        .map(|&b| {
            let mut v = [0.0; 3];
            for (c, vc) in v.iter_mut().enumerate().take(dim) {
                *vc = u[dofs.dof(b, c)];
            }
            v
        })
        .collect()
}

/// Internal force vector and consistent tangent of the Neo-Hookean energy at
/// the displacement coefficients `u`.
pub fn neo_hookean_forces(
    patch: &NurbsPatch<f64>,
    dofs: &DofMap,
    mat: &NeoHookeanMaterial,
    u: &[f64],
    quad: &QuadratureRule<f64>,
) -> Result<(Vec<f64>, CsrMatrix)> {
    let dim = patch.dim();
    let (mu, lambda) = mat.lame();
    let mut k = stiffness_pattern(patch, dofs);
    let mut r = vec![0.0; dofs.num_dofs()];
    for_each_element(
        patch,
        quad,
        |basis, points| {
            let ue = local_displacements(dofs, basis, u);
            let nb = basis.len();
            let nl = nb * dim;
            let mut kl = vec![0.0; nl * nl];
            let mut rl = vec![0.0; nl];
            let mut qa = vec![[0.0; 3]; nb];
            let mut fa = vec![[0.0; 3]; nb];
            for q in points {
                let f = deformation_gradient(dim, q, &ue);
                let j = small::det(dim, &f);
                if !(j > 0.0) {
                    return Err(Error::ElementInversion(j));
                }
                let finv = small::inverse(dim, &f);
                let lnj = j.ln();
                let c2 = mu - lambda * lnj;
                for a in 0..nb {
                    let g = &q.grads[a];
                    for i in 0..dim {
                        qa[a][i] = (0..dim).map(|jj| finv[jj][i] * g[jj]).sum();
                        fa[a][i] = (0..dim).map(|jj| f[i][jj] * g[jj]).sum();
                    }
                }
                let w = q.weight;
                for a in 0..nb {
                    for i in 0..dim {
                        rl[a * dim + i] += (mu * (fa[a][i] - qa[a][i]) + lambda * lnj * qa[a][i]) * w;
                    }
                    for b in a..nb {
                        let gg: f64 = (0..dim).map(|t| q.grads[a][t] * q.grads[b][t]).sum();
                        for i in 0..dim {
                            let row = (a * dim + i) * nl + b * dim;
                            for kk in 0..dim {
                                let mut v = c2 * qa[b][i] * qa[a][kk] + lambda * qa[a][i] * qa[b][kk];
                                if i == kk {
                                    v += mu * gg;
                                }
                                kl[row + kk] += v * w;
                            }
                        }
                    }
                }
            }
            mirror_blocks(&mut kl, nb, dim);
            Ok((dofs.element_dofs(basis), rl, kl))
        },
        |(ld, rl, kl)| {
            for (&g, v) in ld.iter().zip(&rl) {
                r[g] += v;
            }
            scatter(&mut k, &ld, &kl);
            Ok(())
        },
    )?;
    Ok((r, k))
}

/// Total stored energy `int W(F) dOmega`.
pub fn stored_energy(patch: &NurbsPatch<f64>, dofs: &DofMap, mat: &NeoHookeanMaterial, u: &[f64], quad: &QuadratureRule<f64>) -> Result<f64> {
    let dim = patch.dim();
    let mut total = 0.0;
    for_each_element(
        patch,
        quad,
        |basis, points| {
            let ue = local_displacements(dofs, basis, u);
            let mut e = 0.0;
            for q in points {
                e += mat.energy_density(dim, &deformation_gradient(dim, q, &ue))? * q.weight;
            }
            Ok(e)
        },
        |e| {
            total += e;
            Ok(())
        },
    )?;
    Ok(total)
}

/// Deformation gradient determinant at every volume quadrature point.
pub fn min_jacobian(patch: &NurbsPatch<f64>, dofs: &DofMap, u: &[f64], quad: &QuadratureRule<f64>) -> Result<f64> {
    let dim = patch.dim();
    let mut m = f64::INFINITY;
    for_each_element(
        patch,
        quad,
        |basis, points| {
            let ue = local_displacements(dofs, basis, u);
            Ok(points.iter().map(|q| small::det(dim, &deformation_gradient(dim, q, &ue))).fold(f64::INFINITY, f64::min))
        },
        |v| {
            m = m.min(v);
            Ok(())
        },
    )?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_stiffness, gauss_rule};
    use crate::geometry::{identity_patch, quarter_disc, sphere_octant};

    fn patches() -> Vec<NurbsPatch<f64>> {
        vec![quarter_disc::<f64>(1.0).unwrap().patch.bisect().unwrap(), sphere_octant::<f64>(1.0).unwrap().patch]
    }

    #[test]
    fn identity_state_matches_linear_elasticity() {
        let mat = NeoHookeanMaterial::new(2.0, 0.3).unwrap();
        for p in patches() {
            let d = DofMap::new(&p);
            let rule = gauss_rule(3).unwrap();
            let (r, kt) = neo_hookean_forces(&p, &d, &mat, &vec![0.0; d.num_dofs()], &rule).unwrap();
            assert!(r.iter().all(|v| v.abs() < 1e-14));
            let kl = assemble_stiffness(&p, &d, &mat.linearized(), &rule).unwrap().stiffness;
            let diff = kt.values().iter().zip(kl.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(diff <= 1e-8 * kl.max_abs());
        }
    }

    fn pseudo_random(n: usize, seed: usize, amp: f64) -> Vec<f64> {
        (0..n).map(|i| amp * (((i + 1) * 2654435761usize + seed * 97) as f64 * 1e-3).sin()).collect()
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let mat = NeoHookeanMaterial::new(1.0, 0.3).unwrap();
        for p in patches() {
            let d = DofMap::new(&p);
            let rule = gauss_rule(3).unwrap();
            let u = pseudo_random(d.num_dofs(), 1, 0.02);
            let du = pseudo_random(d.num_dofs(), 2, 1.0);
            let (r0, kt) = neo_hookean_forces(&p, &d, &mat, &u, &rule).unwrap();
            let h = 1e-7;
            let up: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + h * b).collect();
            let um: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a - h * b).collect();
            let (rp, _) = neo_hookean_forces(&p, &d, &mat, &up, &rule).unwrap();
            let (rm, _) = neo_hookean_forces(&p, &d, &mat, &um, &rule).unwrap();
            let kdu = kt.mul_vec(&du);
            let fd: Vec<f64> = rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            let scale = kdu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = kdu.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err <= 5e-6 * scale, "{err} vs {scale}");
            assert!(kt.asymmetry() <= 1e-12 * kt.max_abs());
            assert!(r0.iter().any(|v| *v != 0.0));
        }
    }

    #[test]
    fn force_is_energy_gradient() {
        let mat = NeoHookeanMaterial::new(1.0, 0.25).unwrap();
        let p = quarter_disc::<f64>(1.0).unwrap().patch.bisect().unwrap();
        let d = DofMap::new(&p);
        let rule = gauss_rule(3).unwrap();
        let u = pseudo_random(d.num_dofs(), 3, 0.03);
        let du = pseudo_random(d.num_dofs(), 4, 1.0);
        let (r, _) = neo_hookean_forces(&p, &d, &mat, &u, &rule).unwrap();
        let h = 1e-6;
        let shift = |s: f64| u.iter().zip(&du).map(|(a, b)| a + s * b).collect::<Vec<_>>();
        let fd = (stored_energy(&p, &d, &mat, &shift(h), &rule).unwrap() - stored_energy(&p, &d, &mat, &shift(-h), &rule).unwrap())
            / (2.0 * h);
        let exact: f64 = r.iter().zip(&du).map(|(a, b)| a * b).sum();
        assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "{fd} vs {exact}");
    }

    #[test]
    fn dilation_stress_trace_is_linear_to_second_order() {
        // u = alpha x on the unit square: P = (mu (1+a) - mu/(1+a) + lambda ln J/(1+a)) I
        let mat = NeoHookeanMaterial::new(1.0, 0.3).unwrap();
        let (mu, la) = mat.lame();
        for alpha in [1e-2f64, 5e-3, 2.5e-3] {
            let s = 1.0 + alpha;
            let lnj = 2.0 * s.ln();
            let p11 = mu * (s - 1.0 / s) + la * lnj / s;
            let linear = 2.0 * mu * alpha + 2.0 * la * alpha;
            assert!((p11 - linear).abs() <= 2.0 * (mu + la) * alpha * alpha * 2.0);
        }
        let p = identity_patch::<f64>(2, 2).unwrap();
        let d = DofMap::new(&p);
        let alpha = 1e-3;
        let u = d.interpolate(&p, |x| [alpha * x[0], alpha * x[1], 0.0]);
        let (r, _) = neo_hookean_forces(&p, &d, &mat, &u, &gauss_rule(3).unwrap()).unwrap();
        // the right face resultant equals P11 * length
        let s = 1.0 + alpha;
        let p11 = mu * (s - 1.0 / s) + la * 2.0 * s.ln() / s;
        let right: f64 = crate::geometry::face_indices(p.tensor(), crate::geometry::FaceId::new(0, true))
            .iter()
            .map(|&b| r[d.dof(b, 0)])
            .sum();
        assert!((right - p11).abs() < 1e-12, "{right} vs {p11}");
    }
}

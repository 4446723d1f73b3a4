use crate::assembly::{for_each_element, DofMap, QuadratureRule};
use crate::contact::MultiplierBasis;
use crate::error::{Error, Result};
use crate::geometry::NurbsPatch;
use crate::small;

use super::HertzAnalytic;

/// Displacement field given by its patch, dof map and coefficients.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteField<'a> {
    pub patch: &'a NurbsPatch<f64>,
    pub dofs: &'a DofMap,
    pub u: &'a [f64],
}

impl DiscreteField<'_> {
    /// Value, physical gradient `g[i][j] = du_i/dx_j` and physical point at `zeta`.
    pub fn eval(&self, zeta: &[f64]) -> Result<([f64; 3], [[f64; 3]; 3], [f64; 3])> {
        let dim = self.patch.dim();
        let pp = self.patch.eval(zeta)?;
        let inv = small::inverse(dim, &pp.jac);
        let mut v = [0.0; 3];
        let mut g = [[0.0; 3]; 3];
        for (k, &b) in pp.basis.indices.iter().enumerate() {
            let gp = &pp.basis.grads[k];
            for i in 0..dim {
                let ui = self.u[self.dofs.dof(b, i)];
                v[i] += pp.basis.values[k] * ui;
                for j in 0..dim {
                    let gx: f64 = (0..dim).map(|l| gp[l] * inv[l][j]).sum();
                    g[i][j] += ui * gx;
                }
            }
        }
        Ok((v, g, pp.x))
    }
}

/// `(||u_c - u_r||_L2, ||u_c - u_r||_H1)` integrated on the reference mesh.
pub fn displacement_errors(coarse: &DiscreteField, reference: &DiscreteField, quad: &QuadratureRule<f64>) -> Result<(f64, f64)> {
    let dim = reference.patch.dim();
    if coarse.patch.dim() != dim {
        return Err(Error::GeometryMismatch("different dimensions".into()));
    }
    let scale = reference.patch.control_points().iter().fold(0.0f64, |m, p| m.max(small::norm(&[p[0], p[1], p[2]])));
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for_each_element(
        reference.patch,
        quad,
        |basis, points| {
            let mut el = (0.0, 0.0);
            for q in points {
                let (vc, gc, xc) = coarse.eval(&q.zeta)?;
                if small::distance(&xc, &q.x) > 1e-9 * scale.max(1.0) {
                    return Err(Error::GeometryMismatch(format!("point {:?} maps to {:?} and {:?}", q.zeta, xc, q.x)));
                }
                for i in 0..dim {
                    let mut vr = 0.0;
                    let mut gr = [0.0; 3];
                    for (k, &b) in basis.iter().enumerate() {
                        let ui = reference.u[reference.dofs.dof(b, i)];
                        vr += q.values[k] * ui;
                        for (j, grj) in gr.iter_mut().enumerate().take(dim) {
                            *grj += q.grads[k][j] * ui;
                        }
                    }
                    el.0 += (vc[i] - vr).powi(2) * q.weight;
                    for j in 0..dim {
                        el.1 += (gc[i][j] - gr[j]).powi(2) * q.weight;
                    }
                }
            }
            Ok(el)
        },
        |(a, b)| {
            l2 += a;
            h1 += b;
            Ok(())
        },
    )?;
    Ok((l2.sqrt(), (l2 + h1).sqrt()))
}

/// Distance along the contact surface from the first contact point, for a
/// circular/spherical contact face of radius `radius` centred at `centre`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcCoordinate {
    pub pole: [f64; 3],
    pub centre: [f64; 3],
    pub radius: f64,
}

impl ArcCoordinate {
    pub fn new(pole: [f64; 3], rigid_normal: [f64; 3], radius: f64) -> Self {
        let centre = [pole[0] + radius * rigid_normal[0], pole[1] + radius * rigid_normal[1], pole[2] + radius * rigid_normal[2]];
        ArcCoordinate { pole, centre, radius }
    }

    pub fn at(&self, x: &[f64; 3]) -> f64 {
        let a = [x[0] - self.centre[0], x[1] - self.centre[1], x[2] - self.centre[2]];
        let b = [self.pole[0] - self.centre[0], self.pole[1] - self.centre[1], self.pole[2] - self.centre[2]];
        let c = small::cross(&a, &b);
        self.radius * small::norm(&c).atan2(small::dot(&a, &b))
    }
}

/// What a discrete multiplier is compared with.
#[derive(Debug, Clone, Copy)]
pub enum MultiplierReference<'a> {
    Analytic { hertz: &'a HertzAnalytic<f64>, coordinate: ArcCoordinate },
    Discrete { basis: &'a MultiplierBasis, lambda: &'a [f64] },
}

/// `||p_h - p||_{L2(Gamma_C)}` with `p_h = -lambda_h`.
pub fn multiplier_errors(lambda: &[f64], basis: &MultiplierBasis, reference: &MultiplierReference, quad: &QuadratureRule<f64>) -> Result<f64> {
    let mut e = 0.0;
    match reference {
        MultiplierReference::Analytic { hertz, coordinate } => {
            for cp in basis.quadrature_points(quad)? {
                let ph: f64 = -cp.mult_basis.iter().zip(&cp.mult_values).map(|(&k, &b)| lambda[k] * b).sum::<f64>();
                let p = hertz.pressure_at(coordinate.at(&cp.x));
                e += (ph - p).powi(2) * cp.weight;
            }
        }
        MultiplierReference::Discrete { basis: rb, lambda: rl } => {
            for cp in rb.quadrature_points(quad)? {
                let pr: f64 = -cp.mult_basis.iter().zip(&cp.mult_values).map(|(&k, &b)| rl[k] * b).sum::<f64>();
                let ph = -basis.eval(lambda, &cp.s)?;
                e += (ph - pr).powi(2) * cp.weight;
            }
        }
    }
    Ok(e.sqrt())
}

/// `(r / a, p_h / p0)` at every contact quadrature point, sorted by `r`.
pub fn pressure_profile(
    lambda: &[f64],
    basis: &MultiplierBasis,
    hertz: &HertzAnalytic<f64>,
    coordinate: &ArcCoordinate,
) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = basis
        .points()
        .iter()
        .map(|cp| {
            let ph: f64 = -cp.mult_basis.iter().zip(&cp.mult_values).map(|(&k, &b)| lambda[k] * b).sum::<f64>();
            (coordinate.at(&cp.x) / hertz.a, ph / hertz.p0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::gauss_rule;
    use crate::geometry::{identity_patch, quarter_disc, FaceId};
    use crate::verification::hertz_2d;

    #[test]
    fn same_field_has_zero_error() {
        let p = quarter_disc::<f64>(1.0).unwrap().patch.bisect().unwrap();
        let d = DofMap::new(&p);
        let u: Vec<f64> = (0..d.num_dofs()).map(|i| (i as f64).cos()).collect();
        let f = DiscreteField { patch: &p, dofs: &d, u: &u };
        assert_eq!(displacement_errors(&f, &f, &gauss_rule(3).unwrap()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn constant_difference() {
        let p = identity_patch::<f64>(2, 2).unwrap();
        let d = DofMap::new(&p);
        let r = p.bisect().unwrap();
        let dr = DofMap::new(&r);
        let uc = d.interpolate(&p, |_| [0.3, -0.4, 0.0]);
        let ur = vec![0.0; dr.num_dofs()];
        let (l2, h1) = displacement_errors(
            &DiscreteField { patch: &p, dofs: &d, u: &uc },
            &DiscreteField { patch: &r, dofs: &dr, u: &ur },
            &gauss_rule(3).unwrap(),
        )
        .unwrap();
        assert!((l2 - 0.5).abs() < 1e-14 && (h1 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn polynomial_difference() {
        // u_c - u_r = (x^2, x y): L2^2 = 1/5 + 1/9, |.|_H1^2 = 4/3 + 1/3 + 1/3
        let p = identity_patch::<f64>(2, 2).unwrap();
        let d = DofMap::new(&p);
        // quadratic interpolation through the Bezier control net
        let mut uc = vec![0.0; d.num_dofs()];
        let g = [0.0, 0.5, 1.0];
        for j in 0..3 {
            for i in 0..3 {
                let b = i + 3 * j;
                // Bernstein coefficients of x^2: (0, 0, 1); of x y: products of (0, 1/2, 1)
                uc[d.dof(b, 0)] = [0.0, 0.0, 1.0][i];
                uc[d.dof(b, 1)] = g[i] * g[j];
            }
        }
        let r = p.bisect().unwrap();
        let dr = DofMap::new(&r);
        let zero = vec![0.0; dr.num_dofs()];
        let (l2, h1) = displacement_errors(
            &DiscreteField { patch: &p, dofs: &d, u: &uc },
            &DiscreteField { patch: &r, dofs: &dr, u: &zero },
            &gauss_rule(3).unwrap(),
        )
        .unwrap();
        let l2e = (1.0f64 / 5.0 + 1.0 / 9.0).sqrt();
        let h1e = (1.0f64 / 5.0 + 1.0 / 9.0 + 4.0 / 3.0 + 2.0 / 3.0).sqrt();
        assert!((l2 - l2e).abs() < 1e-10, "{l2} {l2e}");
        assert!((h1 - h1e).abs() < 1e-10, "{h1} {h1e}");
    }

    #[test]
    fn mismatched_geometry() {
        let p = identity_patch::<f64>(2, 2).unwrap();
        let d = DofMap::new(&p);
        let q = quarter_disc::<f64>(1.0).unwrap().patch;
        let dq = DofMap::new(&q);
        let u = vec![0.0; d.num_dofs()];
        let uq = vec![0.0; dq.num_dofs()];
        assert!(matches!(
            displacement_errors(&DiscreteField { patch: &p, dofs: &d, u: &u }, &DiscreteField { patch: &q, dofs: &dq, u: &uq }, &gauss_rule(2).unwrap()),
            Err(Error::GeometryMismatch(_))
        ));
    }

    #[test]
    fn arc_coordinate_on_circle() {
        let c = ArcCoordinate::new([0.0, -2.0, 0.0], [0.0, 1.0, 0.0], 2.0);
        let t: f64 = 0.3;
        assert!((c.at(&[2.0 * t.sin(), -2.0 * t.cos(), 0.0]) - 0.6).abs() < 1e-15);
        assert_eq!(c.at(&[0.0, -2.0, 0.0]), 0.0);
    }

    #[test]
    fn zero_multiplier_error_is_profile_norm() {
        // flat face y = 0 with the pole at the origin: r = x for a huge radius
        let mut p = identity_patch::<f64>(2, 2).unwrap();
        for _ in 0..4 {
            p = p.bisect().unwrap();
        }
        let basis = MultiplierBasis::new(&p, FaceId::new(1, false), [0.0, 1.0, 0.0], &gauss_rule(3).unwrap()).unwrap();
        let h = hertz_2d(1.0, 1.0, 0.3, 0.01);
        let coord = ArcCoordinate::new([0.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1e9);
        let e = multiplier_errors(
            &vec![0.0; basis.len()],
            &basis,
            &MultiplierReference::Analytic { hertz: &h, coordinate: coord },
            &gauss_rule(30).unwrap(),
        )
        .unwrap();
        // int_0^a p0^2 (1 - r^2/a^2) dr = p0^2 2a/3 (one side of the band)
        let exact = h.p0 * (2.0 * h.a / 3.0).sqrt();
        assert!((e - exact).abs() < 1e-4 * exact, "{e} vs {exact}");
        let same = multiplier_errors(
            &vec![-0.5; basis.len()],
            &basis,
            &MultiplierReference::Discrete { basis: &basis, lambda: &vec![-0.5; basis.len()] },
            &gauss_rule(3).unwrap(),
        )
        .unwrap();
        assert_eq!(same, 0.0);
    }
}

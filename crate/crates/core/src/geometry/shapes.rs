//! Benchmark domains: identity/affine boxes, the quarter disc (2D Hertz)
//! and the sphere octant (3D Hertz).
//!
//! Both curved domains are single patches whose innermost parametric face
//! collapses onto the centre of the circle/sphere. The Jacobian vanishes
//! only on those collapsed faces (and, for the octant, on the edge where the
//! meridian meets the rotation axis), so Gauss points never see it.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spline::KnotVector;

use super::{FaceId, NurbsPatch};

/// A patch together with the boundary tags the Hertz benchmarks need.
#[derive(Debug, Clone)]
pub struct BenchmarkDomain<T> {
    pub patch: NurbsPatch<T>,
    /// Face that may touch the rigid plane.
    pub contact_face: FaceId,
    /// Flat face carrying the applied pressure or displacement.
    pub load_face: FaceId,
    /// Symmetry faces with the displacement component fixed to zero on each.
    pub symmetry: Vec<(FaceId, usize)>,
    pub radius: T,
    /// Point of the contact face that touches the plane initially.
    pub pole: [T; 3],
    /// Outward unit normal of the rigid body (points into the elastic body).
    pub rigid_normal: [T; 3],
    /// The rigid plane is `{x : x . n = plane_offset}`.
    pub plane_offset: T,
    /// Directions along which the mesh is graded towards the contact pole.
    pub graded_dirs: Vec<usize>,
}

/// Unit square/cube with the identity map, control points at the Greville
/// abscissae and unit weights.
pub fn identity_patch<T: Real>(dim: usize, degree: usize) -> Result<NurbsPatch<T>> {
    let a = {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = T::one();
        }
        m
    };
    affine_patch(dim, degree, a, [T::zero(); 3])
}

/// Single-element patch for `x = A zeta + b`.
pub fn affine_patch<T: Real>(dim: usize, degree: usize, a: [[T; 3]; 3], b: [T; 3]) -> Result<NurbsPatch<T>> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension {dim}")));
    }
    let kv = KnotVector::uniform(degree, 1)?;
    let g = kv.greville();
    let n = g.len();
    let count = n.pow(dim as u32);
    let mut homog = Vec::with_capacity(count);
    for idx in 0..count {
        let m = [idx % n, (idx / n) % n, idx / (n * n)];
        let zeta: Vec<T> = (0..dim).map(|d| g[m[d]]).collect();
        let mut h = Vec::with_capacity(dim + 1);
        for r in 0..dim {
            let mut v = b[r];
            for c in 0..dim {
                v += a[r][c] * zeta[c];
            }
            h.push(v);
        }
        h.push(T::one());
        homog.push(h);
    }
    NurbsPatch::from_homogeneous(vec![kv; dim], &homog)
}

/// Quarter disc of radius `r` centred at the origin, occupying `x >= 0,
/// y <= 0`.
///
/// * `zeta_0` runs along the arc from the pole `(0, -r)` to `(r, 0)`,
/// * `zeta_1` runs radially from the arc (`zeta_1 = 0`, contact face) to
///   the centre (`zeta_1 = 1`, collapsed).
///
/// The face `zeta_0 = 1` is the flat top `y = 0` (load), `zeta_0 = 0` is the
/// symmetry line `x = 0`. The rigid plane is `y = -r`.
pub fn quarter_disc<T: Real>(r: T) -> Result<BenchmarkDomain<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let z = T::zero();
    let half = T::lit(0.5);
    let w_mid = T::FRAC_1_SQRT_2();
    let arc = [[z, -r], [r, -r], [r, z]];
    let w = [T::one(), w_mid, T::one()];
    let s = [z, half, T::one()];
    let mut homog = Vec::with_capacity(9);
    for &sj in &s {
        for i in 0..3 {
            let x = (T::one() - sj) * arc[i][0];
            let y = (T::one() - sj) * arc[i][1];
            homog.push(vec![x * w[i], y * w[i], w[i]]);
        }
    }
    let kv = KnotVector::uniform(2, 1)?;
    let patch = NurbsPatch::from_homogeneous(vec![kv.clone(), kv], &homog)?;
    Ok(BenchmarkDomain {
        patch,
        contact_face: FaceId::new(1, false),
        load_face: FaceId::new(0, true),
        symmetry: vec![(FaceId::new(0, false), 0)],
        radius: r,
        pole: [z, -r, z],
        rigid_normal: [z, T::one(), z],
        plane_offset: -r,
        graded_dirs: vec![0, 1],
    })
}

/// One eighth of the ball of radius `r`: `x >= 0, z >= 0, y <= 0`.
///
/// The spherical face is a surface of revolution of the quarter meridian
/// `(0,-r,0) -> (r,0,0)` about the x axis.
///
/// * `zeta_0`: rotation angle, `0` on the plane `z = 0`, `1` on the flat
///   top `y = 0` (load face),
/// * `zeta_1`: meridian, `0` on the plane `x = 0` (through the pole), `1`
///   on the rotation axis (collapsed edge),
/// * `zeta_2`: radial, `0` on the sphere (contact face), `1` at the centre.
pub fn sphere_octant<T: Real>(r: T) -> Result<BenchmarkDomain<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let z = T::zero();
    let half = T::lit(0.5);
    let w_mid = T::FRAC_1_SQRT_2();
    let meridian = [[z, -r], [r, -r], [r, z]];
    let w = [T::one(), w_mid, T::one()];
    let s = [z, half, T::one()];
    let rotate = |k: usize, x: T, y: T| -> [T; 3] {
        match k {
            0 => [x, y, z],
            1 => [x, y, -y],
            _ => [x, z, -y],
        }
    };
    let mut homog = Vec::with_capacity(27);
    for &sj in &s {
        for (i, m) in meridian.iter().enumerate() {
            for k in 0..3 {
                let p = rotate(k, m[0], m[1]);
                let wt = w[k] * w[i];
                let f = T::one() - sj;
                homog.push(vec![f * p[0] * wt, f * p[1] * wt, f * p[2] * wt, wt]);
            }
        }
    }
    let kv = KnotVector::uniform(2, 1)?;
    let patch = NurbsPatch::from_homogeneous(vec![kv.clone(), kv.clone(), kv], &homog)?;
    Ok(BenchmarkDomain {
        patch,
        contact_face: FaceId::new(2, false),
        load_face: FaceId::new(0, true),
        symmetry: vec![(FaceId::new(0, false), 2), (FaceId::new(1, false), 0)],
        radius: r,
        pole: [z, -r, z],
        rigid_normal: [z, T::one(), z],
        plane_offset: -r,
        graded_dirs: vec![0, 1, 2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::gauss_rule;
    use crate::geometry::{graded_breakpoints, MeshView};

    fn measure(p: &NurbsPatch<f64>, n: usize) -> f64 {
        let rule = gauss_rule::<f64>(n).unwrap();
        let mesh = MeshView::new(p);
        let mut total = 0.0;
        for el in mesh.elements() {
            for (pt, w) in rule.element_points(&el.lower, &el.upper, p.dim()) {
                let pp = p.eval_at_spans(el.spans, &pt).unwrap();
                total += w * pp.det;
            }
        }
        total
    }

    #[test]
    fn quarter_disc_arc_is_exact() {
        let d = quarter_disc::<f64>(1.0).unwrap();
        let x = d.patch.point(&[0.5, 0.0]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x[0] - s).abs() < 1e-14 && (x[1] + s).abs() < 1e-14);
        for i in 0..=20 {
            let x = d.patch.point(&[i as f64 / 20.0, 0.0]).unwrap();
            assert!((x[0].hypot(x[1]) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn quarter_disc_area() {
        let r = 1.3;
        let d = quarter_disc::<f64>(r).unwrap();
        let p = d.patch.bisect().unwrap().bisect().unwrap();
        let area = measure(&p, 8);
        let exact = std::f64::consts::PI * r * r / 4.0;
        assert!(((area - exact) / exact).abs() < 1e-10, "{area} vs {exact}");
    }

    #[test]
    fn octant_surface_and_volume() {
        let d = sphere_octant::<f64>(1.0).unwrap();
        for i in 0..=6 {
            for j in 0..=6 {
                let x = d.patch.point(&[i as f64 / 6.0, j as f64 / 6.0, 0.0]).unwrap();
                let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                assert!((n - 1.0).abs() < 1e-10);
                assert!(x[0] >= -1e-14 && x[1] <= 1e-14 && x[2] >= -1e-14);
            }
        }
        let p = d.patch.bisect().unwrap().bisect().unwrap();
        let vol = measure(&p, 6);
        let exact = 4.0 / 3.0 * std::f64::consts::PI / 8.0;
        assert!(((vol - exact) / exact).abs() < 1e-6, "{vol} vs {exact}");
    }

    #[test]
    fn octant_symmetric_under_axis_swap() {
        // swapping x and z maps the set of spherical control points to itself
        let d = sphere_octant::<f64>(1.0).unwrap();
        let cps = d.patch.control_points();
        for c in cps {
            let swapped = [c[2], c[1], c[0]];
            assert!(cps.iter().any(|q| (0..3).all(|k| (q[k] - swapped[k]).abs() < 1e-14)));
        }
    }

    #[test]
    fn positive_jacobian_on_graded_meshes() {
        let bps = graded_breakpoints::<f64>(10, 0.8, 0.1).unwrap();
        let d = quarter_disc::<f64>(1.0).unwrap();
        let p = d.patch.with_breakpoints(&[bps.clone(), bps.clone()]).unwrap();
        let rule = gauss_rule::<f64>(3).unwrap();
        for el in MeshView::new(&p).elements() {
            for (pt, _) in rule.element_points(&el.lower, &el.upper, 2) {
                assert!(p.eval_at_spans(el.spans, &pt).unwrap().det > 0.0);
            }
        }
        let b3 = graded_breakpoints::<f64>(4, 0.75, 0.1).unwrap();
        let o = sphere_octant::<f64>(1.0).unwrap();
        let p = o.patch.with_breakpoints(&[b3.clone(), b3.clone(), b3]).unwrap();
        for el in MeshView::new(&p).elements() {
            for (pt, _) in rule.element_points(&el.lower, &el.upper, 3) {
                assert!(p.eval_at_spans(el.spans, &pt).unwrap().det > 0.0);
            }
        }
    }
}

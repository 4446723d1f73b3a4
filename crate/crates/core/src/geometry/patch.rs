use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::small::{self, Mat3};
use crate::spline::{elevate_bezier, insert_knots, KnotVector, TensorBasisEvaluation, TensorSpace, WeightedSpace};

/// Tensor-product NURBS map from the unit cube onto the physical body.
#[derive(Debug, Clone, PartialEq)]
pub struct NurbsPatch<T> {
    space: WeightedSpace<T>,
    control_points: Vec<[T; 3]>,
}

/// Everything the integrators need at one parametric point.
#[derive(Debug, Clone)]
pub struct PatchPoint<T> {
    pub basis: TensorBasisEvaluation<T>,
    pub x: [T; 3],
    /// `jac[i][j] = d x_i / d zeta_j`.
    pub jac: Mat3<T>,
    pub det: T,
}

/// Parametric Jacobian of the geometry map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian<T> {
    pub matrix: Mat3<T>,
    pub det: T,
}

impl<T: Real> NurbsPatch<T> {
    pub fn new(space: WeightedSpace<T>, control_points: Vec<[T; 3]>) -> Result<Self> {
        if control_points.len() != space.dimension() {
            return Err(Error::InvalidArgument(format!(
                "{} control points for {} basis functions",
                control_points.len(),
                space.dimension()
            )));
        }
        let d = space.space().param_dim();
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidArgument(format!("patch dimension {d} not in {{2, 3}}")));
        }
        Ok(NurbsPatch { space, control_points })
    }

    /// Builds a patch from homogeneous controls `(w x, w y, [w z,] w)`.
    pub(crate) fn from_homogeneous(dirs: Vec<KnotVector<T>>, homog: &[Vec<T>]) -> Result<Self> {
        let d = dirs.len();
        let space = TensorSpace::new(dirs)?;
        let mut weights = Vec::with_capacity(homog.len());
        let mut cps = Vec::with_capacity(homog.len());
        for h in homog {
            let w = h[d];
            let mut p = [T::zero(); 3];
            for c in 0..d {
                p[c] = h[c] / w;
            }
            weights.push(w);
            cps.push(p);
        }
        NurbsPatch::new(WeightedSpace::new(space, weights)?, cps)
    }

    fn homogeneous(&self) -> Vec<Vec<T>> {
        let d = self.dim();
        self.control_points
            .iter()
            .zip(self.space.weights())
            .map(|(p, &w)| {
                let mut h: Vec<T> = p[..d].iter().map(|&x| x * w).collect();
                h.push(w);
                h
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.space.space().param_dim()
    }

    pub fn space(&self) -> &WeightedSpace<T> {
        &self.space
    }

    pub fn tensor(&self) -> &TensorSpace<T> {
        self.space.space()
    }

    pub fn degree(&self, dir: usize) -> usize {
        self.tensor().direction(dir).degree()
    }

    pub fn control_points(&self) -> &[[T; 3]] {
        &self.control_points
    }

    pub fn point(&self, zeta: &[T]) -> Result<[T; 3]> {
        let ev = self.space.eval_nurbs_basis(zeta, 0)?;
        Ok(self.combine(&ev))
    }

    fn combine(&self, ev: &TensorBasisEvaluation<T>) -> [T; 3] {
        let mut x = [T::zero(); 3];
        for (&i, &n) in ev.indices.iter().zip(&ev.values) {
            let cp = &self.control_points[i];
            for c in 0..3 {
                x[c] += n * cp[c];
            }
        }
        x
    }

    pub fn eval(&self, zeta: &[T]) -> Result<PatchPoint<T>> {
        let basis = self.space.eval_nurbs_basis(zeta, 1)?;
        Ok(self.assemble_point(basis))
    }

    pub fn eval_at_spans(&self, spans: [usize; 3], zeta: &[T]) -> Result<PatchPoint<T>> {
        let basis = self.space.eval_at_spans(spans, zeta, 1)?;
        Ok(self.assemble_point(basis))
    }

    fn assemble_point(&self, basis: TensorBasisEvaluation<T>) -> PatchPoint<T> {
        let d = self.dim();
        let x = self.combine(&basis);
        let mut jac = small::zero();
        for (k, &i) in basis.indices.iter().enumerate() {
            let cp = &self.control_points[i];
            let g = &basis.grads[k];
            for a in 0..d {
                for b in 0..d {
                    jac[a][b] += cp[a] * g[b];
                }
            }
        }
        let det = small::det(d, &jac);
        PatchPoint { basis, x, jac, det }
    }

    /// Jacobian matrix and determinant; fails on a non-positive determinant.
    pub fn jacobian(&self, zeta: &[T]) -> Result<Jacobian<T>> {
        let pp = self.eval(zeta)?;
        if !(pp.det > T::zero()) {
            return Err(Error::SingularJacobian { det: pp.det.as_f64(), point: zeta.iter().map(|z| z.as_f64()).collect() });
        }
        Ok(Jacobian { matrix: pp.jac, det: pp.det })
    }

    /// Inserts the given knots along `dir`; geometry is preserved exactly.
    pub fn insert_knots(&self, dir: usize, values: &[T]) -> Result<Self> {
        self.map_fibers(dir, |kv, fiber| insert_knots(kv, fiber, values))
    }

    /// Raises the degree along a single-span direction by one.
    pub fn elevate(&self, dir: usize) -> Result<Self> {
        self.map_fibers(dir, elevate_bezier)
    }

    /// Degree elevation to `degree` in every direction (single-span patches only).
    pub fn elevate_to(&self, degree: usize) -> Result<Self> {
        let mut out = self.clone();
        for dir in 0..self.dim() {
            while out.degree(dir) < degree {
                out = out.elevate(dir)?;
            }
        }
        Ok(out)
    }

    /// Inserts every breakpoint (per direction) that is not yet a knot.
    pub fn with_breakpoints(&self, breakpoints: &[Vec<T>]) -> Result<Self> {
        let mut out = self.clone();
        for (dir, bps) in breakpoints.iter().enumerate() {
            let kv = out.tensor().direction(dir).clone();
            let (lo, hi) = kv.domain();
            let new: Vec<T> = bps.iter().copied().filter(|&b| b > lo && b < hi && kv.multiplicity(b) == 0).collect();
            if !new.is_empty() {
                out = out.insert_knots(dir, &new)?;
            }
        }
        Ok(out)
    }

    /// One uniform dyadic bisection of every non-empty span.
    pub fn bisect(&self) -> Result<Self> {
        let mut out = self.clone();
        for dir in 0..self.dim() {
            let mids = out.tensor().direction(dir).span_midpoints();
            out = out.insert_knots(dir, &mids)?;
        }
        Ok(out)
    }

    fn map_fibers<F>(&self, dir: usize, f: F) -> Result<Self>
    where
        F: Fn(&KnotVector<T>, &[Vec<T>]) -> Result<(KnotVector<T>, Vec<Vec<T>>)>,
    {
        let d = self.dim();
        if dir >= d {
            return Err(Error::InvalidArgument(format!("direction {dir} out of range")));
        }
        let tensor = self.tensor();
        let shape = tensor.shape();
        let homog = self.homogeneous();
        let kv = tensor.direction(dir);
        let (o1, o2) = match dir {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut new_kv = None;
        let mut fibers_out: Vec<(usize, usize, Vec<Vec<T>>)> = Vec::new();
        for b in 0..shape[o2] {
            for a in 0..shape[o1] {
                let fiber: Vec<Vec<T>> = (0..shape[dir])
                    .map(|i| {
                        let mut m = [0; 3];
                        m[dir] = i;
                        m[o1] = a;
                        m[o2] = b;
                        homog[tensor.flatten(m)].clone()
                    })
                    .collect();
                let (k, c) = f(kv, &fiber)?;
                new_kv = Some(k);
                fibers_out.push((a, b, c));
            }
        }
        let new_kv = new_kv.expect("at least one fiber");
        let mut dirs = tensor.directions().to_vec();
        dirs[dir] = new_kv;
        let mut new_shape = shape;
        new_shape[dir] = dirs[dir].num_basis();
        let mut out = vec![Vec::new(); new_shape.iter().product()];
        for (a, b, c) in fibers_out {
            for (i, h) in c.into_iter().enumerate() {
                let mut m = [0; 3];
                m[dir] = i;
                m[o1] = a;
                m[o2] = b;
                out[m[0] + new_shape[0] * (m[1] + new_shape[1] * m[2])] = h;
            }
        }
        NurbsPatch::from_homogeneous(dirs, &out)
    }
}

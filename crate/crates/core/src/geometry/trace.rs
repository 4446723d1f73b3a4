use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::small;
use crate::spline::{TensorBasisEvaluation, TensorSpace, WeightedSpace};

use super::NurbsPatch;

/// A full parametric face `zeta_dir = 0` (`high == false`) or `zeta_dir = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceId {
    pub dir: usize,
    pub high: bool,
}

impl FaceId {
    pub const fn new(dir: usize, high: bool) -> Self {
        FaceId { dir, high }
    }

    /// Parametric directions spanning the face, in increasing order.
    pub fn tangential_dirs(&self, dim: usize) -> Vec<usize> {
        (0..dim).filter(|&d| d != self.dir).collect()
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "xi{}{}", self.dir, if self.high { '+' } else { '-' })
    }
}

impl FromStr for FaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFace(s.to_string());
        let rest = s.strip_prefix("xi").ok_or_else(bad)?;
        let (num, sign) = rest.split_at(rest.len().checked_sub(1).ok_or_else(bad)?);
        let dir: usize = num.parse().map_err(|_| bad())?;
        if dir > 2 {
            return Err(bad());
        }
        match sign {
            "-" => Ok(FaceId::new(dir, false)),
            "+" => Ok(FaceId::new(dir, true)),
            _ => Err(bad()),
        }
    }
}

/// Restriction of a patch to one of its faces.
#[derive(Debug, Clone)]
pub struct BoundaryTrace<T> {
    face: FaceId,
    dim: usize,
    surface: WeightedSpace<T>,
    control_points: Vec<[T; 3]>,
    volume_indices: Vec<usize>,
    normal: [T; 3],
}

/// Trace quantities at one surface parameter.
#[derive(Debug, Clone)]
pub struct TracePoint<T> {
    /// Basis over the trace indices (see [`BoundaryTrace::volume_indices`]).
    pub basis: TensorBasisEvaluation<T>,
    pub x: [T; 3],
    /// Surface Jacobian `dGamma / ds`.
    pub measure: T,
}

/// Volume basis indices lying on `face`, ordered like the trace space.
pub fn face_indices(tensor: &TensorSpace<impl Real>, face: FaceId) -> Vec<usize> {
    let shape = tensor.shape();
    let dim = tensor.param_dim();
    let fixed = if face.high { shape[face.dir] - 1 } else { 0 };
    let tang = face.tangential_dirs(dim);
    let n_a = shape[tang[0]];
    let n_b = if tang.len() > 1 { shape[tang[1]] } else { 1 };
    let mut out = Vec::with_capacity(n_a * n_b);
    for b in 0..n_b {
        for a in 0..n_a {
            let mut m = [0; 3];
            m[face.dir] = fixed;
            m[tang[0]] = a;
            if tang.len() > 1 {
                m[tang[1]] = b;
            }
            out.push(tensor.flatten(m));
        }
    }
    out
}

impl<T: Real> BoundaryTrace<T> {
    /// Extracts the face and attaches the rigid body's outward unit normal.
    pub fn extract(patch: &NurbsPatch<T>, face: FaceId, rigid_normal: [T; 3]) -> Result<Self> {
        let dim = patch.dim();
        if face.dir >= dim {
            return Err(Error::InvalidFace(face.to_string()));
        }
        let nrm = small::norm(&rigid_normal);
        if !(nrm > T::zero()) {
            return Err(Error::InvalidArgument("zero rigid normal".into()));
        }
        let normal = [rigid_normal[0] / nrm, rigid_normal[1] / nrm, rigid_normal[2] / nrm];
        let tensor = patch.tensor();
        let dirs = face.tangential_dirs(dim).into_iter().map(|d| tensor.direction(d).clone()).collect();
        let volume_indices = face_indices(tensor, face);
        let weights = volume_indices.iter().map(|&i| patch.space().weights()[i]).collect();
        let surface = WeightedSpace::new(TensorSpace::new(dirs)?, weights)?;
        let control_points = volume_indices.iter().map(|&i| patch.control_points()[i]).collect();
        Ok(BoundaryTrace { face, dim, surface, control_points, volume_indices, normal })
    }

    pub fn face(&self) -> FaceId {
        self.face
    }

    /// Ambient dimension of the parent patch.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn surface(&self) -> &WeightedSpace<T> {
        &self.surface
    }

    pub fn control_points(&self) -> &[[T; 3]] {
        &self.control_points
    }

    /// Volume basis index of each trace basis function.
    pub fn volume_indices(&self) -> &[usize] {
        &self.volume_indices
    }

    pub fn normal(&self) -> [T; 3] {
        self.normal
    }

    /// Parent-patch parameter of a surface parameter.
    pub fn volume_param(&self, s: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dim);
        let mut it = s.iter();
        for d in 0..self.dim {
            if d == self.face.dir {
                out.push(if self.face.high { T::one() } else { T::zero() });
            } else {
                out.push(*it.next().expect("surface parameter too short"));
            }
        }
        out
    }

    pub fn eval(&self, s: &[T]) -> Result<TracePoint<T>> {
        let basis = self.surface.eval_nurbs_basis(s, 1)?;
        Ok(self.finish(basis))
    }

    pub fn eval_at_spans(&self, spans: [usize; 3], s: &[T]) -> Result<TracePoint<T>> {
        let basis = self.surface.eval_at_spans(spans, s, 1)?;
        Ok(self.finish(basis))
    }

    fn finish(&self, basis: TensorBasisEvaluation<T>) -> TracePoint<T> {
        let mut x = [T::zero(); 3];
        let mut t0 = [T::zero(); 3];
        let mut t1 = [T::zero(); 3];
        for (k, &i) in basis.indices.iter().enumerate() {
            let cp = &self.control_points[i];
            for c in 0..3 {
                x[c] += basis.values[k] * cp[c];
                t0[c] += basis.grads[k][0] * cp[c];
                t1[c] += basis.grads[k][1] * cp[c];
            }
        }
        let measure = if self.dim == 2 { small::norm(&t0) } else { small::norm(&small::cross(&t0, &t1)) };
        TracePoint { basis, x, measure }
    }
}

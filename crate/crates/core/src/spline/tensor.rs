use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{BasisEvaluation, KnotVector};

/// Tensor product of univariate spline spaces. Multi-indices flatten with
/// the first direction running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace<T> {
    dirs: Vec<KnotVector<T>>,
}

/// Non-zero multivariate basis functions at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBasisEvaluation<T> {
    /// Flat indices of the non-zero functions.
    pub indices: Vec<usize>,
    pub values: Vec<T>,
    /// Parametric gradients; empty when derivatives were not requested.
    /// Entries beyond the parametric dimension are zero.
    pub grads: Vec<[T; 3]>,
}

impl<T: Real> TensorSpace<T> {
    pub fn new(dirs: Vec<KnotVector<T>>) -> Result<Self> {
        if dirs.is_empty() || dirs.len() > 3 {
            return Err(Error::InvalidArgument(format!("unsupported parametric dimension {}", dirs.len())));
        }
        Ok(TensorSpace { dirs })
    }

    pub fn directions(&self) -> &[KnotVector<T>] {
        &self.dirs
    }

    pub fn direction(&self, d: usize) -> &KnotVector<T> {
        &self.dirs[d]
    }

    pub fn param_dim(&self) -> usize {
        self.dirs.len()
    }

    /// Number of basis functions per direction, padded with ones to length 3.
    pub fn shape(&self) -> [usize; 3] {
        let mut s = [1; 3];
        for (d, kv) in self.dirs.iter().enumerate() {
            s[d] = kv.num_basis();
        }
        s
    }

    pub fn dimension(&self) -> usize {
        self.dirs.iter().map(|k| k.num_basis()).product()
    }

    pub fn flatten(&self, multi: [usize; 3]) -> usize {
        let s = self.shape();
        multi[0] + s[0] * (multi[1] + s[1] * multi[2])
    }

    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let s = self.shape();
        [idx % s[0], (idx / s[0]) % s[1], idx / (s[0] * s[1])]
    }

    /// Element list as per-direction span indices.
    pub fn elements(&self) -> Vec<[usize; 3]> {
        let spans: Vec<Vec<usize>> = self.dirs.iter().map(|k| k.spans()).collect();
        let mut out = Vec::new();
        let one = vec![0usize];
        let s1 = spans.get(1).unwrap_or(&one);
        let s2 = spans.get(2).unwrap_or(&one);
        for &k in s2 {
            for &j in s1 {
                for &i in &spans[0] {
                    out.push([i, j, k]);
                }
            }
        }
        out
    }

    pub fn eval(&self, point: &[T], n_deriv: usize) -> Result<TensorBasisEvaluation<T>> {
        let mut spans = [0usize; 3];
        for (d, kv) in self.dirs.iter().enumerate() {
            spans[d] = kv.find_span(point[d])?;
        }
        self.eval_at_spans(spans, point, n_deriv)
    }

    /// Evaluation with known spans (no domain checks).
    pub fn eval_at_spans(&self, spans: [usize; 3], point: &[T], n_deriv: usize) -> Result<TensorBasisEvaluation<T>> {
        if n_deriv > 1 {
            return Err(Error::InvalidArgument("multivariate derivatives above first order".into()));
        }
        let uni: Vec<BasisEvaluation<T>> = self
            .dirs
            .iter()
            .enumerate()
            .map(|(d, kv)| kv.eval_basis_in_span(spans[d], point[d], n_deriv))
            .collect();
        Ok(self.combine(&uni, n_deriv))
    }

    /// Tensor combination of precomputed univariate evaluations.
    pub fn combine(&self, uni: &[BasisEvaluation<T>], n_deriv: usize) -> TensorBasisEvaluation<T> {
        let dim = self.dirs.len();
        let s = self.shape();
        let len = |d: usize| if d < dim { uni[d].len() } else { 1 };
        let (n0, n1, n2) = (len(0), len(1), len(2));
        let total = n0 * n1 * n2;
        let mut indices = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        let mut grads = Vec::with_capacity(if n_deriv > 0 { total } else { 0 });
        let one = T::one();
        let zero = T::zero();
        let val = |d: usize, j: usize| if d < dim { uni[d].ders[0][j] } else { one };
        let der = |d: usize, j: usize| if d < dim { uni[d].ders[1][j] } else { zero };
        for c in 0..n2 {
            for b in 0..n1 {
                for a in 0..n0 {
                    let i0 = uni[0].first_index + a;
                    let i1 = if dim > 1 { uni[1].first_index + b } else { 0 };
                    let i2 = if dim > 2 { uni[2].first_index + c } else { 0 };
                    indices.push(i0 + s[0] * (i1 + s[1] * i2));
                    let (v0, v1, v2) = (val(0, a), val(1, b), val(2, c));
                    values.push(v0 * v1 * v2);
                    if n_deriv > 0 {
                        grads.push([der(0, a) * v1 * v2, v0 * der(1, b) * v2, v0 * v1 * der(2, c)]);
                    }
                }
            }
        }
        TensorBasisEvaluation { indices, values, grads }
    }
}

/// Tensor space with one positive weight per basis function (NURBS).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSpace<T> {
    space: TensorSpace<T>,
    weights: Vec<T>,
}

impl<T: Real> WeightedSpace<T> {
    pub fn new(space: TensorSpace<T>, weights: Vec<T>) -> Result<Self> {
        if weights.len() != space.dimension() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for a space of dimension {}",
                weights.len(),
                space.dimension()
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| !(w > T::zero())) {
            return Err(Error::NonPositiveWeight(w.as_f64()));
        }
        Ok(WeightedSpace { space, weights })
    }

    /// All weights equal to one.
    pub fn unweighted(space: TensorSpace<T>) -> Self {
        let n = space.dimension();
        WeightedSpace { space, weights: vec![T::one(); n] }
    }

    pub fn space(&self) -> &TensorSpace<T> {
        &self.space
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    /// Rational basis `w_i B_i / W` and its parametric gradient.
    pub fn eval_nurbs_basis(&self, point: &[T], n_deriv: usize) -> Result<TensorBasisEvaluation<T>> {
        let ev = self.space.eval(point, n_deriv)?;
        self.rationalize(ev)
    }

    pub fn eval_at_spans(&self, spans: [usize; 3], point: &[T], n_deriv: usize) -> Result<TensorBasisEvaluation<T>> {
        let ev = self.space.eval_at_spans(spans, point, n_deriv)?;
        self.rationalize(ev)
    }

    /// Applies the weights to a polynomial tensor evaluation.
    pub fn rationalize(&self, mut ev: TensorBasisEvaluation<T>) -> Result<TensorBasisEvaluation<T>> {
        let mut w_sum = T::zero();
        let mut dw = [T::zero(); 3];
        for (k, &i) in ev.indices.iter().enumerate() {
            let w = self.weights[i];
            ev.values[k] *= w;
            w_sum += ev.values[k];
            if let Some(g) = ev.grads.get_mut(k) {
                for c in 0..3 {
                    g[c] *= w;
                    dw[c] += g[c];
                }
            }
        }
        if !(w_sum > T::zero()) {
            return Err(Error::NonPositiveWeight(w_sum.as_f64()));
        }
        let inv = T::one() / w_sum;
        for k in 0..ev.values.len() {
            let v = ev.values[k] * inv;
            ev.values[k] = v;
            if let Some(g) = ev.grads.get_mut(k) {
                for c in 0..3 {
                    g[c] = (g[c] - v * dw[c]) * inv;
                }
            }
        }
        Ok(ev)
    }

    /// Weight function `W = sum_i w_i B_i`.
    pub fn weight_function(&self, point: &[T]) -> Result<T> {
        let ev = self.space.eval(point, 0)?;
        Ok(ev.indices.iter().zip(&ev.values).map(|(&i, &b)| self.weights[i] * b).sum())
    }
}

/// Degree `p - 2` multiplier space on a primal trace space of degree `p`.
pub fn multiplier_space<T: Real>(primal_trace: &TensorSpace<T>) -> Result<TensorSpace<T>> {
    let dirs = primal_trace
        .directions()
        .iter()
        .map(|k| k.multiplier_knot_vector())
        .collect::<Result<Vec<_>>>()?;
    TensorSpace::new(dirs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform2(n0: usize, n1: usize) -> TensorSpace<f64> {
        TensorSpace::new(vec![KnotVector::uniform(2, n0).unwrap(), KnotVector::uniform(2, n1).unwrap()]).unwrap()
    }

    #[test]
    fn dimension_is_product() {
        let s = uniform2(3, 4);
        assert_eq!(s.dimension(), 5 * 6);
        assert_eq!(s.elements().len(), 12);
        let m = [3, 2, 0];
        assert_eq!(s.unflatten(s.flatten(m)), m);
    }

    #[test]
    fn unit_weights_match_bsplines() {
        let s = uniform2(2, 3);
        let ws = WeightedSpace::unweighted(s.clone());
        let p = [0.3, 0.71];
        let a = s.eval(&p, 1).unwrap();
        let b = ws.eval_nurbs_basis(&p, 1).unwrap();
        for k in 0..a.values.len() {
            assert!((a.values[k] - b.values[k]).abs() < 1e-15);
            for c in 0..2 {
                assert!((a.grads[k][c] - b.grads[k][c]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn circle_arc_weights() {
        let kv = KnotVector::uniform(2, 1).unwrap();
        let s = TensorSpace::new(vec![kv]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let ws = WeightedSpace::new(s, vec![1.0, r, 1.0]).unwrap();
        let ev = ws.eval_nurbs_basis(&[0.5], 0).unwrap();
        let raw = [0.25, 0.5 * r, 0.25];
        let total: f64 = raw.iter().sum();
        for k in 0..3 {
            assert!((ev.values[k] - raw[k] / total).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let s = uniform2(1, 1);
        let mut w = vec![1.0; 9];
        w[4] = 0.0;
        assert!(matches!(WeightedSpace::new(s, w), Err(Error::NonPositiveWeight(_))));
    }

    #[test]
    fn multiplier_space_dimensions() {
        let t1 = TensorSpace::new(vec![KnotVector::<f64>::uniform(2, 4).unwrap()]).unwrap();
        assert_eq!(multiplier_space(&t1).unwrap().dimension(), 4);
        let t2 = uniform2(4, 3);
        assert_eq!(multiplier_space(&t2).unwrap().dimension(), 12);
        let t3 = TensorSpace::new(vec![KnotVector::<f64>::new(3, vec![0., 0., 0., 0., 0.5, 1., 1., 1., 1.]).unwrap()]).unwrap();
        assert_eq!(multiplier_space(&t3).unwrap().dimension(), 3);
        let lin = TensorSpace::new(vec![KnotVector::<f64>::uniform(1, 3).unwrap()]).unwrap();
        assert!(matches!(multiplier_space(&lin), Err(Error::DegreeTooSmall(1))));
    }

    proptest! {
        #[test]
        fn rational_partition_of_unity(
            w in proptest::collection::vec(0.2f64..5.0, 20),
            x in 0.0f64..=1.0,
            y in 0.0f64..=1.0,
        ) {
            let s = TensorSpace::new(vec![KnotVector::uniform(2, 2).unwrap(), KnotVector::uniform(3, 2).unwrap()]).unwrap();
            let ws = WeightedSpace::new(s, w).unwrap();
            let ev = ws.eval_nurbs_basis(&[x, y], 1).unwrap();
            prop_assert!((ev.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(ev.values.iter().all(|&v| v >= -1e-15));
            for c in 0..2 {
                let gs: f64 = ev.grads.iter().map(|g| g[c]).sum();
                prop_assert!(gs.abs() <= 1e-10 * ev.grads.iter().map(|g| g[c].abs()).sum::<f64>().max(1.0));
            }
        }
    }
}

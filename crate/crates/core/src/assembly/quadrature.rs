use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gauss–Legendre rule on `[-1, 1]`, used per direction on element boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub points: Vec<T>,
    pub weights: Vec<T>,
}

/// `n`-point Gauss–Legendre rule, `1 <= n <= 30`.
pub fn gauss_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    if !(1..=30).contains(&n) {
        return Err(Error::InvalidArgument(format!("{n} Gauss points (expected 1..=30)")));
    }
    let mut points = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let two = T::lit(2.0);
    let nf = T::from_count(n);
    for i in 0..(n + 1) / 2 {
        let mut x = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = two / ((T::one() - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = T::zero();
    }
    Ok(QuadratureRule { points, weights })
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::from_count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_count(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Tensor-product points mapped onto the box `[lower, upper]` in the
    /// first `dim` directions, with weights including the box volume factor.
    /// The first direction runs fastest.
    pub fn element_points(&self, lower: &[T; 3], upper: &[T; 3], dim: usize) -> Vec<(Vec<T>, T)> {
        let n = self.len();
        let half = T::lit(0.5);
        let count = n.pow(dim as u32);
        let mut out = Vec::with_capacity(count);
        for idx in 0..count {
            let mut pt = Vec::with_capacity(dim);
            let mut w = T::one();
            let mut rest = idx;
            for d in 0..dim {
                let k = rest % n;
                rest /= n;
                let len = upper[d] - lower[d];
                pt.push(lower[d] + len * half * (self.points[k] + T::one()));
                w *= self.weights[k] * len * half;
            }
            out.push((pt, w));
        }
        out
    }
}

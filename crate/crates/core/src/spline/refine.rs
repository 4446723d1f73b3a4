//! Knot insertion (Boehm) and Bézier degree elevation on control nets.
//!
//! Control points are plain coordinate vectors. For rational geometry pass
//! homogeneous coordinates `(w x, w)`.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::KnotVector;

/// Inserts `value` once. The resulting multiplicity may not exceed
/// `max(p - 1, 1)` so primal spaces stay at least continuous.
pub fn insert_knot<T: Real>(kv: &KnotVector<T>, controls: &[Vec<T>], value: T) -> Result<(KnotVector<T>, Vec<Vec<T>>)> {
    let p = kv.degree();
    let n = kv.num_basis();
    if controls.len() != n {
        return Err(Error::InvalidArgument(format!("{} control points for {} basis functions", controls.len(), n)));
    }
    let (lo, hi) = kv.domain();
    if !(value > lo && value < hi) {
        return Err(Error::OutOfDomain { value: value.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let s = kv.multiplicity(value);
    let max = p.saturating_sub(1).max(1);
    if s + 1 > max {
        return Err(Error::MultiplicityOverflow { value: value.as_f64(), multiplicity: s + 1, max });
    }
    let k = kv.find_span(value)?;
    let u = kv.knots();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i + p <= k {
            out.push(controls[i].clone());
        } else if i + s <= k {
            let alpha = (value - u[i]) / (u[i + p] - u[i]);
            let q = controls[i]
                .iter()
                .zip(&controls[i - 1])
                .map(|(&a, &b)| alpha * a + (T::one() - alpha) * b)
                .collect();
            out.push(q);
        } else {
            out.push(controls[i - 1].clone());
        }
    }
    let mut knots = u.to_vec();
    knots.insert(k + 1, value);
    Ok((KnotVector::from_raw(p, knots), out))
}

/// Inserts every value in turn.
pub fn insert_knots<T: Real>(kv: &KnotVector<T>, controls: &[Vec<T>], values: &[T]) -> Result<(KnotVector<T>, Vec<Vec<T>>)> {
    let mut kv = kv.clone();
    let mut ctrl = controls.to_vec();
    for &v in values {
        let (k, c) = insert_knot(&kv, &ctrl, v)?;
        kv = k;
        ctrl = c;
    }
    Ok((kv, ctrl))
}

/// Raises the degree of a single-span (Bézier) direction by one.
pub fn elevate_bezier<T: Real>(kv: &KnotVector<T>, controls: &[Vec<T>]) -> Result<(KnotVector<T>, Vec<Vec<T>>)> {
    let p = kv.degree();
    if kv.num_basis() != p + 1 || controls.len() != p + 1 {
        return Err(Error::InvalidArgument("degree elevation needs a single Bézier span".into()));
    }
    let (lo, hi) = kv.domain();
    let mut out = Vec::with_capacity(p + 2);
    out.push(controls[0].clone());
    for i in 1..=p {
        let a = T::from_count(i) / T::from_count(p + 1);
        out.push(
            controls[i - 1]
                .iter()
                .zip(&controls[i])
                .map(|(&x, &y)| a * x + (T::one() - a) * y)
                .collect(),
        );
    }
    out.push(controls[p].clone());
    let mut knots = vec![lo; p + 2];
    knots.extend(std::iter::repeat(hi).take(p + 2));
    Ok((KnotVector::new(p + 1, knots)?, out))
}

/// Evaluates a (possibly rational) curve: returns the Cartesian point for
/// homogeneous controls when `rational` is set.
pub fn eval_curve<T: Real>(kv: &KnotVector<T>, controls: &[Vec<T>], t: T, rational: bool) -> Result<Vec<T>> {
    let ev = kv.eval_basis(t, 0)?;
    let dim = controls[0].len();
    let mut acc = vec![T::zero(); dim];
    for (j, &b) in ev.values().iter().enumerate() {
        for c in 0..dim {
            acc[c] += b * controls[ev.first_index + j][c];
        }
    }
    if rational {
        let w = acc[dim - 1];
        acc.truncate(dim - 1);
        for a in &mut acc {
            *a /= w;
        }
    }
    Ok(acc)
}

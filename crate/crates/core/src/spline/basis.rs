use crate::error::Result;
use crate::scalar::Real;

use super::KnotVector;

/// Non-zero univariate basis functions (and derivatives) at one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEvaluation<T> {
    /// Index of the first non-zero basis function.
    pub first_index: usize,
    /// `ders[k][j]` is the k-th derivative of function `first_index + j`.
    pub ders: Vec<Vec<T>>,
}

impl<T: Real> BasisEvaluation<T> {
    pub fn values(&self) -> &[T] {
        &self.ders[0]
    }

    pub fn derivative(&self, order: usize) -> Option<&[T]> {
        self.ders.get(order).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.ders[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.ders[0].is_empty()
    }
}

impl<T: Real> KnotVector<T> {
    /// Cox–de Boor values and derivatives up to `n_deriv` at `t`.
    pub fn eval_basis(&self, t: T, n_deriv: usize) -> Result<BasisEvaluation<T>> {
        let span = self.find_span(t)?;
        Ok(self.eval_basis_in_span(span, t, n_deriv))
    }

    /// Same as [`KnotVector::eval_basis`] with the span already located.
    /// Derivative orders above the degree are returned as zero rows.
    pub fn eval_basis_in_span(&self, span: usize, t: T, n_deriv: usize) -> BasisEvaluation<T> {
        let p = self.degree();
        let u = self.knots();
        let zero = T::zero();
        let mut ndu = vec![vec![zero; p + 1]; p + 1];
        let mut left = vec![zero; p + 1];
        let mut right = vec![zero; p + 1];
        ndu[0][0] = T::one();
        for j in 1..=p {
            left[j] = t - u[span + 1 - j];
            right[j] = u[span + j] - t;
            let mut saved = zero;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let mut ders = vec![vec![zero; p + 1]; n_deriv + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let nd = n_deriv.min(p);
        let mut a = vec![vec![zero; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = T::one();
            for k in 1..=nd {
                let mut d = zero;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize - 1) <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = T::from_count(p);
        for k in 1..=nd {
            for j in 0..=p {
                ders[k][j] *= factor;
            }
            factor *= T::from_count(p.saturating_sub(k));
        }
        BasisEvaluation { first_index: span - p, ders }
    }

    /// Value of basis function `i` at `t` (zero outside its support).
    pub fn basis_value(&self, i: usize, t: T) -> Result<T> {
        let ev = self.eval_basis(t, 0)?;
        Ok(if i >= ev.first_index && i < ev.first_index + ev.len() {
            ev.values()[i - ev.first_index]
        } else {
            T::zero()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kv(p: usize, k: &[f64]) -> KnotVector<f64> {
        KnotVector::new(p, k.to_vec()).unwrap()
    }

    #[test]
    fn bernstein_midpoint() {
        let ev = kv(2, &[0., 0., 0., 1., 1., 1.]).eval_basis(0.5, 0).unwrap();
        assert_eq!(ev.first_index, 0);
        assert_eq!(ev.values(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = kv(2, &[0., 0., 0., 0.5, 1., 1., 1.]);
        let t = 0.25;
        let ev = k.eval_basis(t, 1).unwrap();
        let d = ev.derivative(1).unwrap();
        assert!(d.iter().sum::<f64>().abs() < 1e-10);
        let step = 1e-6;
        for (j, dj) in d.iter().enumerate() {
            let i = ev.first_index + j;
            let fd = (k.basis_value(i, t + step).unwrap() - k.basis_value(i, t - step).unwrap()) / (2.0 * step);
            assert!((fd - dj).abs() < 1e-6, "{fd} vs {dj}");
        }
    }

    #[test]
    fn degree_zero_is_indicator() {
        let k = kv(0, &[0., 0.5, 1.]);
        let ev = k.eval_basis(0.5, 0).unwrap();
        assert_eq!(ev.first_index, 1);
        assert_eq!(ev.values(), &[1.0]);
        assert_eq!(k.basis_value(0, 0.49).unwrap(), 1.0);
        assert_eq!(k.basis_value(0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn second_derivative_of_cubic() {
        // B_0 = (1-t)^3 on a single Bezier span: B_0'' = 6(1-t)
        let k = kv(3, &[0., 0., 0., 0., 1., 1., 1., 1.]);
        let ev = k.eval_basis(0.3, 2).unwrap();
        assert!((ev.ders[2][0] - 6.0 * 0.7).abs() < 1e-12);
        assert!(ev.ders[2].iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn out_of_domain() {
        assert!(kv(2, &[0., 0., 0., 1., 1., 1.]).eval_basis(1.1, 0).is_err());
    }

    fn random_knots() -> impl Strategy<Value = KnotVector<f64>> {
        (1usize..=4, proptest::collection::vec(0.01f64..1.0, 1..6)).prop_map(|(p, gaps)| {
            let total: f64 = gaps.iter().sum();
            let mut bps = vec![0.0];
            let mut acc = 0.0;
            for g in &gaps {
                acc += g / total;
                bps.push(acc);
            }
            *bps.last_mut().unwrap() = 1.0;
            KnotVector::open_simple(&bps, p).unwrap()
        })
    }

    proptest! {
        #[test]
        fn partition_of_unity_and_support(k in random_knots(), t in 0.0f64..=1.0) {
            let ev = k.eval_basis(t, 1).unwrap();
            let p = k.degree();
            prop_assert_eq!(ev.len(), p + 1);
            prop_assert!((ev.values().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(ev.values().iter().all(|&v| v >= -1e-15));
            let d = ev.derivative(1).unwrap();
            let mag: f64 = d.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            prop_assert!(d.iter().sum::<f64>().abs() <= 1e-10 * mag);
            for (j, &v) in ev.values().iter().enumerate() {
                let i = ev.first_index + j;
                if v != 0.0 {
                    prop_assert!(k.knots()[i] <= t && t <= k.knots()[i + p + 1]);
                }
            }
        }
    }
}

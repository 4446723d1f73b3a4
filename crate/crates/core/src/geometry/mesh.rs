use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::small;
use crate::spline::TensorSpace;

use super::{BoundaryTrace, NurbsPatch};

/// One mesh element: a product of non-empty knot spans.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<T> {
    pub spans: [usize; 3],
    pub lower: [T; 3],
    pub upper: [T; 3],
    /// Largest distance between two of the element's physical corners.
    pub size: T,
}

/// Element list of a patch (or trace) with physical element sizes.
#[derive(Debug, Clone)]
pub struct MeshView<T> {
    elements: Vec<Element<T>>,
    h: T,
}

impl<T: Real> MeshView<T> {
    pub fn new(patch: &NurbsPatch<T>) -> Self {
        Self::build(patch.tensor(), |z| patch.point(z).expect("corner inside domain"))
    }

    pub fn from_trace(trace: &BoundaryTrace<T>) -> Self {
        Self::build(trace.surface().space(), |s| trace.eval(s).expect("corner inside domain").x)
    }

    fn build(tensor: &TensorSpace<T>, point: impl Fn(&[T]) -> [T; 3]) -> Self {
        let dim = tensor.param_dim();
        let mut elements = Vec::new();
        let mut h = T::zero();
        for spans in tensor.elements() {
            let mut lower = [T::zero(); 3];
            let mut upper = [T::zero(); 3];
            for d in 0..dim {
                let k = tensor.direction(d).knots();
                lower[d] = k[spans[d]];
                upper[d] = k[spans[d] + 1];
            }
            let corners: Vec<[T; 3]> = (0..1usize << dim)
                .map(|c| {
                    let z: Vec<T> = (0..dim).map(|d| if c >> d & 1 == 1 { upper[d] } else { lower[d] }).collect();
                    point(&z)
                })
                .collect();
            let mut size = T::zero();
            for a in 0..corners.len() {
                for b in a + 1..corners.len() {
                    size = size.max(small::distance(&corners[a], &corners[b]));
                }
            }
            h = h.max(size);
            elements.push(Element { spans, lower, upper, size });
        }
        MeshView { elements, h }
    }

    pub fn elements(&self) -> &[Element<T>] {
        &self.elements
    }

    /// Global mesh size `max h_Q`.
    pub fn h(&self) -> T {
        self.h
    }
}

/// Breakpoints on `[0, 1]` with `round(span_fraction * n_spans)` uniform
/// spans packed into `[0, length_fraction]` and the rest uniform on
/// `[length_fraction, 1]`.
pub fn graded_breakpoints<T: Real>(n_spans: usize, span_fraction: T, length_fraction: T) -> Result<Vec<T>> {
    let inside = |f: T| f > T::zero() && f < T::one();
    if !inside(span_fraction) || !inside(length_fraction) {
        return Err(Error::InvalidArgument("grading fractions must lie in (0, 1)".into()));
    }
    if n_spans < 2 {
        return Err(Error::InvalidArgument("graded mesh needs at least two spans".into()));
    }
    let fine = (span_fraction * T::from_count(n_spans)).round().to_usize().unwrap_or(0);
    if fine < 1 || fine >= n_spans {
        return Err(Error::InvalidArgument(format!("{fine} of {n_spans} spans in the fine band")));
    }
    let coarse = n_spans - fine;
    let mut out = Vec::with_capacity(n_spans + 1);
    for i in 0..fine {
        out.push(length_fraction * T::from_count(i) / T::from_count(fine));
    }
    for i in 0..coarse {
        out.push(length_fraction + (T::one() - length_fraction) * T::from_count(i) / T::from_count(coarse));
    }
    out.push(T::one());
    Ok(out)
}

/// Splits every interval of a breakpoint sequence into `2^levels` equal parts.
pub fn subdivide<T: Real>(breakpoints: &[T], levels: usize) -> Vec<T> {
    let parts = 1usize << levels;
    let mut out = Vec::with_capacity((breakpoints.len() - 1) * parts + 1);
    for w in breakpoints.windows(2) {
        for k in 0..parts {
            out.push(w[0] + (w[1] - w[0]) * T::from_count(k) / T::from_count(parts));
        }
    }
    out.push(*breakpoints.last().expect("non-empty breakpoints"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{identity_patch, quarter_disc};

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn grading_examples() {
        let g = graded_breakpoints::<f64>(10, 0.8, 0.1).unwrap();
        let mut expected: Vec<f64> = (0..8).map(|i| 0.1 * i as f64 / 8.0).collect();
        expected.extend([0.1, 0.55, 1.0]);
        assert!(close(&g, &expected), "{g:?}");
        assert_eq!(g[1], 0.0125);
        assert!(close(&graded_breakpoints::<f64>(2, 0.5, 0.5).unwrap(), &[0.0, 0.5, 1.0]));
        assert!(close(&graded_breakpoints::<f64>(4, 0.75, 0.1).unwrap(), &[0.0, 0.1 / 3.0, 0.2 / 3.0, 0.1, 1.0]));
        assert!(graded_breakpoints::<f64>(10, 1.2, 0.1).is_err());
        assert!(graded_breakpoints::<f64>(10, 0.8, 0.0).is_err());
        assert!(graded_breakpoints::<f64>(1, 0.8, 0.1).is_err());
    }

    #[test]
    fn subdivision_nests() {
        let g = graded_breakpoints::<f64>(4, 0.75, 0.1).unwrap();
        let s = subdivide(&g, 1);
        assert_eq!(s.len(), 9);
        assert!(g.iter().all(|b| s.contains(b)));
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn unit_square_sizes() {
        let p = identity_patch::<f64>(2, 2).unwrap().bisect().unwrap();
        let m = MeshView::new(&p);
        assert_eq!(m.elements().len(), 4);
        assert!((m.h() - 0.5 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn quasi_uniform_within_bands() {
        let d = quarter_disc::<f64>(1.0).unwrap();
        let bps = subdivide(&graded_breakpoints::<f64>(10, 0.8, 0.1).unwrap(), 1);
        let p = d.patch.with_breakpoints(&[bps.clone(), bps]).unwrap();
        let t = BoundaryTrace::extract(&p, d.contact_face, d.rigid_normal).unwrap();
        let m = MeshView::from_trace(&t);
        for band in [(0.0, 0.1), (0.1, 1.0)] {
            let sizes: Vec<f64> = m
                .elements()
                .iter()
                .filter(|e| e.lower[0] >= band.0 - 1e-12 && e.upper[0] <= band.1 + 1e-12)
                .map(|e| e.size)
                .collect();
            let max = sizes.iter().cloned().fold(0.0, f64::max);
            let min = sizes.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(max / min <= 2.0, "band {band:?}: {max}/{min}");
        }
    }
}

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Univariate knot vector with its polynomial degree.
///
/// The knots are stored expanded (each breakpoint repeated by its
/// multiplicity). Basis functions are indexed from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector<T> {
    degree: usize,
    knots: Vec<T>,
}

impl<T: Real> KnotVector<T> {
    /// Wraps an arbitrary non-decreasing knot sequence.
    pub fn new(degree: usize, knots: Vec<T>) -> Result<Self> {
        if knots.len() < degree + 2 {
            return Err(Error::InvalidKnots(format!(
                "{} knots cannot carry a degree {} basis",
                knots.len(),
                degree
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidKnots("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnots("knots must be non-decreasing".into()));
        }
        let kv = KnotVector { degree, knots };
        if kv.domain().0 >= kv.domain().1 {
            return Err(Error::InvalidKnots("empty parametric domain".into()));
        }
        Ok(kv)
    }

    /// Open knot vector: end breakpoints repeated `degree + 1` times and
    /// interior breakpoints repeated by `interior_multiplicities`, each in
    /// `1..=degree-1`.
    pub fn open(breakpoints: &[T], degree: usize, interior_multiplicities: &[usize]) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidKnots("need at least two breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidKnots("breakpoints must be strictly increasing".into()));
        }
        if interior_multiplicities.len() != breakpoints.len() - 2 {
            return Err(Error::InvalidKnots(format!(
                "expected {} interior multiplicities, got {}",
                breakpoints.len() - 2,
                interior_multiplicities.len()
            )));
        }
        for (z, &m) in breakpoints[1..breakpoints.len() - 1].iter().zip(interior_multiplicities) {
            if m < 1 || m + 1 > degree {
                return Err(Error::MultiplicityOverflow {
                    value: z.as_f64(),
                    multiplicity: m,
                    max: degree.saturating_sub(1),
                });
            }
        }
        let mut knots = Vec::new();
        knots.extend(std::iter::repeat(breakpoints[0]).take(degree + 1));
        for (z, &m) in breakpoints[1..breakpoints.len() - 1].iter().zip(interior_multiplicities) {
            knots.extend(std::iter::repeat(*z).take(m));
        }
        knots.extend(std::iter::repeat(breakpoints[breakpoints.len() - 1]).take(degree + 1));
        KnotVector::new(degree, knots)
    }

    /// Open knot vector with simple interior knots (maximal smoothness).
    pub fn open_simple(breakpoints: &[T], degree: usize) -> Result<Self> {
        let mut knots = Vec::new();
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidKnots("breakpoints must be strictly increasing".into()));
        }
        knots.extend(std::iter::repeat(breakpoints[0]).take(degree + 1));
        knots.extend_from_slice(&breakpoints[1..breakpoints.len() - 1]);
        knots.extend(std::iter::repeat(breakpoints[breakpoints.len() - 1]).take(degree + 1));
        KnotVector::new(degree, knots)
    }

    /// Open knot vector on `[0, 1]` with `n_spans` uniform spans.
    pub fn uniform(degree: usize, n_spans: usize) -> Result<Self> {
        if n_spans == 0 {
            return Err(Error::InvalidKnots("zero spans".into()));
        }
        let bps: Vec<T> = (0..=n_spans).map(|i| T::from_count(i) / T::from_count(n_spans)).collect();
        Self::open_simple(&bps, degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    /// Number of basis functions, `|knots| - degree - 1`.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Parametric domain `[knots[p], knots[n]]`.
    pub fn domain(&self) -> (T, T) {
        (self.knots[self.degree], self.knots[self.knots.len() - self.degree - 1])
    }

    /// Distinct knot values inside the domain together with their multiplicities.
    pub fn breakpoints(&self) -> (Vec<T>, Vec<usize>) {
        let (lo, hi) = self.domain();
        let mut values: Vec<T> = Vec::new();
        let mut mults = Vec::new();
        for &k in &self.knots {
            if k < lo || k > hi {
                continue;
            }
            match values.last() {
                Some(&last) if last == k => *mults.last_mut().unwrap() += 1,
                _ => {
                    values.push(k);
                    mults.push(1);
                }
            }
        }
        (values, mults)
    }

    pub fn multiplicity(&self, value: T) -> usize {
        self.knots.iter().filter(|&&k| k == value).count()
    }

    /// End knots repeated exactly `degree + 1` times.
    pub fn is_open(&self) -> bool {
        let p = self.degree;
        let n = self.knots.len();
        let first = self.knots[0];
        let last = self.knots[n - 1];
        self.knots[..=p].iter().all(|&k| k == first)
            && self.knots[n - p - 1..].iter().all(|&k| k == last)
            && (n < p + 3 || self.knots[p + 1] != first)
            && (n < p + 3 || self.knots[n - p - 2] != last)
    }

    /// Indices `i` of the non-empty spans `[knots[i], knots[i+1])` in the domain.
    pub fn spans(&self) -> Vec<usize> {
        (self.degree..self.num_basis())
            .filter(|&i| self.knots[i] < self.knots[i + 1])
            .collect()
    }

    pub fn num_spans(&self) -> usize {
        self.spans().len()
    }

    /// Span index `i` with `knots[i] <= t < knots[i+1]`; the right end of the
    /// domain belongs to the last non-empty span.
    pub fn find_span(&self, t: T) -> Result<usize> {
        let (lo, hi) = self.domain();
        let slack = T::epsilon() * T::lit(16.0) * (hi - lo).max(T::one());
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::OutOfDomain { value: t.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
        }
        let n = self.num_basis();
        if t >= hi {
            let mut i = n - 1;
            while self.knots[i] >= self.knots[i + 1] {
                i -= 1;
            }
            return Ok(i);
        }
        if t <= lo {
            let mut i = self.degree;
            while self.knots[i] >= self.knots[i + 1] {
                i += 1;
            }
            return Ok(i);
        }
        let upper = self.knots.partition_point(|&k| k <= t);
        Ok((upper - 1).clamp(self.degree, n - 1))
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<T> {
        let p = self.degree;
        (0..self.num_basis())
            .map(|i| {
                if p == 0 {
                    (self.knots[i] + self.knots[i + 1]) * T::lit(0.5)
                } else {
                    self.knots[i + 1..=i + p].iter().copied().sum::<T>() / T::from_count(p)
                }
            })
            .collect()
    }

    /// The knot vector with its first and last knot removed once each,
    /// carrying degree `p - 2`.
    pub fn interior_knot_vector(&self) -> Result<KnotVector<T>> {
        if self.degree < 2 {
            return Err(Error::DegreeTooSmall(self.degree));
        }
        if self.num_basis() < 3 {
            return Err(Error::InvalidKnots("need at least three basis functions".into()));
        }
        KnotVector::new(self.degree - 2, self.knots[1..self.knots.len() - 1].to_vec())
    }

    /// Drops leading and trailing knots that only produce basis functions
    /// with empty support.
    pub fn trim_degenerate(&self) -> KnotVector<T> {
        let q = self.degree;
        let mut knots = self.knots.clone();
        while knots.len() > q + 2 && knots[0] == knots[q + 1] {
            knots.remove(0);
        }
        while knots.len() > q + 2 && knots[knots.len() - 1] == knots[knots.len() - q - 2] {
            knots.pop();
        }
        KnotVector { degree: q, knots }
    }

    /// Degree `p - 2` space built on the interior knot vector, keeping only
    /// basis functions with non-empty support.
    pub fn multiplier_knot_vector(&self) -> Result<KnotVector<T>> {
        Ok(self.interior_knot_vector()?.trim_degenerate())
    }

    /// Midpoints of all non-empty spans, the knots inserted by one uniform
    /// bisection.
    pub fn span_midpoints(&self) -> Vec<T> {
        self.spans()
            .into_iter()
            .map(|i| (self.knots[i] + self.knots[i + 1]) * T::lit(0.5))
            .collect()
    }

    pub(crate) fn from_raw(degree: usize, knots: Vec<T>) -> Self {
        KnotVector { degree, knots }
    }
}

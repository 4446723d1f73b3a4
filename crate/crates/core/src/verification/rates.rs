use crate::error::{Error, Result};

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::InvalidArgument("rate fit needs at least two points".into()));
    }
    if pairs.iter().any(|&(h, e)| !(h > 0.0) || !(e > 0.0)) {
        return Err(Error::InvalidArgument("rate fit needs positive h and errors".into()));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("rate fit needs distinct h".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert!((fit_rate(&[(0.1, 0.01), (0.05, 0.0025)]).unwrap() - 2.0).abs() < 1e-12);
        assert!(fit_rate(&[(0.1, 0.3), (0.05, 0.3)]).unwrap().abs() < 1e-12);
        assert!(fit_rate(&[(0.1, 0.0)]).is_err());
        assert!(fit_rate(&[(0.1, 0.0), (0.2, 1.0)]).is_err());
    }

    #[test]
    fn noisy_slope() {
        let noise = [1.01, 0.99, 1.008, 0.993];
        let pts: Vec<(f64, f64)> = (0..4).map(|k| {
            let h = 0.2 / 2f64.powi(k);
            (h, 3.0 * h.powf(1.5) * noise[k as usize])
        }).collect();
        let s = fit_rate(&pts).unwrap();
        assert!((1.45..=1.55).contains(&s), "{s}");
    }

    proptest! {
        #[test]
        fn scale_invariant(c in 1e-6f64..1e6, e0 in 0.01f64..1.0, e1 in 0.01f64..1.0, e2 in 0.01f64..1.0) {
            let base = [(0.4, e0), (0.2, e1), (0.1, e2)];
            let scaled: Vec<(f64, f64)> = base.iter().map(|&(h, e)| (h, c * e)).collect();
            prop_assert!((fit_rate(&base).unwrap() - fit_rate(&scaled).unwrap()).abs() < 1e-9);
        }
    }
}

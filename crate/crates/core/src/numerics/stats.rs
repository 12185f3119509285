use crate::error::{Error, Result};

/// Sorts a copy of `sample` ascending (total order on finite values).
pub fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut v = sample.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Type-7 quantile of an already sorted sample: linear interpolation between
/// order statistics at plotting positions (i−1)/(n−1).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let w = h - lo as f64;
    Ok(sorted[lo] + w * (sorted[hi] - sorted[lo]))
}

/// Type-7 sample quantile.
pub fn quantile(sample: &[f64], p: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    quantile_sorted(&sorted(sample), p)
}

/// Ceiling that treats values within 1e-9 (relative) of an integer as that
/// integer, so products like 0.6·1000 or 0.01·50000 do not round up.
pub fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// A sample autocorrelation with a flag for the constant-series case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Autocorrelation {
    pub value: f64,
    pub degenerate: bool,
}

/// Lag-`lag` sample autocorrelation: autocovariance over variance, both
/// mean-removed with denominator T. A constant series yields 0 with the
/// degenerate flag set.
pub fn autocorrelation(series: &[f64], lag: usize) -> Result<Autocorrelation> {
    let (values, degenerate) = autocorrelations(series, lag)?;
    let value = if lag == 0 {
        if degenerate { 0.0 } else { 1.0 }
    } else {
        values[lag - 1]
    };
    Ok(Autocorrelation { value, degenerate })
}

/// Autocorrelations at lags 1..=max_lag in one pass over the centered series.
pub fn autocorrelations(series: &[f64], max_lag: usize) -> Result<(Vec<f64>, bool)> {
    let t = series.len();
    if t <= max_lag {
        return Err(Error::InsufficientData {
            needed: max_lag + 1,
            got: t,
        });
    }
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|y| y - m).collect();
    let var: f64 = centered.iter().map(|c| c * c).sum();
    if var <= 0.0 || !var.is_finite() {
        return Ok((vec![0.0; max_lag], true));
    }
    let acf = (1..=max_lag)
        .map(|lag| {
            let cov: f64 = centered[lag..]
                .iter()
                .zip(&centered[..t - lag])
                .map(|(a, b)| a * b)
                .sum();
            cov / var
        })
        .collect();
    Ok((acf, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5).unwrap(), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 1.0).unwrap(), 4.0);
        assert!(matches!(quantile(&[], 0.5), Err(Error::EmptySample)));
    }

    #[test]
    fn acf_examples() {
        let s = [1.0, 3.0, 2.0, 5.0, 4.0];
        let a0 = autocorrelation(&s, 0).unwrap();
        assert_eq!(a0.value, 1.0);
        assert!(!a0.degenerate);
        let c = autocorrelation(&[2.0; 6], 1).unwrap();
        assert_eq!(c, Autocorrelation { value: 0.0, degenerate: true });
        assert!(autocorrelation(&[1.0, 2.0], 2).is_err());
        // hand computation: centered (-2, 0, -1, 2, 1), var sum 10, lag-1 sum 0+0-2+2 = 0
        assert!((autocorrelation(&s, 1).unwrap().value - 0.0).abs() < 1e-15);
        // lag 2: (-2)(-1) + 0*2 + (-1)(1) = 1
        assert!((autocorrelation(&s, 2).unwrap().value - 0.1).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn quantile_monotone_and_affine_equivariant(
            xs in prop::collection::vec(-1e3f64..1e3, 1..40),
            p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0,
            a in 0.01f64..10.0, b in -100.0f64..100.0,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let qlo = quantile(&xs, lo).unwrap();
            let qhi = quantile(&xs, hi).unwrap();
            prop_assert!(qlo <= qhi + 1e-12);
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let qy = quantile(&ys, p1).unwrap();
            let qx = quantile(&xs, p1).unwrap();
            prop_assert!((qy - (a * qx + b)).abs() <= 1e-9 * (1.0 + qy.abs()));
        }
    }
}

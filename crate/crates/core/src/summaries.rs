//! Summary-statistic maps for each model.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{autocorrelations, quantile_sorted, solve_normal_equations};

/// An ordered vector of summary statistics.
///
/// `degenerate` is raised when a component fell back to a conventional value
/// (autocorrelation of a constant series, a regression with an all-zero design).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryVector {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl SummaryVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, degenerate: false }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Deref for SummaryVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl From<Vec<f64>> for SummaryVector {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Static description of a summary map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummarySpec {
    pub name: String,
    pub k_eta: usize,
    pub per_obs_available: bool,
    /// Component used by the predictive p-value diagnostic.
    pub scalar_pp_index: usize,
}

pub fn normal_spec() -> SummarySpec {
    SummarySpec { name: "normal".into(), k_eta: 2, per_obs_available: true, scalar_pp_index: 1 }
}

pub fn gk_regression_spec() -> SummarySpec {
    SummarySpec { name: "gk-regression".into(), k_eta: 4, per_obs_available: false, scalar_pp_index: 0 }
}

pub fn ricker_spec() -> SummarySpec {
    SummarySpec { name: "ricker".into(), k_eta: 9, per_obs_available: false, scalar_pp_index: 8 }
}

pub fn returns_spec() -> SummarySpec {
    SummarySpec { name: "returns".into(), k_eta: 12, per_obs_available: false, scalar_pp_index: 10 }
}

/// (mean, mean squared deviation with denominator n).
pub fn summaries_normal(y: &[f64]) -> Result<SummaryVector> {
    if y.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: y.len() });
    }
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let v = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    Ok(SummaryVector::new(vec![m, v]))
}

/// Per-observation contributions (yᵢ, (yᵢ − ȳ)²), whose column means are
/// exactly [`summaries_normal`].
pub fn per_observation_normal(y: &[f64]) -> Result<DMatrix<f64>> {
    if y.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: y.len() });
    }
    let m = y.iter().sum::<f64>() / y.len() as f64;
    Ok(DMatrix::from_fn(y.len(), 2, |i, j| if j == 0 { y[i] } else { (y[i] - m).powi(2) }))
}

const OCTILES: [f64; 7] = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875];

/// Octiles E₁..E₇ of a sample (E₂, E₄, E₆ are the quartiles).
fn octiles(sample: &mut [f64]) -> Result<[f64; 7]> {
    sample.sort_unstable_by(f64::total_cmp);
    let mut out = [0.0; 7];
    for (o, p) in out.iter_mut().zip(OCTILES) {
        *o = quantile_sorted(sample, p)?;
    }
    Ok(out)
}

/// (IQR, robust skewness, robust kurtosis) from octiles.
fn robust_shape(e: &[f64; 7]) -> Result<[f64; 3]> {
    let (l1, l2, l3) = (e[1], e[3], e[5]);
    let iqr = l3 - l1;
    if !(iqr > 0.0) {
        return Err(Error::DegenerateSpread);
    }
    Ok([iqr, (l3 + l1 - 2.0 * l2) / iqr, (e[6] - e[4] + e[2] - e[0]) / iqr])
}

/// Through-origin slope, then IQR, robust skewness and robust kurtosis of
/// the residuals y − x·slope.
pub fn summaries_gk_regression(x: &[f64], y: &[f64]) -> Result<SummaryVector> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 8 {
        return Err(Error::InsufficientData { needed: 8, got: x.len() });
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if !(sxx > 0.0) {
        return Err(Error::SingularDesign);
    }
    let slope = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx;
    let mut resid: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - a * slope).collect();
    let e = octiles(&mut resid)?;
    let [iqr, skew, kurt] = robust_shape(&e)?;
    Ok(SummaryVector::new(vec![slope, iqr, skew, kurt]))
}

/// Autocorrelations at lags 1–5, the no-intercept regression of y_t^0.3 on
/// (y_{t−1}^0.3, y_{t−1}^0.6), the mean and the number of zeros.
pub fn summaries_ricker(y: &[u64]) -> Result<SummaryVector> {
    let t = y.len();
    if t < 7 {
        return Err(Error::InsufficientData { needed: 7, got: t });
    }
    let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
    let (acf, mut degenerate) = autocorrelations(&yf, 5)?;

    let pow: Vec<f64> = yf.iter().map(|&c| if c == 0.0 { 0.0 } else { c.powf(0.3) }).collect();
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for w in pow.windows(2) {
        let (x1, resp) = (w[0], w[1]);
        let x2 = x1 * x1;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        r1 += x1 * resp;
        r2 += x2 * resp;
    }
    let beta = if s11 == 0.0 {
        degenerate = true;
        vec![0.0, 0.0]
    } else {
        let xtx = DMatrix::from_row_slice(2, 2, &[s11, s12, s12, s22]);
        solve_normal_equations(&xtx, &DVector::from_vec(vec![r1, r2]))?
    };

    let mean = yf.iter().sum::<f64>() / t as f64;
    let zeros = y.iter().filter(|&&c| c == 0).count() as f64;

    let mut values = acf;
    values.extend_from_slice(&beta);
    values.push(mean);
    values.push(zeros);
    Ok(SummaryVector { values, degenerate })
}

/// Seven octiles, IQR, robust skewness, robust kurtosis, and the lag-1 and
/// lag-2 autocorrelations.
pub fn summaries_returns(y: &[f64]) -> Result<SummaryVector> {
    if y.len() < 8 {
        return Err(Error::InsufficientData { needed: 8, got: y.len() });
    }
    let mut buf = y.to_vec();
    let e = octiles(&mut buf)?;
    let shape = robust_shape(&e)?;
    let (acf, degenerate) = autocorrelations(y, 2)?;
    let mut values = e.to_vec();
    values.extend_from_slice(&shape);
    values.extend_from_slice(&acf);
    Ok(SummaryVector { values, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::normal_quantile;
    use crate::rng::SeedPath;
    use proptest::prelude::*;

    #[test]
    fn normal_examples() {
        assert_eq!(summaries_normal(&[0.0; 5]).unwrap().values, vec![0.0, 0.0]);
        assert_eq!(summaries_normal(&[1.0, -1.0]).unwrap().values, vec![0.0, 1.0]);
        let mut s = SeedPath::new(1).stream();
        let y: Vec<f64> = (0..100_000).map(|_| 0.8 * s.normal()).collect();
        assert!((summaries_normal(&y).unwrap()[1] - 0.64).abs() < 0.02);
    }

    #[test]
    fn normal_per_obs_average_to_summary() {
        let y = [0.3, -1.2, 2.5, 0.0, 0.7];
        let per = per_observation_normal(&y).unwrap();
        let s = summaries_normal(&y).unwrap();
        for j in 0..2 {
            assert!((per.column(j).mean() - s[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn gk_regression_exact_line_is_degenerate() {
        let x: Vec<f64> = (1..=20).map(|v| v as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v).collect();
        assert!(matches!(summaries_gk_regression(&x, &y), Err(Error::DegenerateSpread)));
    }

    #[test]
    fn gk_regression_symmetric_residuals() {
        // x orthogonal to the residual pattern so the slope is exactly 0.5
        let pattern = [-3.0, -1.0, 1.0, 3.0];
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..16 {
            let xi = if i % 2 == 0 { 1.0 } else { -1.0 };
            let e = pattern[(i / 2) % 4];
            x.push(xi);
            y.push(0.5 * xi + e);
        }
        let s = summaries_gk_regression(&x, &y).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-15);
        assert!(s[2].abs() < 1e-15);
    }

    #[test]
    fn gk_regression_normal_residual_constants() {
        let iqr = normal_quantile(0.75) - normal_quantile(0.25);
        let kurt = (normal_quantile(0.875) - normal_quantile(0.625) + normal_quantile(0.375)
            - normal_quantile(0.125))
            / iqr;
        assert!((iqr - 1.349).abs() < 1e-3);
        assert!((kurt - 1.233).abs() < 1e-3);
        let n = 200_000;
        let mut s = SeedPath::new(2).stream();
        let x: Vec<f64> = (0..n).map(|_| s.normal()).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + s.normal()).collect();
        let eta = summaries_gk_regression(&x, &y).unwrap();
        assert!((eta[1] - iqr).abs() < 0.02);
        assert!((eta[3] - kurt).abs() < 0.02);
    }

    #[test]
    fn ricker_all_zero_and_all_one() {
        let z = summaries_ricker(&[0; 30]).unwrap();
        assert!(z.degenerate);
        assert_eq!(&z[..5], &[0.0; 5]);
        assert_eq!(z[7], 0.0);
        assert_eq!(z[8], 30.0);
        let o = summaries_ricker(&[1; 30]).unwrap();
        assert_eq!(o[7], 1.0);
        assert_eq!(o[8], 0.0);
        assert!(o.is_finite());
        assert!(summaries_ricker(&[1; 6]).is_err());
    }

    /// Straightforward re-implementation used as an oracle.
    fn ricker_oracle(y: &[u64]) -> Vec<f64> {
        let t = y.len() as f64;
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let m = yf.iter().sum::<f64>() / t;
        let var = yf.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / t;
        let mut out = Vec::new();
        for lag in 1..=5 {
            let mut c = 0.0;
            for i in lag..y.len() {
                c += (yf[i] - m) * (yf[i - lag] - m);
            }
            out.push(c / t / var);
        }
        // 2x2 normal equations by Cramer's rule
        let (mut a, mut b, mut d, mut e, mut f) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 1..y.len() {
            let x1 = yf[i - 1].powf(0.3);
            let x2 = yf[i - 1].powf(0.6);
            let r = yf[i].powf(0.3);
            a += x1 * x1;
            b += x1 * x2;
            d += x2 * x2;
            e += x1 * r;
            f += x2 * r;
        }
        let det = a * d - b * b;
        out.push((d * e - b * f) / det);
        out.push((a * f - b * e) / det);
        out.push(m);
        out.push(yf.iter().filter(|v| **v == 0.0).count() as f64);
        out
    }

    #[test]
    fn ricker_matches_oracle_on_skeleton() {
        use crate::models::{simulate_ricker, RickerParams};
        let p = RickerParams::homoskedastic(44.7, 200.0, 0.0, 1.0, 20);
        let y = simulate_ricker(&p, &SeedPath::new(3)).unwrap();
        let ours = summaries_ricker(&y).unwrap();
        let oracle = ricker_oracle(&y);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn returns_examples() {
        let y: Vec<f64> = (-10..=10).map(|v| v as f64).collect();
        let s = summaries_returns(&y).unwrap();
        assert_eq!(s.len(), 12);
        assert!(s[8].abs() < 1e-15);
        let n = 100_000;
        let mut st = SeedPath::new(4).stream();
        let z: Vec<f64> = (0..n).map(|_| st.normal()).collect();
        let s = summaries_returns(&z).unwrap();
        let tol = 3.0 / (n as f64).sqrt();
        assert!(s[10].abs() < tol && s[11].abs() < tol);
        assert!((s[7] - 1.349).abs() < 0.02);
        assert!(matches!(summaries_returns(&[1.0; 20]), Err(Error::DegenerateSpread)));
    }

    proptest! {
        #[test]
        fn returns_location_scale_equivariance(
            y in prop::collection::vec(-5.0f64..5.0, 16..60),
            a in 0.1f64..10.0, b in -3.0f64..3.0,
        ) {
            let base = summaries_returns(&y);
            prop_assume!(base.is_ok());
            let base = base.unwrap();
            let ty: Vec<f64> = y.iter().map(|v| a * v + b).collect();
            let t = summaries_returns(&ty).unwrap();
            for j in 0..7 {
                prop_assert!((t[j] - (a * base[j] + b)).abs() <= 1e-9 * (1.0 + t[j].abs()));
            }
            prop_assert!((t[7] - a * base[7]).abs() <= 1e-9 * (1.0 + t[7].abs()));
            for j in 8..12 {
                prop_assert!((t[j] - base[j]).abs() <= 1e-8 * (1.0 + base[j].abs()));
            }
        }
    }
}

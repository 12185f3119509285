//! Assumed models: a prior, a pseudo-data simulator and a summary map bundled
//! behind [`ModelSpec`] for the ABC engine and the diagnostics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::gk::{gk_quantile, GkParams, PairedSample};
use super::returns::{draw_ma1_gk, Ma1GkParams};
use super::ricker::{draw_ricker, RickerParams};
use crate::error::{Error, Result};
use crate::numerics::{BootstrapScheme, Provenance, Resample, VarianceEstimate};
use crate::rng::Stream;
use crate::summaries::{self, SummarySpec, SummaryVector};

/// Independent uniform priors, one interval per parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformPrior {
    pub bounds: Vec<(f64, f64)>,
}

impl UniformPrior {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        Self { bounds }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn sample(&self, s: &mut Stream) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| s.uniform_range(lo, hi)).collect()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && theta.iter().zip(&self.bounds).all(|(t, (lo, hi))| t >= lo && t <= hi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() || self.bounds.iter().any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::InvalidConfig(format!("prior bounds must be finite with lo < hi: {:?}", self.bounds)));
        }
        Ok(())
    }
}

/// One inference problem: prior, simulator and summaries.
///
/// `n` is the number of observations for i.i.d. models and the series length
/// for time-series models.
pub trait ModelSpec: Send + Sync {
    type Data: Clone + Send + Sync + Resample;

    fn name(&self) -> &str;
    fn parameter_names(&self) -> Vec<String>;
    fn prior(&self) -> &UniformPrior;
    fn summary_spec(&self) -> SummarySpec;

    fn k_theta(&self) -> usize {
        self.prior().dim()
    }

    fn k_eta(&self) -> usize {
        self.summary_spec().k_eta
    }

    fn simulate(&self, theta: &[f64], n: usize, s: &mut Stream) -> Result<Self::Data>;

    fn summarize(&self, data: &Self::Data) -> Result<SummaryVector>;

    /// Summaries of one pseudo-data set. Models may override this with a
    /// draw from the exact sampling distribution of the summaries.
    fn simulate_summaries(&self, theta: &[f64], n: usize, s: &mut Stream) -> Result<SummaryVector> {
        self.summarize(&self.simulate(theta, n, s)?)
    }

    /// Rows whose column means are the summary vector, when such a
    /// decomposition exists.
    fn per_observation_summaries(&self, _data: &Self::Data) -> Option<Result<DMatrix<f64>>> {
        None
    }

    /// Closed-form estimate of V₀ from the observed data, when available.
    fn analytic_variance(&self, _data: &Self::Data) -> Option<Result<VarianceEstimate>> {
        None
    }

    fn bootstrap_scheme(&self) -> BootstrapScheme {
        BootstrapScheme::Iid
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// z ~ N(θ, 1) with summaries (mean, centered second moment).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalModel {
    pub prior: UniformPrior,
}

impl Default for NormalModel {
    fn default() -> Self {
        Self { prior: UniformPrior::new(vec![(-1.0, 1.0)]) }
    }
}

impl ModelSpec for NormalModel {
    type Data = Vec<f64>;

    fn name(&self) -> &str {
        "normal"
    }

    fn parameter_names(&self) -> Vec<String> {
        names(&["theta"])
    }

    fn prior(&self) -> &UniformPrior {
        &self.prior
    }

    fn summary_spec(&self) -> SummarySpec {
        summaries::normal_spec()
    }

    fn simulate(&self, theta: &[f64], n: usize, s: &mut Stream) -> Result<Vec<f64>> {
        Ok((0..n).map(|_| theta[0] + s.normal()).collect())
    }

    fn summarize(&self, data: &Vec<f64>) -> Result<SummaryVector> {
        summaries::summaries_normal(data)
    }

    /// For n unit-variance normals the sample mean is N(θ, 1/n) and n times
    /// the centered second moment is an independent χ²ₙ₋₁, so both summaries
    /// are drawn directly in O(1).
    fn simulate_summaries(&self, theta: &[f64], n: usize, s: &mut Stream) -> Result<SummaryVector> {
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        let nf = n as f64;
        let mean = theta[0] + s.normal() / nf.sqrt();
        let m2 = s.chi_squared(nf - 1.0) / nf;
        Ok(SummaryVector::new(vec![mean, m2]))
    }

    fn per_observation_summaries(&self, data: &Vec<f64>) -> Option<Result<DMatrix<f64>>> {
        Some(summaries::per_observation_normal(data))
    }

    /// diag(η₂, 2n·η₂²/(n−1)).
    fn analytic_variance(&self, data: &Vec<f64>) -> Option<Result<VarianceEstimate>> {
        Some(summaries::summaries_normal(data).map(|eta| {
            let n = data.len() as f64;
            let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                eta[1],
                2.0 * n * eta[1] * eta[1] / (n - 1.0),
            ]));
            VarianceEstimate::new(m, Provenance::Analytic)
        }))
    }
}

/// y = β·x + u with exogenous g-and-k regressor and error; infers (β, k_u).
///
/// The regressor is simulated from its own g-and-k law (fixed at `theta_x`)
/// independently of the error, whose location, scale and skewness are fixed
/// at `theta_u` and whose kurtosis is the second parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GkRegressionModel {
    pub prior: UniformPrior,
    pub theta_x: GkParams,
    pub theta_u: GkParams,
}

impl Default for GkRegressionModel {
    fn default() -> Self {
        let gk = GkParams::new(0.0, 1.0, 2.0, 1.0);
        Self { prior: UniformPrior::new(vec![(0.0, 5.0), (0.0, 5.0)]), theta_x: gk, theta_u: gk }
    }
}

impl ModelSpec for GkRegressionModel {
    type Data = PairedSample;

    fn name(&self) -> &str {
        "gk"
    }

    fn parameter_names(&self) -> Vec<String> {
        names(&["beta", "k"])
    }

    fn prior(&self) -> &UniformPrior {
        &self.prior
    }

    fn summary_spec(&self) -> SummarySpec {
        summaries::gk_regression_spec()
    }

    fn simulate(&self, theta: &[f64], n: usize, s: &mut Stream) -> Result<PairedSample> {
        let theta_u = GkParams { k: theta[1], ..self.theta_u };
        theta_u.validate()?;
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let xj = gk_quantile(s.normal(), &self.theta_x);
            let uj = gk_quantile(s.normal(), &theta_u);
            x.push(xj);
            y.push(theta[0] * xj + uj);
        }
        Ok(PairedSample { x, y })
    }

    fn summarize(&self, data: &PairedSample) -> Result<SummaryVector> {
        summaries::summaries_gk_regression(&data.x, &data.y)
    }
}

/// Homoskedastic Ricker counts with θ = (r, φ, σ) and N₁ fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RickerModel {
    pub prior: UniformPrior,
    pub n1: f64,
}

impl Default for RickerModel {
    fn default() -> Self {
        Self { prior: UniformPrior::new(vec![(40.0, 70.0), (5.0, 30.0), (0.1, 2.0)]), n1: 1.0 }
    }
}

impl ModelSpec for RickerModel {
    type Data = Vec<u64>;

    fn name(&self) -> &str {
        "ricker"
    }

    fn parameter_names(&self) -> Vec<String> {
        names(&["r", "phi", "sigma"])
    }

    fn prior(&self) -> &UniformPrior {
        &self.prior
    }

    fn summary_spec(&self) -> SummarySpec {
        summaries::ricker_spec()
    }

    fn simulate(&self, theta: &[f64], n: usize, s: &mut Stream) -> Result<Vec<u64>> {
        let p = RickerParams::homoskedastic(theta[0], theta[1], theta[2], self.n1, n);
        p.validate()?;
        Ok(draw_ricker(&p, s).counts)
    }

    fn summarize(&self, data: &Vec<u64>) -> Result<SummaryVector> {
        summaries::summaries_ricker(data)
    }

    fn bootstrap_scheme(&self) -> BootstrapScheme {
        BootstrapScheme::MovingBlock
    }
}

/// MA(1)–g-and-k returns with θ = (θ₁, a, b, g, k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ma1GkModel {
    pub prior: UniformPrior,
    #[serde(default = "default_c")]
    pub c: f64,
}

fn default_c() -> f64 {
    0.8
}

impl Default for Ma1GkModel {
    fn default() -> Self {
        Self {
            prior: UniformPrior::new(vec![(-1.0, 1.0), (0.0, 1.0), (0.0, 1.0), (-4.0, 4.0), (-0.5, 1.0)]),
            c: 0.8,
        }
    }
}

impl Ma1GkModel {
    pub fn params(&self, theta: &[f64]) -> Ma1GkParams {
        Ma1GkParams {
            theta1: theta[0],
            gk: GkParams { a: theta[1], b: theta[2], g: theta[3], k: theta[4], c: self.c },
        }
    }
}

impl ModelSpec for Ma1GkModel {
    type Data = Vec<f64>;

    fn name(&self) -> &str {
        "returns"
    }

    fn parameter_names(&self) -> Vec<String> {
        names(&["theta1", "a", "b", "g", "k"])
    }

    fn prior(&self) -> &UniformPrior {
        &self.prior
    }

    fn summary_spec(&self) -> SummarySpec {
        summaries::returns_spec()
    }

    fn simulate(&self, theta: &[f64], n: usize, s: &mut Stream) -> Result<Vec<f64>> {
        let p = self.params(theta);
        p.gk.validate()?;
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        Ok(draw_ma1_gk(&p, n, s).returns)
    }

    fn summarize(&self, data: &Vec<f64>) -> Result<SummaryVector> {
        summaries::summaries_returns(data)
    }

    fn bootstrap_scheme(&self) -> BootstrapScheme {
        BootstrapScheme::MovingBlock
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Resample;
use crate::rng::{SeedPath, Stream};

fn default_c() -> f64 {
    0.8
}

/// Parameters of the g-and-k quantile distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GkParams {
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub k: f64,
    #[serde(default = "default_c")]
    pub c: f64,
}

impl GkParams {
    pub fn new(a: f64, b: f64, g: f64, k: f64) -> Self {
        Self { a, b, g, k, c: 0.8 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::InvalidParameter(format!("g-and-k scale b must be > 0, got {}", self.b)));
        }
        if !(self.k > -0.5) {
            return Err(Error::InvalidParameter(format!("g-and-k kurtosis k must be > -0.5, got {}", self.k)));
        }
        if [self.a, self.g, self.c].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("g-and-k parameters must be finite".into()));
        }
        Ok(())
    }
}

/// The g-and-k quantile map applied to a standard normal deviate `z`:
/// a + b·[1 + c·tanh(g z / 2)]·(1 + z²)^k·z.
///
/// `tanh(g z / 2)` is the same ratio as (1 − e^{−gz})/(1 + e^{−gz}) but does
/// not overflow for large |g z|.
#[inline]
pub fn gk_quantile(z: f64, p: &GkParams) -> f64 {
    let skew = 1.0 + p.c * (0.5 * p.g * z).tanh();
    let kurt = if p.k == 0.0 { 1.0 } else { (1.0 + z * z).powf(p.k) };
    p.a + p.b * skew * kurt * z
}

/// Regressor/response pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairedSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Resample for PairedSample {
    fn n_obs(&self) -> usize {
        self.x.len()
    }

    fn resample(&self, indices: &[usize]) -> Self {
        Self {
            x: indices.iter().map(|&i| self.x[i]).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

/// The regression y = β·x + u with g-and-k marginals for x and u driven by a
/// correlated standard-normal pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndogGkParams {
    pub beta: f64,
    pub rho: f64,
    pub theta_x: GkParams,
    pub theta_u: GkParams,
}

impl EndogGkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho must lie in [-1, 1], got {}", self.rho)));
        }
        self.theta_x.validate()?;
        self.theta_u.validate()
    }
}

pub(crate) fn draw_gk_regression(params: &EndogGkParams, n: usize, s: &mut Stream) -> PairedSample {
    let tail = (1.0 - params.rho * params.rho).max(0.0).sqrt();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let zx = s.normal();
        let w = s.normal();
        let zu = params.rho * zx + tail * w;
        let xj = gk_quantile(zx, &params.theta_x);
        let uj = gk_quantile(zu, &params.theta_u);
        x.push(xj);
        y.push(xj * params.beta + uj);
    }
    PairedSample { x, y }
}

/// Simulates n pairs. z_u = ρ·z_x + √(1−ρ²)·w with w independent of z_x.
pub fn simulate_gk_regression(params: &EndogGkParams, n: usize, seed: &SeedPath) -> Result<PairedSample> {
    params.validate()?;
    Ok(draw_gk_regression(params, n, &mut seed.stream()))
}

/// An i.i.d. g-and-k sample of size n.
pub fn simulate_gk(params: &GkParams, n: usize, seed: &SeedPath) -> Result<Vec<f64>> {
    params.validate()?;
    let mut s = seed.stream();
    Ok((0..n).map(|_| gk_quantile(s.normal(), params)).collect())
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::stats::ceil_tolerant;
use crate::rng::{SeedPath, Stream};

/// Ricker population dynamics observed through Poisson counts, with a noise
/// regime switch at t₁ = ⌈k_break·T⌉.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RickerParams {
    pub r: f64,
    pub phi: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub k_break: f64,
    #[serde(rename = "N1")]
    pub n1: f64,
    #[serde(rename = "T")]
    pub t_len: usize,
}

impl RickerParams {
    /// The homoskedastic special case (sigma1 = sigma2 = sigma).
    pub fn homoskedastic(r: f64, phi: f64, sigma: f64, n1: f64, t_len: usize) -> Self {
        Self { r, phi, sigma1: sigma, sigma2: sigma, k_break: 1.0, n1, t_len }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.r > 0.0
            && self.phi >= 0.0
            && self.sigma1 >= 0.0
            && self.sigma2 >= 0.0
            && self.k_break > 0.0
            && self.k_break <= 1.0
            && self.n1 > 0.0
            && self.t_len >= 1
            && [self.r, self.phi, self.sigma1, self.sigma2, self.n1].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid Ricker parameters {self:?}")))
        }
    }

    /// Last time index (1-based) of the first noise regime.
    pub fn break_index(&self) -> usize {
        (ceil_tolerant(self.k_break * self.t_len as f64) as usize).clamp(1, self.t_len)
    }
}

/// Latent population path and observed counts.
#[derive(Clone, Debug, PartialEq)]
pub struct RickerPath {
    pub latent: Vec<f64>,
    pub counts: Vec<u64>,
}

pub(crate) fn draw_ricker(p: &RickerParams, s: &mut Stream) -> RickerPath {
    let t_len = p.t_len;
    let t1 = p.break_index();
    let mut latent = Vec::with_capacity(t_len);
    let mut counts = Vec::with_capacity(t_len);
    let mut n = p.n1;
    for t in 1..=t_len {
        latent.push(n);
        counts.push(s.poisson(p.phi * n));
        if t < t_len {
            let sigma = if t <= t1 { p.sigma1 } else { p.sigma2 };
            let u = sigma * s.normal();
            n = p.r * n * (u - n).exp();
        }
    }
    RickerPath { latent, counts }
}

/// Simulates the latent path N₁..N_T and counts Y_t ~ Poisson(φ·N_t).
///
/// N_{t+1} = r·N_t·exp(u_t − N_t) with u_t ~ N(0, σ_t²), σ_t = sigma1 for
/// t ≤ t₁ and sigma2 afterwards.
pub fn simulate_ricker_path(params: &RickerParams, seed: &SeedPath) -> Result<RickerPath> {
    params.validate()?;
    Ok(draw_ricker(params, &mut seed.stream()))
}

/// Observed counts only.
pub fn simulate_ricker(params: &RickerParams, seed: &SeedPath) -> Result<Vec<u64>> {
    simulate_ricker_path(params, seed).map(|p| p.counts)
}

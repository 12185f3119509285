use serde::{Deserialize, Serialize};

use super::gk::{gk_quantile, GkParams};
use crate::error::{Error, Result};
use crate::rng::{SeedPath, Stream};

/// MA(1) latent process pushed through the g-and-k quantile map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ma1GkParams {
    pub theta1: f64,
    pub gk: GkParams,
}

/// Standardized latent series and the observed returns.
#[derive(Clone, Debug, PartialEq)]
pub struct Ma1GkPath {
    pub latent: Vec<f64>,
    pub returns: Vec<f64>,
}

pub(crate) fn draw_ma1_gk(p: &Ma1GkParams, t_len: usize, s: &mut Stream) -> Ma1GkPath {
    let scale = 1.0 / (1.0 + p.theta1 * p.theta1).sqrt();
    let mut prev = s.normal();
    let mut latent = Vec::with_capacity(t_len);
    let mut returns = Vec::with_capacity(t_len);
    for _ in 0..t_len {
        let eps = s.normal();
        let z = (eps + p.theta1 * prev) * scale;
        prev = eps;
        latent.push(z);
        returns.push(gk_quantile(z, &p.gk));
    }
    Ma1GkPath { latent, returns }
}

/// z_t = (ε_t + θ₁ε_{t−1})/√(1+θ₁²) with a presample ε₀, then y_t = Q_gk(z_t).
pub fn simulate_ma1_gk_path(params: &Ma1GkParams, t_len: usize, seed: &SeedPath) -> Result<Ma1GkPath> {
    if t_len < 2 {
        return Err(Error::InsufficientData { needed: 2, got: t_len });
    }
    if !params.theta1.is_finite() {
        return Err(Error::InvalidParameter("theta1 must be finite".into()));
    }
    params.gk.validate()?;
    Ok(draw_ma1_gk(params, t_len, &mut seed.stream()))
}

pub fn simulate_ma1_gk(params: &Ma1GkParams, t_len: usize, seed: &SeedPath) -> Result<Vec<f64>> {
    simulate_ma1_gk_path(params, t_len, seed).map(|p| p.returns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::autocorrelation;

    #[test]
    fn white_noise_when_theta_zero() {
        let gk = GkParams::new(0.0, 1.0, 0.0, 0.0);
        let p = Ma1GkParams { theta1: 0.0, gk };
        let path = simulate_ma1_gk_path(&p, 50_000, &SeedPath::new(1)).unwrap();
        assert_eq!(path.latent, path.returns);
        assert!(autocorrelation(&path.latent, 1).unwrap().value.abs() < 3.0 / (50_000f64).sqrt());
    }

    #[test]
    fn latent_ma1_moments() {
        let p = Ma1GkParams { theta1: 0.5, gk: GkParams::new(0.08, 0.08, -0.2, 0.02) };
        let t = 200_000;
        let path = simulate_ma1_gk_path(&p, t, &SeedPath::new(2)).unwrap();
        let r1 = autocorrelation(&path.latent, 1).unwrap().value;
        assert!((r1 - 0.4).abs() < 0.01, "{r1}");
        let m = path.latent.iter().sum::<f64>() / t as f64;
        let v = path.latent.iter().map(|z| (z - m).powi(2)).sum::<f64>() / t as f64;
        assert!((v - 1.0).abs() < 0.02, "{v}");
    }
}

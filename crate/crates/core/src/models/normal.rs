use crate::error::{Error, Result};
use crate::rng::SeedPath;

/// n i.i.d. N(theta, sigma²) draws.
pub fn simulate_normal(theta: f64, sigma: f64, n: usize, seed: &SeedPath) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "normal model needs finite theta and sigma >= 0, got ({theta}, {sigma})"
        )));
    }
    let mut s = seed.stream();
    Ok((0..n).map(|_| theta + sigma * s.normal()).collect())
}

//! χ² distribution functions.

use super::special::{gamma_p, gamma_q, ln_gamma, normal_quantile};
use crate::error::{Error, Result};

/// P(X ≤ x) for X ~ χ²(dof).
pub fn chi2_cdf(dof: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_p(0.5 * dof, 0.5 * x)
    }
}

/// P(X > x) for X ~ χ²(dof).
pub fn chi2_sf(dof: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_q(0.5 * dof, 0.5 * x)
    }
}

fn chi2_pdf(dof: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let k = 0.5 * dof;
    ((k - 1.0) * x.ln() - 0.5 * x - k * std::f64::consts::LN_2 - ln_gamma(k)).exp()
}

/// Inverse χ² CDF: the `x` with P(dof/2, x/2) = `prob`.
///
/// Safeguarded Newton iteration inside a bisection bracket, started from the
/// Wilson–Hilferty approximation.
pub fn chi2_quantile(dof: u32, prob: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::InvalidParameter("chi2 dof must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&prob) {
        return Err(Error::BadProbability(prob));
    }
    if prob == 0.0 {
        return Ok(0.0);
    }
    let k = f64::from(dof);

    let mut lo = 0.0;
    let mut hi = k.max(1.0);
    while chi2_cdf(k, hi) < prob {
        lo = hi;
        hi *= 2.0;
    }

    let z = normal_quantile(prob);
    let h = 2.0 / (9.0 * k);
    let wh = k * (1.0 - h + z * h.sqrt()).powi(3);
    let mut x = if wh > lo && wh < hi { wh } else { 0.5 * (lo + hi) };

    for _ in 0..200 {
        let f = chi2_cdf(k, x) - prob;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = chi2_pdf(k, x);
        let mut next = if pdf > 0.0 { x - f / pdf } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-14 * x.max(1.0) || hi - lo <= 1e-14 * hi.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

//! Estimators of the limiting covariance V₀ of √n-scaled observed summaries.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{factor_spd, RegularizedSpd};
use crate::error::{Error, Result};
use crate::rng::SeedPath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PlugIn,
    Bootstrap,
    Analytic,
}

/// A k×k symmetric estimate of V₀.
#[derive(Clone, Debug)]
pub struct VarianceEstimate {
    pub matrix: DMatrix<f64>,
    pub provenance: Provenance,
    /// Ridge added to the diagonal by [`VarianceEstimate::factor`]; 0 until then.
    pub ridge_applied: f64,
    /// Set when the estimate is identically zero (no variation to measure).
    pub degenerate: bool,
}

impl VarianceEstimate {
    pub fn new(matrix: DMatrix<f64>, provenance: Provenance) -> Self {
        let degenerate = matrix.iter().all(|v| *v == 0.0);
        Self {
            matrix,
            provenance,
            ridge_applied: 0.0,
            degenerate,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Factors the estimate under the ridge policy, recording the ridge used.
    pub fn factor(&mut self) -> Result<RegularizedSpd> {
        let f = factor_spd(&self.matrix).ok_or(Error::SingularVariance)?;
        self.ridge_applied = f.ridge;
        Ok(f)
    }
}

/// Plug-in estimate n⁻¹ Σ (ηᵢ − η̄)(ηᵢ − η̄)ᵀ from per-observation summaries
/// (rows of `per_obs`).
pub fn plugin_variance(per_obs: &DMatrix<f64>) -> Result<VarianceEstimate> {
    let (n, k) = per_obs.shape();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let means: Vec<f64> = (0..k).map(|j| per_obs.column(j).mean()).collect();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..n {
        for a in 0..k {
            let da = per_obs[(i, a)] - means[a];
            for b in a..k {
                m[(a, b)] += da * (per_obs[(i, b)] - means[b]);
            }
        }
    }
    for a in 0..k {
        for b in a..k {
            let v = m[(a, b)] / n as f64;
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(VarianceEstimate::new(m, Provenance::PlugIn))
}

/// Data that can be resampled observation-wise.
pub trait Resample {
    fn n_obs(&self) -> usize;
    fn resample(&self, indices: &[usize]) -> Self;
}

impl<T: Clone> Resample for Vec<T> {
    fn n_obs(&self) -> usize {
        self.len()
    }

    fn resample(&self, indices: &[usize]) -> Self {
        indices.iter().map(|&i| self[i].clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BootstrapScheme {
    Iid,
    MovingBlock,
}

/// Block length ⌈n^{1/3}⌉ used by the moving-block scheme.
pub fn block_length(n: usize) -> usize {
    let c = (n as f64).cbrt();
    let r = c.round();
    let l = if (c - r).abs() < 1e-9 { r } else { c.ceil() };
    (l as usize).clamp(1, n.max(1))
}

/// Resampling indices for one bootstrap replicate.
pub fn bootstrap_indices(n: usize, scheme: BootstrapScheme, seed: &SeedPath) -> Vec<usize> {
    let mut s = seed.stream();
    match scheme {
        BootstrapScheme::Iid => (0..n).map(|_| s.index(n)).collect(),
        BootstrapScheme::MovingBlock => {
            let l = block_length(n);
            let starts = n - l + 1;
            let mut idx = Vec::with_capacity(n + l);
            while idx.len() < n {
                let start = s.index(starts);
                idx.extend(start..start + l);
            }
            idx.truncate(n);
            idx
        }
    }
}

/// Bootstrap estimate: n × (sample covariance, denominator B−1, of the B
/// replicate summary vectors).
pub fn bootstrap_variance<D, F>(
    data: &D,
    summary_fn: F,
    replicates: usize,
    scheme: BootstrapScheme,
    seed: &SeedPath,
) -> Result<VarianceEstimate>
where
    D: Resample + Sync,
    F: Fn(&D) -> Result<Vec<f64>> + Sync,
{
    if replicates < 2 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 2 replicates, got {replicates}"
        )));
    }
    let n = data.n_obs();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let reps: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let idx = bootstrap_indices(n, scheme, &seed.child(b as u64));
            summary_fn(&data.resample(&idx))
        })
        .collect::<Result<_>>()?;
    let k = reps[0].len();
    let means: Vec<f64> = (0..k)
        .map(|j| reps.iter().map(|r| r[j]).sum::<f64>() / replicates as f64)
        .collect();
    let mut m = DMatrix::zeros(k, k);
    for r in &reps {
        for a in 0..k {
            let da = r[a] - means[a];
            for b in a..k {
                m[(a, b)] += da * (r[b] - means[b]);
            }
        }
    }
    let scale = n as f64 / (replicates - 1) as f64;
    for a in 0..k {
        for b in a..k {
            let v = m[(a, b)] * scale;
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(VarianceEstimate::new(m, Provenance::Bootstrap))
}

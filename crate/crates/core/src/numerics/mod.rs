//! Numeric primitives shared by the simulators, the ABC engine and the
//! diagnostics.

pub mod chi2;
pub mod linalg;
pub mod special;
pub mod stats;
pub mod variance;

pub use chi2::{chi2_cdf, chi2_quantile, chi2_sf};
pub use linalg::{condition_number, factor_spd, ols_fit, solve_normal_equations};
pub use stats::{autocorrelation, autocorrelations, ceil_tolerant, mean, quantile, quantile_sorted, sorted, Autocorrelation};
pub use variance::{
    block_length, bootstrap_indices, bootstrap_variance, plugin_variance, BootstrapScheme,
    Provenance, Resample, VarianceEstimate,
};

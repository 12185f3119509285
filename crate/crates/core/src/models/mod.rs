//! Forward simulators for the data-generating processes and the assumed
//! models handed to the ABC engine.

mod assumed;
pub mod gk;
pub mod normal;
pub mod returns;
pub mod ricker;

pub use assumed::{GkRegressionModel, Ma1GkModel, ModelSpec, NormalModel, RickerModel, UniformPrior};
pub use gk::{gk_quantile, simulate_gk, simulate_gk_regression, EndogGkParams, GkParams, PairedSample};
pub use normal::simulate_normal;
pub use returns::{simulate_ma1_gk, simulate_ma1_gk_path, Ma1GkParams, Ma1GkPath};
pub use ricker::{simulate_ricker, simulate_ricker_path, RickerParams, RickerPath};

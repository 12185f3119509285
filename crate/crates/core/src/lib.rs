pub mod abc;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod models;
pub mod numerics;
pub mod rng;
pub mod summaries;

pub use error::{Error, Result};
pub use rng::{SeedPath, Stream};

//! Monte Carlo studies and the empirical application built on the ABC
//! engine and the diagnostics.

mod application;
mod config;
mod pipeline;
mod power;

pub use application::{run_application, ApplicationResult, DiagnosticOutcome, ParameterSummary};
pub use config::{preset, AbcSettings, DiagnoseSettings, InnerAbc, StudyConfig, StudyModel, TableMode, PRESETS};
pub use pipeline::{fit_and_diagnose, stage, Fit};
pub use power::{
    replication_seed, run_power_study, run_timing_study, shared_table_seed, with_threads, PowerRow, PowerStudy,
    ReplicationRecord, TimingRow, TimingTable,
};

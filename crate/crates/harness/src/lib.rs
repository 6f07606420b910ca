//! Experiment runner for the `nearbest` library: configuration parsing,
//! degree sweeps, rate fits and invariant reports.

pub mod config;
pub mod export;
pub mod expr;
pub mod rates;
pub mod run;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig};
pub use rates::{fit_rate, RateFit, RateModel};
pub use run::{run_scenario, ResultRow, RunOptions};
pub use verify::{verify_suite, Report};

//! Reproducible experiments on the symmetric stochastic block model:
//! threshold tables and grids, graph generation, exhaustive detection,
//! `Φ` maximization, second-moment estimates and the good-partition
//! distinguishing test.

pub mod config;
pub mod error;
pub mod experiments;
pub mod format;

pub use config::{ConfigLayer, ExperimentConfig, Mode, Model, Rates};
pub use error::CliError;
pub use experiments::{run_distinguish, run_grid, run_table1, DistinguishResult, GridRow};

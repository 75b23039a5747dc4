//! Symmetric stochastic block model: detectability thresholds, graph
//! samplers, exhaustive good-partition search and the second-moment
//! optimisation over doubly stochastic overlap matrices.

pub mod assignment;
pub mod error;
pub mod graph;
pub mod graphgen;
pub mod matrix;
pub mod params;
pub mod partition;
pub mod rng;
pub mod secondmoment;
pub mod serde_ext;
pub mod thresholds;

pub use error::{Error, Result};
pub use graph::Graph;
pub use matrix::SquareMatrix;
pub use params::{ConnectivityMatrix, ModelParams};
pub use partition::{OverlapMatrix, Partition};
pub use rng::RandomStream;
pub use secondmoment::{BirkhoffPoint, PhiReport, SecondMomentEstimate};
pub use thresholds::ThresholdReport;

//! Scenario synthesis: ground-truth trajectories and sensor observations.

mod config;
pub mod io;
mod measure;
mod truth;

pub use config::{FilterMode, Region, ScenarioConfig};
pub use measure::{generate_measurements, poisson_inverse, Measurement, ScanData};
pub use truth::{generate_truth, TruthLog, TruthState};

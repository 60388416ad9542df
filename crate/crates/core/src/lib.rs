//! Climate-driven simulation of a three-state solar-collector wall.
//!
//! The pipeline reads hourly station climates ([`climate`]), simulates the
//! collector as a linear state-space system ([`collector`], [`statespace`]),
//! reduces each year to two performance indicators ([`indicators`]), runs
//! parameter studies per station ([`sweep`]) and renders the results as
//! station tables and interpolated maps ([`mapping`]).

pub mod climate;
pub mod collector;
pub mod indicators;
pub mod mapping;
pub mod statespace;
pub mod sweep;

pub use climate::{ClimateRecord, ClimateSeries, Station, SyntheticProfile};
pub use collector::{default_params, CollectorParams};
pub use indicators::{evaluate, PerformanceResult};
pub use statespace::{InputSeries, LtiSystem, Trajectory};
pub use sweep::{best_config, run_sweep, BestConfig, SweepGrid, SweepResult};

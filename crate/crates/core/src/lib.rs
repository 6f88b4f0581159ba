//! Age-of-information analysis for a slotted cognitive shared-access
//! network with RF energy harvesting.
//!
//! A primary transmitter sends status updates to its receiver across a
//! shared channel. Battery-less secondary nodes harvest energy near the
//! transmitter, stay silent inside a guard zone around the receiver, and
//! otherwise contend for the channel with a fixed access probability. The
//! crate provides:
//!
//! - closed-form building blocks: zone probabilities ([`geometry`]), decode
//!   probabilities over Rayleigh fading with a Poisson interference field
//!   ([`channel`]), the battery/access chain and source-queue steady states
//!   ([`markov`]), and mean age under three update policies ([`aoi`]);
//! - a reproducible slot-level Monte Carlo simulator ([`sim`]) that builds
//!   the same system event by event, for validating every closed form;
//! - scenario handling, the analytic pipeline, parameter sweeps, and the
//!   analytic-vs-simulation comparison harness used by the CLI.

pub mod aoi;
pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod markov;
mod quad;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod sweep;
pub mod validate;

pub use aoi::{AoiResult, PolicyKind};
pub use channel::RadioParams;
pub use config::{NetworkConfig, TrafficConfig};
pub use error::{Error, Result};
pub use geometry::{Point2, Region};
pub use markov::{AccessProbabilities, QueueSteadyState};
pub use report::{analyze, AnalyticReport};
pub use scenario::{Scenario, SimSettings};
pub use sim::{Estimate, SimMetrics, Simulation};
pub use sweep::{SweepOptions, SweepSpec};
pub use validate::{validate_scenario, ValidationReport};

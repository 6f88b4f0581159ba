//! Scenario-level parameter bundles shared by the analytic pipeline and the
//! simulator.

use crate::aoi::PolicyKind;
use crate::channel::RadioParams;
use crate::error::{require, require_non_negative, require_positive, require_probability, Result};
use crate::geometry::Region;

/// Physical-layer and population parameters of one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub region: Region,
    pub radio: RadioParams,
    /// Secondary-transmitter density, nodes per square metre.
    pub st_density: f64,
    /// Distance from each secondary transmitter to its dedicated receiver.
    /// Receivers may land outside the coverage disk; only path loss matters.
    pub pair_distance: f64,
    /// Medium-access probability applied by a charged node outside the
    /// guard zone.
    pub access_probability: f64,
    /// When set, idle nodes harvest only in slots the primary transmitter
    /// sends data; by default the primary carrier is treated as always-on
    /// for harvesting purposes.
    pub strict_harvest: bool,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        self.region.validate()?;
        self.radio.validate()?;
        require_non_negative("st_density", self.st_density)?;
        require_positive("pair_distance", self.pair_distance)?;
        require_probability("access_probability", self.access_probability)?;
        Ok(())
    }
}

/// Source traffic at the primary transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficConfig {
    pub policy: PolicyKind,
    /// Bernoulli arrival probability per slot (FCFS and replacement queue).
    pub arrival_rate: f64,
    /// Bernoulli sampling probability per slot (generate-at-will only).
    pub sampling_rate: f64,
}

impl TrafficConfig {
    pub fn validate(&self) -> Result<()> {
        match self.policy {
            PolicyKind::Fcfs | PolicyKind::Qr => {
                require(
                    self.arrival_rate > 0.0 && self.arrival_rate < 1.0,
                    "arrival_rate",
                    self.arrival_rate,
                    "in (0, 1)",
                )?;
                // The unused sampling rate must still be sane if present.
                require_probability("sampling_rate", self.sampling_rate)?;
            }
            PolicyKind::Gw => {
                require(
                    self.sampling_rate > 0.0 && self.sampling_rate <= 1.0,
                    "sampling_rate",
                    self.sampling_rate,
                    "in (0, 1]",
                )?;
                require_probability("arrival_rate", self.arrival_rate)?;
            }
        }
        Ok(())
    }

    /// The generation probability the active policy actually uses.
    pub fn rate(&self) -> f64 {
        match self.policy {
            PolicyKind::Gw => self.sampling_rate,
            _ => self.arrival_rate,
        }
    }
}

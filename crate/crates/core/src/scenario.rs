//! Scenario files: TOML in, validated configs out.
//!
//! Unknown keys are rejected so typos surface instead of silently running
//! the wrong experiment. The SINR threshold is given either in dB
//! (`sinr_threshold_db`) or linear (`sinr_threshold`), never both.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aoi::PolicyKind;
use crate::channel::RadioParams;
use crate::config::{NetworkConfig, TrafficConfig};
use crate::error::{Error, Result};
use crate::geometry::Region;

pub const SCHEMA_VERSION: u32 = 1;

/// Run-length settings for the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub slots: u64,
    pub replications: u32,
    pub seed: u64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            slots: 1_000_000,
            replications: 5,
            seed: 1,
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: NetworkConfig,
    pub traffic: TrafficConfig,
    pub sim: SimSettings,
}

impl Default for Scenario {
    /// The reference deployment used throughout the test suite: a 500 m
    /// cell, receiver 200 m out, 80 m harvesting zone, 120 m guard zone,
    /// one node per 1000 m^2, 20 m pair links, quartic path loss, 0 dB
    /// threshold, and a 0.2 update rate.
    fn default() -> Self {
        Scenario {
            network: NetworkConfig {
                region: Region {
                    coverage_radius: 500.0,
                    pr_distance: 200.0,
                    eh_radius: 80.0,
                    gz_radius: 120.0,
                },
                radio: RadioParams {
                    primary_power: 1.0,
                    secondary_power: 1e-3,
                    pathloss_exponent: 4.0,
                    noise_power: 1e-10,
                    sinr_threshold: 1.0,
                },
                st_density: 1e-3,
                pair_distance: 20.0,
                access_probability: 0.5,
                strict_harvest: false,
            },
            traffic: TrafficConfig {
                policy: PolicyKind::Fcfs,
                arrival_rate: 0.2,
                sampling_rate: 0.2,
            },
            sim: SimSettings::default(),
        }
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Scenario> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        file.resolve()
    }

    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Scenario(msg) => Error::Scenario(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Serialise back to TOML (threshold emitted in linear form). Parsing
    /// the output reproduces `self` exactly.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(&ScenarioFile::from_scenario(self))
            .map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.traffic.validate()?;
        if self.sim.slots < 100 {
            return Err(Error::Scenario(format!(
                "sim.slots = {} is too short; need at least 100",
                self.sim.slots
            )));
        }
        if self.sim.replications == 0 {
            return Err(Error::Scenario("sim.replications must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    network: NetworkSection,
    radio: RadioSection,
    traffic: TrafficSection,
    #[serde(default)]
    sim: SimSection,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkSection {
    coverage_radius: f64,
    pr_distance: f64,
    eh_radius: f64,
    gz_radius: f64,
    st_density: f64,
    pair_distance: f64,
    access_probability: f64,
    #[serde(default)]
    strict_harvest: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadioSection {
    primary_power: f64,
    secondary_power: f64,
    pathloss_exponent: f64,
    noise_power: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sinr_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sinr_threshold_db: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrafficSection {
    policy: PolicyKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    arrival_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling_rate: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimSection {
    slots: u64,
    replications: u32,
    seed: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimSettings::default();
        SimSection {
            slots: s.slots,
            replications: s.replications,
            seed: s.seed,
        }
    }
}

impl ScenarioFile {
    fn resolve(self) -> Result<Scenario> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let threshold = match (self.radio.sinr_threshold, self.radio.sinr_threshold_db) {
            (Some(linear), None) => linear,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (Some(_), Some(_)) => {
                return Err(Error::Scenario(
                    "radio: give sinr_threshold or sinr_threshold_db, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Scenario(
                    "radio: one of sinr_threshold / sinr_threshold_db is required".into(),
                ))
            }
        };
        let (arrival_rate, sampling_rate) =
            match (self.traffic.arrival_rate, self.traffic.sampling_rate) {
                (Some(a), Some(q)) => (a, q),
                (Some(a), None) => (a, a),
                (None, Some(q)) => (q, q),
                (None, None) => {
                    return Err(Error::Scenario(
                        "traffic: one of arrival_rate / sampling_rate is required".into(),
                    ))
                }
            };
        let scenario = Scenario {
            network: NetworkConfig {
                region: Region {
                    coverage_radius: self.network.coverage_radius,
                    pr_distance: self.network.pr_distance,
                    eh_radius: self.network.eh_radius,
                    gz_radius: self.network.gz_radius,
                },
                radio: RadioParams {
                    primary_power: self.radio.primary_power,
                    secondary_power: self.radio.secondary_power,
                    pathloss_exponent: self.radio.pathloss_exponent,
                    noise_power: self.radio.noise_power,
                    sinr_threshold: threshold,
                },
                st_density: self.network.st_density,
                pair_distance: self.network.pair_distance,
                access_probability: self.network.access_probability,
                strict_harvest: self.network.strict_harvest,
            },
            traffic: TrafficConfig {
                policy: self.traffic.policy,
                arrival_rate,
                sampling_rate,
            },
            sim: SimSettings {
                slots: self.sim.slots,
                replications: self.sim.replications,
                seed: self.sim.seed,
            },
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn from_scenario(s: &Scenario) -> ScenarioFile {
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            network: NetworkSection {
                coverage_radius: s.network.region.coverage_radius,
                pr_distance: s.network.region.pr_distance,
                eh_radius: s.network.region.eh_radius,
                gz_radius: s.network.region.gz_radius,
                st_density: s.network.st_density,
                pair_distance: s.network.pair_distance,
                access_probability: s.network.access_probability,
                strict_harvest: s.network.strict_harvest,
            },
            radio: RadioSection {
                primary_power: s.network.radio.primary_power,
                secondary_power: s.network.radio.secondary_power,
                pathloss_exponent: s.network.radio.pathloss_exponent,
                noise_power: s.network.radio.noise_power,
                sinr_threshold: Some(s.network.radio.sinr_threshold),
                sinr_threshold_db: None,
            },
            traffic: TrafficSection {
                policy: s.traffic.policy,
                arrival_rate: Some(s.traffic.arrival_rate),
                sampling_rate: Some(s.traffic.sampling_rate),
            },
            sim: SimSection {
                slots: s.sim.slots,
                replications: s.sim.replications,
                seed: s.sim.seed,
            },
        }
    }
}

//! The closed-form pipeline: from a scenario to every derived quantity.

use crate::aoi::{aoi_fcfs, aoi_gw, aoi_qr, secondary_throughput, AoiResult, PolicyKind};
use crate::channel::{primary_success_probability, secondary_success_probability};
use crate::config::{NetworkConfig, TrafficConfig};
use crate::error::Result;
use crate::geometry::{eh_zone_probability, gz_zone_probability};
use crate::markov::{battery_charge_probability, transmit_probability};

/// Every closed-form quantity for one scenario, in dependency order.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticReport {
    pub policy: PolicyKind,
    /// Probability a node lands in the harvesting zone.
    pub p_eh: f64,
    /// Probability a node lands in the guard zone.
    pub p_gz: f64,
    /// Stationary probability a node's battery is full at a slot boundary.
    pub p_ch: f64,
    /// Per-slot transmission probability of a node.
    pub p_tr: f64,
    /// Density of simultaneously transmitting nodes.
    pub active_density: f64,
    /// Primary-link decode probability per attempt.
    pub mu_p: f64,
    /// Secondary pair decode probability per attempt.
    pub p_sx: f64,
    /// Successful secondary transmissions per slot per square metre.
    pub throughput: f64,
    /// Mean age of information under the configured policy.
    pub aoi: AoiResult,
}

/// Run the whole chain. Fails only on invalid parameters or a quadrature
/// breakdown; an unstable queue is reported in `aoi`, not as an error.
pub fn analyze(net: &NetworkConfig, traffic: &TrafficConfig) -> Result<AnalyticReport> {
    net.validate()?;
    traffic.validate()?;
    let region = &net.region;
    let radio = &net.radio;
    let p_eh = eh_zone_probability(region.eh_radius, region.coverage_radius)?;
    let p_gz = gz_zone_probability(region.gz_radius, region.coverage_radius, region.pr_distance)?;
    let p_ch = battery_charge_probability(p_eh, p_gz, net.access_probability)?;
    let p_tr = transmit_probability(p_ch, p_gz, net.access_probability)?;
    let active_density = net.st_density * p_tr;
    let mu_p = primary_success_probability(radio, region, active_density)?;
    let p_sx = secondary_success_probability(
        radio,
        region,
        net.pair_distance,
        net.st_density,
        p_ch,
        net.access_probability,
    )?;
    let throughput = secondary_throughput(net.st_density, p_tr, p_sx)?;
    let aoi = match traffic.policy {
        PolicyKind::Fcfs => aoi_fcfs(traffic.arrival_rate, mu_p)?,
        PolicyKind::Qr => aoi_qr(traffic.arrival_rate, mu_p)?,
        PolicyKind::Gw => aoi_gw(mu_p, traffic.sampling_rate)?,
    };
    Ok(AnalyticReport {
        policy: traffic.policy,
        p_eh,
        p_gz,
        p_ch,
        p_tr,
        active_density,
        mu_p,
        p_sx,
        throughput,
        aoi,
    })
}

impl AnalyticReport {
    /// Flat, deterministically ordered key/value view for text output.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut rows: Vec<(String, String)> = vec![
            ("policy".into(), self.policy.name().into()),
            ("p_eh".into(), self.p_eh.to_string()),
            ("p_gz".into(), self.p_gz.to_string()),
            ("p_ch".into(), self.p_ch.to_string()),
            ("p_tr".into(), self.p_tr.to_string()),
            ("active_density".into(), self.active_density.to_string()),
            ("mu_p".into(), self.mu_p.to_string()),
            ("p_sx".into(), self.p_sx.to_string()),
            ("throughput".into(), self.throughput.to_string()),
            ("stable".into(), self.aoi.stable.to_string()),
            (
                "mean_age".into(),
                self.aoi
                    .mean_age
                    .map_or_else(|| "unstable".into(), |v| v.to_string()),
            ),
        ];
        for (k, v) in &self.aoi.aux {
            rows.push((k.to_string(), v.to_string()));
        }
        rows
    }
}

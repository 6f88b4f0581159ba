//! Slot-level Monte Carlo simulator for the shared-access network.
//!
//! One `Simulation` owns a single ChaCha8 RNG stream; with a fixed seed and
//! configuration the entire run is reproducible bit for bit. Draws happen in
//! a fixed order: node count, receiver bearings, then per slot (1) the
//! generate-at-will sampling coin, (2) per node its position and, when
//! eligible, its access coin, (3) fading at the primary receiver, (4) fading
//! at each active pair's receiver, (5) the arrival coin.
//!
//! Per-slot sequencing mirrors the analytic model:
//! - Node positions are redrawn uniformly in the coverage disk every slot.
//! - Access decisions read the battery as it stood at the slot boundary: a
//!   full node outside the guard zone transmits with the access probability
//!   and is drained; an empty node inside the harvesting zone becomes full
//!   for the *next* slot. A node never charges and transmits in one slot.
//! - Fading is Rayleigh (unit-mean exponential power gains), independent
//!   across links and slots; a transmission decodes when
//!   `signal > threshold * (interference + noise)`, which matches the SINR
//!   comparison wherever the latter is finite and resolves 0/0 to a failure.
//! - The queue evolves last; see `queue` for the per-policy conventions.

mod metrics;
mod queue;

pub use metrics::{Estimate, SimMetrics};

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::aoi::PolicyKind;
use crate::config::{NetworkConfig, TrafficConfig};
use crate::error::{require, Error, Result};
use crate::geometry::Point2;
use queue::QueueState;

/// Stable mapping from a master seed to per-replication seeds (SplitMix64
/// finalizer over an index-stepped state). Changing this breaks recorded
/// results, so don't.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What one slot did; returned by [`Simulation::step`] for tracing.
#[derive(Debug, Clone, Copy)]
pub struct SlotOutcome {
    pub slot: u64,
    /// Primary transmitter sent this slot.
    pub attempted: bool,
    /// The primary receiver decoded it.
    pub delivered: bool,
    /// Age at the end of the slot, after any reset.
    pub age: f64,
    /// Queue length at the end of the slot.
    pub queue_len: usize,
    /// Queue length at the slot boundary (before arrivals), clamped to 3.
    pub occupancy_bucket: usize,
    /// Nodes with a full battery at the slot boundary.
    pub full_batteries: usize,
    /// Nodes that transmitted this slot.
    pub active_nodes: usize,
    /// Node transmissions decoded by their own receivers.
    pub pair_successes: u32,
    pub arrivals: u32,
    pub drops: u32,
}

/// A single replication's worth of state.
pub struct Simulation {
    rng: ChaCha8Rng,
    policy: PolicyKind,
    arrival_rate: f64,

    // Geometry and radio constants.
    radius: f64,
    radius_sq: f64,
    eh_sq: f64,
    gz_sq: f64,
    pr: Point2,
    access_probability: f64,
    strict_harvest: bool,
    quartic: bool,
    neg_half_alpha: f64,
    pt_signal_coef: f64,
    pair_signal_coef: f64,
    primary_power: f64,
    secondary_power: f64,
    noise: f64,
    threshold: f64,
    pair_distance: f64,

    // Mutable state.
    battery: Vec<bool>,
    receiver_bearing: Vec<(f64, f64)>,
    active: Vec<(f64, f64, u32)>,
    queue: QueueState,
    age: f64,
    slot: u64,
}

#[inline(always)]
fn inv_pathloss(dist_sq: f64, quartic: bool, neg_half_alpha: f64) -> f64 {
    if quartic {
        1.0 / (dist_sq * dist_sq)
    } else {
        dist_sq.powf(neg_half_alpha)
    }
}

impl Simulation {
    pub fn new(net: &NetworkConfig, traffic: &TrafficConfig, seed: u64) -> Result<Self> {
        net.validate()?;
        traffic.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let radius = net.region.coverage_radius;
        let mean_nodes = net.st_density * PI * radius * radius;
        let nodes = if mean_nodes > 0.0 {
            let poisson = Poisson::new(mean_nodes)
                .map_err(|e| Error::Scenario(format!("node count draw: {e}")))?;
            let draw: f64 = poisson.sample(&mut rng);
            draw as usize
        } else {
            0
        };
        let receiver_bearing = (0..nodes)
            .map(|_| {
                let angle = rng.random::<f64>() * TAU;
                (angle.cos(), angle.sin())
            })
            .collect();
        let alpha = net.radio.pathloss_exponent;
        Ok(Simulation {
            rng,
            policy: traffic.policy,
            arrival_rate: traffic.arrival_rate,
            radius,
            radius_sq: radius * radius,
            eh_sq: net.region.eh_radius * net.region.eh_radius,
            gz_sq: net.region.gz_radius * net.region.gz_radius,
            pr: net.region.pr_position(),
            access_probability: net.access_probability,
            strict_harvest: net.strict_harvest,
            quartic: alpha == 4.0,
            neg_half_alpha: -alpha / 2.0,
            pt_signal_coef: net.radio.primary_power * net.region.pr_distance.powf(-alpha),
            pair_signal_coef: net.radio.secondary_power * net.pair_distance.powf(-alpha),
            primary_power: net.radio.primary_power,
            secondary_power: net.radio.secondary_power,
            noise: net.radio.noise_power,
            threshold: net.radio.sinr_threshold,
            pair_distance: net.pair_distance,
            battery: vec![false; nodes],
            receiver_bearing,
            active: Vec::with_capacity(nodes / 8 + 4),
            queue: QueueState::new(traffic),
            age: 1.0,
            slot: 0,
        })
    }

    /// Nodes drawn for this replication.
    pub fn nodes(&self) -> usize {
        self.battery.len()
    }

    /// Advance one slot.
    pub fn step(&mut self) -> SlotOutcome {
        let slot = self.slot;
        let attempted = self.queue.begin_slot(&mut self.rng);
        let occupancy_bucket = self.queue.occupancy_bucket();
        let harvest_enabled = !self.strict_harvest || attempted;

        // Secondary field: positions, battery branch, access decisions.
        self.active.clear();
        let mut full = 0usize;
        for i in 0..self.battery.len() {
            let (x, y) = loop {
                let x = (self.rng.random::<f64>() * 2.0 - 1.0) * self.radius;
                let y = (self.rng.random::<f64>() * 2.0 - 1.0) * self.radius;
                if x * x + y * y <= self.radius_sq {
                    break (x, y);
                }
            };
            if self.battery[i] {
                full += 1;
                let dx = x - self.pr.x;
                let dy = y - self.pr.y;
                if dx * dx + dy * dy > self.gz_sq
                    && self.rng.random::<f64>() < self.access_probability
                {
                    self.battery[i] = false;
                    self.active.push((x, y, i as u32));
                }
            } else if harvest_enabled && x * x + y * y <= self.eh_sq {
                self.battery[i] = true;
            }
        }

        // Primary link.
        let mut delivered = false;
        if attempted {
            let gain: f64 = self.rng.sample(Exp1);
            let signal = self.pt_signal_coef * gain;
            let mut interference = 0.0;
            for &(x, y, _) in &self.active {
                let dx = x - self.pr.x;
                let dy = y - self.pr.y;
                let gain: f64 = self.rng.sample(Exp1);
                interference += self.secondary_power
                    * inv_pathloss(dx * dx + dy * dy, self.quartic, self.neg_half_alpha)
                    * gain;
            }
            delivered = signal > self.threshold * (interference + self.noise);
        }

        // Secondary pairs. The primary carrier interferes in every slot,
        // matching the always-on assumption behind the access chain.
        let mut pair_successes = 0u32;
        for k in 0..self.active.len() {
            let (x, y, i) = self.active[k];
            let bearing = self.receiver_bearing[i as usize];
            let rx = x + self.pair_distance * bearing.0;
            let ry = y + self.pair_distance * bearing.1;
            let gain: f64 = self.rng.sample(Exp1);
            let signal = self.pair_signal_coef * gain;
            let gain: f64 = self.rng.sample(Exp1);
            let mut interference = self.primary_power
                * inv_pathloss(rx * rx + ry * ry, self.quartic, self.neg_half_alpha)
                * gain;
            for (j, &(xj, yj, _)) in self.active.iter().enumerate() {
                if j != k {
                    let dx = xj - rx;
                    let dy = yj - ry;
                    let gain: f64 = self.rng.sample(Exp1);
                    interference += self.secondary_power
                        * inv_pathloss(dx * dx + dy * dy, self.quartic, self.neg_half_alpha)
                        * gain;
                }
            }
            if signal > self.threshold * (interference + self.noise) {
                pair_successes += 1;
            }
        }

        // Queue and age.
        let delta = self
            .queue
            .end_slot(slot, attempted, delivered, &mut self.rng);
        if let Some(birth) = delta.delivered_birth {
            self.age = (slot - birth + 1) as f64;
        } else {
            self.age += 1.0;
        }
        self.slot += 1;

        SlotOutcome {
            slot,
            attempted,
            delivered,
            age: self.age,
            queue_len: self.queue.len(),
            occupancy_bucket,
            full_batteries: full,
            active_nodes: self.active.len(),
            pair_successes,
            arrivals: delta.arrivals,
            drops: delta.drops,
        }
    }

    /// Run to completion and summarise.
    pub fn run(self, slots: u64) -> Result<SimMetrics> {
        self.run_with(slots, |_| {})
    }

    /// Run to completion, invoking `observe` after every slot (tracing).
    pub fn run_with(
        mut self,
        slots: u64,
        mut observe: impl FnMut(&SlotOutcome),
    ) -> Result<SimMetrics> {
        require(slots >= 100, "slots", slots as f64, ">= 100")?;
        let warmup = slots / 10;
        let measured = slots - warmup;
        let batches = 20usize;
        let mut acc = metrics::BatchAcc::new(batches);
        let nodes = self.nodes() as f64;
        let area = PI * self.radius_sq;

        let mut occupancy = [0u64; 4];
        let mut arrivals = 0u64;
        let mut delivered_count = 0u64;
        let mut dropped = 0u64;
        let mut pt_attempts = 0u64;
        let mut pt_successes = 0u64;
        let mut pair_attempts = 0u64;
        let mut pair_successes = 0u64;
        let trace_stride = (slots / 1024).max(1);
        let mut trace: Vec<(u64, usize)> = Vec::new();

        for t in 0..slots {
            let out = self.step();
            observe(&out);

            arrivals += out.arrivals as u64;
            delivered_count += (out.attempted && out.delivered) as u64;
            dropped += out.drops as u64;
            pt_attempts += out.attempted as u64;
            pt_successes += (out.attempted && out.delivered) as u64;
            pair_attempts += out.active_nodes as u64;
            pair_successes += out.pair_successes as u64;
            if t % trace_stride == 0 {
                trace.push((t, out.queue_len));
            }

            if t >= warmup {
                let b = ((t - warmup) as u128 * batches as u128 / measured as u128) as usize;
                acc.age[b] += out.age;
                acc.slots[b] += 1.0;
                acc.pt_att[b] += out.attempted as u64 as f64;
                acc.pt_succ[b] += (out.attempted && out.delivered) as u64 as f64;
                acc.pair_att[b] += out.active_nodes as f64;
                acc.pair_succ[b] += out.pair_successes as f64;
                acc.full[b] += out.full_batteries as f64;
                acc.active[b] += out.active_nodes as f64;
                acc.node_slots[b] += nodes;
                acc.drops[b] += out.drops as f64;
                acc.arrivals[b] += out.arrivals as f64;
                occupancy[out.occupancy_bucket] += 1;
            }
        }

        let slot_area: Vec<f64> = acc.slots.iter().map(|s| s * area).collect();
        let emp_mu_p = Estimate::from_batches(&acc.pt_succ, &acc.pt_att);
        let divergent = self.policy == PolicyKind::Fcfs
            && emp_mu_p.is_defined()
            && self.arrival_rate >= emp_mu_p.value;
        let occ_total = measured as f64;
        Ok(SimMetrics {
            slots,
            warmup_slots: warmup,
            replications: 1,
            nodes,
            mean_age: Estimate::from_batches(&acc.age, &acc.slots),
            emp_mu_p,
            emp_p_sx: Estimate::from_batches(&acc.pair_succ, &acc.pair_att),
            emp_p_ch: Estimate::from_batches(&acc.full, &acc.node_slots),
            emp_p_tr: Estimate::from_batches(&acc.active, &acc.node_slots),
            emp_drop: Estimate::from_batches(&acc.drops, &acc.arrivals),
            emp_throughput: Estimate::from_batches(&acc.pair_succ, &slot_area),
            queue_occupancy: occupancy.map(|c| c as f64 / occ_total),
            arrivals,
            delivered: delivered_count,
            dropped,
            in_system: self.queue.len() as u64,
            pt_attempts,
            pt_successes,
            pair_attempts,
            pair_successes,
            divergent,
            queue_len_trace: divergent.then_some(trace),
        })
    }
}

/// Run `replications` independent replications (seeds derived from
/// `master_seed`) and pool them. `threads == 1` stays on the caller's
/// thread; any other value builds a worker pool of that size (0 = one per
/// available core). Results are identical either way.
pub fn run_replications(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    slots: u64,
    master_seed: u64,
    replications: u32,
    threads: usize,
) -> Result<SimMetrics> {
    run_replications_with(net, traffic, slots, master_seed, replications, threads, |_| {})
}

/// As [`run_replications`], but `observe` sees every slot of the *first*
/// replication (which always runs on the caller's thread), for tracing.
#[allow(clippy::too_many_arguments)]
pub fn run_replications_with(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    slots: u64,
    master_seed: u64,
    replications: u32,
    threads: usize,
    mut observe: impl FnMut(&SlotOutcome),
) -> Result<SimMetrics> {
    require(replications >= 1, "replications", replications as f64, ">= 1")?;
    let first = Simulation::new(net, traffic, derive_seed(master_seed, 0))?
        .run_with(slots, |o| observe(o))?;
    if replications == 1 {
        return Ok(first);
    }
    let run_one = |i: u32| Simulation::new(net, traffic, derive_seed(master_seed, i as u64))?.run(slots);
    let rest: Result<Vec<SimMetrics>> = if threads == 1 {
        (1..replications).map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Scenario(format!("worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            (1..replications).into_par_iter().map(run_one).collect()
        })
    };
    let mut runs = vec![first];
    runs.extend(rest?);
    Ok(SimMetrics::pool(runs))
}

/// Decode SINR at the primary receiver for an explicit interferer layout
/// with chosen fading gains. Exercises the exact path-loss and SINR
/// arithmetic the simulator uses, for pinning against hand calculations.
pub fn primary_sinr_with_interferers(
    net: &NetworkConfig,
    pt_gain: f64,
    interferers: &[(Point2, f64)],
) -> f64 {
    let alpha = net.radio.pathloss_exponent;
    let quartic = alpha == 4.0;
    let neg_half_alpha = -alpha / 2.0;
    let pr = net.region.pr_position();
    let signal = net.radio.primary_power * net.region.pr_distance.powf(-alpha) * pt_gain;
    let interference: f64 = interferers
        .iter()
        .map(|(p, gain)| {
            net.radio.secondary_power
                * inv_pathloss(p.dist_sq(pr), quartic, neg_half_alpha)
                * gain
        })
        .sum();
    crate::channel::sinr(signal, interference, net.radio.noise_power)
}

//! Per-policy source/queue state machines.
//!
//! Slot conventions, shared by all three policies:
//! - Service eligibility is decided at the slot boundary, before anything
//!   else happens in the slot.
//! - Arrivals land at the end of the slot and can be served no earlier than
//!   the next slot.
//! - A delivered update that was generated in slot `b` and decoded in slot
//!   `t` resets the age to `t - b + 1`.
//!
//! Replacement queue: a fresh arrival overwrites the waiting slot at the
//! arrival instant, so when the head departs in the same slot it is the
//! *newest* arrival that gets promoted. Overwritten updates count as drops.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::aoi::PolicyKind;
use crate::config::TrafficConfig;

#[derive(Debug, Clone)]
pub(crate) enum QueueState {
    Fcfs {
        arrival_rate: f64,
        /// Generation slots of queued updates, oldest first.
        queue: VecDeque<u64>,
    },
    Qr {
        arrival_rate: f64,
        /// Update currently in service (generation slot).
        head: Option<u64>,
        /// Waiting update, overwritten by newer arrivals.
        buffer: Option<u64>,
    },
    Gw {
        sampling_rate: f64,
        /// Set by `begin_slot` when this slot samples a fresh update.
        sampled: bool,
    },
}

/// What a slot did to the queue.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SlotDelta {
    /// Generation slot of the update delivered this slot, if any.
    pub delivered_birth: Option<u64>,
    pub arrivals: u32,
    pub drops: u32,
}

impl QueueState {
    pub fn new(traffic: &TrafficConfig) -> Self {
        match traffic.policy {
            PolicyKind::Fcfs => QueueState::Fcfs {
                arrival_rate: traffic.arrival_rate,
                queue: VecDeque::new(),
            },
            PolicyKind::Qr => QueueState::Qr {
                arrival_rate: traffic.arrival_rate,
                head: None,
                buffer: None,
            },
            PolicyKind::Gw => QueueState::Gw {
                sampling_rate: traffic.sampling_rate,
                sampled: false,
            },
        }
    }

    /// Decide whether the primary transmitter sends this slot. Called once
    /// per slot, first thing; generate-at-will draws its sampling coin here.
    pub fn begin_slot(&mut self, rng: &mut ChaCha8Rng) -> bool {
        match self {
            QueueState::Fcfs { queue, .. } => !queue.is_empty(),
            QueueState::Qr { head, .. } => head.is_some(),
            QueueState::Gw {
                sampling_rate,
                sampled,
            } => {
                *sampled = rng.random::<f64>() < *sampling_rate;
                *sampled
            }
        }
    }

    /// Updates in the system, clamped to 3 for occupancy bookkeeping.
    pub fn occupancy_bucket(&self) -> usize {
        self.len().min(3)
    }

    pub fn len(&self) -> usize {
        match self {
            QueueState::Fcfs { queue, .. } => queue.len(),
            QueueState::Qr { head, buffer, .. } => {
                head.is_some() as usize + buffer.is_some() as usize
            }
            QueueState::Gw { .. } => 0,
        }
    }

    /// Apply the slot's outcome: departures for FCFS, arrival-then-departure
    /// for the replacement queue (see module doc), sample bookkeeping for
    /// generate-at-will. `attempted` must be the value `begin_slot` returned
    /// for this same slot.
    pub fn end_slot(
        &mut self,
        slot: u64,
        attempted: bool,
        success: bool,
        rng: &mut ChaCha8Rng,
    ) -> SlotDelta {
        let mut delta = SlotDelta::default();
        match self {
            QueueState::Fcfs {
                arrival_rate,
                queue,
            } => {
                if attempted && success {
                    delta.delivered_birth = queue.pop_front();
                    debug_assert!(delta.delivered_birth.is_some());
                }
                if rng.random::<f64>() < *arrival_rate {
                    queue.push_back(slot);
                    delta.arrivals = 1;
                }
            }
            QueueState::Qr {
                arrival_rate,
                head,
                buffer,
            } => {
                if rng.random::<f64>() < *arrival_rate {
                    delta.arrivals = 1;
                    if head.is_none() {
                        *head = Some(slot);
                    } else {
                        if buffer.is_some() {
                            delta.drops = 1;
                        }
                        *buffer = Some(slot);
                    }
                }
                if attempted && success {
                    delta.delivered_birth = head.take();
                    debug_assert!(delta.delivered_birth.is_some());
                    *head = buffer.take();
                }
            }
            QueueState::Gw { sampled, .. } => {
                if *sampled {
                    delta.arrivals = 1;
                    if success {
                        delta.delivered_birth = Some(slot);
                    } else {
                        delta.drops = 1;
                    }
                }
                let _ = rng;
            }
        }
        delta
    }
}

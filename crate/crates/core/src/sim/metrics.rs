//! Estimators and their uncertainty for simulator output.
//!
//! Every empirical quantity is a ratio of two per-slot accumulators. The run
//! is split (after discarding the 10% warm-up) into 20 equal batches; the
//! reported value is the pooled ratio and the confidence half-width is
//! 1.96 times the standard error of the per-batch ratios. Replications pool
//! their variances, so half-widths shrink like 1/sqrt(replications).

/// Point estimate with a normal-approximation 95% half-width.
/// `value` is NaN when the denominator never fired (e.g. no transmission
/// attempts); `ci_halfwidth` is NaN when fewer than two batches had data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub ci_halfwidth: f64,
    /// Total denominator mass behind `value`; used to pool replications.
    pub(crate) weight: f64,
}

impl Estimate {
    pub(crate) fn undefined() -> Self {
        Estimate {
            value: f64::NAN,
            ci_halfwidth: f64::NAN,
            weight: 0.0,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_finite()
    }

    /// Build from per-batch numerators and denominators.
    pub(crate) fn from_batches(num: &[f64], den: &[f64]) -> Self {
        debug_assert_eq!(num.len(), den.len());
        let total_den: f64 = den.iter().sum();
        if total_den <= 0.0 {
            return Self::undefined();
        }
        let total_num: f64 = num.iter().sum();
        let value = total_num / total_den;
        let ratios: Vec<f64> = num
            .iter()
            .zip(den)
            .filter(|(_, d)| **d > 0.0)
            .map(|(n, d)| n / d)
            .collect();
        let ci = if ratios.len() >= 2 {
            let k = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / k;
            let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (k - 1.0);
            1.96 * (var / k).sqrt()
        } else {
            f64::NAN
        };
        Estimate {
            value,
            ci_halfwidth: ci,
            weight: total_den,
        }
    }

    /// Pool independent replications: denominator-weighted value, pooled
    /// within-replication variance for the half-width.
    pub(crate) fn pool(reps: &[Estimate]) -> Self {
        let live: Vec<&Estimate> = reps.iter().filter(|e| e.is_defined()).collect();
        if live.is_empty() {
            return Self::undefined();
        }
        let total_w: f64 = live.iter().map(|e| e.weight).sum();
        let value = live.iter().map(|e| e.value * e.weight).sum::<f64>() / total_w;
        let with_ci: Vec<f64> = live
            .iter()
            .filter(|e| e.ci_halfwidth.is_finite())
            .map(|e| {
                let se = e.ci_halfwidth / 1.96;
                se * se
            })
            .collect();
        let ci = if with_ci.is_empty() {
            f64::NAN
        } else {
            let k = with_ci.len() as f64;
            let pooled_var = with_ci.iter().sum::<f64>() / k;
            1.96 * (pooled_var / k).sqrt()
        };
        Estimate {
            value,
            ci_halfwidth: ci,
            weight: total_w,
        }
    }
}

/// Everything a run (or a pooled set of replications) reports.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    /// Slots simulated per replication (including warm-up).
    pub slots: u64,
    /// Slots discarded before measurement, per replication.
    pub warmup_slots: u64,
    /// Replications pooled into this record.
    pub replications: u32,
    /// Secondary transmitters present (mean across replications; the count
    /// is Poisson and drawn once per replication).
    pub nodes: f64,

    /// Time-average age of information at the primary receiver.
    pub mean_age: Estimate,
    /// Fraction of primary transmission attempts that decoded.
    pub emp_mu_p: Estimate,
    /// Fraction of secondary transmissions decoded by their own receiver.
    pub emp_p_sx: Estimate,
    /// Fraction of node-slots with a full battery at the slot boundary.
    pub emp_p_ch: Estimate,
    /// Fraction of node-slots with a transmission attempt.
    pub emp_p_tr: Estimate,
    /// Fraction of accepted updates later discarded (replacement queue) or
    /// failed samples (generate-at-will); zero under FCFS.
    pub emp_drop: Estimate,
    /// Successful secondary transmissions per slot per square metre.
    pub emp_throughput: Estimate,

    /// Fraction of slots the primary queue held 0, 1, 2, >=3 packets, read
    /// at the slot boundary before arrivals.
    pub queue_occupancy: [f64; 4],

    // Lifetime conservation counters (full run, warm-up included):
    // arrivals == delivered + dropped + in_system at the final slot.
    pub arrivals: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_system: u64,
    pub pt_attempts: u64,
    pub pt_successes: u64,
    pub pair_attempts: u64,
    pub pair_successes: u64,

    /// Set when the FCFS queue ran at or past its stability boundary
    /// (`lambda >= emp_mu_p`); the age estimate is then meaningless.
    pub divergent: bool,
    /// Down-sampled queue-length trajectory, provided when divergent.
    pub queue_len_trace: Option<Vec<(u64, usize)>>,
}

impl SimMetrics {
    /// Pool replications into one record. Panics if `reps` is empty or the
    /// runs disagree on slot counts (callers control both).
    pub(crate) fn pool(reps: Vec<SimMetrics>) -> SimMetrics {
        assert!(!reps.is_empty());
        if reps.len() == 1 {
            return reps.into_iter().next().unwrap();
        }
        let n = reps.len() as f64;
        let pick = |f: &dyn Fn(&SimMetrics) -> Estimate| {
            Estimate::pool(&reps.iter().map(f).collect::<Vec<_>>())
        };
        let mut occupancy = [0.0; 4];
        for r in &reps {
            for (acc, v) in occupancy.iter_mut().zip(r.queue_occupancy) {
                *acc += v / n;
            }
        }
        let divergent = reps.iter().any(|r| r.divergent);
        SimMetrics {
            slots: reps[0].slots,
            warmup_slots: reps[0].warmup_slots,
            replications: reps.iter().map(|r| r.replications).sum(),
            nodes: reps.iter().map(|r| r.nodes).sum::<f64>() / n,
            mean_age: pick(&|r| r.mean_age),
            emp_mu_p: pick(&|r| r.emp_mu_p),
            emp_p_sx: pick(&|r| r.emp_p_sx),
            emp_p_ch: pick(&|r| r.emp_p_ch),
            emp_p_tr: pick(&|r| r.emp_p_tr),
            emp_drop: pick(&|r| r.emp_drop),
            emp_throughput: pick(&|r| r.emp_throughput),
            queue_occupancy: occupancy,
            arrivals: reps.iter().map(|r| r.arrivals).sum(),
            delivered: reps.iter().map(|r| r.delivered).sum(),
            dropped: reps.iter().map(|r| r.dropped).sum(),
            in_system: reps.iter().map(|r| r.in_system).sum(),
            pt_attempts: reps.iter().map(|r| r.pt_attempts).sum(),
            pt_successes: reps.iter().map(|r| r.pt_successes).sum(),
            pair_attempts: reps.iter().map(|r| r.pair_attempts).sum(),
            pair_successes: reps.iter().map(|r| r.pair_successes).sum(),
            divergent,
            queue_len_trace: reps.into_iter().find_map(|r| r.queue_len_trace),
        }
    }
}

/// Per-batch accumulators for one replication.
#[derive(Debug)]
pub(crate) struct BatchAcc {
    pub age: Vec<f64>,
    pub slots: Vec<f64>,
    pub pt_att: Vec<f64>,
    pub pt_succ: Vec<f64>,
    pub pair_att: Vec<f64>,
    pub pair_succ: Vec<f64>,
    pub full: Vec<f64>,
    pub active: Vec<f64>,
    pub node_slots: Vec<f64>,
    pub drops: Vec<f64>,
    pub arrivals: Vec<f64>,
}

impl BatchAcc {
    pub fn new(batches: usize) -> Self {
        let z = || vec![0.0; batches];
        BatchAcc {
            age: z(),
            slots: z(),
            pt_att: z(),
            pt_succ: z(),
            pair_att: z(),
            pair_succ: z(),
            full: z(),
            active: z(),
            node_slots: z(),
            drops: z(),
            arrivals: z(),
        }
    }
}

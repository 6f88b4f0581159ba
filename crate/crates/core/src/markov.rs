//! Discrete-time Markov chains behind the model: the two-state battery of a
//! secondary transmitter, and the primary queue under FCFS or single-buffer
//! replacement service.
//!
//! Conventions shared by every chain here (and by the simulator): arrivals
//! are Bernoulli(`lambda`) at slot end and cannot be served in their arrival
//! slot; a busy server completes with probability `mu_p` per slot.

use crate::error::{require, require_probability, Error, Result};

/// Zone and access probabilities bundled for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessProbabilities {
    /// Chance a node sits in the harvesting zone in a slot.
    pub p_eh: f64,
    /// Chance a node sits in the guard zone in a slot.
    pub p_gz: f64,
    /// Stationary probability the battery is full at the start of a slot.
    pub p_ch: f64,
    /// Unconditional per-slot transmission probability.
    pub p_tr: f64,
}

/// Stationary probability that a transmitter's single-slot battery is full.
///
/// The battery is a two-state chain: an empty node recharges when it falls
/// in the harvesting zone (probability `p_eh`); a full node discharges when
/// it attempts transmission, i.e. when it is outside the guard zone and its
/// access coin comes up (probability `(1 - p_gz) * p_s`). Hence
/// `p_ch = p_eh / (p_eh + p_s - p_gz * p_s)`.
pub fn battery_charge_probability(p_eh: f64, p_gz: f64, p_s: f64) -> Result<f64> {
    require_probability("p_eh", p_eh)?;
    require_probability("p_gz", p_gz)?;
    require_probability("p_s", p_s)?;
    let discharge = (1.0 - p_gz) * p_s;
    let denom = p_eh + discharge;
    require(
        denom > 0.0,
        "p_eh + (1 - p_gz) * p_s",
        denom,
        "> 0 (battery chain would never move)",
    )?;
    Ok(p_eh / denom)
}

/// Unconditional probability that a node transmits in a slot: full battery,
/// outside the guard zone, access coin up. Independence of the three factors
/// holds because positions are redrawn every slot.
pub fn transmit_probability(p_ch: f64, p_gz: f64, p_s: f64) -> Result<f64> {
    require_probability("p_ch", p_ch)?;
    require_probability("p_gz", p_gz)?;
    require_probability("p_s", p_s)?;
    Ok(p_ch * (1.0 - p_gz) * p_s)
}

/// Stationary description of a primary queue.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueSteadyState {
    /// `pi[n]` = stationary probability of `n` packets in the system.
    /// FCFS stores the first two entries with a geometric tail in `rho`;
    /// the replacement queue stores all three states. Empty when unstable.
    pub pi: Vec<f64>,
    /// Tail ratio `lambda (1 - mu_p) / (mu_p (1 - lambda))`.
    pub rho: f64,
    /// Up-transition probability `r = lambda (1 - mu_p)`.
    pub birth_rate: f64,
    /// Down-transition probability `s = mu_p (1 - lambda)`.
    pub death_rate: f64,
    /// FCFS: `lambda < mu_p`. The finite replacement chain is always stable.
    pub stable: bool,
    geometric_tail: bool,
}

impl QueueSteadyState {
    /// Probability of `n` packets in the system.
    pub fn pi_n(&self, n: usize) -> f64 {
        if !self.stable || self.pi.is_empty() {
            return f64::NAN;
        }
        if n < self.pi.len() {
            return self.pi[n];
        }
        if self.geometric_tail {
            self.pi[1] * self.rho.powi(n as i32 - 1)
        } else {
            0.0
        }
    }

    /// Total probability mass, with the FCFS geometric tail summed in closed
    /// form; equals 1 up to round-off for any valid steady state.
    pub fn total_mass(&self) -> f64 {
        if !self.stable || self.pi.is_empty() {
            return f64::NAN;
        }
        if self.geometric_tail {
            self.pi[0] + self.pi[1] / (1.0 - self.rho)
        } else {
            self.pi.iter().sum()
        }
    }
}

fn check_rates(lambda: f64, mu_p: f64) -> Result<()> {
    require(
        lambda.is_finite() && lambda > 0.0 && lambda < 1.0,
        "lambda",
        lambda,
        "in (0, 1)",
    )?;
    require(
        mu_p.is_finite() && mu_p > 0.0 && mu_p <= 1.0,
        "mu_p",
        mu_p,
        "in (0, 1]",
    )
}

/// Steady state of the infinite FCFS queue with Bernoulli arrivals and
/// geometric service: `pi_1 = lambda (1 - rho) / mu_p`,
/// `pi_0 = mu_p (1 - lambda) / lambda * pi_1`, geometric beyond.
/// Unstable inputs (`lambda >= mu_p`) return `stable = false` and no masses.
pub fn fcfs_steady_state(lambda: f64, mu_p: f64) -> Result<QueueSteadyState> {
    check_rates(lambda, mu_p)?;
    let birth = lambda * (1.0 - mu_p);
    let death = mu_p * (1.0 - lambda);
    let rho = birth / death;
    if lambda >= mu_p {
        return Ok(QueueSteadyState {
            pi: Vec::new(),
            rho,
            birth_rate: birth,
            death_rate: death,
            stable: false,
            geometric_tail: true,
        });
    }
    let pi_1 = lambda * (1.0 - rho) / mu_p;
    let pi_0 = mu_p * (1.0 - lambda) / lambda * pi_1;
    Ok(QueueSteadyState {
        pi: vec![pi_0, pi_1],
        rho,
        birth_rate: birth,
        death_rate: death,
        stable: true,
        geometric_tail: true,
    })
}

/// Steady state of the three-state replacement queue (empty / serving /
/// serving plus one stored update):
/// `pi_n = lambda^n (1-mu_p)^(n-1) / (mu_p^n (1-lambda)^n) * pi_0` for
/// n = 1, 2, with `pi_0 = (lambda - mu_p) / (lambda rho^2 - mu_p)`. At
/// `lambda = mu_p` that ratio is 0/0 and the normalization identity is used
/// instead; the two agree everywhere else.
pub fn qr_steady_state(lambda: f64, mu_p: f64) -> Result<QueueSteadyState> {
    check_rates(lambda, mu_p)?;
    let birth = lambda * (1.0 - mu_p);
    let death = mu_p * (1.0 - lambda);
    let rho = birth / death;
    let ratio_1 = lambda / (mu_p * (1.0 - lambda));
    let ratio_2 = ratio_1 * ratio_1 * (1.0 - mu_p);
    let denom = lambda * rho * rho - mu_p;
    let pi_0 = if denom.abs() > 1e-9 {
        (lambda - mu_p) / denom
    } else {
        1.0 / (1.0 + ratio_1 + ratio_2)
    };
    Ok(QueueSteadyState {
        pi: vec![pi_0, ratio_1 * pi_0, ratio_2 * pi_0],
        rho,
        birth_rate: birth,
        death_rate: death,
        stable: true,
        geometric_tail: false,
    })
}

/// The two printed forms of the replacement queue's drop probability. They
/// are not algebraically equal; the simulator's measured drop fraction is
/// the arbiter (it reproduces the closed form, see the validation command).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropForm {
    /// `pi_1 * lambda (1 - mu_p) + pi_2 * (1 - s)` over the three-state
    /// steady state above; simplifies to `pi_2`, the stationary probability
    /// of a full buffer.
    Definitional,
    /// The self-contained ratio that also underlies the effective arrival
    /// rate; equals the full-buffer probability of the variant chain in
    /// which a fresh arrival displaces the stored update before the slot's
    /// departure is resolved.
    ClosedForm,
}

/// Probability that a status update entering the replacement queue is
/// discarded rather than delivered.
pub fn drop_probability(lambda: f64, mu_p: f64, form: DropForm) -> Result<f64> {
    check_rates(lambda, mu_p)?;
    let p = match form {
        DropForm::Definitional => {
            let ss = qr_steady_state(lambda, mu_p)?;
            ss.pi[1] * lambda * (1.0 - mu_p) + ss.pi[2] * (1.0 - ss.death_rate)
        }
        DropForm::ClosedForm => {
            let head = lambda * lambda * (1.0 - mu_p) / (mu_p * mu_p * (1.0 - lambda));
            let denom = 1.0 + lambda / (mu_p * (1.0 - lambda)) + head;
            head / denom
        }
    };
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::CrossCheck {
            what: "drop probability out of [0, 1]",
            a: p,
            b: f64::NAN,
        });
    }
    Ok(p)
}

/// Rate at which the replacement queue delivers fresh updates:
/// `lambda_e = lambda - lambda^3 (1 - mu_p) / (lambda^2 (1-mu_p) +
/// lambda (1-mu_p) mu_p + mu_p^2)`, i.e. `lambda (1 - p_d)` with the
/// closed-form drop probability.
pub fn effective_arrival_rate(lambda: f64, mu_p: f64) -> Result<f64> {
    check_rates(lambda, mu_p)?;
    let delta =
        lambda * lambda * (1.0 - mu_p) + lambda * (1.0 - mu_p) * mu_p + mu_p * mu_p;
    Ok(lambda - lambda.powi(3) * (1.0 - mu_p) / delta)
}

//! Closed-form average age of information for the three primary service
//! policies, plus the secondary network's area throughput.
//!
//! Age convention (matched exactly by the simulator): ages are read at the
//! end of each slot; a delivery in slot `t` of an update generated in slot
//! `b` resets the age to `t - b + 1`, otherwise the age grows by one.

use crate::error::{require, Error, Result};
use crate::markov::{drop_probability, effective_arrival_rate, DropForm};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Primary service disciplines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// Infinite first-come-first-served queue.
    Fcfs,
    /// Single-update buffer; a fresh arrival replaces the stored update.
    Qr,
    /// Generate-at-will sampling: a fresh update is cut in the slot it is
    /// sent and discarded on failure.
    Gw,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Fcfs, PolicyKind::Qr, PolicyKind::Gw];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Fcfs => "fcfs",
            PolicyKind::Qr => "qr",
            PolicyKind::Gw => "gw",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fcfs" => Ok(PolicyKind::Fcfs),
            "qr" => Ok(PolicyKind::Qr),
            "gw" => Ok(PolicyKind::Gw),
            other => Err(Error::Scenario(format!(
                "unknown policy `{other}` (expected fcfs, qr or gw)"
            ))),
        }
    }
}

/// Mean age of a policy together with the intermediate quantities that went
/// into it. `mean_age` is `None` exactly when the policy is unstable at the
/// operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct AoiResult {
    pub policy: PolicyKind,
    pub mean_age: Option<f64>,
    pub stable: bool,
    /// Named intermediates (tail ratio, drop probabilities, ...), ordered for
    /// deterministic reporting.
    pub aux: BTreeMap<&'static str, f64>,
}

fn check_rate(name: &'static str, v: f64, open_top: bool) -> Result<()> {
    let ok = v.is_finite() && v > 0.0 && if open_top { v < 1.0 } else { v <= 1.0 };
    require(
        ok,
        name,
        v,
        if open_top { "in (0, 1)" } else { "in (0, 1]" },
    )
}

fn guard_age(lambda: f64, mu_p: f64, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 1.0 {
        Ok(value)
    } else {
        Err(Error::AgeOutOfDomain {
            lambda,
            mu_p,
            value,
        })
    }
}

/// Average age of the FCFS queue:
/// `1/lambda + (1-lambda)/(mu_p-lambda) - lambda/mu_p^2 + lambda/mu_p`,
/// finite only for `lambda < mu_p`.
pub fn aoi_fcfs(lambda: f64, mu_p: f64) -> Result<AoiResult> {
    check_rate("lambda", lambda, true)?;
    check_rate("mu_p", mu_p, false)?;
    let rho = lambda * (1.0 - mu_p) / (mu_p * (1.0 - lambda));
    let mut aux = BTreeMap::new();
    aux.insert("rho", rho);
    if lambda >= mu_p {
        return Ok(AoiResult {
            policy: PolicyKind::Fcfs,
            mean_age: None,
            stable: false,
            aux,
        });
    }
    let age = 1.0 / lambda + (1.0 - lambda) / (mu_p - lambda) - lambda / (mu_p * mu_p)
        + lambda / mu_p;
    Ok(AoiResult {
        policy: PolicyKind::Fcfs,
        mean_age: Some(guard_age(lambda, mu_p, age)?),
        stable: true,
        aux,
    })
}

// The replacement-queue age expression is long enough that a transcription
// slip is the dominant risk, so it is evaluated twice from independently
// rearranged forms and the two must agree to near round-off.

fn qr_age_nested(lambda: f64, mu_p: f64) -> f64 {
    let (l, m) = (lambda, mu_p);
    let delta = l * l * (1.0 - m) + l * (1.0 - m) * m + m * m;
    let eps = l + m - l * m;
    let sum = delta / (2.0 * l * m * eps)
        + l * (l * (3.0 * m - 2.0) - 2.0 * m + 1.0)
            / (l * l * (m - 1.0) * (m - 1.0) + l * m * (1.0 - 2.0 * m) + m * m)
        + (l.powi(3) * (m - 2.0) * (m - 1.0) + l * l * (m - 2.0) * (m - 1.0) * m)
            / (2.0 * l * l * m * m * eps)
        + (l * m * m * (2.0 - 3.0 * m) + 2.0 * m.powi(3)) / (2.0 * l * l * m * m * eps)
        + (1.0 - l) / (l * m)
        + (2.0 * l + 1.0) / eps
        - (l + 1.0) / (eps * eps)
        + 1.0 / (m * m);
    l * m * eps / delta * sum
}

fn qr_age_expanded(lambda: f64, mu_p: f64) -> f64 {
    let (l, m) = (lambda, mu_p);
    let delta = l * l * (1.0 - m) + l * (1.0 - m) * m + m * m;
    let eps = l + m - l * m;
    let mut s = 0.5 * delta;
    s += l * l * m * eps * (3.0 * l * m - 2.0 * l - 2.0 * m + 1.0)
        / (l * l * (1.0 - m) * (1.0 - m) + l * m * (1.0 - 2.0 * m) + m * m);
    s += l * (m - 2.0) * (m - 1.0) * (l + m) / (2.0 * m);
    s += m * (2.0 * l - 3.0 * l * m + 2.0 * m) / (2.0 * l);
    s += eps * (1.0 - l);
    s += l * m * (2.0 * l + 1.0);
    s -= l * m * (l + 1.0) / eps;
    s += l * eps / m;
    s / delta
}

/// Average age of the single-buffer replacement queue. Finite for any
/// arrival rate; the expression is evaluated through two independent
/// rearrangements which must match to 1e-12 before the value is accepted.
pub fn aoi_qr(lambda: f64, mu_p: f64) -> Result<AoiResult> {
    check_rate("lambda", lambda, true)?;
    check_rate("mu_p", mu_p, false)?;
    let a = qr_age_nested(lambda, mu_p);
    let b = qr_age_expanded(lambda, mu_p);
    if !(a.is_finite() && b.is_finite()) || (a - b).abs() > 1e-12 * a.abs().max(1.0) {
        return Err(Error::CrossCheck {
            what: "replacement-queue mean age",
            a,
            b,
        });
    }
    let mut aux = BTreeMap::new();
    aux.insert(
        "rho",
        lambda * (1.0 - mu_p) / (mu_p * (1.0 - lambda)),
    );
    aux.insert(
        "p_d_closed",
        drop_probability(lambda, mu_p, DropForm::ClosedForm)?,
    );
    aux.insert(
        "p_d_definitional",
        drop_probability(lambda, mu_p, DropForm::Definitional)?,
    );
    aux.insert("lambda_e", effective_arrival_rate(lambda, mu_p)?);
    Ok(AoiResult {
        policy: PolicyKind::Qr,
        mean_age: Some(guard_age(lambda, mu_p, a)?),
        stable: true,
        aux,
    })
}

/// Average age under generate-at-will sampling with per-slot sampling
/// probability `q`: successes are Bernoulli(`mu_p q`) per slot and each
/// resets the age to one, giving exactly `1 / (mu_p q)`.
pub fn aoi_gw(mu_p: f64, q: f64) -> Result<AoiResult> {
    check_rate("mu_p", mu_p, false)?;
    check_rate("q", q, false)?;
    let age = 1.0 / (mu_p * q);
    let mut aux = BTreeMap::new();
    aux.insert("q", q);
    Ok(AoiResult {
        policy: PolicyKind::Gw,
        mean_age: Some(guard_age(q, mu_p, age)?),
        stable: true,
        aux,
    })
}

/// Secondary network area throughput: successful secondary transmissions per
/// slot per square metre, `lambda_s * p_tr * p_sx`.
pub fn secondary_throughput(st_density: f64, p_tr: f64, p_sx: f64) -> Result<f64> {
    crate::error::require_non_negative("st_density", st_density)?;
    crate::error::require_probability("p_tr", p_tr)?;
    crate::error::require_probability("p_sx", p_sx)?;
    Ok(st_density * p_tr * p_sx)
}

#[cfg(test)]
// Frozen oracle constants keep their full decimal expansions.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn policy_names_round_trip() {
        for p in PolicyKind::ALL {
            assert_eq!(p.name().parse::<PolicyKind>().unwrap(), p);
        }
        assert!("lifo".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn fcfs_reference_values() {
        let r = aoi_fcfs(0.5, 1.0).unwrap();
        assert_eq!(r.mean_age, Some(3.0));
        let r = aoi_fcfs(0.2, 0.5).unwrap();
        assert!((r.mean_age.unwrap() - 7.266666666666666).abs() < 1e-12);
        assert!((r.aux["rho"] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn fcfs_unstable_flagged() {
        for (l, m) in [(0.5, 0.5), (0.6, 0.5), (0.9, 0.2)] {
            let r = aoi_fcfs(l, m).unwrap();
            assert!(!r.stable);
            assert_eq!(r.mean_age, None);
        }
        assert!(aoi_fcfs(1.0, 0.5).is_err());
        assert!(aoi_fcfs(0.2, 0.0).is_err());
    }

    #[test]
    fn fcfs_age_diverges_toward_instability() {
        // The waiting term is (1 - lambda)/(mu - lambda), about 501 here.
        let near = aoi_fcfs(0.499, 0.5).unwrap().mean_age.unwrap();
        let far = aoi_fcfs(0.4, 0.5).unwrap().mean_age.unwrap();
        assert!(near > 500.0 && far < 10.0, "near={near} far={far}");
    }

    #[test]
    fn qr_frozen_reference_values() {
        // 40-digit evaluations of the same expression.
        let cases = [
            (0.3, 0.7, 4.843856684331433727),
            (0.2, 0.5, 7.173076923076922815),
            (0.5, 1.0, 3.0),
            (0.9, 0.3, 6.7296199807722772385),
        ];
        for (l, m, want) in cases {
            let got = aoi_qr(l, m).unwrap().mean_age.unwrap();
            assert!(
                (got - want).abs() <= 1e-12 * want,
                "qr({l},{m}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn qr_finite_past_fcfs_stability_boundary() {
        let r = aoi_qr(0.9, 0.3).unwrap();
        assert!(r.stable);
        assert!(r.mean_age.unwrap().is_finite());
    }

    #[test]
    fn qr_rearrangements_agree_on_grid() {
        for i in 1..40 {
            for j in 1..=40 {
                let l = f64::from(i) / 40.0;
                let m = f64::from(j) / 40.0;
                let a = qr_age_nested(l, m);
                let b = qr_age_expanded(l, m);
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                    "({l}, {m}): {a} vs {b}"
                );
                let r = aoi_qr(l, m).unwrap();
                assert!(r.mean_age.unwrap() >= 1.0, "sub-slot age at ({l}, {m})");
            }
        }
    }

    #[test]
    fn qr_aux_quantities_present() {
        let r = aoi_qr(0.2, 0.5).unwrap();
        assert!((r.aux["p_d_closed"] - 0.0625).abs() < 1e-15);
        assert!((r.aux["p_d_definitional"] - 1.0 / 13.0).abs() < 1e-14);
        assert!((r.aux["lambda_e"] - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn gw_reference_values() {
        assert_eq!(aoi_gw(1.0, 1.0).unwrap().mean_age, Some(1.0));
        assert_eq!(aoi_gw(0.5, 0.5).unwrap().mean_age, Some(4.0));
        assert!(aoi_gw(0.5, 0.0).is_err());
        assert!(aoi_gw(0.0, 0.5).is_err());
    }

    #[test]
    fn throughput_is_a_plain_product() {
        let t = secondary_throughput(1e-3, 0.024280837359098229, 0.8).unwrap();
        assert!((t - 1.9424669887278583e-5).abs() < 1e-18);
        assert_eq!(secondary_throughput(0.0, 0.5, 0.5).unwrap(), 0.0);
        assert!(secondary_throughput(-1.0, 0.5, 0.5).is_err());
    }
}

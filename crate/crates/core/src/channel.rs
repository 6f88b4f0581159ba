//! Physical-layer model: SINR bookkeeping, the Laplace functional of
//! Poisson-field interference under Rayleigh fading, and the closed-form
//! success probabilities of the primary and secondary links.

use crate::error::{require, require_non_negative, require_positive, Result};
use crate::geometry::{mean_center_distance, Region};
use crate::quad::reciprocal_power_tail;

/// Transmit powers, path loss, noise and the decoding threshold.
/// Powers in watts; `sinr_threshold` is linear (not dB).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub primary_power: f64,
    pub secondary_power: f64,
    /// Path-loss exponent `alpha`; the interference integral needs `alpha > 2`.
    pub pathloss_exponent: f64,
    /// Noise power `sigma^2` in watts; zero models the interference-limited case.
    pub noise_power: f64,
    pub sinr_threshold: f64,
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("primary_power", self.primary_power)?;
        require_positive("secondary_power", self.secondary_power)?;
        require(
            self.pathloss_exponent.is_finite() && self.pathloss_exponent > 2.0,
            "pathloss_exponent",
            self.pathloss_exponent,
            "> 2 (interference integral diverges otherwise)",
        )?;
        require_non_negative("noise_power", self.noise_power)?;
        require_non_negative("sinr_threshold", self.sinr_threshold)?;
        Ok(())
    }
}

/// Signal-to-interference-plus-noise ratio.
///
/// Degenerate denominators keep their IEEE meaning so callers can detect
/// them: positive signal over a zero denominator returns `+inf` (the link is
/// noiseless and interference-free); `0/0` returns NaN, the indeterminate
/// case. A comparison against a finite threshold therefore treats `+inf` as
/// certain success and NaN as failure.
#[inline]
pub fn sinr(signal: f64, interference: f64, noise: f64) -> f64 {
    signal / (interference + noise)
}

/// Laplace functional of the aggregate interference of a Poisson field of
/// density `lambda_active` outside `exclusion_radius`, under Rayleigh
/// fading, evaluated at the normalized threshold `t`:
///
/// ```text
/// L(t) = exp(-2 pi lambda_a integral_r^inf t v^(1-alpha) / (1 + t v^-alpha) dv)
/// ```
///
/// `t = 0` or `lambda_active = 0` gives exactly 1.
pub fn laplace_interference(
    t: f64,
    lambda_active: f64,
    exclusion_radius: f64,
    alpha: f64,
) -> Result<f64> {
    require_non_negative("t", t)?;
    require_non_negative("lambda_active", lambda_active)?;
    require_non_negative("exclusion_radius", exclusion_radius)?;
    require(
        alpha.is_finite() && alpha > 2.0,
        "alpha",
        alpha,
        "> 2 (integral diverges otherwise)",
    )?;
    if t == 0.0 || lambda_active == 0.0 {
        return Ok(1.0);
    }
    // Substituting w = v^2 t^(-2/alpha) reduces the integral to
    // (t^(2/alpha)/2) * G(w0, alpha/2) with w0 = r^2 t^(-2/alpha).
    let t_pow = t.powf(2.0 / alpha);
    let w0 = exclusion_radius * exclusion_radius / t_pow;
    let integral = 0.5 * t_pow * reciprocal_power_tail(w0, alpha / 2.0)?;
    Ok((-2.0 * std::f64::consts::PI * lambda_active * integral).exp())
}

/// Per-slot decoding probability of the primary link against a field of
/// active secondary transmitters of density `lambda_active` kept outside the
/// guard zone: the interference Laplace functional times the noise factor
/// `exp(-theta sigma^2 d_p^alpha / P_p)`.
pub fn primary_success_probability(
    radio: &RadioParams,
    region: &Region,
    lambda_active: f64,
) -> Result<f64> {
    radio.validate()?;
    region.validate()?;
    require_non_negative("lambda_active", lambda_active)?;
    let alpha = radio.pathloss_exponent;
    let d_pow = region.pr_distance.powf(alpha);
    let t = radio.sinr_threshold * d_pow * radio.secondary_power / radio.primary_power;
    let fading = laplace_interference(t, lambda_active, region.gz_radius, alpha)?;
    let noise = (-radio.sinr_threshold * radio.noise_power * d_pow / radio.primary_power).exp();
    Ok(fading * noise)
}

/// Per-slot decoding probability of one secondary pair at link distance
/// `st_sr_distance`.
///
/// Three factors: the generating-functional bound for the field of
/// co-channel secondaries thinned to density `lambda_s * p_ch * p_s`, the
/// noise factor, and the primary's interference averaged at the mean
/// centre-to-node distance `2R/3`.
pub fn secondary_success_probability(
    radio: &RadioParams,
    region: &Region,
    st_sr_distance: f64,
    st_density: f64,
    p_ch: f64,
    p_s: f64,
) -> Result<f64> {
    radio.validate()?;
    region.validate()?;
    require_positive("st_sr_distance", st_sr_distance)?;
    require_non_negative("st_density", st_density)?;
    crate::error::require_probability("p_ch", p_ch)?;
    crate::error::require_probability("p_s", p_s)?;

    let alpha = radio.pathloss_exponent;
    let theta = radio.sinr_threshold;
    let d_sq = st_sr_distance * st_sr_distance;

    let own_field = (-std::f64::consts::PI
        * st_density
        * p_ch
        * p_s
        * d_sq
        * theta.powf(2.0 / alpha))
    .exp();
    let noise =
        (-theta * radio.noise_power * st_sr_distance.powf(alpha) / radio.secondary_power).exp();
    let mean_primary_dist = mean_center_distance(region.coverage_radius)?;
    let primary_term = 1.0
        + (d_sq / (mean_primary_dist * mean_primary_dist))
            * (theta * radio.primary_power / radio.secondary_power).powf(2.0 / alpha);
    Ok(own_field * noise / primary_term)
}

#[cfg(test)]
// Frozen oracle constants keep their full decimal expansions.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn default_region() -> Region {
        Region {
            coverage_radius: 500.0,
            pr_distance: 200.0,
            eh_radius: 80.0,
            gz_radius: 120.0,
        }
    }

    fn default_radio() -> RadioParams {
        RadioParams {
            primary_power: 1.0,
            secondary_power: 1e-3,
            pathloss_exponent: 4.0,
            noise_power: 1e-10,
            sinr_threshold: 1.0,
        }
    }

    #[test]
    fn sinr_values_and_sentinels() {
        assert_eq!(sinr(1.0, 0.0, 0.5), 2.0);
        assert_eq!(sinr(0.0, 0.3, 0.2), 0.0);
        assert_eq!(sinr(2.0, 0.0, 0.0), f64::INFINITY);
        assert!(sinr(0.0, 0.0, 0.0).is_nan());
    }

    #[test]
    fn laplace_degenerate_inputs_give_one() {
        assert_eq!(laplace_interference(0.0, 1e-4, 50.0, 4.0).unwrap(), 1.0);
        assert_eq!(laplace_interference(10.0, 0.0, 50.0, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn laplace_rejects_bad_exponent() {
        assert!(laplace_interference(1.0, 1e-4, 0.0, 2.0).is_err());
        assert!(laplace_interference(1.0, 1e-4, 0.0, 1.5).is_err());
        assert!(laplace_interference(-1.0, 1e-4, 0.0, 4.0).is_err());
    }

    #[test]
    fn laplace_quartic_no_exclusion_closed_form() {
        // alpha = 4, r = 0: the integral is (pi/4) sqrt(t).
        let lambda_a = 1e-4;
        for t in [1e-2f64, 1.0, 1e2, 1e4] {
            let want = (-2.0 * PI * lambda_a * (PI / 4.0) * t.sqrt()).exp();
            let got = laplace_interference(t, lambda_a, 0.0, 4.0).unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want,
                "t={t}: got {got}, want {want}"
            );
        }
        // Spot value: exponent 0.049348... at t = 1e4.
        let got = laplace_interference(1e4, 1e-4, 0.0, 4.0).unwrap();
        assert!((got - 0.95184980736927344649).abs() < 1e-12);
    }

    #[test]
    fn laplace_frozen_reference_values() {
        // 40-digit quadrature of the same integral.
        let cases = [
            (1.6e6, 2.4280837359098229e-5, 120.0, 4.0, 0.99158172172904728),
            (2.5, 1e-3, 10.0, 3.2, 0.99917477443919291043),
            (50.0, 5e-4, 0.0, 2.5, 0.85763749114984285396),
        ];
        for (t, la, r, alpha, want) in cases {
            let got = laplace_interference(t, la, r, alpha).unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want,
                "t={t} la={la} r={r} a={alpha}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn laplace_monotone_in_threshold_and_exclusion() {
        let mut last = 1.0;
        for i in 1..=20 {
            let t = 10f64.powi(i - 10);
            let l = laplace_interference(t, 1e-4, 30.0, 3.5).unwrap();
            assert!(l < last, "not decreasing at t={t}");
            last = l;
        }
        let mut last = 0.0;
        for i in 0..=10 {
            let r = f64::from(i) * 40.0;
            let l = laplace_interference(100.0, 1e-4, r, 3.5).unwrap();
            assert!(l >= last, "not increasing at r={r}");
            last = l;
        }
    }

    #[test]
    fn primary_success_trivial_cases() {
        let region = default_region();
        let mut radio = default_radio();
        radio.noise_power = 0.0;
        // No interferers, no noise.
        assert_eq!(
            primary_success_probability(&radio, &region, 0.0).unwrap(),
            1.0
        );
        // Zero threshold decodes always.
        radio.noise_power = 1e-10;
        radio.sinr_threshold = 0.0;
        assert_eq!(
            primary_success_probability(&radio, &region, 1e-4).unwrap(),
            1.0
        );
    }

    #[test]
    fn primary_success_pure_noise() {
        let region = default_region();
        let mut radio = default_radio();
        radio.noise_power = 1e-10;
        // lambda_active = 0: exp(-theta sigma^2 d_p^4 / P_p) = exp(-0.16).
        let got = primary_success_probability(&radio, &region, 0.0).unwrap();
        let want = (-0.16f64).exp();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn primary_success_default_scenario_frozen() {
        let got =
            primary_success_probability(&default_radio(), &default_region(), 2.4280837359098229e-5)
                .unwrap();
        assert!(
            (got - 0.84497020542382976).abs() < 1e-10,
            "got {got}"
        );
    }

    #[test]
    fn secondary_success_zero_threshold_is_one() {
        let mut radio = default_radio();
        radio.sinr_threshold = 0.0;
        let got =
            secondary_success_probability(&radio, &default_region(), 20.0, 1e-3, 0.05, 0.5)
                .unwrap();
        assert_eq!(got, 1.0);
    }

    #[test]
    fn secondary_success_primary_term_only() {
        // No co-channel field, no noise: only the primary's average
        // interference term remains.
        let mut radio = default_radio();
        radio.noise_power = 0.0;
        let got =
            secondary_success_probability(&radio, &default_region(), 20.0, 0.0, 0.05, 0.5)
                .unwrap();
        let e = 1000.0 / 3.0;
        let want = 1.0 / (1.0 + (400.0 / (e * e)) * 1000f64.sqrt());
        assert!((got - want).abs() < 1e-15, "got {got}, want {want}");
    }

    #[test]
    fn secondary_success_default_scenario_frozen() {
        let got = secondary_success_probability(
            &default_radio(),
            &default_region(),
            20.0,
            1e-3,
            0.051529790660225443,
            0.5,
        )
        .unwrap();
        assert!(
            (got - 0.85539458056835023).abs() < 1e-12,
            "got {got}"
        );
    }
}

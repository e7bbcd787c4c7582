//! Downlink quality: the probability that an AP does not transmit in a
//! slot, and the SINR coverage probability of a transmission.

use thiserror::Error;

use crate::config::{FormulaMode, ValidatedConfig};
use crate::numerics::{integrate, QuadError, QuadOptions};
use crate::scalar::Scalar;

/// Probability that an AP is idle in a slot: empty, or holding a packet
/// but losing contention. P_ai = 1 − μ + π₀μ. In `Corrected` mode with the
/// matching μ this is 1 − (1 − e^{−ν(1−π₀)})/ν; the `Paper` variant
/// collapses to (ν + e^{−ν} − 1)/ν, independent of π₀.
pub fn ap_idle_probability<F: Scalar>(pi0: F, mu: F, _nu: F, _mode: FormulaMode) -> F {
    F::one() - mu + pi0 * mu
}

/// Density of simultaneously transmitting APs, per the same unit as
/// `lambda_a`: (1 − P_ai)·λ₂.
pub fn active_ap_density<F: Scalar>(p_ai: F, lambda_a: F) -> F {
    (F::one() - p_ai) * lambda_a
}

#[derive(Clone, Copy, Debug)]
pub struct CoverageResult<F> {
    pub value: F,
    pub error_estimate: F,
    pub evaluations: usize,
}

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("coverage quadrature error estimate {estimate:.3e} exceeds the 1e-8 budget")]
    Accuracy { estimate: f64 },
    #[error("coverage integral evaluated outside [0,1]: {value}")]
    OutOfRange { value: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

const ERROR_BUDGET: f64 = 1e-8;
const CLAMP_SLACK: f64 = 1e-9;
/// Truncation point of the substituted integral: the integrand is bounded
/// by e^{−u}, so the discarded tail is below e^{−33} ≈ 5·10⁻¹⁵.
const U_MAX: f64 = 33.0;

/// SINR coverage probability of a transmission to a user at PPP-random
/// distance from its serving AP, with interference thinned by the idle
/// probability and an exclusion zone of radius `r_s` around the receiver's
/// serving AP:
///
///   p = ∫₀^∞ 2πλ₂ r · exp{ −λ₂πr²
///                          − (1−P_ai)λ₂πr²·√T̄·arctan(√T̄·r²/(r_s−r)²)
///                          − T̄·rᵉ·σ²/P } dr
///
/// evaluated after the substitution u = λ₂πr², which makes the leading
/// factor e^{−u} and bounds the domain for truncation. The arctan factor
/// has a kink where r crosses r_s (its argument passes through +∞), so the
/// domain splits there.
pub fn coverage_probability<F: Scalar>(
    cfg: &ValidatedConfig<F>,
    p_ai: F,
    r_s: F,
) -> Result<CoverageResult<F>, CoverageError> {
    let lambda_pi = cfg.lambda_a * F::PI();
    let tbar = cfg.sinr_threshold;
    let sqrt_tbar = tbar.sqrt();
    let idle_deficit = F::one() - p_ai;
    let noise_scale = tbar * cfg.noise / cfg.power_watts;
    let eta = cfg.eta;

    let integrand = move |u: F| -> F {
        if u <= F::zero() {
            return F::one(); // limit at u → 0⁺ (r → 0): all exponents vanish
        }
        let r = (u / lambda_pi).sqrt();
        let gap = r_s - r;
        let interference = if idle_deficit > F::zero() {
            let ratio = sqrt_tbar * r * r / (gap * gap); // +∞ exactly at r = r_s
            idle_deficit * u * sqrt_tbar * ratio.atan()
        } else {
            F::zero()
        };
        let noise = if noise_scale > F::zero() {
            noise_scale * r.powf(eta)
        } else {
            F::zero()
        };
        (-u - interference - noise).exp()
    };

    let u_max = F::of(U_MAX);
    let u_split = lambda_pi * r_s * r_s;
    let opts = QuadOptions::default();
    let mut value = F::zero();
    let mut error = F::zero();
    let mut evaluations = 0usize;
    let pieces: &[(F, F)] = &if u_split > F::zero() && u_split < u_max {
        [(F::zero(), u_split), (u_split, u_max)]
    } else {
        [(F::zero(), u_max), (u_max, u_max)] // second piece is empty
    };
    for &(a, b) in pieces {
        if a == b {
            continue;
        }
        let r = integrate(&integrand, a, b, opts)?;
        value += r.value;
        error += r.error_estimate;
        evaluations += r.evaluations;
    }

    if error.as_f64() > ERROR_BUDGET {
        return Err(CoverageError::Accuracy {
            estimate: error.as_f64(),
        });
    }
    let v = value.as_f64();
    if v < -CLAMP_SLACK || v > 1.0 + CLAMP_SLACK {
        return Err(CoverageError::OutOfRange { value: v });
    }
    Ok(CoverageResult {
        value: value.max(F::zero()).min(F::one()),
        error_estimate: error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;

    fn defaults() -> ValidatedConfig<f64> {
        SystemConfig::default().validate().unwrap()
    }

    #[test]
    fn idle_probability_closed_form_collapse() {
        // Corrected mode with its own μ: P_ai = 1 − (1−e^{−ν(1−π₀)})/ν.
        let nu = 2.0f64;
        let pi0 = 0.5;
        let mu = crate::analytics::contention::matern_retention(nu * (1.0 - pi0));
        let p_ai = ap_idle_probability(pi0, mu, nu, FormulaMode::Corrected);
        assert!((p_ai - 0.6839397205857212).abs() < 1e-14);
    }

    #[test]
    fn idle_probability_paper_mode_at_defaults() {
        // Paper-mode μ makes P_ai = (ν + e^{−ν} − 1)/ν regardless of π₀.
        let cfg = defaults();
        let nu = cfg.contention_mass;
        for pi0 in [0.1f64, 0.5, 0.9] {
            let (mu, _) = crate::analytics::contention::access_probability_closed(
                pi0,
                nu,
                FormulaMode::Paper,
            );
            let p_ai = ap_idle_probability(pi0, mu, nu, FormulaMode::Paper);
            let collapsed = (nu + (-nu).exp() - 1.0) / nu;
            assert!((p_ai - collapsed).abs() < 1e-12);
            assert!((collapsed - 0.9490704183618166).abs() < 1e-14);
        }
    }

    #[test]
    fn active_density_at_defaults() {
        let p_ai = 0.9490704183618166f64;
        let per_km2 = active_ap_density(p_ai, 100.0);
        assert!((per_km2 - 5.0929581638183357).abs() < 1e-9);
    }

    #[test]
    fn no_interference_no_noise_integrates_to_one() {
        let cfg = defaults(); // σ² = 0 by default
        let r = coverage_probability(&cfg, 1.0, cfg.radius).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "got {}", r.value);
    }

    #[test]
    fn defaults_reference_value() {
        let cfg = defaults();
        let r = coverage_probability(&cfg, 0.9490704183618166, cfg.radius).unwrap();
        assert!(
            (r.value - 0.96994809633297062).abs() < 1e-8,
            "got {}",
            r.value
        );
        assert!(r.error_estimate < 1e-8);
    }

    #[test]
    fn more_idle_interferers_mean_better_coverage() {
        let cfg = defaults();
        let lo = coverage_probability(&cfg, 0.90, cfg.radius).unwrap().value;
        let hi = coverage_probability(&cfg, 0.99, cfg.radius).unwrap().value;
        assert!(hi > lo);
    }

    #[test]
    fn wide_exclusion_radius_moves_split_past_truncation() {
        let cfg = defaults();
        // u_split = λ₂π·600² ≈ 113 > U_MAX: single-piece path.
        let r = coverage_probability(&cfg, 0.95, 600.0).unwrap();
        assert!(r.value > 0.0 && r.value <= 1.0);
    }

    #[test]
    fn noise_reduces_coverage() {
        let mut raw = SystemConfig::<f64>::default();
        raw.noise_power = 1e-9;
        let noisy_cfg = raw.validate().unwrap();
        let clean = coverage_probability(&defaults(), 0.95, 250.0).unwrap().value;
        let noisy = coverage_probability(&noisy_cfg, 0.95, 250.0).unwrap().value;
        assert!(noisy < clean);
    }
}

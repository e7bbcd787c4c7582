//! The stationary state of the network: a common buffer-empty probability
//! π₀ that makes the channel-access supply match the traffic demand.
//!
//! Supply side: an AP holding a packet wins the channel with the
//! closed-form access probability evaluated at contender mass ν(1−π₀).
//! Demand side: the cell-population-averaged service share from
//! `traffic::expected_demand`. The solver scans g(π₀) = supply − demand on
//! a fine grid, bisects every sign change, and reports the smallest root
//! as the operating point.
//!
//! Why the smallest: for λ < 1 the balance curve generically crosses zero
//! twice — once at the lightly-loaded operating branch and once just below
//! saturation (g is positive at both scan endpoints: supply dominates when
//! nearly every buffer is empty *and* when nearly every buffer is full,
//! because the demand series is capped at the occupied-cell mass). The
//! upper crossing is an artifact of that cap, not a reachable operating
//! point, so it is reported in `extra_roots` instead of being an error.

use thiserror::Error;

use crate::analytics::contention::access_probability_closed;
use crate::analytics::traffic::{expected_demand, CellPopulationPmf};
use crate::config::{FormulaMode, ValidatedConfig};
use crate::numerics::{bisect, scan_sign_changes};
use crate::scalar::Scalar;

/// Solver output: the stationary probabilities and the service share at
/// the operating point shared by every downstream formula.
#[derive(Clone, Debug)]
pub struct StateSolution<F> {
    /// Buffer-empty probability at the operating point.
    pub pi0: F,
    /// Buffer-holding probability, 1 − π₀.
    pub pi1: F,
    /// Per-contender channel-access probability at the operating point.
    pub expected_mu: F,
    /// |supply − demand| at the reported root.
    pub residual: F,
    pub mode: FormulaMode,
    /// Set when the input admits no balance equation (λ = 0 or no users):
    /// the conventional state π₀ = 1 is reported without solving.
    pub degenerate: bool,
    /// Set when the (paper-mode) access formula exceeded 1 at the root.
    pub mu_exceeds_unity: bool,
    /// Further roots of the balance equation, ascending (see module docs).
    pub extra_roots: Vec<F>,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(
        "balance equation has no sign change on ({lo}, {hi}): supply exceeds demand at every \
         candidate π₀ (min |g| = {min_abs_g:.3e} at π₀ = {argmin:.6}); the configuration is \
         outside the model's load-balance regime"
    )]
    NoSignChange {
        lo: f64,
        hi: f64,
        /// The scanned (π₀, g) table for diagnosis.
        samples: Vec<(f64, f64)>,
        min_abs_g: f64,
        argmin: f64,
    },
    #[error("bisection stalled at residual {residual:.3e} (tolerance {tolerance:.3e})")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
}

const SCAN_STEPS: usize = 1000;
const RESIDUAL_TOL: f64 = 1e-10;

/// Solves the load balance for the config's formula mode. See module docs
/// for root selection; degenerate inputs (λ = 0, λ₁ = 0) short-circuit to
/// the all-empty state.
pub fn solve_state<F: Scalar>(cfg: &ValidatedConfig<F>) -> Result<StateSolution<F>, SolveError> {
    solve_state_mode(cfg, cfg.mode)
}

/// As [`solve_state`] but with an explicit mode override (used by the
/// side-by-side validation report).
pub fn solve_state_mode<F: Scalar>(
    cfg: &ValidatedConfig<F>,
    mode: FormulaMode,
) -> Result<StateSolution<F>, SolveError> {
    if cfg.lambda <= F::zero() || cfg.lambda_u <= F::zero() {
        // No traffic ever arrives: every buffer stays empty. The access
        // probability of a (hypothetical) contender is the zero-mass
        // retention, i.e. 1.
        return Ok(StateSolution {
            pi0: F::one(),
            pi1: F::zero(),
            expected_mu: F::one(),
            residual: F::zero(),
            mode,
            degenerate: true,
            mu_exceeds_unity: false,
            extra_roots: Vec::new(),
        });
    }

    let pmf = CellPopulationPmf::with_default_tail(cfg.lambda_u, cfg.lambda_a, cfg.shape_k);
    let nu = cfg.contention_mass;
    let gap = |pi0: F| -> F {
        let (supply, _) = access_probability_closed(pi0, nu, mode);
        let (demand, _) = expected_demand(pi0, &pmf, cfg.lambda);
        supply - demand
    };

    let lo = F::of(1e-6);
    let hi = F::one() - F::of(1e-6);
    let (brackets, samples) = scan_sign_changes(&gap, lo, hi, SCAN_STEPS);
    if brackets.is_empty() {
        let (argmin, min_abs_g) = samples
            .iter()
            .map(|&(x, g)| (x.as_f64(), g.as_f64().abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        return Err(SolveError::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            samples: samples
                .iter()
                .map(|&(x, g)| (x.as_f64(), g.as_f64()))
                .collect(),
            min_abs_g,
            argmin,
        });
    }

    let tol = F::of(RESIDUAL_TOL);
    let mut roots: Vec<(F, F)> = brackets
        .iter()
        .map(|&b| {
            let r = bisect(&gap, b, tol, 256);
            (r.root, r.residual)
        })
        .collect();
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (pi0, residual) = roots[0];
    if residual > tol {
        return Err(SolveError::ResidualTooLarge {
            residual: residual.as_f64(),
            tolerance: RESIDUAL_TOL,
        });
    }
    let (mu, overshoot) = access_probability_closed(pi0, nu, mode);
    Ok(StateSolution {
        pi0,
        pi1: F::one() - pi0,
        expected_mu: mu,
        residual,
        mode,
        degenerate: false,
        mu_exceeds_unity: overshoot,
        extra_roots: roots.iter().skip(1).map(|&(r, _)| r).collect(),
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
    fn defaults_have_two_roots_and_small_residual() {
        let s = solve_state(&defaults()).unwrap();
        assert!(!s.degenerate);
        assert!(s.residual < 1e-10);
        assert!(s.pi0 > 0.0 && s.pi0 < 1.0);
        // The saturation-side artifact root sits just below 1.
        assert_eq!(s.extra_roots.len(), 1);
        assert!(s.extra_roots[0] > 0.99);
        assert!((s.pi1 + s.pi0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_rate_short_circuits() {
        let mut raw = SystemConfig::<f64>::default();
        raw.request_rate = 0.0;
        let s = solve_state(&raw.validate().unwrap()).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.pi0, 1.0);
        assert_eq!(s.expected_mu, 1.0);
    }

    #[test]
    fn zero_users_short_circuits() {
        let mut raw = SystemConfig::<f64>::default();
        raw.user_density = 0.0;
        let s = solve_state(&raw.validate().unwrap()).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.pi0, 1.0);
    }

    #[test]
    fn tight_radius_reports_no_sign_change_with_diagnostics() {
        // At R = 100 m the suppression region holds so few APs that channel
        // supply beats demand at every π₀ — no balance point exists.
        let mut raw = SystemConfig::<f64>::default();
        raw.suppression_radius = 100.0;
        let err = solve_state(&raw.validate().unwrap()).unwrap_err();
        match err {
            SolveError::NoSignChange {
                samples, min_abs_g, ..
            } => {
                assert_eq!(samples.len(), 1001);
                assert!(min_abs_g > 0.0);
                assert!(samples.iter().all(|&(_, g)| g > 0.0));
            }
            other => panic!("expected NoSignChange, got {other:?}"),
        }
    }

    #[test]
    fn saturated_rate_has_single_root() {
        let mut raw = SystemConfig::<f64>::default();
        raw.request_rate = 1.0;
        let s = solve_state(&raw.validate().unwrap()).unwrap();
        assert!(s.extra_roots.is_empty());
        assert!(s.pi0 > 0.9, "saturated root should sit near 1, got {}", s.pi0);
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn modes_agree_closely_at_defaults_but_are_distinct() {
        let c = solve_state_mode(&defaults(), FormulaMode::Corrected).unwrap();
        let p = solve_state_mode(&defaults(), FormulaMode::Paper).unwrap();
        assert!((c.pi0 - p.pi0).abs() < 1e-6);
        assert_ne!(c.pi0, p.pi0);
    }
}

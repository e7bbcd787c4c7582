//! Closed-form performance model: stationary buffer state, channel-access
//! probability, transmission coverage, and packet loss, all as functions
//! of the validated configuration.

pub mod contention;
pub mod coverage;
pub mod fixed_point;
pub mod plr;
pub mod traffic;

use thiserror::Error;

use crate::config::{FormulaMode, ValidatedConfig};
use crate::scalar::Scalar;

pub use contention::{
    access_probability_closed, access_probability_enumerated, matern_retention,
    weighted_share_closed, weighted_share_series,
};
pub use coverage::{
    active_ap_density, ap_idle_probability, coverage_probability, CoverageError, CoverageResult,
};
pub use fixed_point::{solve_state, solve_state_mode, SolveError, StateSolution};
pub use plr::{packet_loss_rate, PlrBreakdown};
pub use traffic::{
    aggregate_request_probability, expected_demand, required_service_share, CellPopulationPmf,
};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

/// One fully evaluated operating point. Densities are reported per km² and
/// the radius in meters (the configuration's native units).
#[derive(Clone, Debug)]
pub struct AnalyticResult<F> {
    pub mode: FormulaMode,
    pub lambda1: F,
    pub lambda2: F,
    pub lambda: F,
    pub radius: F,
    pub pi0: F,
    pub mu: F,
    pub p_ai: F,
    pub active_density: F,
    pub coverage: F,
    pub plr: PlrBreakdown<F>,
    /// Carried along for reporting: see [`StateSolution`].
    pub solution: StateSolution<F>,
}

/// CSV column order for [`AnalyticResult::csv_row`]. Stable: scripts key
/// off this exact header.
pub const ANALYTIC_CSV_HEADER: &str =
    "mode,lambda1,lambda2,lambda,R,pi0,mu,P_ai,active_density,p,plr";

impl<F: Scalar> AnalyticResult<F> {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.mode,
            self.lambda1,
            self.lambda2,
            self.lambda,
            self.radius,
            self.pi0,
            self.mu,
            self.p_ai,
            self.active_density,
            self.coverage,
            self.plr.total
        )
    }
}

/// Runs the whole analytic pipeline for the config's mode: fixed point →
/// idle probability → coverage → loss decomposition.
pub fn analyze<F: Scalar>(cfg: &ValidatedConfig<F>) -> Result<AnalyticResult<F>, AnalyticsError> {
    analyze_mode(cfg, cfg.mode)
}

/// As [`analyze`] with an explicit mode override.
pub fn analyze_mode<F: Scalar>(
    cfg: &ValidatedConfig<F>,
    mode: FormulaMode,
) -> Result<AnalyticResult<F>, AnalyticsError> {
    let solution = solve_state_mode(cfg, mode)?;
    let p_ai = ap_idle_probability(
        solution.pi0,
        solution.expected_mu,
        cfg.contention_mass,
        mode,
    );
    let cov = coverage_probability(cfg, p_ai, cfg.radius)?;
    let plr = if solution.degenerate {
        PlrBreakdown::zero()
    } else {
        let pmf = CellPopulationPmf::with_default_tail(cfg.lambda_u, cfg.lambda_a, cfg.shape_k);
        packet_loss_rate(&pmf, cfg.lambda, &solution, cov.value)
    };
    Ok(AnalyticResult {
        mode,
        lambda1: cfg.source.user_density,
        lambda2: cfg.source.ap_density,
        lambda: cfg.lambda,
        radius: cfg.radius,
        pi0: solution.pi0,
        mu: solution.expected_mu,
        p_ai,
        active_density: active_ap_density(p_ai, cfg.source.ap_density),
        coverage: cov.value,
        plr,
        solution,
    })
}

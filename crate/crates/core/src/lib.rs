//! Analytic and Monte-Carlo performance models of a slotted, single-channel
//! wireless network in which access points opportunistically share the
//! spectrum under a random-priority suppression rule.
//!
//! The crate has two halves that describe the same system:
//!
//! * [`analytics`] — closed forms and a fixed-point solver for the
//!   steady-state occupancy π₀, the per-contender channel-access
//!   probability μ, the AP-idle probability, the active-AP density, the
//!   coverage probability, and the packet loss rate, all driven by a
//!   [`config::ValidatedConfig`];
//! * [`sim`] — a discrete-slot simulator of the same protocol on sampled
//!   Poisson deployments, whose estimators are the ground truth the
//!   analytics are validated against.
//!
//! Everything numeric is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the `f64` aliases below are the types most callers want.

pub mod analytics;
pub mod config;
pub mod geometry;
pub mod numerics;
pub mod scalar;
pub mod sim;

pub use analytics::{analyze, analyze_mode, AnalyticResult, AnalyticsError, ANALYTIC_CSV_HEADER};
pub use config::{ConfigError, FormulaMode};
pub use scalar::Scalar;
pub use sim::{run as run_simulation, RunMetrics, RunOptions, SimError, RUN_CSV_HEADER};

/// Default scalar for end users of the library.
pub type Real = f64;

pub type Config = config::SystemConfig<Real>;
pub type RunConfig = config::ValidatedConfig<Real>;
pub type Analysis = analytics::AnalyticResult<Real>;
pub type Solution = analytics::StateSolution<Real>;
pub type Loss = analytics::PlrBreakdown<Real>;
pub type World = geometry::Deployment<Real>;

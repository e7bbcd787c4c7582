//! Monte-Carlo half of the toolkit: a slot-by-slot simulation of the same
//! network the analytics describe, used to validate the closed forms. See
//! [`engine`] for the slot protocol and [`metrics`] for the estimators.

pub mod engine;
pub mod metrics;

pub use engine::{
    default_warmup, evaluate_sinr, run, Replication, RunOptions, SimError, TraceEvent, TraceKind,
    MIN_DISTANCE_M,
};
pub use metrics::{mean_se, PlrAttribution, RepSummary, RunMetrics, SlotMetrics, RUN_CSV_HEADER};

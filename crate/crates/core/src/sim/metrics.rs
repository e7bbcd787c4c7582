//! Counters and estimators for simulation runs.
//!
//! Everything here is integer counting plus ratios at the end; estimates
//! and standard errors are reported in `f64` regardless of the position
//! scalar used by the engine.

/// Which busy drops count as channel-access losses. In this protocol every
/// AP that is still occupied when arrivals land is one that just lost
/// contention (winners empty their buffer in the same slot), so the two
/// attributions coincide; both are kept so that the identity is *checked*
/// rather than assumed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PlrAttribution {
    /// Busy drops at APs that contended this slot and were not active.
    #[default]
    ContentionLosers,
    /// Every Case-3 drop, regardless of why the buffer was still full.
    AllBusyDrops,
}

/// Raw per-slot counters. `requests_arrived` always equals
/// `successes + sinr_failures + dropped_overflow_empty + dropped_busy +
/// (buffered after − buffered before)` — the engine asserts it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SlotMetrics {
    pub requests_arrived: u64,
    /// Case-2 losses: arrivals beyond the one an empty buffer can take.
    pub dropped_overflow_empty: u64,
    /// Case-3 losses: arrivals at an AP whose buffer was already full.
    pub dropped_busy: u64,
    /// The subset of `dropped_busy` at APs that lost contention this slot.
    pub dropped_busy_at_losers: u64,
    pub transmissions: u64,
    pub sinr_failures: u64,
    pub successes: u64,
    pub empty_ap_count: u64,
    pub active_ap_count: u64,
    pub contending_ap_count: u64,
}

/// One replication's accumulated counts over its measurement window.
#[derive(Clone, Debug, Default)]
pub struct RepSummary {
    pub ap_count: u64,
    pub user_count: u64,
    pub slots_measured: u64,
    pub empty_ap_slots: u64,
    pub active_ap_slots: u64,
    pub contender_ap_slots: u64,
    pub arrived: u64,
    pub successes: u64,
    pub sinr_failures: u64,
    pub dropped_overflow_empty: u64,
    pub dropped_busy: u64,
    /// Busy drops at APs that lost contention in the same slot (the
    /// default channel-access attribution; see [`PlrAttribution`]).
    pub dropped_busy_at_losers: u64,
    /// Which busy drops `plr_access` charges to channel access.
    pub attribution: PlrAttribution,
    pub buffered_at_window_start: u64,
    pub buffered_at_window_end: u64,
    pub hardcore_violations: u64,
    /// Transmitter–receiver pairs at (measure-zero) zero distance, clamped.
    pub coincident_distance_events: u64,
}

impl RepSummary {
    /// Folds one measured slot into the running totals.
    pub fn absorb(&mut self, s: &SlotMetrics) {
        self.slots_measured += 1;
        self.empty_ap_slots += s.empty_ap_count;
        self.active_ap_slots += s.active_ap_count;
        self.contender_ap_slots += s.contending_ap_count;
        self.arrived += s.requests_arrived;
        self.successes += s.successes;
        self.sinr_failures += s.sinr_failures;
        self.dropped_overflow_empty += s.dropped_overflow_empty;
        self.dropped_busy += s.dropped_busy;
        self.dropped_busy_at_losers += s.dropped_busy_at_losers;
    }

    pub fn ap_slot_pairs(&self) -> u64 {
        self.ap_count * self.slots_measured
    }

    pub fn pi0_hat(&self) -> f64 {
        self.empty_ap_slots as f64 / self.ap_slot_pairs() as f64
    }

    pub fn p_ai_hat(&self) -> f64 {
        1.0 - self.active_ap_slots as f64 / self.ap_slot_pairs() as f64
    }

    /// Empirical per-contender channel-access probability.
    pub fn mu_hat(&self) -> f64 {
        self.active_ap_slots as f64 / self.contender_ap_slots as f64
    }

    /// Transmitting APs per km² per slot.
    pub fn active_density_hat(&self, side_m: f64) -> f64 {
        let area_km2 = (side_m / 1000.0) * (side_m / 1000.0);
        self.active_ap_slots as f64 / self.slots_measured as f64 / area_km2
    }

    pub fn dropped_total(&self) -> u64 {
        self.dropped_overflow_empty + self.dropped_busy + self.sinr_failures
    }

    pub fn plr_total(&self) -> f64 {
        self.dropped_total() as f64 / self.arrived as f64
    }

    pub fn plr_access(&self) -> f64 {
        let drops = match self.attribution {
            PlrAttribution::ContentionLosers => self.dropped_busy_at_losers,
            PlrAttribution::AllBusyDrops => self.dropped_busy,
        };
        drops as f64 / self.arrived as f64
    }

    pub fn plr_sinr(&self) -> f64 {
        self.sinr_failures as f64 / self.arrived as f64
    }

    /// All single-buffer drops (Cases 2 and 3) per arrival.
    pub fn plr_buffer(&self) -> f64 {
        (self.dropped_overflow_empty + self.dropped_busy) as f64 / self.arrived as f64
    }

    /// Overflow drops only — collisions at empty or just-serviced APs,
    /// excluding the busy drops that [`Self::plr_access`] attributes to
    /// lost contention. Disjoint from the access and SINR components.
    pub fn plr_overflow(&self) -> f64 {
        self.dropped_overflow_empty as f64 / self.arrived as f64
    }

    /// Exact packet conservation over the window; 0 when the books balance.
    pub fn conservation_residual(&self) -> i64 {
        let sinks = self.successes
            + self.sinr_failures
            + self.dropped_overflow_empty
            + self.dropped_busy
            + self.buffered_at_window_end;
        self.arrived as i64 + self.buffered_at_window_start as i64 - sinks as i64
    }
}

/// Mean and standard error of the mean; SE is NaN for fewer than two
/// samples (and whenever a sample is NaN, e.g. loss rates of a run with
/// zero arrivals).
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aggregated run output: replication means with standard errors, plus the
/// raw per-replication summaries for exact checks.
#[derive(Clone, Debug)]
pub struct RunMetrics {
    pub replications: u32,
    pub slots: u32,
    pub warmup: u32,
    pub pi0_hat: f64,
    pub pi0_se: f64,
    pub p_ai_hat: f64,
    pub p_ai_se: f64,
    pub mu_hat: f64,
    pub mu_se: f64,
    pub active_density_hat: f64,
    pub active_density_se: f64,
    pub plr_total: f64,
    pub plr_total_se: f64,
    pub plr_access: f64,
    pub plr_access_se: f64,
    pub plr_sinr: f64,
    pub plr_sinr_se: f64,
    pub plr_buffer: f64,
    pub plr_buffer_se: f64,
    pub arrived_total: u64,
    pub hardcore_violations: u64,
    pub per_rep: Vec<RepSummary>,
}

pub const RUN_CSV_HEADER: &str = "replications,slots,warmup,pi0_hat,pi0_se,P_ai_hat,P_ai_se,\
mu_hat,mu_se,active_density_hat,active_density_se,plr_total,plr_total_se,plr_access,\
plr_access_se,plr_sinr,plr_sinr_se,plr_buffer,plr_buffer_se,arrived_total,hardcore_violations";

impl RunMetrics {
    pub fn from_reps(reps: Vec<RepSummary>, slots: u32, warmup: u32, side_m: f64) -> RunMetrics {
        let collect = |f: &dyn Fn(&RepSummary) -> f64| -> Vec<f64> {
            reps.iter().map(f).collect()
        };
        let (pi0_hat, pi0_se) = mean_se(&collect(&|r| r.pi0_hat()));
        let (p_ai_hat, p_ai_se) = mean_se(&collect(&|r| r.p_ai_hat()));
        let (mu_hat, mu_se) = mean_se(&collect(&|r| r.mu_hat()));
        let (ad_hat, ad_se) = mean_se(&collect(&|r| r.active_density_hat(side_m)));
        let (plr_total, plr_total_se) = mean_se(&collect(&|r| r.plr_total()));
        let (plr_access, plr_access_se) = mean_se(&collect(&|r| r.plr_access()));
        let (plr_sinr, plr_sinr_se) = mean_se(&collect(&|r| r.plr_sinr()));
        let (plr_buffer, plr_buffer_se) = mean_se(&collect(&|r| r.plr_buffer()));
        RunMetrics {
            replications: reps.len() as u32,
            slots,
            warmup,
            pi0_hat,
            pi0_se,
            p_ai_hat,
            p_ai_se,
            mu_hat,
            mu_se,
            active_density_hat: ad_hat,
            active_density_se: ad_se,
            plr_total,
            plr_total_se,
            plr_access,
            plr_access_se,
            plr_sinr,
            plr_sinr_se,
            plr_buffer,
            plr_buffer_se,
            arrived_total: reps.iter().map(|r| r.arrived).sum(),
            hardcore_violations: reps.iter().map(|r| r.hardcore_violations).sum(),
            per_rep: reps,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.replications,
            self.slots,
            self.warmup,
            self.pi0_hat,
            self.pi0_se,
            self.p_ai_hat,
            self.p_ai_se,
            self.mu_hat,
            self.mu_se,
            self.active_density_hat,
            self.active_density_se,
            self.plr_total,
            self.plr_total_se,
            self.plr_access,
            self.plr_access_se,
            self.plr_sinr,
            self.plr_sinr_se,
            self.plr_buffer,
            self.plr_buffer_se,
            self.arrived_total,
            self.hardcore_violations
        )
    }
}

//! Discrete-slot simulator for the shared-channel network.
//!
//! Each slot runs in four phases:
//!
//! 1. **Census** — record which APs hold a packet; they are this slot's
//!    contenders.
//! 2. **Contention** — every contender draws an i.i.d. uniform priority and
//!    is active iff it beats every contender within the suppression radius.
//! 3. **Transmission** — each active AP sends its buffered packet to the
//!    packet's user; success is decided by SINR against the threshold, and
//!    the packet leaves the buffer either way (no retransmission).
//! 4. **Arrivals** — each user requests independently with probability λ.
//!    An AP that is empty *after* phase 3 keeps one uniformly random
//!    requester and drops the rest; an AP still holding a packet (i.e. one
//!    that just lost contention) drops them all.
//!
//! Every loss is counted at the slot it happens, so packet conservation
//! holds as an exact integer identity per replication.
//!
//! Replications are independent: replication `r` derives four decorrelated
//! RNG streams (deployment, traffic, contention, fading) from the master
//! seed, so runs are reproducible bit for bit regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::ValidatedConfig;
use crate::geometry::{toroidal_distance_sq, Deployment, GeometryError};
use crate::scalar::Scalar;

use super::metrics::{PlrAttribution, RepSummary, RunMetrics, SlotMetrics};

/// Transmitter–receiver distances below this are clamped (meters). Exact
/// coincidence has probability zero but finite floats can produce it; the
/// event is counted so it never passes silently.
pub const MIN_DISTANCE_M: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("need at least one measured slot (slots={slots}, warmup={warmup})")]
    BadWindow { slots: u32, warmup: u32 },
    #[error("need at least one replication")]
    NoReplications,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub slots: u32,
    /// Leading slots excluded from measurement (burn-in from empty buffers).
    pub warmup: u32,
    pub replications: u32,
    pub seed: u64,
    pub attribution: PlrAttribution,
}

impl RunOptions {
    pub fn new(slots: u32, warmup: u32, replications: u32, seed: u64) -> RunOptions {
        RunOptions {
            slots,
            warmup,
            replications,
            seed,
            attribution: PlrAttribution::default(),
        }
    }
}

/// Default burn-in: 10% of the run, at least 500 slots, but always leaving
/// at least one measured slot.
pub fn default_warmup(slots: u32) -> u32 {
    (slots / 10).max(500).min(slots.saturating_sub(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub slot: u32,
    pub ap: u32,
    pub kind: TraceKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    Contending,
    WonChannel,
    TransmitSuccess { user: u32 },
    TransmitFailure { user: u32 },
    ArrivalBuffered { user: u32 },
    /// Lost the uniform draw at an empty AP (Case 2).
    ArrivalDroppedOverflow { user: u32 },
    /// Arrived at an AP still holding a packet (Case 3).
    ArrivalDroppedBusy { user: u32, lost_contention: bool },
}

/// The four decorrelated RNG lanes of one replication.
const LANE_DEPLOYMENT: u64 = 0;
const LANE_TRAFFIC: u64 = 1;
const LANE_CONTENTION: u64 = 2;
const LANE_FADING: u64 = 3;

fn lane_rng(seed: u64, rep: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep * 4 + lane);
    rng
}

/// Received power at `rx` from AP `tx`: P · h · d^{−η}, with unit-mean
/// exponential fading when enabled and the distance clamp of
/// [`MIN_DISTANCE_M`].
#[allow(clippy::too_many_arguments)]
fn received_power<F: Scalar, R: Rng>(
    dep: &Deployment<F>,
    tx: usize,
    rx: crate::geometry::Point<F>,
    power: F,
    eta: F,
    fading: bool,
    rng: &mut R,
    coincident_events: &mut u64,
) -> F {
    let mut d = toroidal_distance_sq(dep.aps[tx], rx, dep.side).sqrt();
    if d == F::zero() {
        *coincident_events += 1;
        d = F::of(MIN_DISTANCE_M);
    }
    let h = if fading {
        F::of(rng.sample::<f64, _>(Exp1))
    } else {
        F::one()
    };
    power * h * d.powf(-eta)
}

/// SINR at the destination of `tx`'s packet, with every other AP in
/// `active` interfering. Fading draws are consumed in a fixed order (signal
/// first, then interferers by ascending index), so results are
/// reproducible.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_sinr<F: Scalar, R: Rng>(
    dep: &Deployment<F>,
    tx: usize,
    dest_user: usize,
    active: &[u32],
    power: F,
    eta: F,
    noise: F,
    fading: bool,
    rng: &mut R,
    coincident_events: &mut u64,
) -> F {
    let rx = dep.users[dest_user];
    let signal = received_power(dep, tx, rx, power, eta, fading, rng, coincident_events);
    let mut interference = F::zero();
    for &b in active {
        if b as usize == tx {
            continue;
        }
        interference +=
            received_power(dep, b as usize, rx, power, eta, fading, rng, coincident_events);
    }
    // Zero denominator means a perfectly clean channel: +∞ SINR.
    signal / (interference + noise)
}

/// One running replication: a fixed deployment plus the per-AP single-packet
/// buffers and the RNG lanes that drive it.
pub struct Replication<F: Scalar> {
    dep: Deployment<F>,
    /// buffers[a] = destination user of the packet AP a holds, if any.
    buffers: Vec<Option<u32>>,
    lambda: f64,
    power: F,
    eta: F,
    noise: F,
    threshold: F,
    radius: F,
    fading: bool,
    rng_traffic: ChaCha8Rng,
    rng_contention: ChaCha8Rng,
    rng_fading: ChaCha8Rng,
    slot: u32,
    hardcore_violations: u64,
    coincident_distance_events: u64,
    // per-slot scratch, reused to keep the hot loop allocation-free
    contender: Vec<bool>,
    priority: Vec<f64>,
    active_flag: Vec<bool>,
    active_list: Vec<u32>,
    loser: Vec<bool>,
    busy_at_arrival: Vec<bool>,
    arrival_count: Vec<u32>,
    arrival_keep: Vec<u32>,
    touched: Vec<u32>,
    arrival_events: Vec<(u32, u32)>,
}

impl<F: Scalar> Replication<F> {
    /// Builds a replication on an explicit deployment (test fixtures, replay
    /// of a dumped deployment). RNG lanes 1–3 are derived from the seed; the
    /// deployment lane is unused.
    pub fn from_deployment(
        cfg: &ValidatedConfig<F>,
        dep: Deployment<F>,
        seed: u64,
        rep_index: u64,
    ) -> Replication<F> {
        let n = dep.aps.len();
        Replication {
            buffers: vec![None; n],
            lambda: cfg.lambda.as_f64(),
            power: cfg.power_watts,
            eta: cfg.eta,
            noise: cfg.noise,
            threshold: cfg.sinr_threshold,
            radius: cfg.radius,
            fading: cfg.fading,
            rng_traffic: lane_rng(seed, rep_index, LANE_TRAFFIC),
            rng_contention: lane_rng(seed, rep_index, LANE_CONTENTION),
            rng_fading: lane_rng(seed, rep_index, LANE_FADING),
            slot: 0,
            hardcore_violations: 0,
            coincident_distance_events: 0,
            contender: vec![false; n],
            priority: vec![0.0; n],
            active_flag: vec![false; n],
            active_list: Vec::with_capacity(n),
            loser: vec![false; n],
            busy_at_arrival: vec![false; n],
            arrival_count: vec![0; n],
            arrival_keep: vec![0; n],
            touched: Vec::with_capacity(n),
            arrival_events: Vec::new(),
            dep,
        }
    }

    /// Samples a fresh deployment from the config's point processes and
    /// wires up a replication around it.
    pub fn sample(
        cfg: &ValidatedConfig<F>,
        seed: u64,
        rep_index: u64,
    ) -> Result<Replication<F>, SimError> {
        let mut rng = lane_rng(seed, rep_index, LANE_DEPLOYMENT);
        let dep = Deployment::sample(cfg.lambda_u, cfg.lambda_a, cfg.side, cfg.radius, &mut rng)?;
        Ok(Replication::from_deployment(cfg, dep, seed, rep_index))
    }

    pub fn deployment(&self) -> &Deployment<F> {
        &self.dep
    }

    pub fn buffers(&self) -> &[Option<u32>] {
        &self.buffers
    }

    pub fn buffered_count(&self) -> u64 {
        self.buffers.iter().filter(|b| b.is_some()).count() as u64
    }

    pub fn hardcore_violations(&self) -> u64 {
        self.hardcore_violations
    }

    pub fn coincident_distance_events(&self) -> u64 {
        self.coincident_distance_events
    }

    /// Advances one slot and returns its counters. Pass a trace buffer to
    /// record per-AP events (fixture tests, debugging); `None` skips all
    /// trace work.
    pub fn step_slot(&mut self, mut trace: Option<&mut Vec<TraceEvent>>) -> SlotMetrics {
        let mut m = SlotMetrics::default();
        let n_aps = self.dep.aps.len();
        let slot = self.slot;

        // Phase 1: occupancy census.
        for a in 0..n_aps {
            self.contender[a] = self.buffers[a].is_some();
            if self.contender[a] {
                m.contending_ap_count += 1;
            }
        }
        m.empty_ap_count = n_aps as u64 - m.contending_ap_count;

        // Phase 2: random-priority contention. Priorities are drawn for
        // contenders only, in ascending AP order, so the stream advances
        // identically however the census came out.
        for a in 0..n_aps {
            if self.contender[a] {
                self.priority[a] = self.rng_contention.gen::<f64>();
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceEvent {
                        slot,
                        ap: a as u32,
                        kind: TraceKind::Contending,
                    });
                }
            }
        }
        self.active_list.clear();
        for a in 0..n_aps {
            self.loser[a] = false;
            if !self.contender[a] {
                self.active_flag[a] = false;
                continue;
            }
            let mut wins = true;
            for &b in self.dep.neighbors.neighbors(a) {
                let b = b as usize;
                if !self.contender[b] {
                    continue;
                }
                // Strictly higher priority beats us; an exact tie (possible
                // in floats, measure zero) breaks toward the lower index.
                if self.priority[b] > self.priority[a]
                    || (self.priority[b] == self.priority[a] && b < a)
                {
                    wins = false;
                    break;
                }
            }
            self.active_flag[a] = wins;
            if wins {
                self.active_list.push(a as u32);
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceEvent {
                        slot,
                        ap: a as u32,
                        kind: TraceKind::WonChannel,
                    });
                }
            } else {
                self.loser[a] = true;
            }
        }
        m.active_ap_count = self.active_list.len() as u64;

        // Hardcore audit: no two active APs may be within the suppression
        // radius. Any hit is an engine bug; count it rather than trust it.
        let side = self.dep.side;
        let r_sq = self.radius * self.radius;
        for (i, &a) in self.active_list.iter().enumerate() {
            for &b in &self.active_list[i + 1..] {
                let d_sq =
                    toroidal_distance_sq(self.dep.aps[a as usize], self.dep.aps[b as usize], side);
                if d_sq <= r_sq {
                    self.hardcore_violations += 1;
                }
            }
        }

        // Phase 3: transmissions. Every active AP's packet leaves its
        // buffer now, successful or not.
        for idx in 0..self.active_list.len() {
            let a = self.active_list[idx] as usize;
            let dest = self.buffers[a].take().expect("active AP holds a packet");
            let sinr = evaluate_sinr(
                &self.dep,
                a,
                dest as usize,
                &self.active_list,
                self.power,
                self.eta,
                self.noise,
                self.fading,
                &mut self.rng_fading,
                &mut self.coincident_distance_events,
            );
            m.transmissions += 1;
            let ok = sinr >= self.threshold;
            if ok {
                m.successes += 1;
            } else {
                m.sinr_failures += 1;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceEvent {
                    slot,
                    ap: a as u32,
                    kind: if ok {
                        TraceKind::TransmitSuccess { user: dest }
                    } else {
                        TraceKind::TransmitFailure { user: dest }
                    },
                });
            }
        }

        // Phase 4: arrivals, against post-transmission buffers. Per AP we
        // keep a running count and a reservoir-sampled survivor, so the
        // kept packet is uniform among the slot's requesters without
        // storing them.
        self.touched.clear();
        self.arrival_events.clear();
        let n_users = self.dep.users.len();
        if self.lambda > 0.0 && n_users > 0 {
            let certain = self.lambda >= 1.0; // skip the Bernoulli draw at λ = 1
            for u in 0..n_users {
                if !certain && self.rng_traffic.gen::<f64>() >= self.lambda {
                    continue;
                }
                m.requests_arrived += 1;
                let a = self.dep.assoc[u];
                if self.arrival_count[a] == 0 {
                    self.touched.push(a as u32);
                }
                self.arrival_count[a] += 1;
                let c = self.arrival_count[a];
                if c == 1 || self.rng_traffic.gen::<f64>() * (c as f64) < 1.0 {
                    self.arrival_keep[a] = u as u32;
                }
                if trace.is_some() {
                    self.arrival_events.push((a as u32, u as u32));
                }
            }
        }
        let mut kept = 0u64;
        for &a32 in &self.touched {
            let a = a32 as usize;
            let j = self.arrival_count[a] as u64;
            self.arrival_count[a] = 0;
            let busy = self.buffers[a].is_some();
            self.busy_at_arrival[a] = busy;
            if busy {
                m.dropped_busy += j;
                if self.loser[a] {
                    m.dropped_busy_at_losers += j;
                }
            } else {
                self.buffers[a] = Some(self.arrival_keep[a]);
                kept += 1;
                m.dropped_overflow_empty += j - 1;
            }
        }
        debug_assert_eq!(
            m.requests_arrived,
            kept + m.dropped_overflow_empty + m.dropped_busy,
            "slot books must balance"
        );
        if let Some(t) = trace.as_deref_mut() {
            for &(a, u) in &self.arrival_events {
                let kind = if self.busy_at_arrival[a as usize] {
                    TraceKind::ArrivalDroppedBusy {
                        user: u,
                        lost_contention: self.loser[a as usize],
                    }
                } else if self.arrival_keep[a as usize] == u {
                    TraceKind::ArrivalBuffered { user: u }
                } else {
                    TraceKind::ArrivalDroppedOverflow { user: u }
                };
                t.push(TraceEvent { slot, ap: a, kind });
            }
        }

        self.slot += 1;
        m
    }
}

fn run_replication<F: Scalar>(
    cfg: &ValidatedConfig<F>,
    opts: &RunOptions,
    rep: u64,
) -> Result<RepSummary, SimError> {
    let mut sim = Replication::sample(cfg, opts.seed, rep)?;
    for _ in 0..opts.warmup {
        sim.step_slot(None);
    }
    let mut summary = RepSummary {
        ap_count: sim.dep.aps.len() as u64,
        user_count: sim.dep.users.len() as u64,
        attribution: opts.attribution,
        buffered_at_window_start: sim.buffered_count(),
        ..Default::default()
    };
    for _ in opts.warmup..opts.slots {
        let m = sim.step_slot(None);
        summary.absorb(&m);
    }
    summary.buffered_at_window_end = sim.buffered_count();
    // Violations are tracked over the whole run, warmup included: the
    // hardcore property must hold in every slot, not just measured ones.
    summary.hardcore_violations = sim.hardcore_violations;
    summary.coincident_distance_events = sim.coincident_distance_events;
    assert_eq!(
        summary.conservation_residual(),
        0,
        "packet conservation is exact by construction"
    );
    Ok(summary)
}

/// Runs all replications (in parallel, deterministically: each replication's
/// randomness depends only on the master seed and its own index) and
/// aggregates their summaries.
pub fn run<F: Scalar>(cfg: &ValidatedConfig<F>, opts: &RunOptions) -> Result<RunMetrics, SimError> {
    if opts.warmup >= opts.slots {
        return Err(SimError::BadWindow {
            slots: opts.slots,
            warmup: opts.warmup,
        });
    }
    if opts.replications == 0 {
        return Err(SimError::NoReplications);
    }
    let summaries: Result<Vec<RepSummary>, SimError> = (0..opts.replications)
        .into_par_iter()
        .map(|rep| run_replication(cfg, opts, rep as u64))
        .collect();
    Ok(RunMetrics::from_reps(
        summaries?,
        opts.slots,
        opts.warmup,
        cfg.side.as_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;
    use crate::geometry::Point;

    fn cfg_with(f: impl FnOnce(&mut SystemConfig<f64>)) -> ValidatedConfig<f64> {
        let mut raw = SystemConfig::default();
        f(&mut raw);
        raw.validate().unwrap()
    }

    fn two_ap_fixture(separation: f64, cfg: &ValidatedConfig<f64>) -> Deployment<f64> {
        // Two APs on a big torus, one user glued to each (1 m away).
        let aps = vec![
            Point { x: 100.0, y: 100.0 },
            Point {
                x: 100.0 + separation,
                y: 100.0,
            },
        ];
        let users = vec![
            Point { x: 101.0, y: 100.0 },
            Point {
                x: 101.0 + separation,
                y: 100.0,
            },
        ];
        Deployment::from_points(cfg.side, aps, users, cfg.radius)
    }

    #[test]
    fn isolated_occupied_aps_both_transmit() {
        let cfg = cfg_with(|c| {
            c.request_rate = 1.0;
            c.fading_enabled = false;
        });
        let dep = two_ap_fixture(600.0, &cfg); // 600 m > R = 250 m
        let mut sim = Replication::from_deployment(&cfg, dep, 1, 0);
        sim.step_slot(None); // fills both buffers
        let m = sim.step_slot(None);
        assert_eq!(m.contending_ap_count, 2);
        assert_eq!(m.active_ap_count, 2);
        assert_eq!(sim.hardcore_violations(), 0);
    }

    #[test]
    fn neighbors_within_radius_never_transmit_together() {
        let cfg = cfg_with(|c| {
            c.request_rate = 1.0;
            c.fading_enabled = false;
        });
        let dep = two_ap_fixture(200.0, &cfg); // 200 m ≤ R = 250 m
        let mut sim = Replication::from_deployment(&cfg, dep, 1, 0);
        sim.step_slot(None);
        for _ in 0..200 {
            let m = sim.step_slot(None);
            assert_eq!(m.contending_ap_count, 2, "λ=1 keeps both occupied");
            assert_eq!(m.active_ap_count, 1);
        }
        assert_eq!(sim.hardcore_violations(), 0);
    }

    #[test]
    fn clean_channel_sinr_is_infinite_and_noisy_one_matches_hand_value() {
        let cfg = cfg_with(|c| c.fading_enabled = false);
        let dep = two_ap_fixture(600.0, &cfg);
        let mut rng = lane_rng(0, 0, LANE_FADING);
        let mut coincident = 0;
        let sinr = evaluate_sinr(
            &dep, 0, 0, &[0], cfg.power_watts, cfg.eta, 0.0, false, &mut rng, &mut coincident,
        );
        assert!(sinr.is_infinite() && sinr > 0.0);

        // With σ² = 1e-9 W and d = 1 m: SINR = P/σ².
        let sinr = evaluate_sinr(
            &dep, 0, 0, &[0], cfg.power_watts, cfg.eta, 1e-9, false, &mut rng, &mut coincident,
        );
        assert!((sinr - cfg.power_watts / 1e-9).abs() / sinr < 1e-12);
        assert_eq!(coincident, 0);
    }

    #[test]
    fn interference_from_equal_twin_gives_sinr_one() {
        let cfg = cfg_with(|c| c.fading_enabled = false);
        // Both APs at distance d from user 0's position: place user midway.
        let aps = vec![Point { x: 100.0, y: 100.0 }, Point { x: 300.0, y: 100.0 }];
        let users = vec![Point { x: 200.0, y: 100.0 }];
        let dep = Deployment::from_points(cfg.side, aps, users, cfg.radius);
        let mut rng = lane_rng(0, 0, LANE_FADING);
        let mut coincident = 0;
        let sinr = evaluate_sinr(
            &dep,
            0,
            0,
            &[0, 1],
            cfg.power_watts,
            cfg.eta,
            0.0,
            false,
            &mut rng,
            &mut coincident,
        );
        assert!((sinr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_transmitter_and_receiver_is_clamped_and_counted() {
        let cfg = cfg_with(|c| c.fading_enabled = false);
        let aps = vec![Point { x: 100.0, y: 100.0 }];
        let users = vec![Point { x: 100.0, y: 100.0 }];
        let dep = Deployment::from_points(cfg.side, aps, users, cfg.radius);
        let mut rng = lane_rng(0, 0, LANE_FADING);
        let mut coincident = 0;
        let sinr = evaluate_sinr(
            &dep, 0, 0, &[0], cfg.power_watts, cfg.eta, 1e-9, false, &mut rng, &mut coincident,
        );
        assert_eq!(coincident, 1);
        // d clamped to 1e-3 m: SINR = P·(1e-3)^{−4}/σ², finite and huge.
        assert!(sinr.is_finite() && sinr > 1e12);
    }

    #[test]
    fn saturated_single_cell_drops_all_but_one_arrival() {
        let cfg = cfg_with(|c| {
            c.request_rate = 1.0;
            c.fading_enabled = false;
        });
        let aps = vec![Point { x: 500.0, y: 500.0 }];
        let users = (0..5)
            .map(|i| Point {
                x: 400.0 + 50.0 * i as f64,
                y: 500.0,
            })
            .collect();
        let dep = Deployment::from_points(cfg.side, aps, users, cfg.radius);
        let mut sim = Replication::from_deployment(&cfg, dep, 9, 0);

        // Slot 0: empty AP, 5 arrivals → 1 buffered, 4 overflow drops.
        let m = sim.step_slot(None);
        assert_eq!(m.requests_arrived, 5);
        assert_eq!(m.dropped_overflow_empty, 4);
        assert_eq!(m.dropped_busy, 0);
        assert_eq!(sim.buffered_count(), 1);

        // Slot 1: the lone AP always wins contention, transmits, and the
        // buffer is free again for the next batch — never a busy drop.
        let m = sim.step_slot(None);
        assert_eq!(m.active_ap_count, 1);
        assert_eq!(m.transmissions, 1);
        assert_eq!(m.dropped_busy, 0);
        assert_eq!(m.dropped_overflow_empty, 4);
    }

    #[test]
    fn run_is_deterministic_across_thread_schedules() {
        let cfg = cfg_with(|c| {
            c.region_side = 1000.0; // smaller region to keep the test quick
        });
        let opts = RunOptions::new(60, 10, 4, 42);
        let a = run(&cfg, &opts).unwrap();
        let b = run(&cfg, &opts).unwrap();
        assert_eq!(a.csv_row(), b.csv_row());
        for (x, y) in a.per_rep.iter().zip(&b.per_rep) {
            assert_eq!(x.arrived, y.arrived);
            assert_eq!(x.successes, y.successes);
            assert_eq!(x.empty_ap_slots, y.empty_ap_slots);
        }
        // A different seed must actually change the sampled world.
        let c = run(&cfg, &RunOptions::new(60, 10, 4, 43)).unwrap();
        assert_ne!(a.per_rep[0].arrived, c.per_rep[0].arrived);
    }

    #[test]
    fn window_validation_rejects_degenerate_runs() {
        let cfg = cfg_with(|_| {});
        assert!(matches!(
            run(&cfg, &RunOptions::new(10, 10, 1, 0)),
            Err(SimError::BadWindow { .. })
        ));
        assert!(matches!(
            run(&cfg, &RunOptions::new(10, 2, 0, 0)),
            Err(SimError::NoReplications)
        ));
    }

    #[test]
    fn default_warmup_policy() {
        assert_eq!(default_warmup(20_000), 2_000); // 10% once past the floor
        assert_eq!(default_warmup(100_000), 10_000);
        assert_eq!(default_warmup(4_000), 500); // floor of 500
        assert_eq!(default_warmup(300), 299); // always leave a measured slot
    }

    #[test]
    fn zero_request_rate_runs_and_reports_nan_loss() {
        let cfg = cfg_with(|c| {
            c.request_rate = 0.0;
            c.region_side = 1000.0;
        });
        let m = run(&cfg, &RunOptions::new(30, 5, 2, 7)).unwrap();
        assert_eq!(m.arrived_total, 0);
        assert!((m.pi0_hat - 1.0).abs() < 1e-15);
        assert!(m.plr_total.is_nan());
    }

    #[test]
    fn no_users_means_permanently_empty_network() {
        let cfg = cfg_with(|c| {
            c.user_density = 0.0;
            c.region_side = 1000.0;
        });
        let m = run(&cfg, &RunOptions::new(30, 5, 2, 7)).unwrap();
        assert_eq!(m.arrived_total, 0);
        assert!((m.pi0_hat - 1.0).abs() < 1e-15);
        assert!((m.p_ai_hat - 1.0).abs() < 1e-15);
    }
}

//! The discrete-event loop: traffic, REPORT/GATE exchange, scheduling and
//! receiver sleep control for one run.
//!
//! Packet arrivals are not events. Each ONU's source is queried lazily when
//! the ONU emits a REPORT, which is the only moment the queue content
//! matters under gated grants.

mod event;
mod receiver;

pub use event::{Event, EventKind, EventQueue};
pub use receiver::{sleep_controller, Mode, ReceiverState, SleepAction};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{SchedulerKind, SimConfig};
use crate::error::{Result, SimError};
use crate::metrics::{efficiency_from_accounting, eta_max, RunStats};
use crate::schedule_book::{carve_window, HorizonSet, VoidSet};
use crate::scheduler::{delay_budget, eft_schedule, schedule, DelayBudget, Request};
use crate::time::SimTime;
use crate::traffic::TrafficSource;
use crate::types::{Branch, OnuState, ReportEvent, ScheduleDecision};

/// One scheduling decision as seen by an observer.
#[derive(Debug, Clone, Copy)]
pub struct Grant {
    pub report: ReportEvent,
    pub decision: ScheduleDecision,
    pub budget: DelayBudget,
    /// `TC_min` on the chosen wavelength.
    pub tc_min: SimTime,
    /// Initial polling grant, not produced by the configured scheduler.
    pub bootstrap: bool,
}

/// Runs one simulation.
pub fn run(cfg: &SimConfig) -> Result<RunStats> {
    run_observed(cfg, |_| {})
}

/// Runs one simulation, handing every grant to `observer`.
pub fn run_observed(cfg: &SimConfig, observer: impl FnMut(&Grant)) -> Result<RunStats> {
    cfg.validate()?;
    let mut sim = Simulation::new(cfg, observer)?;
    sim.bootstrap()?;
    while let Some(ev) = sim.queue.pop() {
        if ev.time > cfg.run_time {
            break;
        }
        sim.now = ev.time;
        match ev.kind {
            EventKind::SimEnd => break,
            EventKind::ReportAtOlt => sim.on_report(ev.subject)?,
            EventKind::GateAtOnu => sim.on_gate(ev.subject),
            EventKind::UpstreamStart => sim.on_upstream_start(ev.subject)?,
            EventKind::UpstreamEnd => sim.on_upstream_end(ev.subject),
            EventKind::ReceiverWake => sim.on_wake(ev.subject, ev.token),
        }
    }
    sim.now = cfg.run_time;
    sim.finish()
}

struct Onu {
    state: OnuState,
    source: TrafficSource,
    last_report: Option<SimTime>,
    seq: u64,
    /// Wavelength of the GATE on its way to the ONU.
    pending_tune: Option<usize>,
}

struct Simulation<'c, F> {
    cfg: &'c SimConfig,
    now: SimTime,
    queue: EventQueue,
    onus: Vec<Onu>,
    voids: VoidSet,
    horizons: HorizonSet,
    receivers: Vec<ReceiverState>,
    rng: ChaCha8Rng,
    warm: SimTime,
    stats: RunStats,
    delay_sum: u128,
    arrived_measured: u64,
    observer: F,
}

impl<'c, F: FnMut(&Grant)> Simulation<'c, F> {
    fn new(cfg: &'c SimConfig, observer: F) -> Result<Self> {
        let warm = SimTime::from_ns((cfg.run_time.as_ns() as f64 * cfg.warmup_fraction) as u64);
        let onus = (0..cfg.n_onus)
            .map(|k| {
                Ok(Onu {
                    state: OnuState::new(k, cfg)?,
                    source: TrafficSource::new(cfg, k),
                    last_report: None,
                    seq: 0,
                    pending_tune: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut queue = EventQueue::new();
        queue.push(cfg.run_time, EventKind::SimEnd, 0, 0);
        Ok(Simulation {
            cfg,
            now: SimTime::ZERO,
            queue,
            onus,
            voids: VoidSet::new(),
            horizons: HorizonSet::new(cfg.n_wavelengths, cfg.tune_step),
            receivers: (0..cfg.n_wavelengths)
                .map(|j| ReceiverState::new(j, (warm, cfg.run_time)))
                .collect(),
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            warm,
            stats: RunStats::default(),
            delay_sum: 0,
            arrived_measured: 0,
            observer,
        })
    }

    fn measuring(&self, t: SimTime) -> bool {
        self.warm <= t && t < self.cfg.run_time
    }

    fn invariant(&self, what: String) -> SimError {
        SimError::Invariant { at: self.now, what }
    }

    fn floors(&self) -> Vec<SimTime> {
        self.receivers
            .iter()
            .map(|r| r.floor(self.now, self.cfg.sleep_wake))
            .collect()
    }

    /// Polls every ONU once with a REPORT-only earliest-finish grant.
    fn bootstrap(&mut self) -> Result<()> {
        for k in 0..self.cfg.n_onus {
            let report = ReportEvent { onu: k, arrival: SimTime::ZERO, requested_bytes: 0, seq: 0 };
            let onu = &self.onus[k].state;
            let budget = delay_budget(onu, self.cfg.delay_policy);
            let req = Request::new(&report, onu, self.cfg, budget.d_q);
            let decision = eft_schedule(&req, &self.voids, &self.horizons);
            self.commit(report, budget, req.tc_min(decision.wavelength), decision, &[], true)?;
        }
        for j in 0..self.cfg.n_wavelengths {
            self.idle(j);
        }
        Ok(())
    }

    fn on_report(&mut self, k: usize) -> Result<()> {
        let now = self.now;
        let cfg = self.cfg;
        let onu = &mut self.onus[k];
        // The first gap has no predecessor; it is at least the seed value.
        onu.state.d_prev = match onu.last_report {
            Some(prev) => now - prev,
            None => onu.state.d_const.max(now),
        };
        onu.last_report = Some(now);
        onu.seq += 1;
        let emitted = now - onu.state.up_delay() - cfg.byte_time() * cfg.report_bytes;
        let batch = onu.source.next_arrivals(emitted);
        let requested: u64 = batch.iter().map(|p| p.bytes).sum();
        onu.state.queue_bytes = requested;
        let report = ReportEvent { onu: k, arrival: now, requested_bytes: requested, seq: onu.seq };

        self.voids.collect_garbage(now);
        let floors = self.floors();
        let onu = &self.onus[k].state;
        let budget = delay_budget(onu, cfg.delay_policy);
        let req = Request::new(&report, onu, cfg, budget.d_q).with_floors(&floors);
        let decision = match cfg.scheduler {
            SchedulerKind::EoNovm => schedule(&req, &self.voids, &self.horizons, &mut self.rng),
            SchedulerKind::EftSleep => eft_schedule(&req, &self.voids, &self.horizons),
        };
        let j = decision.wavelength;
        if decision.first_bit_arrival < req.earliest(j) {
            return Err(self.invariant(format!(
                "{decision:?} starts before the earliest admissible instant {}",
                req.earliest(j)
            )));
        }
        if decision.branch != Branch::EftFallback && decision.window_end() > decision.deadline {
            return Err(self.invariant(format!("{decision:?} misses its deadline")));
        }
        if self.measuring(now) {
            self.stats.report_count += 1;
            self.stats.branch_counts[decision.branch.index()] += 1;
            self.stats.forced_eft += budget.forced_eft() as u64;
            self.stats.bytes_reported += requested;
            if decision.window_end() > decision.deadline {
                self.stats.violations += 1;
                self.stats.violation_excess += decision.violation();
            }
        }
        let tc = req.tc_min(j);
        self.commit(report, budget, tc, decision, &batch, false)
    }

    fn commit(
        &mut self,
        report: ReportEvent,
        budget: DelayBudget,
        tc_min: SimTime,
        d: ScheduleDecision,
        batch: &[crate::traffic::Packet],
        bootstrap: bool,
    ) -> Result<()> {
        let cfg = self.cfg;
        let now = self.now;
        let window = d.as_window();
        let effect = carve_window(&mut self.voids, &mut self.horizons, window)?;
        if self.voids.len() > cfg.n_onus {
            return Err(self.invariant(format!("{} voids exceed N = {}", self.voids.len(), cfg.n_onus)));
        }
        self.stats.max_voids = self.stats.max_voids.max(self.voids.len());
        if self.measuring(now) {
            self.stats.voids_created += effect.created as u64;
        }
        let (lo, hi) = (self.warm, cfg.run_time);
        self.stats.busy_time += window.end.min(hi).saturating_sub(window.start.max(lo));
        self.stats.bytes_granted += d.grant_bytes;

        let j = d.wavelength;
        if let Some(wake) = self.receivers[j].window_added(window.start, cfg.sleep_wake) {
            let token = self.receivers[j].token;
            self.queue.push(wake, EventKind::ReceiverWake, j, token);
        }

        let onu = &mut self.onus[d.onu];
        let gate_at = report.arrival + cfg.gate_gen + d.gate_time + cfg.gate_tx + onu.state.down_delay();
        onu.pending_tune = Some(j);
        onu.state.in_flight = Some(d);
        self.queue.push(gate_at, EventKind::GateAtOnu, d.onu, 0);
        self.queue.push(window.start, EventKind::UpstreamStart, j, 0);
        self.queue.push(window.end, EventKind::UpstreamEnd, j, 0);
        let t_report = d.first_bit_arrival + cfg.byte_time() * (d.grant_bytes + cfg.report_bytes);
        self.queue.push(t_report, EventKind::ReportAtOlt, d.onu, 0);

        let on_time = d.branch != Branch::EftFallback;
        let d_max = onu.state.d_max;
        let mut sent = 0;
        for p in batch {
            sent += p.bytes;
            let delivered = d.first_bit_arrival + cfg.byte_time() * sent;
            let delay = delivered - p.arrival;
            if on_time && delay > d_max {
                return Err(self.invariant(format!(
                    "packet from ONU {} waited {delay} > D_max under an on-time grant",
                    d.onu
                )));
            }
            if delivered <= hi {
                self.stats.bytes_delivered += p.bytes;
            }
            if !(lo <= delivered && delivered <= hi) {
                continue;
            }
            self.stats.packets += 1;
            self.delay_sum += delay.as_ns() as u128;
            self.stats.max_delay = self.stats.max_delay.max(delay);
            let late = delay > d_max;
            self.stats.late_packets += late as u64;
            if on_time {
                self.stats.packets_on_time_grants += 1;
                self.stats.late_packets_on_time_grants += late as u64;
            }
        }
        (self.observer)(&Grant { report, decision: d, budget, tc_min, bootstrap });
        Ok(())
    }

    fn on_gate(&mut self, k: usize) {
        let onu = &mut self.onus[k];
        if let Some(j) = onu.pending_tune.take() {
            onu.state.tuned_wavelength = j;
        }
    }

    fn on_upstream_start(&mut self, j: usize) -> Result<()> {
        let now = self.now;
        if !self.receivers[j].start_window(now) {
            return Err(self.invariant(format!(
                "window on wavelength {j} starts while its receiver is {:?}",
                self.receivers[j].mode
            )));
        }
        Ok(())
    }

    fn on_upstream_end(&mut self, j: usize) {
        self.idle(j);
    }

    /// Start of the next window on `j` at or after `now`.
    fn next_window_start(&self, j: usize) -> Option<SimTime> {
        if self.now >= self.horizons.get(j) {
            return None;
        }
        match self.voids.containing(j, self.now) {
            Some(v) => Some(v.end),
            None => Some(self.now),
        }
    }

    fn idle(&mut self, j: usize) {
        if self.receivers[j].mode != Mode::Active {
            return;
        }
        let next = self.next_window_start(j);
        if let SleepAction::Sleep { wake_at } = sleep_controller(next, self.now, self.cfg.sleep_wake) {
            let r = &mut self.receivers[j];
            r.sleep(self.now, wake_at);
            if let Some(w) = wake_at {
                self.queue.push(w, EventKind::ReceiverWake, j, r.token);
            }
        }
    }

    fn on_wake(&mut self, j: usize, token: u64) {
        let r = &mut self.receivers[j];
        if r.mode == Mode::Asleep && r.token == token {
            r.wake(self.now, self.cfg.sleep_wake);
        }
    }

    fn finish(mut self) -> Result<RunStats> {
        let cfg = self.cfg;
        let end = cfg.run_time;
        let measured = end - self.warm;
        for r in &mut self.receivers {
            r.close(end);
        }
        for r in &self.receivers {
            if r.totals.total() != end || r.measured.total() != measured {
                return Err(self.invariant(format!(
                    "receiver {} accounts {} of {end} ({} of {measured} measured)",
                    r.wavelength,
                    r.totals.total(),
                    r.measured.total()
                )));
            }
            let open_sleep = (r.mode == Mode::Asleep) as u64;
            if r.totals.sleeps != r.totals.wakes + open_sleep {
                return Err(self.invariant(format!(
                    "receiver {}: {} sleeps but {} wake-ups",
                    r.wavelength, r.totals.sleeps, r.totals.wakes
                )));
            }
        }

        let mut arrived_total = 0;
        let mut queued = 0;
        for onu in &mut self.onus {
            let rest: u64 = onu.source.next_arrivals(end).iter().map(|p| p.bytes).sum();
            queued += rest;
        }
        // Offered load: replay each source independently over the run.
        for k in 0..cfg.n_onus {
            for p in TrafficSource::new(cfg, k).next_arrivals(end) {
                arrived_total += p.bytes;
                if p.arrival >= self.warm {
                    self.arrived_measured += p.bytes;
                }
            }
        }
        let s = &mut self.stats;
        s.bytes_arrived = arrived_total;
        s.bytes_backlog = s.bytes_granted - s.bytes_delivered + queued;
        if s.bytes_arrived != s.bytes_delivered + s.bytes_backlog {
            let what = format!(
                "{} bytes arrived but {} delivered and {} pending",
                s.bytes_arrived, s.bytes_delivered, s.bytes_backlog
            );
            return Err(SimError::Invariant { at: end, what });
        }

        s.measured_time = measured;
        s.receivers = self.receivers.iter().map(|r| r.totals).collect();
        s.receivers_measured = self.receivers.iter().map(|r| r.measured).collect();
        s.efficiency_pct = efficiency_from_accounting(&s.receivers_measured, measured);
        s.eta_max_pct = eta_max(cfg);
        s.voids_exploited = s.receivers_measured.iter().map(|r| r.sleeps).sum();
        s.avg_delay_ns = match s.packets {
            0 => 0.0,
            n => self.delay_sum as f64 / n as f64,
        };
        s.t_v_agg = (SimTime::from_ns(measured.as_ns() * cfg.n_wavelengths as u64)).saturating_sub(s.busy_time);
        let capacity = cfg.peak_rate_bps as f64 * cfg.n_onus as f64 * measured.as_secs_f64() / 8.0;
        s.offered_load = if capacity > 0.0 { self.arrived_measured as f64 / capacity } else { 0.0 };
        let d_max = (0..cfg.n_onus).map(|k| cfg.d_max_of(k)).max().unwrap_or(cfg.d_max);
        s.unstable = cfg.utilization() >= 1.0
            || (cfg.byte_time() * s.bytes_backlog).as_ns() > d_max.as_ns() * cfg.n_wavelengths as u64;
        Ok(self.stats)
    }
}

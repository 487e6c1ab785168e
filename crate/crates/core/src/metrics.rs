//! Run statistics, the analytical efficiency bound and CSV export.

use std::fmt::Write as _;

use crate::config::SimConfig;
use crate::time::SimTime;
use crate::types::Branch;

/// Upper bound on receiver energy efficiency in percent:
/// `(1 - N r_a L / (W r_d)) * 100`, floored at zero.
pub fn eta_max(cfg: &SimConfig) -> f64 {
    ((1.0 - cfg.utilization()) * 100.0).max(0.0)
}

/// Time one receiver spent in each power state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReceiverTotals {
    pub active: SimTime,
    pub waking: SimTime,
    pub asleep: SimTime,
    pub sleeps: u64,
    pub wakes: u64,
}

impl ReceiverTotals {
    pub fn total(&self) -> SimTime {
        self.active + self.waking + self.asleep
    }
}

/// `100 * sum(asleep) / (W * measured)`.
pub fn efficiency_from_accounting(receivers: &[ReceiverTotals], measured: SimTime) -> f64 {
    if receivers.is_empty() || measured == SimTime::ZERO {
        return 0.0;
    }
    let asleep: SimTime = receivers.iter().map(|r| r.asleep).sum();
    100.0 * asleep.as_ns() as f64 / (receivers.len() as f64 * measured.as_ns() as f64)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub efficiency_pct: f64,
    pub eta_max_pct: f64,
    pub avg_delay_ns: f64,
    pub max_delay: SimTime,
    pub packets: u64,
    /// Packets whose delay exceeded their ONU's `D_max`.
    pub late_packets: u64,
    /// Late packets that were served by a grant that met its deadline.
    pub late_packets_on_time_grants: u64,
    pub packets_on_time_grants: u64,
    /// Grants whose window overran the REPORT deadline.
    pub violations: u64,
    pub violation_excess: SimTime,
    /// REPORTs whose budget was already used up by the previous gap.
    pub forced_eft: u64,
    /// REPORT arrivals inside the measurement window (`M`).
    pub report_count: u64,
    pub voids_created: u64,
    pub voids_exploited: u64,
    pub branch_counts: [u64; 6],
    /// Idle receiver time inside the measurement window, summed over
    /// wavelengths.
    pub t_v_agg: SimTime,
    /// Transmission time of all windows inside the measurement window.
    pub busy_time: SimTime,
    /// Offered load measured from arrivals inside the measurement window.
    pub offered_load: f64,
    pub measured_time: SimTime,
    pub max_voids: usize,
    pub receivers: Vec<ReceiverTotals>,
    pub receivers_measured: Vec<ReceiverTotals>,
    pub bytes_arrived: u64,
    pub bytes_delivered: u64,
    pub bytes_backlog: u64,
    pub bytes_reported: u64,
    pub bytes_granted: u64,
    pub unstable: bool,
}

impl RunStats {
    pub fn branch_count(&self, b: Branch) -> u64 {
        self.branch_counts[b.index()]
    }

    pub fn decisions(&self) -> u64 {
        self.branch_counts.iter().sum()
    }
}

/// Measured aggregate idle time minus `W T_obs - busy - M (N_R T + T_g)`,
/// in ns.
///
/// The formula charges every REPORT its own overhead; the measurement sees
/// the windows as they were actually laid out, so the residual collects
/// warm-up truncation and windows straddling the measurement edges.
pub fn t_v_agg_check(stats: &RunStats, cfg: &SimConfig) -> i128 {
    let w = cfg.n_wavelengths as i128;
    let t_obs = stats.measured_time.as_ns() as i128;
    let data = (stats.offered_load * cfg.peak_rate_bps as f64 * cfg.n_onus as f64 / cfg.line_rate_bps as f64
        * stats.measured_time.as_ns() as f64) as i128;
    let overhead = (cfg.byte_time() * cfg.report_bytes + cfg.guard).as_ns() as i128;
    let formula = w * t_obs - data - stats.report_count as i128 * overhead;
    stats.t_v_agg.as_ns() as i128 - formula
}

pub const CSV_HEADER: &str = "seed,N,W,L,T_sw_ns,D_max_ns,T_rtt_ns,alpha_on,scheduler,delay_policy,\
efficiency_pct,eta_max_pct,avg_delay_ns,max_delay_ns,violations,M,voids_created,voids_exploited";

/// One CSV row (no trailing newline) in [`CSV_HEADER`] column order.
pub fn csv_row(cfg: &SimConfig, stats: &RunStats) -> String {
    let mut s = String::new();
    write!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{:.4},{:.4},{:.1},{},{},{},{},{}",
        cfg.rng_seed,
        cfg.n_onus,
        cfg.n_wavelengths,
        cfg.load,
        cfg.sleep_wake.as_ns(),
        cfg.d_max.as_ns(),
        cfg.rtt.as_ns(),
        cfg.alpha_on,
        cfg.scheduler,
        cfg.delay_policy,
        stats.efficiency_pct,
        stats.eta_max_pct,
        stats.avg_delay_ns,
        stats.max_delay.as_ns(),
        stats.violations,
        stats.report_count,
        stats.voids_created,
        stats.voids_exploited,
    )
    .expect("writing to a String cannot fail");
    s
}

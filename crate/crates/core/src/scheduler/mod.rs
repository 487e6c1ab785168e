//! Online upstream scheduler that minimizes the number of voids.
//!
//! On every REPORT the OLT picks a wavelength and a GATE delay for the
//! reporting ONU. A placement is *valid* when the whole window fits between
//! the earliest instant the first bit can reach the OLT (`TC_min`) and the
//! REPORT's deadline `t_R + D_q`. Among valid placements the scheduler
//! prefers, in order:
//!
//! 1. filling a void flush against one of its edges (no new void),
//! 2. appending flush to a wavelength's horizon (no new void),
//! 3. the latest valid instant inside a void, or past a horizon,
//! 4. when nothing is valid, the earliest-finish placement.
//!
//! Void scanning is linear in the number of voids (at most `N`). Horizon
//! queries run on pre-sorted views of the horizons, so they cost a binary
//! search plus the size of the answer.

mod delay;
mod eft;

pub use delay::{delay_budget, fixed_delay_bound, variable_delay_bound, BudgetRule, DelayBudget};
pub use eft::eft_schedule;

use rand::Rng;

use crate::config::SimConfig;
use crate::schedule_book::{HorizonSet, VoidSet};
use crate::time::SimTime;
use crate::types::{Branch, OnuState, ReportEvent, ScheduleDecision};

/// Earliest arrival of the first upstream bit on wavelength `j`:
/// `t_R + T_p + T_tx + T_rtt + |w_c - j| T_t`.
pub fn tc_min(report: &ReportEvent, onu: &OnuState, j: usize, cfg: &SimConfig) -> SimTime {
    report.arrival
        + cfg.gate_gen
        + cfg.gate_tx
        + onu.rtt
        + cfg.tune_step * onu.tuned_wavelength.abs_diff(j) as u64
}

/// Upstream window for a grant: data, the trailing REPORT and the guard.
pub fn window_size(grant_bytes: u64, cfg: &SimConfig) -> SimTime {
    cfg.byte_time() * grant_bytes + cfg.byte_time() * cfg.report_bytes + cfg.guard
}

/// Everything the decision tree needs to know about one REPORT.
#[derive(Debug, Clone)]
pub struct Request<'a> {
    pub onu: usize,
    pub arrival: SimTime,
    pub grant_bytes: u64,
    pub tuned: usize,
    /// `TC_min` on the tuned wavelength (no tuning term).
    pub base: SimTime,
    /// `t_R + D_q`.
    pub deadline: SimTime,
    /// `T_w`.
    pub window: SimTime,
    pub tune_step: SimTime,
    /// Per-wavelength instants before which nothing may be received
    /// (sleeping receivers). Empty means no restriction.
    pub floors: &'a [SimTime],
}

impl<'a> Request<'a> {
    pub fn new(report: &ReportEvent, onu: &OnuState, cfg: &SimConfig, d_q: SimTime) -> Self {
        Request {
            onu: report.onu,
            arrival: report.arrival,
            grant_bytes: report.requested_bytes,
            tuned: onu.tuned_wavelength,
            base: tc_min(report, onu, onu.tuned_wavelength, cfg),
            deadline: report.arrival + d_q,
            window: window_size(report.requested_bytes, cfg),
            tune_step: cfg.tune_step,
            floors: &[],
        }
    }

    pub fn with_floors(mut self, floors: &'a [SimTime]) -> Self {
        self.floors = floors;
        self
    }

    /// `TC_min^{k,j}` as physically defined by the MPCP exchange.
    pub fn tc_min(&self, j: usize) -> SimTime {
        self.base + self.tune_step * self.tuned.abs_diff(j) as u64
    }

    pub fn floor(&self, j: usize) -> SimTime {
        self.floors.get(j).copied().unwrap_or(SimTime::ZERO)
    }

    /// Earliest admissible first-bit instant on `j`, honoring the floors.
    pub fn earliest(&self, j: usize) -> SimTime {
        self.tc_min(j).max(self.floor(j))
    }

    /// Latest first-bit instant that still meets the deadline.
    pub fn latest_start(&self) -> Option<SimTime> {
        self.deadline.checked_sub(self.window)
    }

    fn decide(&self, branch: Branch, wavelength: usize, first_bit: SimTime) -> ScheduleDecision {
        ScheduleDecision {
            onu: self.onu,
            wavelength,
            gate_time: first_bit - self.tc_min(wavelength),
            first_bit_arrival: first_bit,
            window: self.window,
            grant_bytes: self.grant_bytes,
            branch,
            deadline: self.deadline,
        }
    }
}

/// Voids that can hold the whole window before the deadline; indices into
/// `voids.as_slice()`.
pub fn valid_voids(voids: &VoidSet, req: &Request) -> Vec<usize> {
    voids
        .iter()
        .enumerate()
        .filter(|(_, v)| v.end.min(req.deadline) >= v.start.max(req.earliest(v.wavelength)) + req.window)
        .map(|(i, _)| i)
        .collect()
}

/// Wavelengths whose horizon leaves room for the window before the
/// deadline, in ascending index order.
///
/// `max(lf_j, TC_j) <= t_R + D_q - T_w` splits into `lf_j <= X`, a prefix of
/// the horizon-sorted view, and `|w_c - j| T_t <= X - base`, a band of
/// wavelengths around the tuned one.
pub fn valid_horizons(horizons: &HorizonSet, req: &Request) -> Vec<usize> {
    let Some(x) = req.latest_start() else {
        return Vec::new();
    };
    let Some(slack) = x.checked_sub(req.base) else {
        return Vec::new();
    };
    let radius = match req.tune_step.as_ns() {
        0 => usize::MAX,
        step => usize::try_from(slack.as_ns() / step).unwrap_or(usize::MAX),
    };
    let by_lf = horizons.by_lf();
    let cut = by_lf.partition_point(|&j| horizons.get(j) <= x);
    let mut out: Vec<usize> = by_lf[..cut]
        .iter()
        .copied()
        .filter(|&j| j.abs_diff(req.tuned) <= radius && req.floor(j) <= x)
        .collect();
    out.sort_unstable();
    out
}

/// Splits `V_valid` into voids whose start the window can sit on (`V_s`)
/// and voids whose end it can sit against (`V_e`).
pub fn clubbing_sets(v_valid: &[usize], voids: &VoidSet, req: &Request) -> (Vec<usize>, Vec<usize>) {
    let all = voids.as_slice();
    let v_s = v_valid
        .iter()
        .copied()
        .filter(|&i| all[i].start >= req.earliest(all[i].wavelength))
        .collect();
    let v_e = v_valid
        .iter()
        .copied()
        .filter(|&i| all[i].end <= req.deadline)
        .collect();
    (v_s, v_e)
}

/// Valid wavelengths whose horizon is already at or past `TC_min`, so a
/// window can start exactly at the horizon. Ascending index order.
///
/// `lf_j >= TC_j` is `lf_j - |w_c - j| T_t >= base`: a suffix of the view
/// sorted for the ONU's tuned wavelength.
pub fn horizon_clubbing_set(lf_valid: &[usize], horizons: &HorizonSet, req: &Request) -> Vec<usize> {
    let Some(x) = req.latest_start() else {
        return Vec::new();
    };
    let view = horizons.by_tuned(req.tuned);
    let base = req.base.as_ns() as i128;
    let split = view.partition_point(|&j| horizons.tuned_key(req.tuned, j) < base);
    let mut out: Vec<usize> = view[split..]
        .iter()
        .copied()
        .filter(|&j| {
            let lf = horizons.get(j);
            lf <= x && lf >= req.floor(j)
        })
        .collect();
    out.sort_unstable();
    debug_assert!(out.iter().all(|j| lf_valid.binary_search(j).is_ok()));
    out
}

/// First index maximizing `key`; ties keep the earliest candidate.
fn first_max_by_key<K: Ord>(items: &[usize], key: impl Fn(usize) -> K) -> Option<usize> {
    let mut best: Option<(usize, K)> = None;
    for &i in items {
        let k = key(i);
        if best.as_ref().is_none_or(|(_, bk)| k > *bk) {
            best = Some((i, k));
        }
    }
    best.map(|(i, _)| i)
}

/// Runs the full decision tree for one REPORT.
///
/// `rng` is only consulted when several latest-time placements are equally
/// good and one must be drawn uniformly. Horizon sets are only materialized
/// when the tree actually reaches them.
pub fn schedule<R: Rng + ?Sized>(
    req: &Request,
    voids: &VoidSet,
    horizons: &HorizonSet,
    rng: &mut R,
) -> ScheduleDecision {
    let v_valid = valid_voids(voids, req);
    let all = voids.as_slice();

    if !v_valid.is_empty() {
        let (v_s, v_e) = clubbing_sets(&v_valid, voids, req);
        let sm = first_max_by_key(&v_s, |i| all[i].start);
        let em = first_max_by_key(&v_e, |i| all[i].end);
        let start_club = |i: usize| req.decide(Branch::VoidClubStart, all[i].wavelength, all[i].start);
        let end_club =
            |i: usize| req.decide(Branch::VoidClubEnd, all[i].wavelength, all[i].end - req.window);
        match (sm, em) {
            (Some(s), Some(e)) if all[s].start + req.window > all[e].end => return start_club(s),
            (_, Some(e)) => return end_club(e),
            (Some(s), None) => return start_club(s),
            (None, None) => {}
        }
    }

    if let Some(fm) = latest_clubbable_horizon(horizons, req) {
        return req.decide(Branch::HorizonClub, fm, horizons.get(fm));
    }

    if !v_valid.is_empty() {
        let pick = all[v_valid[rng.gen_range(0..v_valid.len())]];
        let latest = req.latest_start().expect("valid void implies room before deadline");
        return req.decide(Branch::VoidLatest, pick.wavelength, latest);
    }

    let lf_valid = valid_horizons(horizons, req);
    if !lf_valid.is_empty() {
        let j = lf_valid[rng.gen_range(0..lf_valid.len())];
        let latest = req.latest_start().expect("valid horizon implies room before deadline");
        return req.decide(Branch::HorizonLatest, j, latest);
    }

    let mut d = eft_schedule(req, voids, horizons);
    d.branch = Branch::EftFallback;
    d
}

/// `F_m`: the member of `LF_nv` with the latest horizon, lowest index on
/// ties.
///
/// A clubbable horizon satisfies `earliest(j) <= lf_j <= X`, so walking the
/// horizon-sorted view downward from `X` finds it without building the set;
/// the walk stops at the first horizon below `TC_min` of the tuned
/// wavelength, which bounds every `earliest(j)` from below.
fn latest_clubbable_horizon(horizons: &HorizonSet, req: &Request) -> Option<usize> {
    let x = req.latest_start()?;
    let view = horizons.by_lf();
    let cut = view.partition_point(|&j| horizons.get(j) <= x);
    let mut best: Option<(SimTime, usize)> = None;
    for &j in view[..cut].iter().rev() {
        let lf = horizons.get(j);
        if lf < req.base || best.is_some_and(|(b, _)| lf < b) {
            break;
        }
        if lf >= req.earliest(j) {
            best = Some((lf, best.map_or(j, |(_, b)| b.min(j))));
        }
    }
    best.map(|(_, j)| j)
}

#[cfg(test)]
mod tests;

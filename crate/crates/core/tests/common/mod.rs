//! Shared test support: a literal, exhaustive transcription of the
//! decision tree and a random instance generator.

#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use twdm_core::schedule_book::{HorizonSet, Void, VoidSet};
use twdm_core::scheduler::Request;
use twdm_core::types::Branch;
use twdm_core::SimTime;

/// A small scheduling instance with owned floors.
#[derive(Debug, Clone)]
pub struct Instance {
    pub voids: Vec<(usize, u64, u64)>,
    pub lf: Vec<u64>,
    pub tuned: usize,
    pub base: u64,
    pub tune_step: u64,
    pub deadline: u64,
    pub window: u64,
    pub floors: Vec<u64>,
}

impl Instance {
    pub fn request<'a>(&self, floors: &'a [SimTime]) -> Request<'a> {
        Request {
            onu: 0,
            arrival: SimTime::ZERO,
            grant_bytes: 0,
            tuned: self.tuned,
            base: SimTime::from_ns(self.base),
            deadline: SimTime::from_ns(self.deadline),
            window: SimTime::from_ns(self.window),
            tune_step: SimTime::from_ns(self.tune_step),
            floors,
        }
    }

    pub fn floor_times(&self) -> Vec<SimTime> {
        self.floors.iter().map(|&f| SimTime::from_ns(f)).collect()
    }

    pub fn void_set(&self) -> VoidSet {
        VoidSet::from_voids(
            self.voids
                .iter()
                .map(|&(w, s, e)| Void::new(w, SimTime::from_ns(s), SimTime::from_ns(e)))
                .collect(),
        )
    }

    pub fn horizon_set(&self) -> HorizonSet {
        HorizonSet::from_horizons(
            self.lf.iter().map(|&t| SimTime::from_ns(t)).collect(),
            SimTime::from_ns(self.tune_step),
        )
    }
}

/// Up to 4 wavelengths, up to 6 voids, all times below 10^6 ns.
///
/// Half of the instances live on a coarse grid so that boundary ties
/// (a window exactly filling a void, a horizon exactly at `TC_min`) are
/// common rather than measure-zero.
pub fn instance() -> impl Strategy<Value = Instance> {
    prop_oneof![instance_on_grid(1, 1_000_000), instance_on_grid(1_000, 40)]
}

fn instance_on_grid(unit: u64, span: u64) -> impl Strategy<Value = Instance> {
    (1usize..=4).prop_flat_map(move |w| {
        (
            proptest::collection::vec(0..span, w),
            proptest::collection::vec((0..w, 0..span, 0..span), 0..=6),
            0..w,
            0..span * 2 / 5,
            prop_oneof![Just(0u64), 1..(span / 50).max(2)],
            0..span * 3 / 5,
            1..(span / 5).max(2),
            proptest::collection::vec(prop_oneof![3 => Just(0u64), 1 => 0..span], w),
        )
            .prop_map(move |(lf, raw, tuned, base, tune_step, budget, window, floors)| {
                let lf: Vec<u64> = lf.into_iter().map(|t| t * unit).collect();
                let raw: Vec<_> = raw.into_iter().map(|(j, a, b)| (j, a * unit, b * unit)).collect();
                let floors = floors.into_iter().map(|t| t * unit).collect();
                let (base, tune_step, budget, window) = (base * unit, tune_step * unit, budget * unit, window * unit);
                let voids = disjoint_voids(&lf, &raw);
                Instance {
                    voids,
                    lf,
                    tuned,
                    base,
                    tune_step,
                    deadline: base + budget,
                    window,
                    floors,
                }
            })
    })
}

/// Turns raw interval endpoints into voids that lie below their wavelength's
/// horizon, are pairwise separated by a scheduled gap, and number at most 6.
fn disjoint_voids(lf: &[u64], raw: &[(usize, u64, u64)]) -> Vec<(usize, u64, u64)> {
    let mut out: Vec<(usize, u64, u64)> = Vec::new();
    for &(w, a, b) in raw {
        let (s, e) = (a.min(b), a.max(b).min(lf[w]));
        if s >= e {
            continue;
        }
        // Keep at least one ns of scheduled time between voids.
        let clash = out.iter().any(|&(w2, s2, e2)| w2 == w && s <= e2 && s2 <= e);
        if !clash {
            out.push((w, s, e));
        }
    }
    // A void must be followed by a window before the horizon.
    out.retain(|&(w, _, e)| e < lf[w]);
    out.sort();
    out
}

/// `(branch, W_sch, T_sch)` as produced by the literal transcription.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleDecision {
    pub branch: Branch,
    pub wavelength: usize,
    pub gate_time: u64,
    pub first_bit: u64,
}

/// Every set of the decision tree built by direct evaluation of its
/// definition over all voids and all wavelengths.
pub fn oracle<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> OracleDecision {
    let w = inst.lf.len();
    let tc = |j: usize| inst.base + inst.tune_step * (inst.tuned.abs_diff(j) as u64);
    let earliest = |j: usize| tc(j).max(inst.floors[j]);
    let dl = inst.deadline;
    let tw = inst.window;
    let decide = |branch, j: usize, first_bit: u64| OracleDecision {
        branch,
        wavelength: j,
        gate_time: first_bit - tc(j),
        first_bit,
    };

    let voids = &inst.voids;
    let v_valid: Vec<usize> = (0..voids.len())
        .filter(|&i| {
            let (j, s, e) = voids[i];
            let hi = e.min(dl) as i128;
            let lo = s.max(earliest(j)) as i128;
            hi - lo >= tw as i128
        })
        .collect();
    let lf_valid: Vec<usize> = (0..w)
        .filter(|&j| dl as i128 - inst.lf[j].max(earliest(j)) as i128 >= tw as i128)
        .collect();
    let lf_nv: Vec<usize> = lf_valid
        .iter()
        .copied()
        .filter(|&j| inst.lf[j] >= earliest(j))
        .collect();
    let v_s: Vec<usize> = v_valid.iter().copied().filter(|&i| voids[i].1 >= earliest(voids[i].0)).collect();
    let v_e: Vec<usize> = v_valid.iter().copied().filter(|&i| voids[i].2 <= dl).collect();

    // argmax keeping the first maximal element in set order.
    let argmax = |set: &[usize], key: &dyn Fn(usize) -> u64| {
        let mut best: Option<usize> = None;
        for &i in set {
            if best.is_none_or(|b| key(i) > key(b)) {
                best = Some(i);
            }
        }
        best
    };
    let horizon_club = || argmax(&lf_nv, &|j| inst.lf[j]).map(|fm| decide(Branch::HorizonClub, fm, inst.lf[fm]));

    if !v_valid.is_empty() && (!v_s.is_empty() || !v_e.is_empty()) {
        let sm = argmax(&v_s, &|i| voids[i].1);
        let em = argmax(&v_e, &|i| voids[i].2);
        return match (sm, em) {
            (Some(s), Some(e)) if voids[s].1 + tw > voids[e].2 => decide(Branch::VoidClubStart, voids[s].0, voids[s].1),
            (Some(s), None) => decide(Branch::VoidClubStart, voids[s].0, voids[s].1),
            (_, Some(e)) => decide(Branch::VoidClubEnd, voids[e].0, voids[e].2 - tw),
            (None, None) => unreachable!(),
        };
    }
    if !v_valid.is_empty() {
        if let Some(d) = horizon_club() {
            return d;
        }
        let i = v_valid[rng.gen_range(0..v_valid.len())];
        return decide(Branch::VoidLatest, voids[i].0, dl - tw);
    }
    if !lf_valid.is_empty() {
        if let Some(d) = horizon_club() {
            return d;
        }
        let j = lf_valid[rng.gen_range(0..lf_valid.len())];
        return decide(Branch::HorizonLatest, j, dl - tw);
    }

    // Earliest finish over every placement: each void and each horizon.
    let mut best: Option<(u64, usize)> = None;
    let mut consider = |t: u64, j: usize| {
        if best.is_none_or(|b| (t, j) < b) {
            best = Some((t, j));
        }
    };
    for j in 0..w {
        consider(inst.lf[j].max(earliest(j)), j);
    }
    for &(j, s, e) in voids {
        let t = s.max(earliest(j));
        if t + tw <= e {
            consider(t, j);
        }
    }
    let (t, j) = best.expect("at least one wavelength");
    decide(Branch::EftFallback, j, t)
}

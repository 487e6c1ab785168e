//! Voids, scheduling horizons and the carve operation that keeps them
//! consistent after every grant.
//!
//! On each wavelength the scheduled upstream windows, the voids and the
//! horizon partition time: everything in `[0, lf_j)` is either inside a
//! scheduled window or inside exactly one void, and nothing is scheduled
//! past `lf_j`.

use std::cmp::Ordering;

use crate::error::{Result, SimError};
use crate::time::SimTime;

/// A maximal idle interval `[start, end)` on one wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Void {
    pub start: SimTime,
    pub end: SimTime,
    pub wavelength: usize,
}

impl Void {
    pub fn new(wavelength: usize, start: SimTime, end: SimTime) -> Self {
        debug_assert!(start < end, "empty void");
        Void { start, end, wavelength }
    }

    pub fn len(&self) -> SimTime {
        self.end - self.start
    }

    fn key(&self) -> (usize, SimTime) {
        (self.wavelength, self.start)
    }
}

/// An interval to be occupied by an upstream window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub wavelength: usize,
    pub start: SimTime,
    pub end: SimTime,
}

/// All current voids, ordered by `(wavelength, start)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VoidSet {
    voids: Vec<Void>,
}

impl VoidSet {
    pub fn new() -> Self {
        VoidSet::default()
    }

    /// Builds a set from arbitrary voids; panics if two overlap on one
    /// wavelength.
    pub fn from_voids(mut voids: Vec<Void>) -> Self {
        voids.sort_by_key(Void::key);
        for pair in voids.windows(2) {
            if pair[0].wavelength == pair[1].wavelength {
                assert!(pair[0].end <= pair[1].start, "overlapping voids {pair:?}");
            }
        }
        VoidSet { voids }
    }

    pub fn len(&self) -> usize {
        self.voids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voids.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Void> {
        self.voids.iter()
    }

    pub fn as_slice(&self) -> &[Void] {
        &self.voids
    }

    fn position(&self, wavelength: usize, start: SimTime) -> std::result::Result<usize, usize> {
        self.voids.binary_search_by(|v| v.key().cmp(&(wavelength, start)))
    }

    fn insert(&mut self, v: Void) {
        match self.position(v.wavelength, v.start) {
            Ok(_) => unreachable!("duplicate void start {v:?}"),
            Err(i) => self.voids.insert(i, v),
        }
    }

    /// The void on `wavelength` that contains the instant `t`, if any.
    pub fn containing(&self, wavelength: usize, t: SimTime) -> Option<&Void> {
        let i = match self.position(wavelength, t) {
            Ok(i) => return Some(&self.voids[i]),
            Err(0) => return None,
            Err(i) => i - 1,
        };
        let v = &self.voids[i];
        (v.wavelength == wavelength && v.start <= t && t < v.end).then_some(v)
    }

    /// Drops voids that ended at or before `now`; they can never be filled.
    pub fn collect_garbage(&mut self, now: SimTime) -> usize {
        let before = self.voids.len();
        self.voids.retain(|v| v.end > now);
        before - self.voids.len()
    }

    /// Total idle time inside voids, clipped to `[from, to)`.
    pub fn idle_within(&self, wavelength: usize, from: SimTime, to: SimTime) -> SimTime {
        self.voids
            .iter()
            .filter(|v| v.wavelength == wavelength)
            .map(|v| v.end.min(to).saturating_sub(v.start.max(from)))
            .sum()
    }
}

/// Per-wavelength latest scheduling horizons plus the sorted views used for
/// logarithmic horizon queries.
///
/// `by_tuned[c]` orders wavelengths by `lf_j - |c - j| * T_t`, the key that
/// turns "the horizon is at or past the earliest first-bit instant" into a
/// threshold test for an ONU currently tuned to `c`. Only `W` such views are
/// needed, one per possible tuned wavelength, rather than one per ONU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizonSet {
    horizons: Vec<SimTime>,
    tune_step: SimTime,
    by_lf: Vec<usize>,
    by_tuned: Vec<Vec<usize>>,
}

impl HorizonSet {
    pub fn new(n_wavelengths: usize, tune_step: SimTime) -> Self {
        Self::from_horizons(vec![SimTime::ZERO; n_wavelengths], tune_step)
    }

    /// Builds every sorted view from scratch.
    pub fn from_horizons(horizons: Vec<SimTime>, tune_step: SimTime) -> Self {
        let w = horizons.len();
        let mut hs = HorizonSet {
            horizons,
            tune_step,
            by_lf: (0..w).collect(),
            by_tuned: vec![(0..w).collect(); w],
        };
        let lf = hs.horizons.clone();
        hs.by_lf.sort_by(|&a, &b| (lf[a], a).cmp(&(lf[b], b)));
        for c in 0..w {
            let mut view = std::mem::take(&mut hs.by_tuned[c]);
            view.sort_by(|&a, &b| hs.cmp_tuned(c, a, b));
            hs.by_tuned[c] = view;
        }
        hs
    }

    pub fn len(&self) -> usize {
        self.horizons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horizons.is_empty()
    }

    pub fn get(&self, wavelength: usize) -> SimTime {
        self.horizons[wavelength]
    }

    pub fn as_slice(&self) -> &[SimTime] {
        &self.horizons
    }

    pub fn tune_step(&self) -> SimTime {
        self.tune_step
    }

    /// Tuning time from wavelength `from` to wavelength `to`.
    pub fn tuning(&self, from: usize, to: usize) -> SimTime {
        self.tune_step * from.abs_diff(to) as u64
    }

    /// Sort key of wavelength `j` in the view for tuned wavelength `c`.
    pub fn tuned_key(&self, c: usize, j: usize) -> i128 {
        self.horizons[j].as_ns() as i128 - self.tuning(c, j).as_ns() as i128
    }

    fn cmp_tuned(&self, c: usize, a: usize, b: usize) -> Ordering {
        (self.tuned_key(c, a), a).cmp(&(self.tuned_key(c, b), b))
    }

    /// Wavelength indices in ascending `(lf_j, j)` order.
    pub fn by_lf(&self) -> &[usize] {
        &self.by_lf
    }

    /// Wavelength indices in ascending `(lf_j - T_t^{c,j}, j)` order.
    pub fn by_tuned(&self, c: usize) -> &[usize] {
        &self.by_tuned[c]
    }

    /// Moves the horizon of `wavelength` and repositions it in every view.
    pub fn set(&mut self, wavelength: usize, lf: SimTime) {
        let lf_old = self.horizons[wavelength];
        let old_pos = self
            .by_lf
            .binary_search_by(|&j| (self.horizons[j], j).cmp(&(lf_old, wavelength)))
            .expect("horizon view out of sync");
        self.by_lf.remove(old_pos);
        let old_keys: Vec<i128> = (0..self.len()).map(|c| self.tuned_key(c, wavelength)).collect();
        for (c, old_key) in old_keys.into_iter().enumerate() {
            let pos = self.by_tuned[c]
                .binary_search_by(|&j| (self.tuned_key(c, j), j).cmp(&(old_key, wavelength)))
                .expect("tuned view out of sync");
            self.by_tuned[c].remove(pos);
        }

        self.horizons[wavelength] = lf;

        let pos = self
            .by_lf
            .partition_point(|&j| (self.horizons[j], j) < (lf, wavelength));
        self.by_lf.insert(pos, wavelength);
        for c in 0..self.len() {
            let key = (self.tuned_key(c, wavelength), wavelength);
            let pos = self.by_tuned[c].partition_point(|&j| (self.tuned_key(c, j), j) < key);
            self.by_tuned[c].insert(pos, wavelength);
        }
    }
}

/// What a carve did to the void population.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CarveEffect {
    /// Voids newly opened (a horizon gap, or a void split in two).
    pub created: usize,
    /// Voids filled exactly and therefore removed.
    pub consumed: usize,
    /// The window's start coincides with the end of another window.
    pub joined_before: bool,
    /// The window's end coincides with the start of another window.
    pub joined_after: bool,
}

/// Commits `window` to the schedule, updating the voids and the horizon of
/// its wavelength.
///
/// The window must lie inside a single void or at/after the wavelength's
/// horizon; anything else overlaps an existing window and is reported as an
/// invariant violation.
pub fn carve_window(
    voids: &mut VoidSet,
    horizons: &mut HorizonSet,
    window: Window,
) -> Result<CarveEffect> {
    let Window { wavelength: j, start, end } = window;
    if start >= end {
        return Err(SimError::Invariant {
            at: start,
            what: format!("empty window {window:?}"),
        });
    }
    let lf = horizons.get(j);
    let mut effect = CarveEffect::default();

    if start >= lf {
        if start > lf {
            voids.insert(Void::new(j, lf, start));
            effect.created = 1;
        } else {
            effect.joined_before = lf > SimTime::ZERO;
        }
        horizons.set(j, end);
        return Ok(effect);
    }

    let host = match voids.containing(j, start) {
        Some(v) if end <= v.end => *v,
        _ => {
            return Err(SimError::Invariant {
                at: start,
                what: format!("window {window:?} overlaps a scheduled window (lf = {lf})"),
            })
        }
    };
    let i = voids.position(j, host.start).expect("host void vanished");
    voids.voids.remove(i);

    let mut residuals = 0;
    if host.start < start {
        voids.insert(Void::new(j, host.start, start));
        residuals += 1;
    } else {
        effect.joined_before = true;
    }
    if end < host.end {
        voids.insert(Void::new(j, end, host.end));
        residuals += 1;
    } else {
        effect.joined_after = true;
    }
    match residuals {
        0 => effect.consumed = 1,
        2 => effect.created = 1,
        _ => {}
    }
    Ok(effect)
}

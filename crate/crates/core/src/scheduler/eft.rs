//! Earliest-finish-time placement.
//!
//! Used as the last resort of the void-minimizing tree and, on its own, as
//! the comparison baseline. Voids may be filled.

use crate::schedule_book::{HorizonSet, VoidSet};
use crate::time::SimTime;
use crate::types::{Branch, ScheduleDecision};

use super::Request;

/// Earliest feasible first-bit instant on each wavelength, then the global
/// minimum of the finish time; ties go to the lowest wavelength index. The
/// deadline is ignored.
pub fn eft_schedule(req: &Request, voids: &VoidSet, horizons: &HorizonSet) -> ScheduleDecision {
    let mut earliest: Vec<SimTime> = (0..horizons.len())
        .map(|j| horizons.get(j).max(req.earliest(j)))
        .collect();
    // Voids are ordered by (wavelength, start), so the first fit on a
    // wavelength is also its earliest.
    for v in voids.iter() {
        let start = v.start.max(req.earliest(v.wavelength));
        if start + req.window <= v.end && start < earliest[v.wavelength] {
            earliest[v.wavelength] = start;
        }
    }
    let (j, &first_bit) = earliest
        .iter()
        .enumerate()
        .min_by_key(|&(j, &t)| (t, j))
        .expect("at least one wavelength");
    req.decide(Branch::EftFallback, j, first_bit)
}

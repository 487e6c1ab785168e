use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::schedule_book::Void;

fn ns(v: u64) -> SimTime {
    SimTime::from_ns(v)
}

/// A request with `TC_min = tc` on every wavelength (no tuning cost).
fn req(tc: u64, deadline: u64, window: u64) -> Request<'static> {
    Request {
        onu: 0,
        arrival: ns(0),
        grant_bytes: 0,
        tuned: 0,
        base: ns(tc),
        deadline: ns(deadline),
        window: ns(window),
        tune_step: ns(0),
        floors: &[],
    }
}

fn voids(vs: &[(usize, u64, u64)]) -> VoidSet {
    VoidSet::from_voids(vs.iter().map(|&(w, s, e)| Void::new(w, ns(s), ns(e))).collect())
}

fn horizons(lf: &[u64]) -> HorizonSet {
    HorizonSet::from_horizons(lf.iter().map(|&t| ns(t)).collect(), ns(0))
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0)
}

#[test]
fn tc_min_examples() {
    let cfg = SimConfig {
        n_wavelengths: 8,
        rtt: SimTime::from_us(200),
        ..SimConfig::default()
    };
    let mut onu = OnuState::new(2, &cfg).unwrap();
    onu.tuned_wavelength = 2;
    let report = ReportEvent { onu: 2, arrival: ns(1_000_000), requested_bytes: 0, seq: 1 };
    assert_eq!(tc_min(&report, &onu, 2, &cfg), ns(1_200_547));
    assert_eq!(tc_min(&report, &onu, 4, &cfg), ns(1_202_547));

    let zero = SimConfig {
        gate_gen: ns(0),
        gate_tx: ns(0),
        tune_step: ns(0),
        rtt: ns(0),
        d_max: ns(1),
        ..cfg
    };
    let onu = OnuState::new(0, &zero).unwrap();
    let report = ReportEvent { onu: 0, arrival: ns(0), requested_bytes: 0, seq: 0 };
    assert_eq!(tc_min(&report, &onu, 0, &zero), ns(0));
}

#[test]
fn window_size_examples() {
    let cfg = SimConfig::default();
    assert_eq!(window_size(1_000, &cfg), ns(13_512));
    assert_eq!(window_size(0, &cfg), ns(5_512));
    assert_eq!(window_size(125_000, &cfg), ns(1_005_512));
}

#[test]
fn valid_voids_examples() {
    let r = req(2_000, 15_000, 10_000);
    assert_eq!(valid_voids(&voids(&[(1, 0, 20_000)]), &r), vec![0]);
    assert!(valid_voids(&voids(&[(1, 0, 11_000)]), &r).is_empty());
    assert!(valid_voids(&VoidSet::new(), &r).is_empty());
}

#[test]
fn valid_horizons_examples() {
    let r = req(2_000, 15_000, 10_000);
    assert_eq!(valid_horizons(&horizons(&[3_000, 12_000]), &r), vec![0]);
    // Window longer than the whole budget.
    let r = req(2_000, 15_000, 20_000);
    assert!(valid_horizons(&horizons(&[0, 0]), &r).is_empty());
    let r = req(2_000, 15_000, 10_000);
    assert_eq!(valid_horizons(&horizons(&[1_000]), &r), vec![0]);
}

#[test]
fn valid_horizons_respects_tuning_band() {
    // base 2_000, step 1_000: TC on wavelength j is 2_000 + 1_000 |j|.
    let mut r = req(2_000, 15_000, 10_000);
    r.tune_step = ns(1_000);
    // latest start 5_000 -> at most three channels away.
    let hs = HorizonSet::from_horizons(vec![ns(0); 6], ns(1_000));
    assert_eq!(valid_horizons(&hs, &r), vec![0, 1, 2, 3]);
}

#[test]
fn clubbing_sets_examples() {
    let r = req(2_000, 15_000, 10_000);
    let vs = voids(&[(1, 5_000, 20_000)]);
    assert_eq!(clubbing_sets(&[0], &vs, &r), (vec![0], vec![]));
    let vs = voids(&[(1, 1_000, 14_000)]);
    // 14_000 - 2_000 >= 10_000: valid, ends before the deadline.
    assert_eq!(valid_voids(&vs, &r), vec![0]);
    assert_eq!(clubbing_sets(&[0], &vs, &r), (vec![], vec![0]));
    assert_eq!(clubbing_sets(&[], &vs, &r), (vec![], vec![]));
}

#[test]
fn horizon_clubbing_examples() {
    let r = req(2_000, 15_000, 10_000);
    let hs = horizons(&[0, 3_000]);
    let lf_valid = valid_horizons(&hs, &r);
    assert_eq!(horizon_clubbing_set(&lf_valid, &hs, &r), vec![1]);

    let hs = horizons(&[0, 0]);
    let lf_valid = valid_horizons(&hs, &r);
    assert!(horizon_clubbing_set(&lf_valid, &hs, &r).is_empty());

    let hs = horizons(&[2_000]);
    let lf_valid = valid_horizons(&hs, &r);
    assert_eq!(horizon_clubbing_set(&lf_valid, &hs, &r), vec![0]);
}

#[test]
fn schedule_start_clubs_single_void() {
    let r = req(2_000, 15_000, 10_000);
    let d = schedule(&r, &voids(&[(1, 5_000, 20_000)]), &horizons(&[30_000, 30_000]), &mut rng());
    assert_eq!(d.branch, Branch::VoidClubStart);
    assert_eq!(d.wavelength, 1);
    assert_eq!(d.gate_time, ns(3_000));
    assert_eq!(d.first_bit_arrival, ns(5_000));
    assert_eq!(d.window_end(), ns(15_000));
}

#[test]
fn schedule_prefers_later_finishing_club() {
    let r = req(2_000, 15_000, 10_000);
    let vs = voids(&[(1, 5_000, 20_000), (2, 1_000, 14_000)]);
    let d = schedule(&r, &vs, &horizons(&[30_000, 30_000, 30_000]), &mut rng());
    assert_eq!(d.branch, Branch::VoidClubStart);
    assert_eq!((d.wavelength, d.first_bit_arrival), (1, ns(5_000)));
}

#[test]
fn schedule_end_clubs_on_tie() {
    // v_sm.start + T_w == v_em.end: the strict comparison sends it to the end.
    let r = req(2_000, 15_000, 10_000);
    let vs = voids(&[(0, 4_000, 20_000), (1, 1_000, 14_000)]);
    let d = schedule(&r, &vs, &horizons(&[30_000, 30_000]), &mut rng());
    assert_eq!(d.branch, Branch::VoidClubEnd);
    assert_eq!((d.wavelength, d.first_bit_arrival), (1, ns(4_000)));
    assert_eq!(d.window_end(), ns(14_000));
}

#[test]
fn schedule_falls_back_to_eft_when_nothing_fits() {
    let r = req(2_000, 11_000, 10_000);
    let d = schedule(&r, &VoidSet::new(), &horizons(&[0, 0]), &mut rng());
    assert_eq!(d.branch, Branch::EftFallback);
    assert_eq!((d.wavelength, d.first_bit_arrival), (0, ns(2_000)));
    assert_eq!(d.violation(), ns(1_000));
}

#[test]
fn schedule_horizon_clubs_on_latest_horizon() {
    let r = req(2_000, 50_000, 10_000);
    let d = schedule(&r, &VoidSet::new(), &horizons(&[3_000, 2_500]), &mut rng());
    assert_eq!(d.branch, Branch::HorizonClub);
    assert_eq!((d.wavelength, d.first_bit_arrival), (0, ns(3_000)));
}

#[test]
fn schedule_latest_past_horizon_when_no_club() {
    let r = req(2_000, 50_000, 10_000);
    let d = schedule(&r, &VoidSet::new(), &horizons(&[0, 1_000]), &mut rng());
    assert_eq!(d.branch, Branch::HorizonLatest);
    assert_eq!(d.first_bit_arrival, ns(40_000));
    assert_eq!(d.gate_time, ns(38_000));
}

#[test]
fn schedule_latest_inside_void_when_no_club() {
    // The void spans past the deadline and starts before TC_min.
    let r = req(2_000, 15_000, 5_000);
    let d = schedule(&r, &voids(&[(0, 0, 40_000)]), &horizons(&[50_000]), &mut rng());
    assert_eq!(d.branch, Branch::VoidLatest);
    assert_eq!(d.first_bit_arrival, ns(10_000));
}

#[test]
fn floors_block_sleeping_receivers() {
    // Wavelength 0 cannot receive before 45_000, past the latest start.
    let floors = [ns(45_000), ns(0)];
    let r = req(2_000, 50_000, 10_000).with_floors(&floors);
    let d = schedule(&r, &VoidSet::new(), &horizons(&[3_000, 0]), &mut rng());
    assert_eq!(d.branch, Branch::HorizonLatest);
    assert_eq!(d.wavelength, 1);
}

#[test]
fn eft_examples() {
    let r = req(2_000, 1_000_000, 3_000);
    let d = eft_schedule(&r, &VoidSet::new(), &horizons(&[0]));
    assert_eq!((d.wavelength, d.first_bit_arrival), (0, ns(2_000)));

    let d = eft_schedule(&r, &VoidSet::new(), &horizons(&[10_000, 4_000]));
    assert_eq!((d.wavelength, d.first_bit_arrival), (1, ns(4_000)));
    assert_eq!(d.window_end(), ns(7_000));

    let d = eft_schedule(&r, &voids(&[(0, 2_000, 6_000)]), &horizons(&[10_000, 4_000]));
    assert_eq!((d.wavelength, d.first_bit_arrival), (0, ns(2_000)));
    assert_eq!(d.window_end(), ns(5_000));
}

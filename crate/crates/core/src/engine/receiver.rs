//! OLT receiver power states and the clairvoyant sleep rule.

use crate::metrics::ReceiverTotals;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Active,
    Asleep,
    /// Ramping up; able to receive from `ready` on.
    Waking,
}

/// What to do with an idle receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SleepAction {
    StayActive,
    /// Sleep now; wake at the given instant (never, if no window follows).
    Sleep { wake_at: Option<SimTime> },
}

/// Sleep only when the idle gap strictly exceeds the wake-up ramp.
pub fn sleep_controller(next_window_start: Option<SimTime>, now: SimTime, sleep_wake: SimTime) -> SleepAction {
    match next_window_start {
        None => SleepAction::Sleep { wake_at: None },
        Some(s) if s.saturating_sub(now) > sleep_wake => SleepAction::Sleep {
            wake_at: Some(s - sleep_wake),
        },
        Some(_) => SleepAction::StayActive,
    }
}

#[derive(Debug, Clone)]
pub struct ReceiverState {
    pub wavelength: usize,
    pub mode: Mode,
    since: SimTime,
    /// While waking: when the ramp completes.
    pub ready: SimTime,
    /// While asleep: planned wake-up instant.
    pub wake_at: Option<SimTime>,
    /// Bumped whenever a planned wake-up is replaced.
    pub token: u64,
    pub totals: ReceiverTotals,
    pub measured: ReceiverTotals,
    window: (SimTime, SimTime),
}

impl ReceiverState {
    /// A receiver that is on at time zero; `window` is the measurement
    /// interval.
    pub fn new(wavelength: usize, window: (SimTime, SimTime)) -> Self {
        ReceiverState {
            wavelength,
            mode: Mode::Active,
            since: SimTime::ZERO,
            ready: SimTime::ZERO,
            wake_at: None,
            token: 0,
            totals: ReceiverTotals::default(),
            measured: ReceiverTotals::default(),
            window,
        }
    }

    /// Earliest instant a first bit may arrive on this wavelength.
    pub fn floor(&self, now: SimTime, sleep_wake: SimTime) -> SimTime {
        match self.mode {
            Mode::Active => SimTime::ZERO,
            Mode::Asleep => now + sleep_wake,
            Mode::Waking => self.ready,
        }
    }

    fn charge(&mut self, now: SimTime) {
        let (lo, hi) = self.window;
        let span = now - self.since;
        let clipped = now.min(hi).saturating_sub(self.since.max(lo));
        for (acc, d) in [(&mut self.totals, span), (&mut self.measured, clipped)] {
            match self.mode {
                Mode::Active => acc.active += d,
                Mode::Asleep => acc.asleep += d,
                Mode::Waking => acc.waking += d,
            }
        }
        self.since = now;
    }

    fn in_window(&self, t: SimTime) -> bool {
        self.window.0 <= t && t < self.window.1
    }

    fn switch(&mut self, now: SimTime, mode: Mode) {
        self.charge(now);
        self.mode = mode;
    }

    pub fn sleep(&mut self, now: SimTime, wake_at: Option<SimTime>) {
        self.switch(now, Mode::Asleep);
        self.wake_at = wake_at;
        self.token += 1;
        self.totals.sleeps += 1;
        if self.in_window(now) {
            self.measured.sleeps += 1;
        }
    }

    pub fn wake(&mut self, now: SimTime, sleep_wake: SimTime) {
        self.switch(now, Mode::Waking);
        self.ready = now + sleep_wake;
        self.wake_at = None;
        self.totals.wakes += 1;
        if self.in_window(now) {
            self.measured.wakes += 1;
        }
    }

    /// Replans the wake-up of a sleeping receiver for a window starting at
    /// `start`; returns the new wake instant when it moved earlier.
    pub fn window_added(&mut self, start: SimTime, sleep_wake: SimTime) -> Option<SimTime> {
        if self.mode != Mode::Asleep {
            return None;
        }
        let wake = start - sleep_wake;
        match self.wake_at {
            Some(w) if w <= wake => None,
            _ => {
                self.wake_at = Some(wake);
                self.token += 1;
                Some(wake)
            }
        }
    }

    /// Window start: the receiver must be able to receive.
    pub fn start_window(&mut self, now: SimTime) -> bool {
        match self.mode {
            Mode::Active => true,
            Mode::Waking if self.ready <= now => {
                self.switch(now, Mode::Active);
                true
            }
            _ => false,
        }
    }

    pub fn close(&mut self, now: SimTime) {
        self.charge(now);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: u64) -> SimTime {
        SimTime::from_ms(v)
    }

    #[test]
    fn sleep_rule_examples() {
        let t_sw = ms(2);
        assert_eq!(
            sleep_controller(Some(ms(10)), ms(0), t_sw),
            SleepAction::Sleep { wake_at: Some(ms(8)) }
        );
        assert_eq!(sleep_controller(Some(ms(2)), ms(0), t_sw), SleepAction::StayActive);
        assert_eq!(sleep_controller(Some(SimTime::from_us(1_500)), ms(0), t_sw), SleepAction::StayActive);
        assert_eq!(sleep_controller(None, ms(0), t_sw), SleepAction::Sleep { wake_at: None });
    }

    #[test]
    fn ten_ms_void_sleeps_eight() {
        let mut r = ReceiverState::new(0, (ms(0), ms(100)));
        r.sleep(ms(0), Some(ms(8)));
        r.wake(ms(8), ms(2));
        assert!(r.start_window(ms(10)));
        r.close(ms(10));
        assert_eq!(r.totals.asleep, ms(8));
        assert_eq!(r.totals.waking, ms(2));
        assert_eq!((r.totals.sleeps, r.totals.wakes), (1, 1));
    }

    #[test]
    fn cannot_receive_while_ramping() {
        let mut r = ReceiverState::new(0, (ms(0), ms(100)));
        r.sleep(ms(0), Some(ms(8)));
        assert!(!r.start_window(ms(5)));
        r.wake(ms(8), ms(2));
        assert!(!r.start_window(ms(9)));
        assert_eq!(r.floor(ms(9), ms(2)), ms(10));
    }

    #[test]
    fn earlier_window_moves_wake_up() {
        let mut r = ReceiverState::new(0, (ms(0), ms(100)));
        r.sleep(ms(0), Some(ms(20)));
        assert_eq!(r.window_added(ms(30), ms(2)), None);
        assert_eq!(r.window_added(ms(12), ms(2)), Some(ms(10)));
        assert_eq!(r.token, 2);
    }

    #[test]
    fn measured_totals_are_clipped() {
        let mut r = ReceiverState::new(0, (ms(10), ms(20)));
        r.sleep(ms(5), None);
        r.close(ms(30));
        assert_eq!(r.totals.asleep, ms(25));
        assert_eq!(r.measured.asleep, ms(10));
        assert_eq!(r.measured.sleeps, 0);
    }
}

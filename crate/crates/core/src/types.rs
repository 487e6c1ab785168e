//! Per-ONU state, REPORT events and scheduling decisions.

use std::fmt;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::schedule_book::Window;
use crate::time::SimTime;

/// The OLT's bookkeeping for one ONU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnuState {
    pub id: usize,
    /// Wavelength the ONU transmitter is currently tuned to (`w_c^k`).
    pub tuned_wavelength: usize,
    pub rtt: SimTime,
    pub d_max: SimTime,
    /// `(D_max - T_rtt/2) / 2`, rounded down to the nanosecond.
    pub d_const: SimTime,
    /// Gap between the last two REPORT arrivals (`D_{q-1}`).
    pub d_prev: SimTime,
    pub queue_bytes: u64,
    pub in_flight: Option<ScheduleDecision>,
}

impl OnuState {
    pub fn new(id: usize, cfg: &SimConfig) -> Result<Self> {
        let rtt = cfg.rtt_of(id);
        let d_max = cfg.d_max_of(id);
        let half_rtt = rtt.half();
        if d_max <= half_rtt {
            return Err(SimError::DelayBoundUnsatisfiable { onu: id, d_max, half_rtt });
        }
        let d_const = (d_max - half_rtt).half();
        Ok(OnuState {
            id,
            tuned_wavelength: id % cfg.n_wavelengths,
            rtt,
            d_max,
            d_const,
            d_prev: d_const,
            queue_bytes: 0,
            in_flight: None,
        })
    }

    /// Downstream one-way delay (OLT to ONU).
    pub fn down_delay(&self) -> SimTime {
        self.rtt - self.rtt.half()
    }

    /// Upstream one-way delay (ONU to OLT).
    pub fn up_delay(&self) -> SimTime {
        self.rtt.half()
    }
}

/// The `q`-th REPORT of an ONU, fully received at the OLT at `arrival`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportEvent {
    pub onu: usize,
    pub arrival: SimTime,
    /// Bytes queued at the ONU when it emitted the REPORT; with gated
    /// sizing this is the grant.
    pub requested_bytes: u64,
    pub seq: u64,
}

/// Which rule of the decision tree produced a grant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// First bit lands exactly at the start of a void.
    VoidClubStart,
    /// Window ends exactly at the end of a void.
    VoidClubEnd,
    /// First bit lands exactly at a wavelength's horizon.
    HorizonClub,
    /// Latest placement inside a randomly chosen valid void.
    VoidLatest,
    /// Latest placement past the horizon of a randomly chosen wavelength.
    HorizonLatest,
    /// Earliest-finish-time placement; the deadline may be missed.
    EftFallback,
}

impl Branch {
    pub const ALL: [Branch; 6] = [
        Branch::VoidClubStart,
        Branch::VoidClubEnd,
        Branch::HorizonClub,
        Branch::VoidLatest,
        Branch::HorizonLatest,
        Branch::EftFallback,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A grant: where and when an ONU's upstream window goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleDecision {
    pub onu: usize,
    /// `W_sch`.
    pub wavelength: usize,
    /// `T_sch`: how long the GATE is held back past the earliest possible
    /// instant. The first bit then reaches the OLT at `TC_min + T_sch`.
    pub gate_time: SimTime,
    pub first_bit_arrival: SimTime,
    /// Window length `T_w`, including the REPORT and the guard.
    pub window: SimTime,
    pub grant_bytes: u64,
    pub branch: Branch,
    /// `t_R + D_q`.
    pub deadline: SimTime,
}

impl ScheduleDecision {
    pub fn window_end(&self) -> SimTime {
        self.first_bit_arrival + self.window
    }

    /// How far the window end overshoots the deadline (zero when met).
    pub fn violation(&self) -> SimTime {
        self.window_end().saturating_sub(self.deadline)
    }

    pub fn as_window(&self) -> Window {
        Window {
            wavelength: self.wavelength,
            start: self.first_bit_arrival,
            end: self.window_end(),
        }
    }
}

//! Experiment parameterization.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SimError};
use crate::time::SimTime;

/// How the per-REPORT scheduling budget `D_q` is derived from `D_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DelayPolicy {
    /// `D_q = (D_max - T_rtt/2) / 2` while the previous gap stays within it.
    Fixed,
    /// `D_q = D_max - D_{q-1} - T_rtt/2` for every REPORT.
    Variable,
}

/// Which OLT scheduler drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchedulerKind {
    /// Void-minimizing online scheduler.
    EoNovm,
    /// Earliest-finish-time placement with the same receiver sleep control;
    /// the comparison baseline.
    EftSleep,
}

/// Shape of the per-ONU arrival process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrafficKind {
    ParetoOnOff,
    Poisson,
}

impl fmt::Display for DelayPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DelayPolicy::Fixed => "fixed",
            DelayPolicy::Variable => "variable",
        })
    }
}

impl FromStr for DelayPolicy {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(DelayPolicy::Fixed),
            "variable" => Ok(DelayPolicy::Variable),
            other => Err(SimError::InvalidConfig(format!(
                "unknown delay policy '{other}' (expected fixed|variable)"
            ))),
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulerKind::EoNovm => "eo-novm",
            SchedulerKind::EftSleep => "eft-sleep",
        })
    }
}

impl FromStr for SchedulerKind {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eo-novm" | "eonovm" | "novm" => Ok(SchedulerKind::EoNovm),
            "eft-sleep" | "eftsleep" | "eft" => Ok(SchedulerKind::EftSleep),
            other => Err(SimError::InvalidConfig(format!(
                "unknown scheduler '{other}' (expected eo-novm|eft-sleep)"
            ))),
        }
    }
}

impl fmt::Display for TrafficKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrafficKind::ParetoOnOff => "pareto",
            TrafficKind::Poisson => "poisson",
        })
    }
}

impl FromStr for TrafficKind {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pareto" | "self-similar" => Ok(TrafficKind::ParetoOnOff),
            "poisson" => Ok(TrafficKind::Poisson),
            other => Err(SimError::InvalidConfig(format!(
                "unknown traffic kind '{other}' (expected pareto|poisson)"
            ))),
        }
    }
}

/// Full description of one simulation run.
///
/// [`SimConfig::default`] carries the reference parameter set: 100 Mb/s peak
/// ONU rate, 1 Gb/s per wavelength, 35 ns GATE generation, 5 µs guard,
/// 512 ns GATE transmission, 1 µs per-channel tuning and 64-byte REPORTs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_onus: usize,
    pub n_wavelengths: usize,
    /// Peak ONU arrival rate `r_a^m` in bit/s.
    pub peak_rate_bps: u64,
    /// Upstream line rate per wavelength `r_d` in bit/s.
    pub line_rate_bps: u64,
    pub report_bytes: u64,
    pub guard: SimTime,
    pub gate_gen: SimTime,
    pub gate_tx: SimTime,
    /// Tuning time between adjacent wavelengths.
    pub tune_step: SimTime,
    /// Receiver sleep-to-wake-up ramp `T_sw`.
    pub sleep_wake: SimTime,
    pub rtt: SimTime,
    pub d_max: SimTime,
    /// Optional per-ONU round-trip times; overrides `rtt` when present.
    pub rtt_per_onu: Option<Vec<SimTime>>,
    /// Optional per-ONU delay bounds; overrides `d_max` when present.
    pub d_max_per_onu: Option<Vec<SimTime>>,
    /// Fractional load `L` of every ONU.
    pub load: f64,
    pub alpha_on: f64,
    pub alpha_off: f64,
    /// Mean ON period of the Pareto source.
    pub mean_on: SimTime,
    pub packet_bytes: u64,
    pub traffic: TrafficKind,
    pub run_time: SimTime,
    /// Leading fraction of `run_time` excluded from statistics.
    pub warmup_fraction: f64,
    pub rng_seed: u64,
    pub delay_policy: DelayPolicy,
    pub scheduler: SchedulerKind,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_onus: 16,
            n_wavelengths: 2,
            peak_rate_bps: 100_000_000,
            line_rate_bps: 1_000_000_000,
            report_bytes: 64,
            guard: SimTime::from_us(5),
            gate_gen: SimTime::from_ns(35),
            gate_tx: SimTime::from_ns(512),
            tune_step: SimTime::from_us(1),
            sleep_wake: SimTime::from_ms(2),
            rtt: SimTime::from_us(200),
            d_max: SimTime::from_ms(10),
            rtt_per_onu: None,
            d_max_per_onu: None,
            load: 0.5,
            alpha_on: 1.2,
            alpha_off: 1.4,
            mean_on: SimTime::from_us(60),
            packet_bytes: 1_500,
            traffic: TrafficKind::ParetoOnOff,
            run_time: SimTime::from_secs(2),
            warmup_fraction: 0.1,
            rng_seed: 1,
            delay_policy: DelayPolicy::Fixed,
            scheduler: SchedulerKind::EoNovm,
        }
    }
}

impl SimConfig {
    /// Duration of one byte on the upstream line, `T`.
    pub fn byte_time(&self) -> SimTime {
        SimTime::from_ns(8_000_000_000 / self.line_rate_bps)
    }

    pub fn rtt_of(&self, onu: usize) -> SimTime {
        match &self.rtt_per_onu {
            Some(v) => v[onu],
            None => self.rtt,
        }
    }

    pub fn d_max_of(&self, onu: usize) -> SimTime {
        match &self.d_max_per_onu {
            Some(v) => v[onu],
            None => self.d_max,
        }
    }

    /// Receiver occupancy implied by the nominal load, `N r_a^m L / (W r_d)`.
    pub fn utilization(&self) -> f64 {
        self.n_onus as f64 * self.peak_rate_bps as f64 * self.load
            / (self.n_wavelengths as f64 * self.line_rate_bps as f64)
    }

    /// Checks the configuration and returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if self.n_onus == 0 {
            return bad("n_onus must be at least 1".into());
        }
        if self.n_wavelengths == 0 {
            return bad("n_wavelengths must be at least 1".into());
        }
        if self.line_rate_bps == 0 || 8_000_000_000 % self.line_rate_bps != 0 {
            return bad(format!(
                "line rate {} b/s does not give an integral byte time in ns",
                self.line_rate_bps
            ));
        }
        if !(0.0..=1.0).contains(&self.load) {
            return bad(format!("load {} outside [0, 1]", self.load));
        }
        for (name, a) in [("alpha_on", self.alpha_on), ("alpha_off", self.alpha_off)] {
            if !(a > 1.0 && a <= 2.0) {
                return bad(format!("{name} = {a} must lie in (1, 2]"));
            }
        }
        if self.packet_bytes == 0 {
            return bad("packet_bytes must be positive".into());
        }
        if self.mean_on == SimTime::ZERO {
            return bad("mean_on must be positive".into());
        }
        if self.run_time == SimTime::ZERO {
            return bad("run_time must be positive".into());
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return bad(format!("warmup_fraction {} outside [0, 1)", self.warmup_fraction));
        }
        for (name, v) in [("rtt_per_onu", &self.rtt_per_onu), ("d_max_per_onu", &self.d_max_per_onu)] {
            if let Some(v) = v {
                if v.len() != self.n_onus {
                    return bad(format!("{name} has {} entries, expected {}", v.len(), self.n_onus));
                }
            }
        }
        for k in 0..self.n_onus {
            let half_rtt = self.rtt_of(k).half();
            let d_max = self.d_max_of(k);
            if d_max <= half_rtt {
                return Err(SimError::DelayBoundUnsatisfiable { onu: k, d_max, half_rtt });
            }
        }
        let mut warnings = Vec::new();
        if self.utilization() > 1.0 {
            warnings.push(format!(
                "offered load {:.3} exceeds upstream capacity; queues will grow",
                self.utilization()
            ));
        }
        Ok(warnings)
    }
}

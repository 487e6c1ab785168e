//! Per-ONU arrival processes.
//!
//! The default source alternates Pareto-distributed ON and OFF periods.
//! While ON it produces bits at the peak rate and hands out a fixed-size
//! packet every time a full packet's worth has accumulated; credit carries
//! across OFF periods, so the byte stream is exactly the fluid ON/OFF
//! process quantized to packets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{SimConfig, TrafficKind};
use crate::time::SimTime;

/// One packet entering an ONU queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub arrival: SimTime,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficParams {
    pub alpha_on: f64,
    pub alpha_off: f64,
    pub load: f64,
    pub peak_rate_bps: u64,
    pub packet_bytes: u64,
    /// Pareto scale of the ON periods in ns.
    pub min_on: f64,
}

impl TrafficParams {
    pub fn from_config(cfg: &SimConfig) -> Self {
        let mean_on = cfg.mean_on.as_ns() as f64;
        TrafficParams {
            alpha_on: cfg.alpha_on,
            alpha_off: cfg.alpha_off,
            load: cfg.load,
            peak_rate_bps: cfg.peak_rate_bps,
            packet_bytes: cfg.packet_bytes,
            min_on: mean_on * (cfg.alpha_on - 1.0) / cfg.alpha_on,
        }
    }

    pub fn mean_on(&self) -> f64 {
        pareto_mean(self.alpha_on, self.min_on)
    }
}

fn pareto_mean(shape: f64, scale: f64) -> f64 {
    scale * shape / (shape - 1.0)
}

/// Inverse-CDF Pareto sample `x_m u^(-1/α)`. `None` for `u` outside `(0, 1]`.
pub fn pareto_sample(shape: f64, scale: f64, u: f64) -> Option<f64> {
    (u > 0.0 && u <= 1.0).then(|| scale * u.powf(-1.0 / shape))
}

/// What the OFF phase looks like for a given load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffPhase {
    /// `L = 0`: the source never emits.
    Silent,
    /// `L = 1`: permanently ON.
    Never,
    /// Pareto OFF periods with this scale (ns).
    Pareto(f64),
}

/// Picks the OFF scale so that the ON fraction of time equals the load.
pub fn calibrate_off_scale(p: &TrafficParams) -> OffPhase {
    if p.load <= 0.0 {
        return OffPhase::Silent;
    }
    if p.load >= 1.0 {
        return OffPhase::Never;
    }
    let mean_off = p.mean_on() * (1.0 - p.load) / p.load;
    OffPhase::Pareto(mean_off * (p.alpha_off - 1.0) / p.alpha_off)
}

#[derive(Debug, Clone)]
enum Process {
    OnOff {
        off: OffPhase,
        on: bool,
        phase_end: SimTime,
        /// Accumulated ON-time credit in bit·ns·(1e9/s) units, i.e. rate·dt.
        credit: u128,
    },
    Poisson {
        /// Mean gap between packets in ns.
        mean_gap: f64,
        next: SimTime,
    },
    Silent,
}

/// Arrival generator for one ONU.
#[derive(Debug, Clone)]
pub struct TrafficSource {
    params: TrafficParams,
    rng: ChaCha8Rng,
    process: Process,
    /// Arrivals up to and including this instant have been handed out.
    cursor: SimTime,
    started: bool,
}

impl TrafficSource {
    /// Builds the source of ONU `onu`; each ONU draws from its own stream.
    pub fn new(cfg: &SimConfig, onu: usize) -> Self {
        let params = TrafficParams::from_config(cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(onu as u64 + 1);
        let process = match (cfg.traffic, calibrate_off_scale(&params)) {
            (_, OffPhase::Silent) => Process::Silent,
            (TrafficKind::Poisson, _) => {
                let packet_ns = params.packet_bytes as f64 * 8e9 / params.peak_rate_bps as f64;
                Process::Poisson {
                    mean_gap: packet_ns / params.load,
                    next: SimTime::ZERO,
                }
            }
            (TrafficKind::ParetoOnOff, off) => Process::OnOff {
                off,
                on: false,
                phase_end: SimTime::ZERO,
                credit: 0,
            },
        };
        TrafficSource {
            params,
            rng,
            process,
            cursor: SimTime::ZERO,
            started: false,
        }
    }

    pub fn params(&self) -> &TrafficParams {
        &self.params
    }

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let u: f64 = rng.gen();
            if u > 0.0 {
                return u;
            }
        }
    }

    fn duration(rng: &mut ChaCha8Rng, shape: f64, scale: f64) -> SimTime {
        let x = pareto_sample(shape, scale, Self::uniform(rng)).expect("u in (0, 1)");
        // Saturating float-to-int cast; at least one ns so phases always advance.
        SimTime::from_ns((x.round() as u64).max(1))
    }

    /// All packets arriving in `(previous until, until]`, in time order.
    pub fn next_arrivals(&mut self, until: SimTime) -> Vec<Packet> {
        let mut out = Vec::new();
        if until < self.cursor || (until == self.cursor && self.started) {
            return out;
        }
        let first = !self.started;
        self.started = true;
        let bits = self.params.packet_bytes as u128 * 8;
        let rate = self.params.peak_rate_bps as u128;
        let need = bits * 1_000_000_000;
        let p = &self.params;
        let rng = &mut self.rng;
        match &mut self.process {
            Process::Silent => {}
            Process::Poisson { mean_gap, next } => {
                if first {
                    *next = SimTime::from_ns(exp_gap(rng, *mean_gap));
                }
                while *next <= until {
                    out.push(Packet { arrival: *next, bytes: p.packet_bytes });
                    *next += SimTime::from_ns(exp_gap(rng, *mean_gap).max(1));
                }
            }
            Process::OnOff { off, on, phase_end, credit } => {
                if first {
                    *on = matches!(off, OffPhase::Never) || rng.gen_bool(p.load);
                    *phase_end = match (*on, *off) {
                        (true, OffPhase::Never) => SimTime::MAX,
                        (true, _) => Self::duration(rng, p.alpha_on, p.min_on),
                        (false, OffPhase::Pareto(min_off)) => Self::duration(rng, p.alpha_off, min_off),
                        (false, _) => unreachable!("silent sources have no phases"),
                    };
                }
                let mut t = self.cursor;
                while t < until {
                    if *phase_end <= t {
                        *on = !*on;
                        let len = match (*on, *off) {
                            (true, _) => Self::duration(rng, p.alpha_on, p.min_on),
                            (false, OffPhase::Pareto(min_off)) => Self::duration(rng, p.alpha_off, min_off),
                            (false, _) => unreachable!("always-on sources never switch off"),
                        };
                        *phase_end = phase_end.saturating_add(len);
                        continue;
                    }
                    let seg_end = (*phase_end).min(until);
                    if *on {
                        loop {
                            let missing = need - *credit;
                            let dt = missing.div_ceil(rate) as u64;
                            let at = t + SimTime::from_ns(dt);
                            if at <= seg_end {
                                out.push(Packet { arrival: at, bytes: p.packet_bytes });
                                *credit = *credit + dt as u128 * rate - need;
                                t = at;
                            } else {
                                *credit += (seg_end - t).as_ns() as u128 * rate;
                                break;
                            }
                        }
                    }
                    t = seg_end;
                }
            }
        }
        self.cursor = until;
        out
    }
}

fn exp_gap(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    let u = TrafficSource::uniform(rng);
    (-mean * u.ln()).round() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(load: f64) -> SimConfig {
        SimConfig {
            load,
            ..SimConfig::default()
        }
    }

    fn bytes(ps: &[Packet]) -> u64 {
        ps.iter().map(|p| p.bytes).sum()
    }

    #[test]
    fn pareto_inverse_cdf() {
        let x = pareto_sample(1.2, 1_000.0, 0.5).unwrap();
        assert!((x - 1_781.797_4).abs() < 1e-3, "{x}");
        assert_eq!(pareto_sample(2.0, 1.0, 0.25), Some(2.0));
        assert_eq!(pareto_sample(1.5, 7.0, 1.0), Some(7.0));
        assert_eq!(pareto_sample(1.5, 7.0, 0.0), None);
    }

    #[test]
    fn off_scale_balances_load() {
        let mut p = TrafficParams::from_config(&cfg(0.25));
        p.min_on = 10_000.0;
        let OffPhase::Pareto(min_off) = calibrate_off_scale(&p) else { panic!() };
        assert!((min_off - 51_428.571_4).abs() < 1e-3);

        p.load = 0.75;
        let OffPhase::Pareto(min_off) = calibrate_off_scale(&p) else { panic!() };
        assert_eq!(min_off.round(), 5_714.0);

        p.load = 0.5;
        let OffPhase::Pareto(min_off) = calibrate_off_scale(&p) else { panic!() };
        assert!((pareto_mean(p.alpha_off, min_off) - p.mean_on()).abs() < 1e-6);

        p.load = 0.0;
        assert_eq!(calibrate_off_scale(&p), OffPhase::Silent);
        p.load = 1.0;
        assert_eq!(calibrate_off_scale(&p), OffPhase::Never);
    }

    #[test]
    fn silent_source_emits_nothing() {
        let mut src = TrafficSource::new(&cfg(0.0), 0);
        assert!(src.next_arrivals(SimTime::from_secs(1)).is_empty());
    }

    #[test]
    fn always_on_emits_back_to_back_packets() {
        // 1500 B at 100 Mb/s takes 120 µs.
        let mut src = TrafficSource::new(&cfg(1.0), 0);
        let ps = src.next_arrivals(SimTime::from_us(120));
        assert_eq!(ps, vec![Packet { arrival: SimTime::from_us(120), bytes: 1_500 }]);
        let ps = src.next_arrivals(SimTime::from_us(359));
        assert_eq!(ps.len(), 1);
        let ps = src.next_arrivals(SimTime::from_us(360));
        assert_eq!(ps[0].arrival, SimTime::from_us(360));
    }

    #[test]
    fn split_queries_match_one_query() {
        let c = cfg(0.4);
        let mut a = TrafficSource::new(&c, 3);
        let mut b = TrafficSource::new(&c, 3);
        let whole = a.next_arrivals(SimTime::from_ms(50));
        let mut parts = Vec::new();
        for step in 1..=500 {
            parts.extend(b.next_arrivals(SimTime::from_us(100 * step)));
        }
        assert_eq!(whole, parts);
    }

    #[test]
    fn streams_differ_between_onus() {
        let c = cfg(0.5);
        let a = TrafficSource::new(&c, 0).next_arrivals(SimTime::from_ms(20));
        let b = TrafficSource::new(&c, 1).next_arrivals(SimTime::from_ms(20));
        assert_ne!(a, b);
    }

    #[test]
    fn poisson_rate_matches_load() {
        let c = SimConfig {
            traffic: TrafficKind::Poisson,
            ..cfg(0.3)
        };
        let ps = TrafficSource::new(&c, 0).next_arrivals(SimTime::from_secs(5));
        let rate = bytes(&ps) as f64 * 8.0 / 5.0;
        assert!((rate / 30e6 - 1.0).abs() < 0.02, "{rate}");
    }

    #[test]
    fn on_off_is_burstier_than_poisson() {
        let horizon = SimTime::from_secs(2);
        let bin = 1_000_000u64;
        let variance = |ps: Vec<Packet>| {
            let mut counts = vec![0f64; (horizon.as_ns() / bin) as usize + 1];
            for p in ps {
                counts[(p.arrival.as_ns() / bin) as usize] += 1.0;
            }
            let m = counts.iter().sum::<f64>() / counts.len() as f64;
            counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / counts.len() as f64
        };
        let pareto = TrafficSource::new(&cfg(0.5), 0).next_arrivals(horizon);
        let poisson_cfg = SimConfig {
            traffic: TrafficKind::Poisson,
            ..cfg(0.5)
        };
        let poisson = TrafficSource::new(&poisson_cfg, 0).next_arrivals(horizon);
        assert!(variance(pareto) > variance(poisson));
    }
}

//! `key=value` parameter parsing shared by config files and `--single`.

use twdm_core::{SimConfig, SimTime};

/// Canonical key names and the aliases accepted for them. Matching is
/// case-insensitive.
const KEYS: &[(&str, &[&str])] = &[
    ("n_onus", &["n"]),
    ("n_wavelengths", &["w"]),
    ("load", &["l"]),
    ("rng_seed", &["seed"]),
    ("sleep_wake", &["t_sw"]),
    ("d_max", &["delay_bound"]),
    ("rtt", &["t_rtt"]),
    ("d_max_per_onu", &["delay_bound_per_onu"]),
    ("rtt_per_onu", &["t_rtt_per_onu"]),
    ("peak_rate", &["r_a"]),
    ("line_rate", &["r_d"]),
    ("report_bytes", &["n_r"]),
    ("guard", &["t_g"]),
    ("gate_gen", &["t_p"]),
    ("gate_tx", &["t_tx"]),
    ("tune_step", &["t_t"]),
    ("alpha_on", &[]),
    ("alpha_off", &[]),
    ("mean_on", &[]),
    ("packet_bytes", &[]),
    ("traffic", &[]),
    ("run_time", &["t_obs", "runtime"]),
    ("warmup_fraction", &["warmup"]),
    ("delay_policy", &["policy"]),
    ("scheduler", &[]),
];

/// Resolves a user-facing key to its canonical name.
pub fn canonical(key: &str) -> Option<&'static str> {
    let key = key.trim().to_ascii_lowercase();
    KEYS.iter()
        .find(|(name, aliases)| *name == key || aliases.contains(&key.as_str()))
        .map(|(name, _)| *name)
}

/// Parses a duration with a mandatory unit: `ns`, `us`, `ms` or `s`.
/// Fractions are allowed as long as the result is a whole number of ns.
pub fn parse_duration(s: &str) -> Result<SimTime, String> {
    let s = s.trim();
    let split = s
        .find(|c: char| c.is_ascii_alphabetic() || c == 'µ')
        .ok_or_else(|| format!("duration '{s}' needs a unit (ns, us, ms or s)"))?;
    let (num, unit) = s.split_at(split);
    let scale = match unit {
        "ns" => 1.0,
        "us" | "µs" => 1e3,
        "ms" => 1e6,
        "s" => 1e9,
        _ => return Err(format!("unknown time unit '{unit}' in '{s}'")),
    };
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("'{num}' is not a number"))?;
    let ns = value * scale;
    if !ns.is_finite() || ns < 0.0 || (ns - ns.round()).abs() > 1e-6 {
        return Err(format!("duration '{s}' is not a whole number of nanoseconds"));
    }
    Ok(SimTime::from_ns(ns.round() as u64))
}

/// Parses a bit rate: a plain integer in bit/s or one with a `k`, `M` or `G`
/// suffix.
pub fn parse_rate(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (num, scale) = match s.chars().last() {
        Some('k' | 'K') => (&s[..s.len() - 1], 1e3),
        Some('M') => (&s[..s.len() - 1], 1e6),
        Some('G') => (&s[..s.len() - 1], 1e9),
        _ => (s, 1.0),
    };
    let value: f64 = num.parse().map_err(|_| format!("'{s}' is not a bit rate"))?;
    let bps = value * scale;
    if !(bps >= 1.0 && bps.fract() == 0.0) {
        return Err(format!("bit rate '{s}' must be a positive whole number of bit/s"));
    }
    Ok(bps as u64)
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("'{}' is not a valid number", s.trim()))
}

fn parse_list(s: &str) -> Result<Vec<SimTime>, String> {
    s.split(',').map(parse_duration).collect()
}

/// Sets one parameter. `key` must already be canonical.
pub fn apply(cfg: &mut SimConfig, key: &str, value: &str) -> Result<(), String> {
    let v = value.trim();
    match key {
        "n_onus" => cfg.n_onus = parse_num(v)?,
        "n_wavelengths" => cfg.n_wavelengths = parse_num(v)?,
        "load" => cfg.load = parse_num(v)?,
        "rng_seed" => cfg.rng_seed = parse_num(v)?,
        "sleep_wake" => cfg.sleep_wake = parse_duration(v)?,
        "d_max" => cfg.d_max = parse_duration(v)?,
        "rtt" => cfg.rtt = parse_duration(v)?,
        "d_max_per_onu" => cfg.d_max_per_onu = Some(parse_list(v)?),
        "rtt_per_onu" => cfg.rtt_per_onu = Some(parse_list(v)?),
        "peak_rate" => cfg.peak_rate_bps = parse_rate(v)?,
        "line_rate" => cfg.line_rate_bps = parse_rate(v)?,
        "report_bytes" => cfg.report_bytes = parse_num(v)?,
        "guard" => cfg.guard = parse_duration(v)?,
        "gate_gen" => cfg.gate_gen = parse_duration(v)?,
        "gate_tx" => cfg.gate_tx = parse_duration(v)?,
        "tune_step" => cfg.tune_step = parse_duration(v)?,
        "alpha_on" => cfg.alpha_on = parse_num(v)?,
        "alpha_off" => cfg.alpha_off = parse_num(v)?,
        "mean_on" => cfg.mean_on = parse_duration(v)?,
        "packet_bytes" => cfg.packet_bytes = parse_num(v)?,
        "traffic" => cfg.traffic = v.parse().map_err(|e: twdm_core::SimError| e.to_string())?,
        "run_time" => cfg.run_time = parse_duration(v)?,
        "warmup_fraction" => cfg.warmup_fraction = parse_num(v)?,
        "delay_policy" => cfg.delay_policy = v.parse().map_err(|e: twdm_core::SimError| e.to_string())?,
        "scheduler" => cfg.scheduler = v.parse().map_err(|e: twdm_core::SimError| e.to_string())?,
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}

/// Parses one `key=value` pair into a canonical key and the raw value.
pub fn split_pair(pair: &str) -> Result<(&'static str, &str), String> {
    let (k, v) = pair
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{}'", pair.trim()))?;
    let key = canonical(k).ok_or_else(|| format!("unknown key '{}'", k.trim()))?;
    if v.trim().is_empty() {
        return Err(format!("missing value for '{}'", k.trim()));
    }
    Ok((key, v.trim()))
}

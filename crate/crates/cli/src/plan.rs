//! Expansion of figures and config sweeps into concrete runs.

use std::str::FromStr;

use twdm_core::SimConfig;

use crate::config_file::{ConfigError, ExperimentFile};
use crate::params;

/// Loads 0.05, 0.10, ..., 0.95.
pub fn default_load_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig5,
    Fig6,
    Fig7a,
    Fig7b,
    Fig7c,
    Fig8,
}

impl FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim().trim_start_matches("fig") {
            "5" => Figure::Fig5,
            "6" => Figure::Fig6,
            "7a" => Figure::Fig7a,
            "7b" => Figure::Fig7b,
            "7c" => Figure::Fig7c,
            "8" => Figure::Fig8,
            other => return Err(format!("unknown figure '{other}' (expected 5, 6, 7a, 7b, 7c or 8)")),
        })
    }
}

/// One curve: a label and the parameters that distinguish it.
type Variant = (String, Vec<(&'static str, String)>);

fn variants(key: &'static str, prefix: &str, values: &[&str]) -> Vec<Variant> {
    values
        .iter()
        .map(|v| (format!("{prefix}{v}"), vec![(key, v.to_string())]))
        .collect()
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7a => "fig7a",
            Figure::Fig7b => "fig7b",
            Figure::Fig7c => "fig7c",
            Figure::Fig8 => "fig8",
        }
    }

    /// `(N, W)` the figure is drawn for, unless the variants set them.
    fn topology(self) -> (usize, usize) {
        match self {
            Figure::Fig6 => (64, 8),
            _ => (16, 2),
        }
    }

    fn variants(self) -> Vec<Variant> {
        match self {
            Figure::Fig5 => variants("delay_policy", "", &["fixed", "variable"]),
            Figure::Fig6 => variants("sleep_wake", "tsw_", &["0.5ms", "1ms", "2ms"]),
            Figure::Fig7a => variants("d_max", "dmax_", &["5ms", "10ms", "15ms"]),
            Figure::Fig7b => [(16, 2), (32, 4), (64, 8)]
                .iter()
                .map(|(n, w)| {
                    (
                        format!("n{n}_w{w}"),
                        vec![("n_onus", n.to_string()), ("n_wavelengths", w.to_string())],
                    )
                })
                .collect(),
            Figure::Fig7c => variants("rtt", "rtt_", &["0.2ms", "0.5ms", "2ms"]),
            Figure::Fig8 => variants("alpha_on", "aon_", &["1.2", "1.5", "1.9"]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Point {
    pub series: String,
    pub cfg: SimConfig,
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub name: String,
    /// Ordered by series, then load, then seed.
    pub points: Vec<Point>,
    /// Also emit the analytical bound as its own series.
    pub with_eta_max: bool,
}

impl Plan {
    pub fn series(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.points {
            if out.last() != Some(&p.series.as_str()) {
                out.push(&p.series);
            }
        }
        out
    }
}

fn expand(
    name: &str,
    base: &SimConfig,
    variants: &[Variant],
    loads: &[f64],
    seeds: &[u64],
    file: &ExperimentFile,
) -> Result<Vec<Point>, ConfigError> {
    let mut points = Vec::with_capacity(variants.len() * loads.len() * seeds.len());
    for (label, settings) in variants {
        let mut cfg = base.clone();
        for (k, v) in settings {
            params::apply(&mut cfg, k, v).map_err(|message| ConfigError {
                file: name.to_string(),
                line: None,
                message,
            })?;
        }
        for &load in loads {
            for &seed in seeds {
                let cfg = SimConfig {
                    load,
                    rng_seed: seed,
                    ..cfg.clone()
                };
                cfg.validate().map_err(|e| file.blame(&e))?;
                points.push(Point {
                    series: label.clone(),
                    cfg,
                });
            }
        }
    }
    Ok(points)
}

fn seeds(base: u64, count: u64) -> Vec<u64> {
    (0..count).map(|i| base.wrapping_add(i)).collect()
}

fn load_axis(file: &ExperimentFile) -> Vec<f64> {
    match file.axes.iter().find(|a| a.key == "load") {
        Some(axis) => axis.values.iter().map(|v| v.parse().expect("checked at parse time")).collect(),
        None if file.mentions("load") => vec![file.base.load],
        None => default_load_grid(),
    }
}

/// A preset figure on top of the file's base parameters. Only the load may
/// be swept by the file.
pub fn figure_plan(fig: Figure, file: &ExperimentFile, base_seed: u64, n_seeds: u64) -> Result<Plan, ConfigError> {
    if let Some(axis) = file.axes.iter().find(|a| a.key != "load") {
        return Err(ConfigError {
            file: file.name.clone(),
            line: Some(axis.line),
            message: format!("'{}' cannot be swept together with a preset figure", axis.key),
        });
    }
    let (n, w) = fig.topology();
    let base = SimConfig {
        n_onus: n,
        n_wavelengths: w,
        ..file.base.clone()
    };
    let points = expand(fig.name(), &base, &fig.variants(), &load_axis(file), &seeds(base_seed, n_seeds), file)?;
    Ok(Plan {
        name: fig.name().to_string(),
        points,
        with_eta_max: fig == Figure::Fig6,
    })
}

/// The cross product of the file's `[sweep]` axes. Load is the innermost
/// axis; the others form the series, in the order they were declared.
pub fn sweep_plan(file: &ExperimentFile, base_seed: u64, n_seeds: u64) -> Result<Plan, ConfigError> {
    let mut variants: Vec<Variant> = vec![(String::new(), Vec::new())];
    for axis in file.axes.iter().filter(|a| a.key != "load") {
        variants = variants
            .iter()
            .flat_map(|(label, settings)| {
                axis.values.iter().map(move |v| {
                    let sep = if label.is_empty() { "" } else { "_" };
                    let mut s = settings.clone();
                    s.push((axis.key, v.clone()));
                    (format!("{label}{sep}{}={v}", axis.key), s)
                })
            })
            .collect();
    }
    if variants.len() == 1 {
        variants[0].0 = "efficiency".to_string();
    }
    let points = expand("sweep", &file.base, &variants, &load_axis(file), &seeds(base_seed, n_seeds), file)?;
    Ok(Plan {
        name: "sweep".to_string(),
        points,
        with_eta_max: false,
    })
}

//! Parallel execution of a plan and the CSV / series writers.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use twdm_core::metrics::{csv_row, CSV_HEADER};
use twdm_core::{eta_max, run, RunStats, SimError};

use crate::plan::Plan;

pub struct Outcome {
    pub results: Vec<Result<RunStats, SimError>>,
}

/// Runs every point on a pool of `jobs` threads (0 picks the rayon default).
/// Results come back in plan order regardless of scheduling.
pub fn execute(plan: &Plan, jobs: usize) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let results = pool.install(|| plan.points.par_iter().map(|p| run(&p.cfg)).collect());
    Outcome { results }
}

/// The CSV body: header plus one row per successful run, with a trailing
/// `unstable` flag column.
pub fn csv_body(plan: &Plan, outcome: &Outcome) -> String {
    let mut out = format!("{CSV_HEADER},unstable\n");
    for (p, r) in plan.points.iter().zip(&outcome.results) {
        if let Ok(stats) = r {
            writeln!(out, "{},{}", csv_row(&p.cfg, stats), u8::from(stats.unstable)).unwrap();
        }
    }
    out
}

/// Per-series `(load, value)` pairs averaged over seeds. `value` picks the
/// statistic.
pub fn series(plan: &Plan, outcome: &Outcome, label: &str, value: impl Fn(&RunStats) -> f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (p, r) in plan.points.iter().zip(&outcome.results) {
        let Ok(stats) = r else { continue };
        if p.series != label {
            continue;
        }
        match out.last_mut() {
            Some((load, sum, n)) if *load == p.cfg.load => {
                *sum += value(stats);
                *n += 1;
            }
            _ => out.push((p.cfg.load, value(stats), 1)),
        }
    }
    out.into_iter().map(|(l, s, n)| (l, s / n as f64)).collect()
}

fn dat(header: &str, rows: &[(f64, f64)]) -> String {
    let mut s = format!("# load {header}\n");
    for (l, v) in rows {
        writeln!(s, "{l} {v:.4}").unwrap();
    }
    s
}

/// Writes `<name>.csv` and the series files into `dir`; returns the paths.
pub fn write_outputs(dir: &Path, plan: &Plan, outcome: &Outcome, stamp: &str) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |file: String, body: String| -> io::Result<()> {
        let path = dir.join(file);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(
        format!("{}.csv", plan.name),
        format!("# twdm-sim {} {stamp}\n{}", plan.name, csv_body(plan, outcome)),
    )?;
    for label in plan.series() {
        let eff = series(plan, outcome, label, |s| s.efficiency_pct);
        put(format!("{}_{label}.dat", plan.name), dat("efficiency_pct", &eff))?;
        let delay = series(plan, outcome, label, |s| s.avg_delay_ns / 1e6);
        put(format!("{}_{label}_delay.dat", plan.name), dat("avg_delay_ms", &delay))?;
    }
    if plan.with_eta_max {
        let label = plan.series()[0].to_string();
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for p in plan.points.iter().filter(|p| p.series == label) {
            if rows.last().map(|r| r.0) != Some(p.cfg.load) {
                rows.push((p.cfg.load, eta_max(&p.cfg)));
            }
        }
        put(format!("{}_eta_max.dat", plan.name), dat("eta_max_pct", &rows))?;
    }
    Ok(written)
}

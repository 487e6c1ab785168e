use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use twdm_cli::plan::{figure_plan, sweep_plan, Figure};
use twdm_cli::{params, runner, CliError, ExperimentFile};
use twdm_core::metrics::{csv_row, CSV_HEADER};

/// Seeded simulation runs and parameter sweeps.
#[derive(Parser)]
#[command(name = "twdm-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset figure, a config sweep, or a single configuration.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment file (key = value lines with an optional [sweep] section).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset figure sweep: 5, 6, 7a, 7b, 7c or 8.
    #[arg(long, conflicts_with = "single")]
    fig: Option<Figure>,
    /// Seeds per sweep point, counting up from the base seed.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    /// Simulated time per run, e.g. 2s or 500ms.
    #[arg(long, value_parser = params::parse_duration)]
    runtime: Option<twdm_core::SimTime>,
    /// Output directory for the CSV and series files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Run one configuration and print its CSV row, e.g. --single N=16 W=2 L=0.6 seed=7.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    single: Option<Vec<String>>,
}

fn base_seed(file: &ExperimentFile) -> Result<u64, CliError> {
    match std::env::var("EONOVM_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("EONOVM_SEED='{v}' is not an unsigned integer"))),
        Err(_) => Ok(file.base.rng_seed),
    }
}

fn single(file: &ExperimentFile, pairs: &[String]) -> Result<(), CliError> {
    let mut cfg = file.base.clone();
    cfg.rng_seed = base_seed(file)?;
    for pair in pairs {
        let (key, value) = params::split_pair(pair).map_err(CliError::Usage)?;
        params::apply(&mut cfg, key, value).map_err(|e| CliError::Usage(format!("{pair}: {e}")))?;
    }
    for w in cfg.validate().map_err(|e| file.blame(&e))? {
        eprintln!("warning: {w}");
    }
    let stats = twdm_core::run(&cfg).map_err(|e| {
        eprintln!("error: {e}");
        CliError::Runs(1)
    })?;
    println!("{CSV_HEADER},unstable");
    println!("{},{}", csv_row(&cfg, &stats), u8::from(stats.unstable));
    Ok(())
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let mut file = match &args.config {
        Some(path) => ExperimentFile::load(path)?,
        None => ExperimentFile::empty("<defaults>"),
    };
    if let Some(t) = args.runtime {
        file.base.run_time = t;
    }
    if let Some(pairs) = &args.single {
        return single(&file, pairs);
    }
    let seed = base_seed(&file)?;
    let plan = match args.fig {
        Some(fig) => figure_plan(fig, &file, seed, args.seeds)?,
        None => sweep_plan(&file, seed, args.seeds)?,
    };
    eprintln!("{}: {} runs", plan.name, plan.points.len());
    let outcome = runner::execute(&plan, args.jobs);
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| format!("generated at unix time {}", d.as_secs()))
        .unwrap_or_default();
    let written = runner::write_outputs(&args.out, &plan, &outcome, &stamp).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    let mut failed = 0;
    for (p, r) in plan.points.iter().zip(&outcome.results) {
        match r {
            Ok(s) if s.unstable => eprintln!(
                "warning: {} L={} seed={} is unstable (queues keep growing)",
                p.series, p.cfg.load, p.cfg.rng_seed
            ),
            Ok(_) => {}
            Err(e) => {
                failed += 1;
                eprintln!("error: {} L={} seed={}: {e}", p.series, p.cfg.load, p.cfg.rng_seed);
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Runs(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Runs(_) => 1,
                _ => 2,
            })
        }
    }
}

//! Command line front end: single runs from a scenario file and multi-seed
//! parameter sweeps (custom files or built-in presets), CSV output.
//!
//! Exit codes: 0 on success, 2 on a config/usage error, 3 when a run hit the
//! step cap before finishing its task.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use atrc::config::{self, SweepSpec};
use atrc::engine::{self, Mode, RunLog};
use atrc::metrics::{self, MetricsRecord};
use atrc::pheromone::FieldKind;

#[derive(Parser)]
#[command(name = "atrc", about = "Swarm mine-clearing simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its metrics.
    Run(RunArgs),
    /// Run a parameter sweep and write aggregated CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's mode (oe, ers, erp).
    #[arg(long)]
    mode: Option<String>,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: $ATRC_OUT_DIR or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-step pheromone field dumps next to the metrics.
    #[arg(long)]
    field_dump: bool,
    /// Print every packet transmission.
    #[arg(long)]
    packet_trace: bool,
    /// Print every robot move.
    #[arg(long)]
    robot_trace: bool,
    /// Also write the full event log.
    #[arg(long)]
    log: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep file (scenario plus a [sweep] section).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in study: fig14..fig19 or ias_ss_compare.
    #[arg(long)]
    preset: Option<String>,
    /// Override the seed range as START..END.
    #[arg(long)]
    seeds: Option<String>,
    /// Output directory (default: $ATRC_OUT_DIR or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    parallel: Option<usize>,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("ATRC_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(format_args!("{}: {e}", args.config.display())),
    };
    let mut cfg = match config::parse_scenario(&text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(mode) = &args.mode {
        cfg.mode = match mode.as_str() {
            "oe" => Mode::Oe,
            "ers" => Mode::Ers,
            "erp" => Mode::Erp,
            other => return fail(format_args!("unknown mode `{other}`")),
        };
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let dir = out_dir(args.out);
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return fail(format_args!("{}: {e}", dir.display()));
    }

    let mut dump_file = if args.field_dump {
        let path = dir.join(format!("fields_seed{}.txt", cfg.seed));
        match std::fs::File::create(&path) {
            Ok(f) => Some(std::io::BufWriter::new(f)),
            Err(e) => return fail(format_args!("{}: {e}", path.display())),
        }
    } else {
        None
    };
    let mut dump = |step: u64, field: &atrc::pheromone::PheromoneField| {
        let Some(f) = dump_file.as_mut() else { return };
        writeln!(f, "step {step}").unwrap();
        for y in 0..field.height() as i32 {
            for x in 0..field.width() as i32 {
                let c = atrc::world::CellCoord::new(x, y);
                let tau = field.sense(FieldKind::Repellent, c);
                let theta = field.sense(FieldKind::Attractive, c);
                if tau != 0.0 || theta != 0.0 {
                    writeln!(f, "{x} {y} {tau:.9} {theta:.9}").unwrap();
                }
            }
        }
    };
    let observer: Option<engine::FieldObserver> = if args.field_dump {
        Some(&mut dump)
    } else {
        None
    };

    let log = match engine::run_with_observer(&cfg, observer) {
        Ok(l) => l,
        Err(e) => return fail(e),
    };
    if args.packet_trace || args.robot_trace {
        print_traces(&log, args.packet_trace, args.robot_trace);
    }
    if args.log {
        let path = dir.join(format!("run_seed{}.log", cfg.seed));
        if let Err(e) = std::fs::write(&path, log.to_bytes()) {
            return fail(format_args!("{}: {e}", path.display()));
        }
    }
    let rec = metrics::evaluate(&log);
    println!("{}", MetricsRecord::csv_header());
    println!("{}", rec.csv_row());
    if log.capped {
        eprintln!("run hit max_steps = {} before finishing", cfg.max_steps);
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn print_traces(log: &RunLog, packets: bool, moves: bool) {
    for e in &log.events {
        match e {
            engine::Event::Send {
                step,
                kind,
                sender,
                receiver,
                coordinator,
                task_id,
            } if packets => {
                let rx = receiver
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "*".to_string());
                println!(
                    "t={step} {:<8} {sender} -> {rx} (task {coordinator}/{task_id})",
                    kind.as_str()
                );
            }
            engine::Event::Move { step, robot, from, to } if moves => {
                println!("t={step} robot {robot} {from} -> {to}");
            }
            _ => {}
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> ExitCode {
    let mut spec: SweepSpec = if let Some(name) = &args.preset {
        match config::preset(name) {
            Ok(s) => s,
            Err(e) => return fail(e),
        }
    } else if let Some(path) = &args.config {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(format_args!("{}: {e}", path.display())),
        };
        match config::parse_sweep(&text) {
            Ok(s) => s,
            Err(e) => return fail(e),
        }
    } else {
        return fail("either --config or --preset is required");
    };
    if let Some(seeds) = &args.seeds {
        let Some((a, b)) = seeds.split_once("..") else {
            return fail("--seeds expects START..END");
        };
        match (a.parse(), b.parse()) {
            (Ok(lo), Ok(hi)) if lo < hi => spec.seeds = lo..hi,
            _ => return fail("--seeds expects START..END with START < END"),
        }
    }
    if let Some(n) = args.parallel {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(e);
        }
    }
    let configs = spec.expand();
    for cfg in &configs {
        if let Err(e) = cfg.validate() {
            return fail(format_args!(
                "sweep point (mode={}, seed={}) invalid: {e}",
                cfg.mode.as_str(),
                cfg.seed
            ));
        }
    }
    // expansion order is mode-major, then axis value, then seed; par_iter
    // keeps that order, so records can be zipped back to their sweep point
    let mut points: Vec<(Mode, f64)> = Vec::with_capacity(configs.len());
    for &mode in &spec.modes {
        for &v in &spec.values {
            for _ in spec.seeds.clone() {
                points.push((mode, v));
            }
        }
    }
    debug_assert_eq!(points.len(), configs.len());
    eprintln!("sweep `{}`: {} runs", spec.name, configs.len());
    let results: Vec<Result<MetricsRecord, engine::ConfigError>> = configs
        .par_iter()
        .map(|cfg| engine::run(cfg).map(|log| metrics::evaluate(&log)))
        .collect();

    let dir = out_dir(args.out);
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return fail(format_args!("{}: {e}", dir.display()));
    }
    let runs_path = dir.join(format!("{}_runs.csv", spec.name));
    let agg_path = dir.join(format!("{}_summary.csv", spec.name));
    let mut runs = String::new();
    runs.push_str(MetricsRecord::csv_header());
    runs.push('\n');
    let mut records = Vec::new();
    for r in results {
        match r {
            Ok(rec) => {
                runs.push_str(&rec.csv_row());
                runs.push('\n');
                records.push(rec);
            }
            Err(e) => return fail(e),
        }
    }
    if let Err(e) = std::fs::write(&runs_path, runs) {
        return fail(format_args!("{}: {e}", runs_path.display()));
    }

    // aggregate per (mode, axis value)
    let mut agg = String::from(
        "mode,axisValue,runs,meanSteps,stdSteps,ci95Steps,meanObjective,stdObjective,\
         ci95Objective,meanOverhead,meanCoverage,cappedRuns\n",
    );
    let mut groups: std::collections::BTreeMap<(String, String), Vec<&MetricsRecord>> =
        Default::default();
    for (rec, &(_, value)) in records.iter().zip(&points) {
        let axis_value = match spec.axis {
            config::Axis::Robots | config::Axis::Mines | config::Axis::GridSize => {
                format!("{}", value as u64)
            }
            config::Axis::A1 | config::Axis::A2 | config::Axis::Rho => format!("{value:.4}"),
        };
        groups.entry((rec.mode.clone(), axis_value)).or_default().push(rec);
    }
    for ((mode, value), recs) in &groups {
        let steps: Vec<f64> = recs.iter().map(|r| r.total_steps as f64).collect();
        let objs: Vec<f64> = recs.iter().map(|r| r.objective).collect();
        let overheads: Vec<f64> = recs.iter().map(|r| r.overhead_total as f64).collect();
        let coverage: Vec<f64> = recs.iter().map(|r| r.coverage).collect();
        let capped = recs.iter().filter(|r| r.capped).count();
        let s = metrics::aggregate(&steps);
        let o = metrics::aggregate(&objs);
        let ov = metrics::aggregate(&overheads);
        let cv = metrics::aggregate(&coverage);
        agg.push_str(&format!(
            "{mode},{value},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.6},{capped}\n",
            recs.len(),
            s.mean,
            s.std_dev,
            s.ci95,
            o.mean,
            o.std_dev,
            o.ci95,
            ov.mean,
            cv.mean,
        ));
    }
    if let Err(e) = std::fs::write(&agg_path, agg) {
        return fail(format_args!("{}: {e}", agg_path.display()));
    }
    println!("{}", runs_path.display());
    println!("{}", agg_path.display());
    let capped_total = records.iter().filter(|r| r.capped).count();
    if capped_total > 0 {
        eprintln!("{capped_total} of {} runs hit the step cap", records.len());
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

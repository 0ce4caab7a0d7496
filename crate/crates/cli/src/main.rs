use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tecsim::checks::{calibrate, determinism_check, golden_check, load_record, representative_check, routing_check};
use tecsim::{emit_plot_data, init_threads, run, ExperimentConfig, Overrides};
use tecsim_core::layout::melbourne_map;

#[derive(Parser)]
#[command(name = "tecsim", version, about = "Teleportation-based error correction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (flags override file values).
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Density-matrix bar data (CSV) from a run record with tomography.
    Plot {
        #[arg(long)]
        record: PathBuf,
        #[arg(long, default_value_t = 0)]
        case: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisect p1 = p2 until the decoded fidelity lands in [low, high].
    Calibrate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value_t = 0.80)]
        low: f64,
        #[arg(long, default_value_t = 0.86)]
        high: f64,
        #[arg(long, default_value_t = 0.1)]
        p_max: f64,
    },
    /// Representative table and agreement of equivalent logical operators.
    Reps {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare constructed encoded states with golden amplitude files.
    Golden {
        #[arg(long, default_value = "crates/core/tests/golden")]
        dir: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Route both pipelines onto Melbourne plus random circuits onto random maps.
    Route {
        #[arg(long, default_value_t = 200)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a config twice and compare the outputs byte for byte.
    Determinism {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the Melbourne coupling map as JSON.
    Map,
}

fn config_from(path: &Option<PathBuf>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let base = path.as_deref().map(ExperimentConfig::load).transpose()?;
    overrides.apply(base)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    init_threads()?;
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = config_from(&config, &overrides)?;
            let record = run(&cfg)?;
            emit(&record.render(cfg.output.format), cfg.output.path.as_ref())?;
            Ok(true)
        }
        Command::Plot { record, case, out } => {
            emit(&emit_plot_data(&load_record(&record)?, case)?, out.as_ref())?;
            Ok(true)
        }
        Command::Calibrate {
            config,
            overrides,
            low,
            high,
            p_max,
        } => {
            let cfg = config_from(&config, &overrides)?;
            let cal = calibrate(&cfg, low, high, p_max)?;
            emit(&pretty(&cal), cfg.output.path.as_ref())?;
            Ok(cal.in_band)
        }
        Command::Reps { samples, seed } => {
            let r = representative_check(samples, seed)?;
            print!("{}", pretty(&r));
            Ok(r.max_x_difference < 1e-10 && r.max_z_difference < 1e-10)
        }
        Command::Golden { dir, tol } => {
            let results = golden_check(&dir)?;
            print!("{}", pretty(&results));
            Ok(results.iter().all(|g| g.max_deviation < tol))
        }
        Command::Route { random, seed } => {
            let r = routing_check(random, seed)?;
            print!("{}", pretty(&r));
            Ok(r.random_violations == 0
                && r.random_max_error < 1e-8
                && r.pipelines
                    .iter()
                    .all(|p| p.violations_allow_reversed == 0 && p.truncated_error < 1e-8))
        }
        Command::Determinism { config, overrides } => {
            let cfg = config_from(&config, &overrides)?;
            let (same, len) = determinism_check(&cfg)?;
            println!("{} ({len} bytes)", if same { "identical" } else { "DIFFERENT" });
            Ok(same)
        }
        Command::Map => {
            print!("{}\n", melbourne_map().to_json());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

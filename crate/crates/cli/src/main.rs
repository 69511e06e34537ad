//! `tfrs` — experiment CLI.
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 solver failure
//! budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tfrs_cli::{
    emit_figure_data, load_config, preset, run_experiment, ExperimentReport, FigureId, RunError,
};

#[derive(Parser)]
#[command(name = "tfrs", about = "Compressive Rihaczek-spectrum estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment sweep.
    Run {
        /// JSON experiment config file.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Built-in preset (ofdm-desk, ofdm-paper, chirp-desk, chirp-paper).
        #[arg(long)]
        preset: Option<String>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for report and matrices.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Thread-pool size (also via TFRS_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Export plot-ready figure data from a finished report.
    Export {
        /// Path of a report.json produced by `run`.
        #[arg(long)]
        report: PathBuf,
        /// Figure identifier: fig1..fig6.
        #[arg(long)]
        figure: String,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RunError::SolverBudget { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn real_main() -> Result<(), RunError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            preset: preset_name,
            seed,
            out,
            threads,
        } => {
            let threads = threads.or_else(|| {
                std::env::var("TFRS_THREADS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            });
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .map_err(|e| RunError::Config(e.to_string()))?;
            }
            let mut cfg = match (config, preset_name) {
                (Some(path), None) => load_config(&path)?,
                (None, Some(name)) => preset(&name)?,
                _ => {
                    return Err(RunError::Config(
                        "provide exactly one of --config or --preset".into(),
                    ))
                }
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(dir) = out {
                cfg.outputs = Some(dir);
            }
            let report = run_experiment(&cfg)?;
            for point in &report.points {
                for stats in &point.stats {
                    println!(
                        "S'/P = {:.2} (P = {:3}) {:>7}: NMSE {:.4e}  bias² {:.4e}  var {:.4e}",
                        point.factor,
                        point.p_count,
                        stats.estimator,
                        stats.nmse,
                        stats.bias_sq_norm,
                        stats.var_norm
                    );
                }
            }
            println!("wall clock: {:.1} s", report.wall_clock_secs);
            if let Some(dir) = &report.config.outputs {
                println!("artifacts in {}", dir.display());
            }
            Ok(())
        }
        Command::Export { report, figure } => {
            let text = std::fs::read_to_string(&report)?;
            let parsed: ExperimentReport = serde_json::from_str(&text)
                .map_err(|e| RunError::Config(format!("{}: {e}", report.display())))?;
            let dir = report
                .parent()
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            let figure: FigureId = figure.parse().map_err(RunError::Config)?;
            let written = emit_figure_data(&parsed, &dir, figure)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

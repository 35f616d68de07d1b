use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use moorcast_core::config::Config;
use moorcast_core::dataset::{load_table, save_table, Split, TrainingTable};
use moorcast_core::heading::HeadingSolver;
use moorcast_core::metocean::{load_metocean_csv, parse_metocean_row, sample_metocean, save_metocean_csv, MetoceanState};
use moorcast_core::mooring::extreme_line_tensions;
use moorcast_core::pipeline::{run_fd, run_pipeline};
use moorcast_core::qd::qd_mpm;
use moorcast_core::response::{save_responses_csv, screen};
use moorcast_ml::search::{random_search, SearchSpace};
use moorcast_ml::Dataset;
use moorcast_serve::api::{router, spawn_forecast_poller, AppState, FileForecastSource};
use moorcast_serve::ingest::IngestConfig;
use moorcast_serve::train::evaluate_bundle;
use moorcast_serve::{load_bundle, predict_responses, save_bundle, train_bundle, PredictOptions, TrainOptions};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "moorcast", version, about = "Mooring response surrogates for a turret-moored vessel")]
struct Cli {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override for the command's random stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path; stdout when omitted for text outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample states, run heading/FD/screening/QD and write the training table.
    Generate {
        #[arg(long)]
        n: Option<usize>,
        /// Also write the sampled states here.
        #[arg(long)]
        states_out: Option<PathBuf>,
    },
    /// Equilibrium heading of one metocean CSV row.
    Heading {
        #[arg(long)]
        state: String,
    },
    /// FD statistics and screening for a metocean CSV file.
    Screen {
        #[arg(long)]
        states: PathBuf,
    },
    /// QD statistics for one metocean CSV row.
    Simulate {
        #[arg(long)]
        state: String,
    },
    /// Fit every target and write a model bundle.
    Train {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        cv_folds: usize,
        /// Write the training report (metrics, search history) as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Random search for one target.
    Tune {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "mpm_offset")]
        target: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        cv_folds: usize,
    },
    /// Metrics of a bundle on a table split.
    Evaluate {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "validation")]
        split: String,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Forecast CSV polled on the ingest cadence.
        #[arg(long)]
        forecast: Option<PathBuf>,
        /// Hours between forecast ingests.
        #[arg(long)]
        forecast_cadence_h: Option<f64>,
        /// Relative domain margin as a fraction of each feature span.
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
    },
    /// Predict responses for one metocean CSV row.
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        #[arg(long)]
        allow_extrapolation: bool,
    },
    /// Line tensions at a turret offset.
    Mooring {
        /// East,north offset in m.
        #[arg(long, value_parser = parse_offset, allow_hyphen_values = true)]
        offset: [f64; 2],
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    let cfg = match path {
        Some(p) => Config::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => Config::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn require_out(out: Option<&Path>, what: &str) -> anyhow::Result<PathBuf> {
    match out {
        Some(p) => Ok(p.to_path_buf()),
        None => bail!("--out is required for {what}"),
    }
}

fn parse_state(row: &str) -> anyhow::Result<MetoceanState> {
    parse_metocean_row(row).context("parsing --state (a metocean CSV data row)")
}

fn parse_offset(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [x, y] => Ok([
            x.trim().parse().map_err(|e| format!("east offset: {e}"))?,
            y.trim().parse().map_err(|e| format!("north offset: {e}"))?,
        ]),
        _ => Err("expected `east,north` in metres".into()),
    }
}

fn parse_split(s: &str) -> anyhow::Result<Split> {
    match s {
        "train" => Ok(Split::Train),
        "validation" => Ok(Split::Validation),
        _ => bail!("split must be `train` or `validation`"),
    }
}

fn load_training_table(p: &Path) -> anyhow::Result<TrainingTable> {
    load_table(p).with_context(|| format!("loading table {}", p.display()))
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let cli = Cli::parse();
    let mut cfg = load_config(cli.config.as_deref())?;
    let out = cli.out.as_deref();

    match cli.cmd {
        Cmd::Generate { n, states_out } => {
            if let Some(seed) = cli.seed {
                cfg.sampling.seed = seed;
            }
            let n = n.unwrap_or(cfg.sampling.n_states);
            let states = sample_metocean(n, cfg.sampling.seed, &cfg.sampling.bounds)?;
            if let Some(p) = states_out {
                save_metocean_csv(&p, &states)?;
            }
            let path = require_out(out, "generate")?;
            let run = run_pipeline(&cfg, &states)?;
            save_table(&path, &run.table)?;
            for f in &run.failures {
                tracing::warn!(id = %f.id, stage = ?f.stage, message = %f.message, "state dropped");
            }
            eprintln!(
                "{} states, {} flagged for QD ({:.2}%), {} dropped, table at {}",
                n,
                run.screen.flagged.len(),
                100.0 * run.screen.fraction,
                run.failures.len(),
                path.display()
            );
        }
        Cmd::Heading { state } => {
            let s = parse_state(&state)?;
            let h = HeadingSolver::new(cfg.heading).solve(&cfg.vessel, &s)?;
            emit(&h, out)?;
        }
        Cmd::Screen { states } => {
            let states = load_metocean_csv(&states)?;
            let sys = cfg.mooring_system()?;
            let fd = run_fd(&cfg, &sys, &states);
            let outcome = screen(&fd.records, &sys, &cfg.fd.screening);
            if let Some(p) = out {
                save_responses_csv(p, &fd.records)?;
            }
            emit(&serde_json::json!({ "screen": outcome, "failures": fd.failures }), None)?;
        }
        Cmd::Simulate { state } => {
            if let Some(seed) = cli.seed {
                cfg.qd.seed = seed;
            }
            let s = parse_state(&state)?;
            let sys = cfg.mooring_system()?;
            let h = HeadingSolver::new(cfg.heading).solve(&cfg.vessel, &s)?;
            let stats = qd_mpm(&sys, &cfg.vessel, &s, h.phi_eq, &cfg.qd)?;
            emit(&stats, out)?;
        }
        Cmd::Train {
            table,
            trials,
            cv_folds,
            report,
        } => {
            let t = load_training_table(&table)?;
            let opts = TrainOptions {
                n_trials: trials,
                cv_folds,
                seed: cli.seed.unwrap_or(0),
                ..TrainOptions::default()
            };
            let path = require_out(out, "train")?;
            let (bundle, rep) = train_bundle(&t, &cfg, &opts)?;
            let id = save_bundle(&bundle, &path)?;
            if let Some(p) = report {
                emit(&rep, Some(&p))?;
            }
            emit(&bundle.metrics, None)?;
            eprintln!("bundle {id} written to {}", path.display());
        }
        Cmd::Tune {
            table,
            target,
            trials,
            cv_folds,
        } => {
            let t = load_training_table(&table)?;
            let j = TrainingTable::target_index(&target).with_context(|| format!("unknown target `{target}`"))?;
            let d = Dataset::from_table(&t, j, Split::Train)?;
            let res = random_search(&d, &SearchSpace::Gbm(Default::default()), trials, cli.seed.unwrap_or(0), cv_folds)?;
            emit(&res, out)?;
        }
        Cmd::Evaluate { bundle, table, split } => {
            let b = load_bundle(&bundle)?;
            let t = load_training_table(&table)?;
            emit(&evaluate_bundle(&b, &t, parse_split(&split)?)?, out)?;
        }
        Cmd::Serve {
            bundle,
            addr,
            forecast,
            forecast_cadence_h,
            margin,
        } => {
            let b = load_bundle(&bundle)?;
            let state = AppState::new(b, margin);
            tracing::info!(bundle = %state.bundle.version(), %addr, "serving");
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                if let Some(path) = forecast {
                    let cadence = forecast_cadence_h.unwrap_or(IngestConfig::default().forecast_cadence_h);
                    spawn_forecast_poller(
                        state.clone(),
                        Arc::new(FileForecastSource { path }),
                        Duration::from_secs_f64(cadence * 3600.0),
                    );
                }
                let listener = tokio::net::TcpListener::bind(addr).await?;
                axum::serve(listener, router(state)).await?;
                anyhow::Ok(())
            })?;
        }
        Cmd::Predict {
            bundle,
            state,
            margin,
            allow_extrapolation,
        } => {
            let b = load_bundle(&bundle)?;
            let s = parse_state(&state)?;
            let opts = PredictOptions {
                margin,
                allow_extrapolation,
            };
            emit(&predict_responses(&b, &s, &opts)?, out)?;
        }
        Cmd::Mooring { offset } => {
            let sys = cfg.mooring_system()?;
            let x = offset;
            let (force, lines) = moorcast_core::mooring::system_restoring(&sys, x)?;
            let extremes = extreme_line_tensions(&sys, x)?;
            emit(
                &serde_json::json!({ "offset": x, "restoring_force": force, "lines": lines, "extremes": extremes }),
                out,
            )?;
        }
    }
    Ok(())
}

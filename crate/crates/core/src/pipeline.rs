//! Dataset generation: heading → FD → screening → QD → table, parallel
//! across states with results kept in input order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::dataset::{assemble_dataset, TrainingTable};
use crate::error::Result;
use crate::heading::{HeadingSolution, HeadingSolver};
use crate::metocean::MetoceanState;
use crate::mooring::{MooringSystem, TabulatedSpread};
use crate::qd::QdModel;
use crate::response::{fd_response, screen, ResponseRecord, ScreenOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Heading,
    Fd,
    Qd,
}

/// A state dropped from the run, with the stage that rejected it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFailure {
    pub id: String,
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct FdRun {
    /// States that survived the heading and FD stages, in input order.
    pub states: Vec<MetoceanState>,
    pub headings: Vec<HeadingSolution>,
    pub records: Vec<ResponseRecord>,
    pub failures: Vec<StateFailure>,
}

pub fn run_fd(cfg: &Config, sys: &MooringSystem, states: &[MetoceanState]) -> FdRun {
    let solver = HeadingSolver::new(cfg.heading);
    let results: Vec<std::result::Result<(HeadingSolution, ResponseRecord), StateFailure>> = states
        .par_iter()
        .map(|s| {
            let fail = |stage, e: crate::CoreError| StateFailure {
                id: s.id.clone(),
                stage,
                message: e.to_string(),
            };
            let h = solver.solve(&cfg.vessel, s).map_err(|e| fail(Stage::Heading, e))?;
            let stats = fd_response(sys, &cfg.vessel, s, h.phi_eq, &cfg.fd).map_err(|e| fail(Stage::Fd, e))?;
            Ok((h, ResponseRecord { id: s.id.clone(), stats }))
        })
        .collect();

    let mut run = FdRun {
        states: Vec::new(),
        headings: Vec::new(),
        records: Vec::new(),
        failures: Vec::new(),
    };
    for (s, r) in states.iter().zip(results) {
        match r {
            Ok((h, rec)) => {
                run.states.push(s.clone());
                run.headings.push(h);
                run.records.push(rec);
            }
            Err(f) => run.failures.push(f),
        }
    }
    run
}

/// QD statistics for the flagged ids. States whose simulation fails are
/// returned as failures instead.
pub fn run_qd(
    cfg: &Config,
    sys: &MooringSystem,
    fd: &FdRun,
    flagged: &[String],
) -> Result<(Vec<ResponseRecord>, Vec<StateFailure>)> {
    let spread = TabulatedSpread::new(sys)?;
    let model = QdModel { sys, spread: &spread };
    let index: std::collections::HashMap<&str, usize> =
        fd.states.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let results: Vec<_> = flagged
        .par_iter()
        .map(|id| {
            let i = index[id.as_str()];
            model
                .mpm(&cfg.vessel, &fd.states[i], fd.headings[i].phi_eq, &cfg.qd)
                .map(|stats| ResponseRecord { id: id.clone(), stats })
                .map_err(|e| StateFailure {
                    id: id.clone(),
                    stage: Stage::Qd,
                    message: e.to_string(),
                })
        })
        .collect();
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(rec) => ok.push(rec),
            Err(f) => failed.push(f),
        }
    }
    Ok((ok, failed))
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub fd: FdRun,
    pub screen: ScreenOutcome,
    pub qd: Vec<ResponseRecord>,
    /// Heading, FD and QD failures; none of these states enter the table.
    pub failures: Vec<StateFailure>,
    pub table: TrainingTable,
}

pub fn run_pipeline(cfg: &Config, states: &[MetoceanState]) -> Result<PipelineOutput> {
    cfg.validate()?;
    let sys = cfg.mooring_system()?;
    let fd = run_fd(cfg, &sys, states);
    let screened = screen(&fd.records, &sys, &cfg.fd.screening);
    let (qd, qd_failures) = run_qd(cfg, &sys, &fd, &screened.flagged)?;

    let dropped: std::collections::HashSet<&str> = qd_failures.iter().map(|f| f.id.as_str()).collect();
    let keep = |id: &str| !dropped.contains(id);
    let states_kept: Vec<MetoceanState> = fd.states.iter().filter(|s| keep(&s.id)).cloned().collect();
    let fd_kept: Vec<ResponseRecord> = fd.records.iter().filter(|r| keep(&r.id)).cloned().collect();
    let flagged_kept: Vec<String> = screened.flagged.iter().filter(|id| keep(id)).cloned().collect();
    let table = assemble_dataset(
        &states_kept,
        &fd_kept,
        &qd,
        &flagged_kept,
        cfg.split.validation_fraction,
        cfg.split.seed,
    )?;

    let mut failures = fd.failures.clone();
    failures.extend(qd_failures);
    Ok(PipelineOutput {
        fd,
        screen: screened,
        qd,
        failures,
        table,
    })
}

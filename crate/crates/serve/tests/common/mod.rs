#![allow(dead_code)]

use std::sync::OnceLock;

use moorcast_core::config::Config;
use moorcast_core::dataset::{assemble_dataset, TrainingTable};
use moorcast_core::metocean::{sample_metocean, MetoceanState};
use moorcast_core::pipeline::run_fd;
use moorcast_serve::{train_bundle, ModelBundle, TrainOptions};

pub struct Fixture {
    pub cfg: Config,
    pub states: Vec<MetoceanState>,
    pub table: TrainingTable,
    pub bundle: ModelBundle,
}

/// A small FD-only table and a baseline-parameter bundle trained on it.
pub fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let cfg = Config::default();
        let sys = cfg.mooring_system().unwrap();
        let states = sample_metocean(400, 3, &cfg.sampling.bounds).unwrap();
        let fd = run_fd(&cfg, &sys, &states);
        assert!(fd.failures.is_empty());
        let table = assemble_dataset(&fd.states, &fd.records, &[], &[], 0.2, 5).unwrap();
        let opts = TrainOptions {
            n_trials: 0,
            seed: 9,
            ..TrainOptions::default()
        };
        let (bundle, _) = train_bundle(&table, &cfg, &opts).unwrap();
        Fixture {
            cfg,
            states: fd.states,
            table,
            bundle,
        }
    })
}

pub fn state(id: &str) -> &'static MetoceanState {
    fixture().states.iter().find(|s| s.id == id).unwrap()
}

/// A training-split state.
pub fn train_state() -> &'static MetoceanState {
    let f = fixture();
    let i = f.table.rows(moorcast_core::dataset::Split::Train)[0];
    state(&f.table.ids[i])
}

/// A state with the wind-sea height above the training maximum.
pub fn out_of_domain_state() -> MetoceanState {
    let f = fixture();
    let hs_max = f.bundle.bounds.iter().find(|b| b.name == "hs1").unwrap().max;
    let mut s = train_state().clone();
    s.wave1.hs = hs_max + 1.0;
    s.wave1.tp = 16.0;
    s
}

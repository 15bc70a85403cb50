//! Configurable experiments with CSV and JSON output.
//!
//! Every Monte Carlo run seeds replicate `j` of target size `n` with
//! `derive_seed(derive_seed(seed, n), j)`, so outputs do not depend on the
//! number of worker threads.

pub mod checks;
pub mod config;
pub mod output;
pub mod runs;

pub use checks::{oracle_checks, run_lemma_suite, run_oracle, CheckSummary};
pub use config::{linspace, parse_grid, ExperimentConfig, ExperimentKind};
pub use output::{ExperimentOutput, Table};
pub use runs::{run_scan, run_transition, run_valleys, run_var_scaling, valley_replicate, valley_schedule, ValleySample, ValleySchedule};

use crate::error::{Error, Result};

/// Process exit status for an experiment outcome.
pub fn exit_code(result: &Result<ExperimentOutput>) -> i32 {
    match result {
        Ok(out) if out.failed => 2,
        Ok(_) => 0,
        Err(Error::CensoringBudget { .. }) | Err(Error::AllCensored) => 3,
        Err(_) => 1,
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Scan => run_scan(cfg),
        ExperimentKind::Transition => run_transition(cfg),
        ExperimentKind::Valleys => run_valleys(cfg),
        ExperimentKind::VarScaling => run_var_scaling(cfg),
        ExperimentKind::Oracle => run_oracle(cfg),
        ExperimentKind::Lemmas => run_lemma_suite(cfg),
    }
}

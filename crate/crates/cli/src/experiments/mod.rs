//! The eight experiments, one per subcommand.
//!
//! Concurrency contract: work is split into fixed chunks indexed by chain or
//! replica ranges, every chunk derives its random streams from
//! `chain_seed(root, index)`, and partial results are reduced in index
//! order. Results are therefore identical for any worker count.

use anyhow::Result;
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::report::SummaryRow;

pub mod bias_sweep;
pub mod decreasing_rate;
pub mod density_check;
pub mod drift_check;
pub mod ergodicity;
pub mod moment_check;
pub mod one_step_order;
pub mod schedule_diag;

/// What one experiment produces: the records CSV body (schema varies by
/// experiment) and the summary rows with pass flags.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records_csv: String,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentOutput {
    pub fn all_pass(&self) -> bool {
        self.summary.iter().all(|row| row.pass)
    }
}

/// Run the experiment selected by the config (inside the caller's thread
/// pool).
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        Experiment::BiasSweep => bias_sweep::run(cfg),
        Experiment::Ergodicity => ergodicity::run(cfg),
        Experiment::DecreasingRate => decreasing_rate::run(cfg),
        Experiment::OneStepOrder => one_step_order::run(cfg),
        Experiment::DriftCheck => drift_check::run(cfg),
        Experiment::ScheduleDiag => schedule_diag::run(cfg),
        Experiment::DensityCheck => density_check::run(cfg),
        Experiment::MomentCheck => moment_check::run(cfg),
    }
}

/// Order-preserving parallel map over `0..n`.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Split `total` items into chunks of at most `chunk_len`, returning
/// `(chunk_index, start, len)` triples.
pub(crate) fn chunks(total: usize, chunk_len: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut index = 0;
    while start < total {
        let len = chunk_len.min(total - start);
        out.push((index, start, len));
        start += len;
        index += 1;
    }
    out
}

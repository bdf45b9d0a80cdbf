//! Experiment runner around the `rlmc` library: config handling, the eight
//! experiments, and deterministic CSV emission.

use std::path::PathBuf;

use anyhow::{Context, Result};

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::ExperimentOutput;
use report::{summary_to_csv, SummaryRow};

/// Everything one invocation produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub all_pass: bool,
    pub summary: Vec<SummaryRow>,
    pub records_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Run the configured experiment inside a worker pool of `cfg.workers`
/// threads (0 = all cores) and write the records CSV and the summary file.
///
/// Outputs are deterministic in `(config, seed)` and independent of the
/// worker count.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .context("building worker pool")?;
    let output = pool.install(|| experiments::run(cfg))?;

    let records_path = cfg.out.clone();
    let summary_path = cfg.summary_path();
    std::fs::write(&records_path, &output.records_csv)
        .with_context(|| format!("writing {}", records_path.display()))?;
    std::fs::write(&summary_path, summary_to_csv(&output.summary))
        .with_context(|| format!("writing {}", summary_path.display()))?;

    Ok(RunOutcome {
        all_pass: output.all_pass(),
        summary: output.summary,
        records_path,
        summary_path,
    })
}

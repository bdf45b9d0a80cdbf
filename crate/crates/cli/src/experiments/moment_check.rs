//! Moment check of the decreasing-step chain: simulated second moments at
//! the checkpoints against the deterministic recursion oracle, plus a
//! uniform-boundedness envelope over the whole trajectory.

use anyhow::{bail, Context, Result};
use rlmc::oracle::moment_recursion;
use rlmc::sampler::run_decreasing;
use rlmc::{chain_seed, RngStreams};

use crate::config::ExperimentConfig;
use crate::experiments::{chunks, par_map, ExperimentOutput};
use crate::report::{records_to_csv, ResultRecord, SummaryRow};

const CHAIN_CHUNK: usize = 256;

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.build_potential()?;
    let Some(diag) = p.quadratic_diag().map(<[f64]>::to_vec) else {
        bail!("moment-check requires a diagonal quadratic potential (recursion oracle needed)");
    };
    let schedule = cfg.build_schedule()?;
    let diagnosis = schedule.validate(p.m());
    if !diagnosis.valid_for_decreasing {
        bail!("invalid schedule: {}", diagnosis.reasons.join("; "));
    }
    if cfg.x0.len() != diag.len() {
        bail!("x0 dimension {} does not match the potential dimension {}", cfg.x0.len(), diag.len());
    }
    if cfg.checkpoints.is_empty() || cfg.checkpoints.iter().any(|&k| k > cfg.n_steps) {
        bail!("checkpoints must be nonempty and within n_steps = {}", cfg.n_steps);
    }
    if cfg.replicas < 2 {
        bail!("moment-check needs replicas >= 2 chains");
    }

    let oracle = moment_recursion(&diag, &schedule, &cfg.x0, cfg.n_steps)?;

    struct ChunkSums {
        /// Sum of V = |Y_{t_k}|^2 over the chunk's chains, for every k.
        per_k: Vec<f64>,
        /// Sum of V^2 at the checkpoints only (for standard errors).
        cp_sq: Vec<f64>,
    }

    let parts = chunks(cfg.replicas, CHAIN_CHUNK);
    let partials: Vec<Result<ChunkSums>> = par_map(parts.len(), |ci| {
        let (_, start, len) = parts[ci];
        let mut per_k = vec![0.0; cfg.n_steps + 1];
        let mut cp_sq = vec![0.0; cfg.checkpoints.len()];
        for chain in start..start + len {
            let mut rng = RngStreams::new(chain_seed(cfg.seed, chain as u64));
            let run = run_decreasing(&p, &schedule, &cfg.x0, cfg.n_steps, &mut rng, false)
                .context("decreasing chain")?;
            for (k, slot) in per_k.iter_mut().enumerate() {
                *slot += run.state(k).iter().map(|t| t * t).sum::<f64>();
            }
            for (sq, &k) in cp_sq.iter_mut().zip(&cfg.checkpoints) {
                let v: f64 = run.state(k).iter().map(|t| t * t).sum();
                *sq += v * v;
            }
        }
        Ok(ChunkSums { per_k, cp_sq })
    });

    let mut per_k = vec![0.0; cfg.n_steps + 1];
    let mut cp_sq = vec![0.0; cfg.checkpoints.len()];
    for partial in partials {
        let s = partial?;
        for (total, v) in per_k.iter_mut().zip(&s.per_k) {
            *total += v;
        }
        for (total, v) in cp_sq.iter_mut().zip(&s.cp_sq) {
            *total += v;
        }
    }

    let nf = cfg.replicas as f64;
    let mut records = Vec::new();
    let mut all_match = true;
    let mut max_se = 0.0f64;
    for (i, &k) in cfg.checkpoints.iter().enumerate() {
        let mean = per_k[k] / nf;
        let se = (((cp_sq[i] / nf - mean * mean).max(0.0)) / nf).sqrt();
        let target = oracle[k];
        let pass = (mean - target).abs() <= 4.0 * se;
        all_match &= pass;
        max_se = max_se.max(se);
        records.push(
            ResultRecord::new("moment-check", "mean_sq_mc", mean)
                .param("n", k as f64)
                .se(se)
                .pass(pass),
        );
        records.push(
            ResultRecord::new("moment-check", "mean_sq_oracle", target).param("n", k as f64),
        );
    }

    // Uniform boundedness: the whole simulated mean trajectory stays within
    // noise of the oracle envelope.
    let sup_mc = per_k.iter().map(|s| s / nf).fold(0.0f64, f64::max);
    let oracle_sup = oracle.iter().cloned().fold(0.0f64, f64::max);
    let bounded = sup_mc <= oracle_sup * 1.02 + 4.0 * max_se;
    let summary = vec![
        SummaryRow::scalar("moment_match_all_checkpoints", cfg.checkpoints.len() as f64, all_match),
        SummaryRow::scalar("moment_sup_bounded_by_oracle_envelope", sup_mc, bounded),
    ];

    // Optional trajectory dump of the first chain (identical draws to the
    // ensemble's chain 0).
    if let Some(path) = &cfg.traj {
        let mut rng = RngStreams::new(chain_seed(cfg.seed, 0));
        let run = run_decreasing(&p, &schedule, &cfg.x0, cfg.n_steps, &mut rng, false)?;
        let file = std::fs::File::create(path)
            .with_context(|| format!("creating trajectory dump {}", path.display()))?;
        run.write_csv(std::io::BufWriter::new(file)).context("writing trajectory dump")?;
    }

    Ok(ExperimentOutput { records_csv: records_to_csv(&records), summary })
}

//! Exponential-ergodicity experiment: two ensembles of fixed-step chains
//! started from different points, empirical Wasserstein-2 between them at
//! the checkpoints, and a semi-log decay fit.

use anyhow::{bail, Result};
use rlmc::metrics::{dg_proxy_1d, empirical_w_1d, slope_fit, TestFunctionSuite, WassersteinOrder};
use rlmc::sampler::fold_constant;
use rlmc::{chain_seed, Potential, RngStreams};

use crate::config::ExperimentConfig;
use crate::experiments::{chunks, par_map, ExperimentOutput};
use crate::report::{records_to_csv, ResultRecord, SummaryRow};

const CHAIN_CHUNK: usize = 2_048;

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.build_potential()?;
    if p.dim() != 1 {
        bail!("ergodicity is a one-dimensional experiment; got dim {}", p.dim());
    }
    let eta = cfg.constant_eta()?;
    if cfg.checkpoints.is_empty() || cfg.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        bail!("ergodicity needs strictly increasing checkpoints");
    }
    if cfg.replicas < 2 {
        bail!("ergodicity needs replicas >= 2 chains per ensemble");
    }
    if cfg.x0.len() != 1 || cfg.x0_secondary.len() != 1 {
        bail!("x0 and x0_secondary must be one-dimensional");
    }

    let ensemble_a = simulate_ensemble(cfg, &p, eta, cfg.x0[0], 0)?;
    let ensemble_b = simulate_ensemble(cfg, &p, eta, cfg.x0_secondary[0], cfg.replicas as u64)?;

    // W2 drives the decay fit; W1 and the test-function proxy are reported
    // as the upper/lower companion pair (suite members are 1-Lipschitz, so
    // proxy <= W1 <= W2 always holds on these records).
    let suite = TestFunctionSuite::standard(1);
    let mut records = Vec::new();
    let mut fit_points = Vec::new();
    let mut proxy_ordered = true;
    for (ci, &n) in cfg.checkpoints.iter().enumerate() {
        let (a, b) = (&ensemble_a[ci], &ensemble_b[ci]);
        let w2 = empirical_w_1d(a, b, WassersteinOrder::Two)?;
        let w1 = empirical_w_1d(a, b, WassersteinOrder::One)?;
        let proxy = dg_proxy_1d(a, b, &suite)?;
        let ordered = proxy <= w1 + 1e-12;
        proxy_ordered &= ordered;
        fit_points.push((n as f64, w2.ln()));
        records.push(
            ResultRecord::new("ergodicity", "w2_between_ensembles", w2).param("n", n as f64),
        );
        records.push(
            ResultRecord::new("ergodicity", "w1_between_ensembles", w1).param("n", n as f64),
        );
        records.push(
            ResultRecord::new("ergodicity", "suite_proxy_lower_bound", proxy)
                .param("n", n as f64)
                .pass(ordered),
        );
    }

    let fit = slope_fit(&fit_points)?;
    let pass = fit.slope < 0.0 && fit.r_squared >= 0.95;
    let summary = vec![
        SummaryRow::fitted("ergodicity_semilog_decay", fit, pass),
        SummaryRow::scalar(
            "suite_proxy_below_w1_all_checkpoints",
            cfg.checkpoints.len() as f64,
            proxy_ordered,
        ),
    ];
    Ok(ExperimentOutput { records_csv: records_to_csv(&records), summary })
}

/// Per-checkpoint chain values, chains ordered by global index.
fn simulate_ensemble(
    cfg: &ExperimentConfig,
    p: &Potential,
    eta: f64,
    x0: f64,
    chain_offset: u64,
) -> Result<Vec<Vec<f64>>> {
    let checkpoints = &cfg.checkpoints;
    let horizon = *checkpoints.last().unwrap();
    let parts = chunks(cfg.replicas, CHAIN_CHUNK);
    let partials: Vec<Result<Vec<Vec<f64>>>> = par_map(parts.len(), |ci| {
        let (_, start, len) = parts[ci];
        let mut local: Vec<Vec<f64>> = vec![Vec::with_capacity(len); checkpoints.len()];
        for chain in start..start + len {
            let mut rng = RngStreams::new(chain_seed(cfg.seed, chain_offset + chain as u64));
            let mut next_cp = 0usize;
            fold_constant(p, eta, &[x0], horizon, &mut rng, |k, x| {
                if next_cp < checkpoints.len() && k == checkpoints[next_cp] {
                    local[next_cp].push(x[0]);
                    next_cp += 1;
                }
            })?;
        }
        Ok(local)
    });

    let mut ensemble: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.replicas); checkpoints.len()];
    for partial in partials {
        let local = partial?;
        for (ci, values) in local.into_iter().enumerate() {
            ensemble[ci].extend(values);
        }
    }
    Ok(ensemble)
}

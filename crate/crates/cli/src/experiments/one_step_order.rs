//! One-step discretization orders over a step-size grid, from synchronously
//! coupled pairs: pathwise error and exact increment for the strong orders,
//! common-random-number mean differences of two smooth test functions for
//! the weak order.

use anyhow::{bail, Result};
use rlmc::metrics::{slope_fit, TestFunction};
use rlmc::sampler::CoupledKernel;
use rlmc::{chain_seed, RngStreams};

use crate::config::ExperimentConfig;
use crate::experiments::{chunks, par_map, ExperimentOutput};
use crate::report::{records_to_csv, ResultRecord, SummaryRow};

const REPLICA_CHUNK: usize = 1 << 16;
/// Seed-domain offset separating the weak pass from the strong pass.
const WEAK_SEED_DOMAIN: u64 = 1 << 32;

#[derive(Default, Clone, Copy)]
struct StrongSums {
    d2: f64,
    d4: f64,
    inc2: f64,
    inc4: f64,
}

#[derive(Default, Clone, Copy)]
struct WeakSums {
    tanh: f64,
    tanh_sq: f64,
    log_cosh: f64,
    log_cosh_sq: f64,
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.build_potential()?;
    if p.quadratic_diag().is_none() {
        bail!("one-step-order requires a diagonal quadratic potential (exact transitions needed)");
    }
    if p.dim() != 1 || cfg.x0.len() != 1 {
        bail!("one-step-order is a one-dimensional experiment");
    }
    if cfg.gamma_grid.is_empty() {
        bail!("one-step-order needs a nonempty grid.gamma");
    }
    if cfg.gamma_grid.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
        bail!("grid.gamma entries must lie in (0, 1)");
    }
    if cfg.replicas == 0 || cfg.weak_replicas == 0 {
        bail!("replicas and weak_replicas must be positive");
    }
    let x = cfg.x0[0];
    let h_tanh = TestFunction::TanhCoord(0);
    let h_log_cosh = TestFunction::HalfLogCoshCoord(0);

    let mut records = Vec::new();
    let mut strong_pts = Vec::new();
    let mut increment_pts = Vec::new();
    let mut weak_tanh_pts = Vec::new();
    let mut weak_log_cosh_pts = Vec::new();

    for (gi, &gamma) in cfg.gamma_grid.iter().enumerate() {
        let gamma_seed = chain_seed(cfg.seed, gi as u64);

        // Strong pass: pathwise second moments of the coupled pair.
        let parts = chunks(cfg.replicas, REPLICA_CHUNK);
        let partials: Vec<Result<StrongSums>> = par_map(parts.len(), |ci| {
            let (_, _, len) = parts[ci];
            let mut rng = RngStreams::new(chain_seed(gamma_seed, ci as u64));
            let mut kernel = CoupledKernel::new(&p)?;
            let mut sums = StrongSums::default();
            for _ in 0..len {
                let (exact, rlmc) = kernel.step(&[x], gamma, &mut rng)?;
                let d = exact[0] - rlmc[0];
                let inc = exact[0] - x;
                sums.d2 += d * d;
                sums.d4 += d * d * d * d;
                sums.inc2 += inc * inc;
                sums.inc4 += inc * inc * inc * inc;
            }
            Ok(sums)
        });
        let mut strong = StrongSums::default();
        for partial in partials {
            let s = partial?;
            strong.d2 += s.d2;
            strong.d4 += s.d4;
            strong.inc2 += s.inc2;
            strong.inc4 += s.inc4;
        }
        let nf = cfg.replicas as f64;
        let (rms_d, se_d) = rms_with_se(strong.d2 / nf, strong.d4 / nf, nf);
        let (rms_inc, se_inc) = rms_with_se(strong.inc2 / nf, strong.inc4 / nf, nf);
        strong_pts.push((gamma.ln(), rms_d.ln()));
        increment_pts.push((gamma.ln(), rms_inc.ln()));
        records.push(
            ResultRecord::new("one-step-order", "strong_error_l2", rms_d)
                .param("gamma", gamma)
                .se(se_d),
        );
        records.push(
            ResultRecord::new("one-step-order", "exact_increment_l2", rms_inc)
                .param("gamma", gamma)
                .se(se_inc),
        );

        // Weak pass: mean differences of the test functions under common
        // random numbers (the coupled pair shares all driving noise).
        let parts = chunks(cfg.weak_replicas, REPLICA_CHUNK);
        let partials: Vec<Result<WeakSums>> = par_map(parts.len(), |ci| {
            let mut rng =
                RngStreams::new(chain_seed(gamma_seed, WEAK_SEED_DOMAIN + ci as u64));
            let mut kernel = CoupledKernel::new(&p)?;
            let (_, _, len) = parts[ci];
            let mut sums = WeakSums::default();
            for _ in 0..len {
                let (exact, rlmc) = kernel.step(&[x], gamma, &mut rng)?;
                let dt = h_tanh.eval(exact) - h_tanh.eval(rlmc);
                let dl = h_log_cosh.eval(exact) - h_log_cosh.eval(rlmc);
                sums.tanh += dt;
                sums.tanh_sq += dt * dt;
                sums.log_cosh += dl;
                sums.log_cosh_sq += dl * dl;
            }
            Ok(sums)
        });
        let mut weak = WeakSums::default();
        for partial in partials {
            let s = partial?;
            weak.tanh += s.tanh;
            weak.tanh_sq += s.tanh_sq;
            weak.log_cosh += s.log_cosh;
            weak.log_cosh_sq += s.log_cosh_sq;
        }
        let nf = cfg.weak_replicas as f64;
        let (abs_tanh, se_tanh) = abs_mean_with_se(weak.tanh / nf, weak.tanh_sq / nf, nf);
        let (abs_lc, se_lc) = abs_mean_with_se(weak.log_cosh / nf, weak.log_cosh_sq / nf, nf);
        weak_tanh_pts.push((gamma.ln(), abs_tanh.ln()));
        weak_log_cosh_pts.push((gamma.ln(), abs_lc.ln()));
        records.push(
            ResultRecord::new("one-step-order", "weak_error_tanh", abs_tanh)
                .param("gamma", gamma)
                .se(se_tanh),
        );
        records.push(
            ResultRecord::new("one-step-order", "weak_error_half_log_cosh", abs_lc)
                .param("gamma", gamma)
                .se(se_lc),
        );
    }

    let strong_fit = slope_fit(&strong_pts)?;
    let increment_fit = slope_fit(&increment_pts)?;
    let weak_tanh_fit = slope_fit(&weak_tanh_pts)?;
    let weak_lc_fit = slope_fit(&weak_log_cosh_pts)?;
    let summary = vec![
        SummaryRow::fitted(
            "strong_order_slope",
            strong_fit,
            (1.35..=1.65).contains(&strong_fit.slope),
        ),
        SummaryRow::fitted(
            "increment_order_slope",
            increment_fit,
            (0.4..=0.6).contains(&increment_fit.slope),
        ),
        SummaryRow::fitted("weak_order_tanh_slope", weak_tanh_fit, weak_tanh_fit.slope >= 1.35),
        SummaryRow::fitted(
            "weak_order_half_log_cosh_slope",
            weak_lc_fit,
            weak_lc_fit.slope >= 1.35,
        ),
    ];
    Ok(ExperimentOutput { records_csv: records_to_csv(&records), summary })
}

/// Root of a mean square plus its delta-method standard error.
fn rms_with_se(mean_sq: f64, mean_fourth: f64, n: f64) -> (f64, f64) {
    let rms = mean_sq.sqrt();
    let var_of_mean_sq = (mean_fourth - mean_sq * mean_sq).max(0.0) / n;
    (rms, var_of_mean_sq.sqrt() / (2.0 * rms))
}

fn abs_mean_with_se(mean: f64, mean_sq: f64, n: f64) -> (f64, f64) {
    let se = ((mean_sq - mean * mean).max(0.0) / n).sqrt();
    (mean.abs(), se)
}

//! Stationary-bias sweep: closed-form Wasserstein-2 proxy between the
//! moment-matched fixed-step stationary law and the diffusion target,
//! checked for the square-root-in-eta envelope and a positive fitted order.

use anyhow::{bail, Result};
use rlmc::metrics::slope_fit;
use rlmc::oracle::{gaussian_w2, rlmc_stationary_variance, GaussianLaw};

use crate::config::ExperimentConfig;
use crate::experiments::ExperimentOutput;
use crate::report::{records_to_csv, ResultRecord, SummaryRow};

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.build_potential()?;
    let Some(diag) = p.quadratic_diag().map(<[f64]>::to_vec) else {
        bail!("bias-sweep requires a diagonal quadratic potential (closed-form oracle)");
    };
    if cfg.eta_grid.is_empty() {
        bail!("bias-sweep needs a nonempty grid.eta");
    }

    let target = GaussianLaw::diffusion_stationary(&diag)?;
    let mut records = Vec::new();
    let mut fit_points = Vec::new();
    let mut all_below_sqrt = true;
    let mut worst_ratio = 0.0f64;
    for &eta in &cfg.eta_grid {
        let var = rlmc_stationary_variance(&diag, eta)?;
        let proxy = GaussianLaw::new(vec![0.0; diag.len()], var)?;
        let w2 = gaussian_w2(&proxy, &target)?;
        let below = w2 <= eta.sqrt();
        all_below_sqrt &= below;
        worst_ratio = worst_ratio.max(w2 / eta.sqrt());
        fit_points.push((eta.ln(), w2.ln()));
        records.push(
            ResultRecord::new("bias-sweep", "w2_bias_proxy", w2)
                .param("eta", eta)
                .pass(below),
        );
    }

    let fit = slope_fit(&fit_points)?;
    let summary = vec![
        SummaryRow::fitted("bias_order_slope", fit, fit.slope >= 0.45),
        SummaryRow::scalar("bias_to_sqrt_eta_ratio_max", worst_ratio, all_below_sqrt),
    ];
    Ok(ExperimentOutput { records_csv: records_to_csv(&records), summary })
}

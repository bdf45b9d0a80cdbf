//! Drift-inequality experiment: for every `(eta, x)` cell the exact one-step
//! second moment (closed form, zero tolerance) and a Monte Carlo estimate
//! (3 standard errors) are checked against the bound `lambda V(x) + b`.

use anyhow::{bail, Context, Result};
use rlmc::metrics::{drift_check, drift_constants};
use rlmc::oracle::moment_recursion;
use rlmc::{chain_seed, RngStreams, StepSchedule};

use crate::config::ExperimentConfig;
use crate::experiments::{par_map, ExperimentOutput};
use crate::report::{records_to_csv, ResultRecord, SummaryRow};

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.build_potential()?;
    let Some(diag) = p.quadratic_diag().map(<[f64]>::to_vec) else {
        bail!("drift-check requires a diagonal quadratic potential (exact moments needed)");
    };
    if p.dim() != 1 {
        bail!("drift-check is a one-dimensional experiment; got dim {}", p.dim());
    }
    if cfg.eta_grid.is_empty() || cfg.x_grid.is_empty() {
        bail!("drift-check needs nonempty grid.eta and grid.x");
    }
    if cfg.n_mc == 0 {
        bail!("n_mc must be positive");
    }
    let max_eta = p.m() / (p.lipschitz() * p.lipschitz());
    for &eta in &cfg.eta_grid {
        if !(eta > 0.0 && eta <= max_eta) {
            bail!("step size {eta} outside (0, m/L^2] = (0, {max_eta}] required by the drift bound");
        }
    }

    let cells: Vec<(f64, f64)> = cfg
        .eta_grid
        .iter()
        .flat_map(|&eta| cfg.x_grid.iter().map(move |&x| (eta, x)))
        .collect();

    struct Cell {
        eta: f64,
        x: f64,
        exact: f64,
        bound: f64,
        analytic_pass: bool,
        mc_estimate: f64,
        mc_se: f64,
        mc_pass: bool,
    }

    let results: Vec<Result<Cell>> = par_map(cells.len(), |i| {
        let (eta, x) = cells[i];
        let (lambda, b) = drift_constants(p.m(), p.lipschitz(), p.dim(), eta);
        let bound = lambda * x * x + b;
        let constant = StepSchedule::constant(eta).context("constant schedule")?;
        let exact = *moment_recursion(&diag, &constant, &[x], 1)
            .context("one-step moment")?
            .last()
            .unwrap();
        let mut rng = RngStreams::new(chain_seed(cfg.seed, i as u64));
        let rec = drift_check(&p, eta, &[vec![x]], cfg.n_mc, &mut rng)
            .context("drift check")?
            .remove(0);
        Ok(Cell {
            eta,
            x,
            exact,
            bound,
            analytic_pass: exact <= bound,
            mc_estimate: rec.estimate,
            mc_se: rec.std_error,
            mc_pass: rec.pass,
        })
    });

    let mut records = Vec::new();
    let mut all_analytic = true;
    let mut all_mc = true;
    let mut n_cells = 0usize;
    for r in results {
        let cell = r?;
        all_analytic &= cell.analytic_pass;
        all_mc &= cell.mc_pass;
        n_cells += 1;
        records.push(
            ResultRecord::new("drift-check", "exact_one_step_v", cell.exact)
                .param("eta", cell.eta)
                .param("x", cell.x)
                .pass(cell.analytic_pass),
        );
        records.push(
            ResultRecord::new("drift-check", "drift_bound", cell.bound)
                .param("eta", cell.eta)
                .param("x", cell.x),
        );
        records.push(
            ResultRecord::new("drift-check", "mc_one_step_v", cell.mc_estimate)
                .param("eta", cell.eta)
                .param("x", cell.x)
                .se(cell.mc_se)
                .pass(cell.mc_pass),
        );
    }

    let summary = vec![
        SummaryRow::scalar("drift_analytic_all_cells", n_cells as f64, all_analytic),
        SummaryRow::scalar("drift_mc_all_cells", n_cells as f64, all_mc),
    ];
    Ok(ExperimentOutput { records_csv: records_to_csv(&records), summary })
}

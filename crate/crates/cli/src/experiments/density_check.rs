//! Transition-density check: the nested-quadrature density against its
//! semi-closed mixture reduction, a normalization integral, a quadrature
//! self-convergence guard, and a chi-square fit of simulated one-step draws.

use anyhow::{bail, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use rlmc::oracle::{QuadraticUMixture, TransitionDensity};
use rlmc::sampler::StepKernel;
use rlmc::{chain_seed, RngStreams};

use crate::config::ExperimentConfig;
use crate::experiments::ExperimentOutput;
use crate::report::{fmt_f64, SummaryRow};

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.build_potential()?;
    let Some(diag) = p.quadratic_diag().map(<[f64]>::to_vec) else {
        bail!("density-check requires a diagonal quadratic potential (mixture reduction needed)");
    };
    if p.dim() != 1 {
        bail!("density-check is a one-dimensional experiment; got dim {}", p.dim());
    }
    let eta = cfg.constant_eta()?;
    if cfg.density_points < 3 || cfg.chi_bins < 5 {
        bail!("density-check needs density.points >= 3 and chi.bins >= 5");
    }
    if cfg.n_mc < 1_000 {
        bail!("density-check needs n_mc >= 1000 draws");
    }
    let lambda = diag[0];
    let x = cfg.density_x;

    let density = TransitionDensity::new(&p, eta, cfg.quad_n_u, cfg.quad_n_y)?;
    let refined = TransitionDensity::new(&p, eta, 2 * cfg.quad_n_u, 2 * cfg.quad_n_y)?;
    let mixture = QuadraticUMixture::new(lambda, eta, cfg.quad_n_u)?;
    let (mean, var) = mixture.moments(x);
    let sd = var.sqrt();

    // Evaluation grid.
    let lo = mean - cfg.density_span * sd;
    let hi = mean + cfg.density_span * sd;
    let n_pts = cfg.density_points;
    let width = (hi - lo) / (n_pts - 1) as f64;
    let grid: Vec<f64> = (0..n_pts).map(|i| lo + width * i as f64).collect();

    let q_grid: Vec<f64> = grid.iter().map(|&xt| density.density(x, xt)).collect();
    let mut reduction_max_diff = 0.0f64;
    let mut self_conv_max_diff = 0.0f64;
    let mut min_q = f64::INFINITY;
    for (i, &xt) in grid.iter().enumerate() {
        reduction_max_diff = reduction_max_diff.max((q_grid[i] - mixture.density(x, xt)).abs());
        self_conv_max_diff = self_conv_max_diff.max((q_grid[i] - refined.density(x, xt)).abs());
        min_q = min_q.min(q_grid[i]);
    }

    // Normalization over a wide Simpson grid of the quadrature density.
    let norm = simpson(mean - 8.0 * sd, mean + 8.0 * sd, 1601, |xt| density.density(x, xt));
    let norm_err = (norm - 1.0).abs();

    // One-step draws.
    let mut rng = RngStreams::new(chain_seed(cfg.seed, 0));
    let mut kernel = StepKernel::new(1);
    let mut draws = Vec::with_capacity(cfg.n_mc);
    for _ in 0..cfg.n_mc {
        draws.push(kernel.step(&p, &[x], eta, &mut rng)?[0]);
    }

    // Histogram on the evaluation grid (cells centered at grid points).
    let mut cell_counts = vec![0u64; n_pts];
    for &v in &draws {
        let idx = ((v - (lo - 0.5 * width)) / width).floor();
        if idx >= 0.0 && (idx as usize) < n_pts {
            cell_counts[idx as usize] += 1;
        }
    }
    let mut csv = String::from("x_tilde,q_eta,mc_histogram_density\n");
    for i in 0..n_pts {
        let hist = cell_counts[i] as f64 / (cfg.n_mc as f64 * width);
        csv.push_str(&format!("{},{},{}\n", fmt_f64(grid[i]), fmt_f64(q_grid[i]), fmt_f64(hist)));
    }

    // Chi-square against the mixture law: interior bins plus open tails,
    // sparse bins merged inward until every expected count is >= 10.
    let n_bins = cfg.chi_bins;
    let bin_lo = mean - 5.0 * sd;
    let bin_hi = mean + 5.0 * sd;
    let bin_w = (bin_hi - bin_lo) / n_bins as f64;
    let mut expected = Vec::with_capacity(n_bins + 2);
    expected.push(mixture.cdf(x, bin_lo));
    for i in 0..n_bins {
        let a = bin_lo + bin_w * i as f64;
        expected.push(mixture.cdf(x, a + bin_w) - mixture.cdf(x, a));
    }
    expected.push(1.0 - mixture.cdf(x, bin_hi));
    let mut counts = vec![0u64; n_bins + 2];
    for &v in &draws {
        let idx = if v < bin_lo {
            0
        } else if v >= bin_hi {
            n_bins + 1
        } else {
            1 + ((v - bin_lo) / bin_w) as usize
        };
        counts[idx] += 1;
    }
    let mut cells: Vec<(f64, f64)> = expected
        .iter()
        .zip(&counts)
        .map(|(&e, &c)| (e * cfg.n_mc as f64, c as f64))
        .collect();
    while let Some(pos) = cells.iter().position(|&(e, _)| e < 10.0) {
        let neighbor = if pos == 0 { 1 } else { pos - 1 };
        cells[neighbor].0 += cells[pos].0;
        cells[neighbor].1 += cells[pos].1;
        cells.remove(pos);
    }
    if cells.len() < 6 {
        bail!("chi-square binning degenerated to {} cells", cells.len());
    }
    let chi_sq: f64 = cells.iter().map(|&(e, c)| (c - e) * (c - e) / e).sum();
    let dof = (cells.len() - 1) as f64;
    let critical = ChiSquared::new(dof)?.inverse_cdf(0.99);

    let summary = vec![
        SummaryRow::scalar("reduction_max_abs_diff", reduction_max_diff, reduction_max_diff <= 1e-8),
        SummaryRow::scalar("normalization_abs_error", norm_err, norm_err <= 1e-6),
        SummaryRow::scalar("density_strictly_positive_min", min_q, min_q > 0.0),
        SummaryRow::scalar("self_convergence_max_diff", self_conv_max_diff, self_conv_max_diff < 1e-8),
        SummaryRow::scalar("chi_square_statistic", chi_sq, chi_sq <= critical),
        SummaryRow::scalar("chi_square_critical_1pct", critical, true),
    ];
    Ok(ExperimentOutput { records_csv: csv, summary })
}

fn simpson(a: f64, b: f64, n_points: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    debug_assert!(n_points % 2 == 1 && n_points >= 3);
    let h = (b - a) / (n_points - 1) as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n_points - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

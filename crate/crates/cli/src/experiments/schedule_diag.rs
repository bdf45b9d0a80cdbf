//! Schedule diagnostics: the regularity-constant cross-check, the auxiliary
//! sequence and its normalized plateau, and the exponential decay ratio,
//! dumped at logarithmically spaced indices.

use anyhow::{bail, Result};
use rlmc::schedule::exp_decay_ratio;
use rlmc::StepSchedule;

use crate::config::ExperimentConfig;
use crate::experiments::ExperimentOutput;
use crate::report::{fmt_f64, SummaryRow};

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.build_potential()?;
    let m = p.m();
    let schedule = cfg.build_schedule()?;
    if cfg.n_max < 100 {
        bail!("schedule-diag needs n_max >= 100");
    }
    let omega = schedule.omega();
    if m <= 2.0 * omega {
        bail!(
            "auxiliary sequence undefined: m = {m} must exceed 2 * omega = {}",
            2.0 * omega
        );
    }

    let n_max = cfg.n_max;
    let times = schedule.times(n_max);
    let seq = schedule.auxiliary_sequence(m, n_max)?;

    // Running maxima of u_n / sqrt(gamma_n) at the plateau probes.
    let probe_hi = n_max.min(100_000);
    let probe_lo = probe_hi / 10;
    let mut running_max = 0.0f64;
    let mut rm_lo = 0.0f64;
    let mut rm_hi = 0.0f64;
    for n in 1..=n_max {
        let ratio = seq.u[n] / schedule.gamma(n)?.sqrt();
        running_max = running_max.max(ratio);
        if n == probe_lo {
            rm_lo = running_max;
        }
        if n == probe_hi {
            rm_hi = running_max;
        }
    }

    // CSV rows at 1-2-5 spaced indices.
    let mut rows_at = Vec::new();
    let mut base = 1usize;
    'outer: loop {
        for mult in [1usize, 2, 5] {
            match base.checked_mul(mult) {
                Some(n) if n <= n_max => rows_at.push(n),
                _ => break 'outer,
            }
        }
        match base.checked_mul(10) {
            Some(b) => base = b,
            None => break,
        }
    }
    if *rows_at.last().unwrap() != n_max {
        rows_at.push(n_max);
    }

    let mut csv = String::from("n,gamma_n,t_n,u_n,u_n_over_sqrt_gamma_n,exp_decay_ratio\n");
    for &n in &rows_at {
        let gamma = schedule.gamma(n)?;
        let t = times.t(n);
        let u = seq.u[n];
        csv.push_str(&format!(
            "{n},{},{},{},{},{}\n",
            fmt_f64(gamma),
            fmt_f64(t),
            fmt_f64(u),
            fmt_f64(u / gamma.sqrt()),
            fmt_f64(exp_decay_ratio(m, t, gamma)),
        ));
    }

    // Regularity-constant cross-check at the horizon.
    let omega_est = schedule.omega_numeric(n_max)?;
    let omega_pass = if omega > 0.0 {
        (omega_est - omega).abs() / omega <= 0.05
    } else {
        match &schedule {
            StepSchedule::Polynomial { c, .. } => omega_est.abs() < 1e-3 / (2.0 * c),
            StepSchedule::Constant { .. } => omega_est == 0.0,
        }
    };

    let plateau_gap = (rm_hi - rm_lo).abs() / rm_lo;
    let plateau_pass = plateau_gap <= 0.01;

    // The decay ratio must fall across decades.
    let mut decay_pass = true;
    let mut prev = f64::INFINITY;
    let mut decade = 100usize;
    let mut last_decay = exp_decay_ratio(m, times.t(n_max), schedule.gamma(n_max)?);
    while decade <= n_max {
        let v = exp_decay_ratio(m, times.t(decade), schedule.gamma(decade)?);
        decay_pass &= v < prev;
        prev = v;
        last_decay = v;
        decade *= 10;
    }

    let summary = vec![
        SummaryRow::scalar("omega_numeric_estimate", omega_est, omega_pass),
        SummaryRow::scalar("u_ratio_running_max", rm_hi, true),
        SummaryRow::scalar("u_ratio_plateau_gap", plateau_gap, plateau_pass),
        SummaryRow::scalar("exp_decay_ratio_last_decade", last_decay, decay_pass),
    ];
    Ok(ExperimentOutput { records_csv: csv, summary })
}

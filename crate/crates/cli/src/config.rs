//! Experiment configuration: per-experiment defaults overlaid by an optional
//! flat `key = value` config file and command-line flags.
//!
//! The config format is intentionally trivial: one `key = value` pair per
//! line, `#` comments, dotted section prefixes (`potential.kind`,
//! `schedule.alpha`, `grid.eta`). Lists are comma-separated.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rlmc::{Potential, StepSchedule};

/// Default experiment seed; override with `seed = ...` or `--seed`.
pub const DEFAULT_SEED: u64 = 0x524C_4D43;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    BiasSweep,
    Ergodicity,
    DecreasingRate,
    OneStepOrder,
    DriftCheck,
    ScheduleDiag,
    DensityCheck,
    MomentCheck,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::BiasSweep => "bias-sweep",
            Experiment::Ergodicity => "ergodicity",
            Experiment::DecreasingRate => "decreasing-rate",
            Experiment::OneStepOrder => "one-step-order",
            Experiment::DriftCheck => "drift-check",
            Experiment::ScheduleDiag => "schedule-diag",
            Experiment::DensityCheck => "density-check",
            Experiment::MomentCheck => "moment-check",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "bias-sweep" => Experiment::BiasSweep,
            "ergodicity" => Experiment::Ergodicity,
            "decreasing-rate" => Experiment::DecreasingRate,
            "one-step-order" => Experiment::OneStepOrder,
            "drift-check" => Experiment::DriftCheck,
            "schedule-diag" => Experiment::ScheduleDiag,
            "density-check" => Experiment::DensityCheck,
            "moment-check" => Experiment::MomentCheck,
            other => bail!("unknown experiment '{other}'"),
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub enum PotentialSpec {
    QuadraticDiagonal { diag: Vec<f64> },
    LogCoshRidge { a: f64, b: f64, dim: usize },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        Ok(match self {
            PotentialSpec::QuadraticDiagonal { diag } => {
                Potential::quadratic_diagonal(diag.clone())
                    .map_err(|e| anyhow!("potential: {e}"))?
            }
            PotentialSpec::LogCoshRidge { a, b, dim } => {
                Potential::log_cosh_ridge(*a, *b, *dim).map_err(|e| anyhow!("potential: {e}"))?
            }
        })
    }
}

#[derive(Debug, Clone)]
pub enum ScheduleSpec {
    Constant { eta: f64 },
    Polynomial { c: f64, alpha: f64 },
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<StepSchedule> {
        Ok(match self {
            ScheduleSpec::Constant { eta } => {
                StepSchedule::constant(*eta).map_err(|e| anyhow!("schedule: {e}"))?
            }
            ScheduleSpec::Polynomial { c, alpha } => {
                StepSchedule::polynomial(*c, *alpha).map_err(|e| anyhow!("schedule: {e}"))?
            }
        })
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub potential: PotentialSpec,
    pub schedule: ScheduleSpec,
    pub x0: Vec<f64>,
    /// Second ensemble start (ergodicity experiment).
    pub x0_secondary: Vec<f64>,
    pub seed: u64,
    /// 0 means "use all available cores".
    pub workers: usize,
    pub out: PathBuf,
    /// Chains or Monte Carlo couples, depending on the experiment.
    pub replicas: usize,
    /// Couples for the weak-error statistics of one-step-order.
    pub weak_replicas: usize,
    /// Per-cell one-step draws (drift-check) / density draws (density-check).
    pub n_mc: usize,
    pub n_steps: usize,
    pub burn_in: usize,
    /// Block length for the tail-variance block bootstrap.
    pub block_len: usize,
    pub n_boot: usize,
    pub eta_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub checkpoints: Vec<usize>,
    /// Horizon of schedule diagnostics and the moment recursion.
    pub n_max: usize,
    /// Window [lo, hi] of the decreasing-rate ratio checks.
    pub window_lo: usize,
    pub window_hi: usize,
    pub quad_n_u: usize,
    pub quad_n_y: usize,
    pub density_x: f64,
    pub density_points: usize,
    pub density_span: f64,
    pub chi_bins: usize,
    /// Optional trajectory dump (moment-check, first chain).
    pub traj: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults reproducing the reference parameter sets of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            potential: PotentialSpec::QuadraticDiagonal { diag: vec![1.0] },
            schedule: ScheduleSpec::Constant { eta: 0.1 },
            x0: vec![0.0],
            x0_secondary: vec![0.0],
            seed: DEFAULT_SEED,
            workers: 0,
            out: PathBuf::from(format!("{}.csv", experiment.name())),
            replicas: 1,
            weak_replicas: 1,
            n_mc: 1,
            n_steps: 0,
            burn_in: 0,
            block_len: 10_000,
            n_boot: 200,
            eta_grid: Vec::new(),
            gamma_grid: Vec::new(),
            x_grid: Vec::new(),
            checkpoints: Vec::new(),
            n_max: 0,
            window_lo: 0,
            window_hi: 0,
            quad_n_u: 64,
            quad_n_y: 64,
            density_x: 1.0,
            density_points: 101,
            density_span: 5.0,
            chi_bins: 60,
            traj: None,
        };
        match experiment {
            Experiment::BiasSweep => {
                cfg.eta_grid = vec![0.4, 0.2, 0.1, 0.05, 0.025];
            }
            Experiment::Ergodicity => {
                cfg.x0 = vec![10.0];
                cfg.x0_secondary = vec![0.0];
                cfg.replicas = 100_000;
                cfg.checkpoints = vec![5, 10, 20, 40, 80];
            }
            Experiment::DecreasingRate => {
                cfg.schedule = ScheduleSpec::Polynomial { c: 2.0, alpha: 1.0 };
                cfg.n_max = 1_000_000;
                cfg.window_lo = 1_000;
                cfg.window_hi = 1_000_000;
            }
            Experiment::OneStepOrder => {
                cfg.x0 = vec![3.0];
                cfg.gamma_grid = vec![0.2, 0.1, 0.05, 0.025, 0.0125];
                cfg.replicas = 1_000_000;
                cfg.weak_replicas = 10_000_000;
            }
            Experiment::DriftCheck => {
                cfg.eta_grid = vec![0.01, 0.05, 0.1, 0.5, 1.0];
                cfg.x_grid = vec![0.0, 1.0, -1.0, 3.0, -3.0, 10.0, -10.0];
                cfg.n_mc = 1_000_000;
            }
            Experiment::ScheduleDiag => {
                cfg.schedule = ScheduleSpec::Polynomial { c: 2.0, alpha: 1.0 };
                cfg.n_max = 1_000_000;
            }
            Experiment::DensityCheck => {
                cfg.n_mc = 1_000_000;
            }
            Experiment::MomentCheck => {
                cfg.schedule = ScheduleSpec::Polynomial { c: 2.0, alpha: 1.0 };
                cfg.x0 = vec![3.0];
                cfg.replicas = 2_000;
                cfg.n_steps = 300;
                cfg.checkpoints = vec![1, 10, 100, 300];
            }
        }
        cfg
    }

    /// Overlay one `key = value` assignment.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let fail = || anyhow!("invalid value '{value}' for config key '{key}'");
        match key {
            "experiment" => {
                let requested = Experiment::parse(value)?;
                if requested != self.experiment {
                    bail!(
                        "config file is for experiment '{requested}' but '{}' was invoked",
                        self.experiment
                    );
                }
            }
            "potential.kind" => match value {
                "quadratic" => {
                    if !matches!(self.potential, PotentialSpec::QuadraticDiagonal { .. }) {
                        self.potential = PotentialSpec::QuadraticDiagonal { diag: vec![1.0] };
                    }
                }
                "log-cosh-ridge" => {
                    if !matches!(self.potential, PotentialSpec::LogCoshRidge { .. }) {
                        self.potential = PotentialSpec::LogCoshRidge { a: 1.0, b: 1.0, dim: 1 };
                    }
                }
                other => bail!("unknown potential.kind '{other}'"),
            },
            "potential.diag" => {
                self.potential =
                    PotentialSpec::QuadraticDiagonal { diag: parse_f64_list(value)? };
            }
            "potential.a" => match &mut self.potential {
                PotentialSpec::LogCoshRidge { a, .. } => *a = value.parse().map_err(|_| fail())?,
                _ => bail!("potential.a requires potential.kind = log-cosh-ridge first"),
            },
            "potential.b" => match &mut self.potential {
                PotentialSpec::LogCoshRidge { b, .. } => *b = value.parse().map_err(|_| fail())?,
                _ => bail!("potential.b requires potential.kind = log-cosh-ridge first"),
            },
            "potential.dim" => match &mut self.potential {
                PotentialSpec::LogCoshRidge { dim, .. } => {
                    *dim = value.parse().map_err(|_| fail())?
                }
                _ => bail!("potential.dim requires potential.kind = log-cosh-ridge first"),
            },
            "schedule.kind" => match value {
                "constant" => {
                    if !matches!(self.schedule, ScheduleSpec::Constant { .. }) {
                        self.schedule = ScheduleSpec::Constant { eta: 0.1 };
                    }
                }
                "polynomial" => {
                    if !matches!(self.schedule, ScheduleSpec::Polynomial { .. }) {
                        self.schedule = ScheduleSpec::Polynomial { c: 2.0, alpha: 1.0 };
                    }
                }
                other => bail!("unknown schedule.kind '{other}'"),
            },
            "schedule.eta" => {
                self.schedule = ScheduleSpec::Constant { eta: value.parse().map_err(|_| fail())? };
            }
            "schedule.c" => match &mut self.schedule {
                ScheduleSpec::Polynomial { c, .. } => *c = value.parse().map_err(|_| fail())?,
                _ => bail!("schedule.c requires schedule.kind = polynomial first"),
            },
            "schedule.alpha" => match &mut self.schedule {
                ScheduleSpec::Polynomial { alpha, .. } => {
                    *alpha = value.parse().map_err(|_| fail())?
                }
                _ => bail!("schedule.alpha requires schedule.kind = polynomial first"),
            },
            "x0" => self.x0 = parse_f64_list(value)?,
            "x0_secondary" => self.x0_secondary = parse_f64_list(value)?,
            "seed" => self.seed = value.parse().map_err(|_| fail())?,
            "workers" => self.workers = value.parse().map_err(|_| fail())?,
            "out" => self.out = PathBuf::from(value),
            "replicas" => self.replicas = value.parse().map_err(|_| fail())?,
            "weak_replicas" => self.weak_replicas = value.parse().map_err(|_| fail())?,
            "n_mc" => self.n_mc = value.parse().map_err(|_| fail())?,
            "n_steps" => self.n_steps = value.parse().map_err(|_| fail())?,
            "burn_in" => self.burn_in = value.parse().map_err(|_| fail())?,
            "block_len" => self.block_len = value.parse().map_err(|_| fail())?,
            "n_boot" => self.n_boot = value.parse().map_err(|_| fail())?,
            "grid.eta" => self.eta_grid = parse_f64_list(value)?,
            "grid.gamma" => self.gamma_grid = parse_f64_list(value)?,
            "grid.x" => self.x_grid = parse_f64_list(value)?,
            "checkpoints" => self.checkpoints = parse_usize_list(value)?,
            "n_max" => self.n_max = value.parse().map_err(|_| fail())?,
            "window.lo" => self.window_lo = value.parse().map_err(|_| fail())?,
            "window.hi" => self.window_hi = value.parse().map_err(|_| fail())?,
            "quad.n_u" => self.quad_n_u = value.parse().map_err(|_| fail())?,
            "quad.n_y" => self.quad_n_y = value.parse().map_err(|_| fail())?,
            "density.x" => self.density_x = value.parse().map_err(|_| fail())?,
            "density.points" => self.density_points = value.parse().map_err(|_| fail())?,
            "density.span" => self.density_span = value.parse().map_err(|_| fail())?,
            "chi.bins" => self.chi_bins = value.parse().map_err(|_| fail())?,
            "traj" => self.traj = Some(PathBuf::from(value)),
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Overlay a config file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected 'key = value'", path.display(), lineno + 1))?;
            self.apply(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    pub fn build_potential(&self) -> Result<Potential> {
        self.potential.build()
    }

    pub fn build_schedule(&self) -> Result<StepSchedule> {
        self.schedule.build()
    }

    /// Constant step size, when the schedule is constant.
    pub fn constant_eta(&self) -> Result<f64> {
        match &self.schedule {
            ScheduleSpec::Constant { eta } => Ok(*eta),
            _ => bail!("experiment '{}' requires schedule.kind = constant", self.experiment),
        }
    }

    /// Path of the summary file paired with `out`.
    pub fn summary_path(&self) -> PathBuf {
        let mut name = self
            .out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.experiment.name().to_string());
        name.push_str(".summary.csv");
        self.out.with_file_name(name)
    }
}

fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>().map_err(|_| anyhow!("invalid number '{tok}' in list"))
        })
        .collect()
}

fn parse_usize_list(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<usize>().map_err(|_| anyhow!("invalid integer '{tok}' in list"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_carry_reference_grids() {
        let cfg = ExperimentConfig::defaults(Experiment::DriftCheck);
        assert_eq!(cfg.eta_grid, vec![0.01, 0.05, 0.1, 0.5, 1.0]);
        assert_eq!(cfg.x_grid.len(), 7);
        assert_eq!(cfg.n_mc, 1_000_000);
    }

    #[test]
    fn apply_overrides() {
        let mut cfg = ExperimentConfig::defaults(Experiment::BiasSweep);
        cfg.apply("grid.eta", "0.1, 0.05").unwrap();
        assert_eq!(cfg.eta_grid, vec![0.1, 0.05]);
        cfg.apply("seed", "99").unwrap();
        assert_eq!(cfg.seed, 99);
        cfg.apply("potential.kind", "log-cosh-ridge").unwrap();
        cfg.apply("potential.b", "2.5").unwrap();
        assert!(matches!(cfg.potential, PotentialSpec::LogCoshRidge { b, .. } if b == 2.5));
    }

    #[test]
    fn apply_rejects_unknown_keys_and_bad_values() {
        let mut cfg = ExperimentConfig::defaults(Experiment::BiasSweep);
        assert!(cfg.apply("nonsense", "1").is_err());
        assert!(cfg.apply("seed", "not-a-number").is_err());
        assert!(cfg.apply("potential.kind", "banana").is_err());
        let err = cfg.apply("experiment", "ergodicity").unwrap_err();
        assert!(err.to_string().contains("was invoked"));
    }

    #[test]
    fn summary_path_is_stable() {
        let mut cfg = ExperimentConfig::defaults(Experiment::BiasSweep);
        cfg.out = PathBuf::from("/tmp/results.csv");
        assert_eq!(cfg.summary_path(), PathBuf::from("/tmp/results.summary.csv"));
    }
}

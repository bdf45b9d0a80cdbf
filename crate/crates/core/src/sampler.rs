//! Chain recursions: the unadjusted Langevin step, the randomized-midpoint
//! step with fixed or decreasing step size, exact Ornstein-Uhlenbeck
//! transitions for quadratic targets, and the synchronously coupled one-step
//! pair used by the discretization-order experiments.
//!
//! Randomness discipline: every step draws `u` from the uniform substream,
//! then the midpoint Gaussian `xi'`, then the endpoint Gaussian `xi` (see
//! [`RngStreams`]). The coupled step draws its two extra endpoint Gaussians
//! from the `xi` substream, in the order `z1, z2`.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::oracle;
use crate::potential::Potential;
use crate::rng::RngStreams;
use crate::schedule::{ScheduleTimes, StepSchedule};

/// A sampled trajectory with its provenance.
#[derive(Debug, Clone)]
pub struct ChainRun {
    dim: usize,
    /// Flat row-major storage of `n_steps + 1` states.
    states: Vec<f64>,
    /// Flat storage of the `n_steps` midpoints when retention is enabled.
    midpoints: Option<Vec<f64>>,
    times: ScheduleTimes,
    potential: Potential,
    schedule: StepSchedule,
    seed: u64,
}

impl ChainRun {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_steps(&self) -> usize {
        self.states.len() / self.dim - 1
    }

    /// State after `k` steps; `state(0)` is the initial value.
    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.n_steps())
    }

    /// Midpoint used by step `k` (1-based), when midpoints were retained.
    pub fn midpoint(&self, k: usize) -> Option<&[f64]> {
        let mids = self.midpoints.as_ref()?;
        Some(&mids[(k - 1) * self.dim..k * self.dim])
    }

    pub fn times(&self) -> &ScheduleTimes {
        &self.times
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Dump the trajectory as CSV with columns `k,t_k,gamma_k,x_1..x_d`.
    /// Row `k = 0` carries `gamma = 0`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "k,t_k,gamma_k")?;
        for i in 1..=self.dim {
            write!(w, ",x_{i}")?;
        }
        writeln!(w)?;
        for k in 0..=self.n_steps() {
            let gamma = if k == 0 {
                0.0
            } else {
                self.schedule.gamma(k).expect("k >= 1")
            };
            write!(w, "{k},{:.16e},{:.16e}", self.times.t(k), gamma)?;
            for v in self.state(k) {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `out = x - gamma * grad + sqrt(2 gamma) * xi`, the common drift-diffuse
/// form of both the midpoint and the endpoint update. Sharing it keeps the
/// `u = 0` reduction to the unadjusted step bit-exact.
#[inline]
fn drift_diffuse_into(x: &[f64], grad: &[f64], gamma: f64, xi: &[f64], out: &mut [f64]) {
    let noise = (2.0 * gamma).sqrt();
    for i in 0..x.len() {
        out[i] = x[i] - gamma * grad[i] + noise * xi[i];
    }
}

fn check_step(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::NonPositiveStep(gamma));
    }
    Ok(())
}

fn check_vec(p: &Potential, v: &[f64]) -> Result<()> {
    if v.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: v.len() });
    }
    Ok(())
}

/// One unadjusted Langevin step `x - gamma grad U(x) + sqrt(2 gamma) xi`.
pub fn ula_step(p: &Potential, x: &[f64], gamma: f64, xi: &[f64]) -> Result<Vec<f64>> {
    check_step(gamma)?;
    check_vec(p, x)?;
    check_vec(p, xi)?;
    let grad = p.grad(x)?;
    let mut out = vec![0.0; x.len()];
    drift_diffuse_into(x, &grad, gamma, xi, &mut out);
    Ok(out)
}

/// One randomized-midpoint step. Returns `(x_next, midpoint)` with
/// `midpoint = x - u gamma grad U(x) + sqrt(2 u gamma) xi'` and
/// `x_next = x - gamma grad U(midpoint) + sqrt(2 gamma) xi`.
///
/// Deterministic given its inputs; `u = 0` reduces exactly to [`ula_step`],
/// and the boundary draws `u = 0`, `u = 1` are accepted as-is.
pub fn rlmc_step(
    p: &Potential,
    x: &[f64],
    gamma: f64,
    u: f64,
    xi: &[f64],
    xi_prime: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_step(gamma)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::invalid(format!("midpoint fraction u must lie in [0, 1], got {u}")));
    }
    check_vec(p, x)?;
    check_vec(p, xi)?;
    check_vec(p, xi_prime)?;
    let mut grad = p.grad(x)?;
    let mut midpoint = vec![0.0; x.len()];
    drift_diffuse_into(x, &grad, u * gamma, xi_prime, &mut midpoint);
    p.grad_into(&midpoint, &mut grad)?;
    let mut next = vec![0.0; x.len()];
    drift_diffuse_into(x, &grad, gamma, xi, &mut next);
    Ok((next, midpoint))
}

/// Reusable per-step buffers for the allocation-free chain loop.
struct StepScratch {
    grad: Vec<f64>,
    mid: Vec<f64>,
    xi: Vec<f64>,
    xi_prime: Vec<f64>,
    next: Vec<f64>,
}

impl StepScratch {
    fn new(dim: usize) -> Self {
        StepScratch {
            grad: vec![0.0; dim],
            mid: vec![0.0; dim],
            xi: vec![0.0; dim],
            xi_prime: vec![0.0; dim],
            next: vec![0.0; dim],
        }
    }

    /// Draws (u, xi', xi) in the fixed order and advances `x` into
    /// `self.next`, leaving the midpoint in `self.mid`.
    fn advance(&mut self, p: &Potential, x: &[f64], gamma: f64, rng: &mut RngStreams) -> Result<()> {
        let u = rng.uniform();
        rng.xi_prime_into(&mut self.xi_prime);
        rng.xi_into(&mut self.xi);
        p.grad_into(x, &mut self.grad)?;
        drift_diffuse_into(x, &self.grad, u * gamma, &self.xi_prime, &mut self.mid);
        p.grad_into(&self.mid, &mut self.grad)?;
        drift_diffuse_into(x, &self.grad, gamma, &self.xi, &mut self.next);
        Ok(())
    }
}

/// Reusable one-step sampler for Monte Carlo loops: draws `(u, xi', xi)`
/// in the standard order and performs one randomized-midpoint step without
/// allocating.
pub struct StepKernel {
    scratch: StepScratch,
}

impl StepKernel {
    pub fn new(dim: usize) -> Self {
        StepKernel { scratch: StepScratch::new(dim) }
    }

    /// One step from `x` with step size `gamma`; returns the next state.
    pub fn step(
        &mut self,
        p: &Potential,
        x: &[f64],
        gamma: f64,
        rng: &mut RngStreams,
    ) -> Result<&[f64]> {
        check_step(gamma)?;
        check_vec(p, x)?;
        self.scratch.advance(p, x, gamma, rng)?;
        Ok(&self.scratch.next)
    }

    /// Midpoint of the most recent step.
    pub fn midpoint(&self) -> &[f64] {
        &self.scratch.mid
    }
}

fn run_with_schedule(
    p: &Potential,
    schedule: &StepSchedule,
    x0: &[f64],
    n_steps: usize,
    rng: &mut RngStreams,
    store_midpoints: bool,
) -> Result<ChainRun> {
    check_vec(p, x0)?;
    let dim = p.dim();
    let mut states = Vec::with_capacity((n_steps + 1) * dim);
    states.extend_from_slice(x0);
    let mut midpoints = store_midpoints.then(|| Vec::with_capacity(n_steps * dim));
    let mut x = x0.to_vec();
    let mut scratch = StepScratch::new(dim);
    for k in 1..=n_steps {
        let gamma = schedule.gamma(k)?;
        scratch.advance(p, &x, gamma, rng)?;
        if let Some(mids) = midpoints.as_mut() {
            mids.extend_from_slice(&scratch.mid);
        }
        states.extend_from_slice(&scratch.next);
        x.copy_from_slice(&scratch.next);
    }
    Ok(ChainRun {
        dim,
        states,
        midpoints,
        times: schedule.times(n_steps),
        potential: p.clone(),
        schedule: schedule.clone(),
        seed: rng.seed(),
    })
}

/// Fixed-step randomized-midpoint chain.
pub fn run_constant(
    p: &Potential,
    eta: f64,
    x0: &[f64],
    n_steps: usize,
    rng: &mut RngStreams,
    store_midpoints: bool,
) -> Result<ChainRun> {
    let schedule = StepSchedule::constant(eta)?;
    run_with_schedule(p, &schedule, x0, n_steps, rng, store_midpoints)
}

/// Decreasing-step randomized-midpoint chain. The schedule must pass
/// [`StepSchedule::validate`] for the potential's strong-convexity constant.
pub fn run_decreasing(
    p: &Potential,
    schedule: &StepSchedule,
    x0: &[f64],
    n_steps: usize,
    rng: &mut RngStreams,
    store_midpoints: bool,
) -> Result<ChainRun> {
    let diagnosis = schedule.validate(p.m());
    if !diagnosis.valid_for_decreasing {
        return Err(Error::InvalidSchedule { reasons: diagnosis.reasons });
    }
    run_with_schedule(p, schedule, x0, n_steps, rng, store_midpoints)
}

/// Stream a fixed-step chain through `visit(k, state)` without retaining the
/// trajectory; `visit(0, x0)` is called first. Draws are identical to
/// [`run_constant`] with the same seed.
pub fn fold_constant(
    p: &Potential,
    eta: f64,
    x0: &[f64],
    n_steps: usize,
    rng: &mut RngStreams,
    mut visit: impl FnMut(usize, &[f64]),
) -> Result<()> {
    check_step(eta)?;
    check_vec(p, x0)?;
    let mut x = x0.to_vec();
    visit(0, &x);
    let mut scratch = StepScratch::new(p.dim());
    for k in 1..=n_steps {
        scratch.advance(p, &x, eta, rng)?;
        x.copy_from_slice(&scratch.next);
        visit(k, &x);
    }
    Ok(())
}

/// Exact diffusion transition draw for a diagonal quadratic potential:
/// Gaussian with mean `e^{-At} x` and covariance `A^{-1}(I - e^{-2At})`,
/// sampled coordinatewise from the `xi` substream.
pub fn ou_exact_step(p: &Potential, x: &[f64], t: f64, rng: &mut RngStreams) -> Result<Vec<f64>> {
    let diag = p.quadratic_diag().ok_or(Error::NotDiagonal)?;
    check_vec(p, x)?;
    let law = oracle::ou_transition(diag, x, t)?;
    let z = rng.xi(x.len());
    let mut out = vec![0.0; x.len()];
    law.sample_with(&z, &mut out);
    Ok(out)
}

/// One synchronously coupled step for a diagonal quadratic potential:
/// returns `(x_exact, y_rlmc)` where `x_exact` solves the diffusion exactly
/// over `[0, gamma]` and `y_rlmc` is the randomized-midpoint step driven by
/// the same Brownian endpoint.
///
/// Coordinatewise the pair `(B_gamma, S)` with
/// `S = int_0^gamma e^{-lambda(gamma - s)} dB_s` is Gaussian with
/// `Var(B) = gamma`, `Var(S) = (1 - e^{-2 lambda gamma}) / (2 lambda)` and
/// `Cov(B, S) = (1 - e^{-lambda gamma}) / lambda`; it is drawn through its
/// Cholesky factor so no time discretization pollutes the order test. The
/// exact endpoint is `e^{-lambda gamma} x + sqrt(2) S`, and the midpoint
/// step consumes `xi = B_gamma / sqrt(gamma)` so the shared diffusion noise
/// cancels in the difference. The midpoint Gaussian `xi'` stays independent.
pub fn coupled_one_step(
    p: &Potential,
    x: &[f64],
    gamma: f64,
    rng: &mut RngStreams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut kernel = CoupledKernel::new(p)?;
    let (exact, rlmc) = kernel.step(x, gamma, rng)?;
    Ok((exact.to_vec(), rlmc.to_vec()))
}

/// Reusable buffers for [`coupled_one_step`] in Monte Carlo loops.
pub struct CoupledKernel {
    potential: Potential,
    diag: Vec<f64>,
    xi_prime: Vec<f64>,
    z1: Vec<f64>,
    z2: Vec<f64>,
    grad: Vec<f64>,
    midpoint: Vec<f64>,
    exact: Vec<f64>,
    rlmc: Vec<f64>,
}

impl CoupledKernel {
    pub fn new(p: &Potential) -> Result<Self> {
        let diag = p.quadratic_diag().ok_or(Error::NotDiagonal)?.to_vec();
        let dim = p.dim();
        Ok(CoupledKernel {
            potential: p.clone(),
            diag,
            xi_prime: vec![0.0; dim],
            z1: vec![0.0; dim],
            z2: vec![0.0; dim],
            grad: vec![0.0; dim],
            midpoint: vec![0.0; dim],
            exact: vec![0.0; dim],
            rlmc: vec![0.0; dim],
        })
    }

    /// Returns `(x_exact, y_rlmc)` as borrowed slices valid until the next
    /// call.
    pub fn step(&mut self, x: &[f64], gamma: f64, rng: &mut RngStreams) -> Result<(&[f64], &[f64])> {
        check_vec(&self.potential, x)?;
        if gamma.is_nan() || gamma <= 0.0 || gamma >= 1.0 {
            return Err(Error::invalid(format!(
                "coupled step requires gamma in (0, 1), got {gamma}"
            )));
        }
        let u = rng.uniform();
        rng.xi_prime_into(&mut self.xi_prime);
        rng.xi_into(&mut self.z1);
        rng.xi_into(&mut self.z2);

        let sqrt_gamma = gamma.sqrt();
        for (i, (&xi_coord, &lambda)) in x.iter().zip(&self.diag).enumerate() {
            let c_bs = -(-lambda * gamma).exp_m1() / lambda;
            let v_s = -(-2.0 * lambda * gamma).exp_m1() / (2.0 * lambda);
            // Cholesky of [[gamma, c_bs], [c_bs, v_s]] given B = sqrt(gamma) z1.
            let resid = (v_s - c_bs * c_bs / gamma).max(0.0);
            let s = c_bs / sqrt_gamma * self.z1[i] + resid.sqrt() * self.z2[i];
            self.exact[i] = (-lambda * gamma).exp() * xi_coord + std::f64::consts::SQRT_2 * s;
        }

        // Midpoint scheme with the coupled endpoint noise xi = B / sqrt(gamma) = z1.
        self.potential.grad_into(x, &mut self.grad)?;
        drift_diffuse_into(x, &self.grad, u * gamma, &self.xi_prime, &mut self.midpoint);
        self.potential.grad_into(&self.midpoint, &mut self.grad)?;
        drift_diffuse_into(x, &self.grad, gamma, &self.z1, &mut self.rlmc);
        Ok((&self.exact, &self.rlmc))
    }
}

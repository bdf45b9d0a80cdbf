//! Empirical distances, the Lyapunov drift checker, the test-function
//! distance proxy, semigroup gradient-decay checks, slope fitting and
//! bootstrap standard errors.

use crate::error::{Error, Result};
use crate::oracle;
use crate::potential::Potential;
use crate::rng::RngStreams;
use crate::sampler::StepKernel;

/// A smooth test function with certified derivative bounds.
///
/// Every member has `sup |grad h| <= 1` and `sup |Hess h| <= 1`:
///
/// * `TanhCoord`: `h(x) = tanh(x_i)`; gradient bound 1 (at the origin),
///   Hessian bound `max |2 tanh sech^2| = 4 / (3 sqrt 3) ~ 0.770`.
/// * `HalfLogCoshCoord`: `h(x) = log(cosh(x_i)) / 2`; gradient `tanh/2`
///   bound 1/2, Hessian `sech^2 / 2` bound 1/2.
/// * `GaussBump`: `h(x) = exp(-|x - c|^2 / 4)`; the gradient norm
///   `(r/2) e^{-r^2/4}` peaks at `r = sqrt 2` with value
///   `e^{-1/2} / sqrt 2 ~ 0.429`, and the Hessian eigenvalues
///   `h (r^2/4 - 1/2)` (radial) and `-h/2` (transverse) are bounded by 1/2.
#[derive(Debug, Clone)]
pub enum TestFunction {
    TanhCoord(usize),
    HalfLogCoshCoord(usize),
    GaussBump { center: Vec<f64> },
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::TanhCoord(i) => x[*i].tanh(),
            TestFunction::HalfLogCoshCoord(i) => {
                let t = x[*i].abs();
                0.5 * (t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2)
            }
            TestFunction::GaussBump { center } => {
                let r_sq: f64 =
                    x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                (-r_sq / 4.0).exp()
            }
        }
    }

    /// Certified `sup |grad h|`.
    pub fn grad_bound(&self) -> f64 {
        match self {
            TestFunction::TanhCoord(_) => 1.0,
            TestFunction::HalfLogCoshCoord(_) => 0.5,
            TestFunction::GaussBump { .. } => (-0.5f64).exp() / std::f64::consts::SQRT_2,
        }
    }

    /// Certified `sup |Hess h|` (operator norm).
    pub fn hessian_bound(&self) -> f64 {
        match self {
            TestFunction::TanhCoord(_) => 4.0 / (3.0 * 3.0f64.sqrt()),
            TestFunction::HalfLogCoshCoord(_) => 0.5,
            TestFunction::GaussBump { .. } => 0.5,
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::TanhCoord(i) => format!("tanh_x{}", i + 1),
            TestFunction::HalfLogCoshCoord(i) => format!("half_log_cosh_x{}", i + 1),
            TestFunction::GaussBump { center } => {
                format!("gauss_bump_{:+.1}", center.iter().map(|c| c * c).sum::<f64>().sqrt())
            }
        }
    }
}

/// A fixed finite family of unit-normalized smooth test functions. The
/// maximum mean discrepancy over the suite is a certified lower bound on the
/// smooth-function-class distance, since every member has gradient and
/// Hessian bounds at most 1.
#[derive(Debug, Clone)]
pub struct TestFunctionSuite {
    members: Vec<TestFunction>,
}

impl TestFunctionSuite {
    /// Coordinatewise `tanh` and `log cosh / 2` plus radial Gaussian bumps
    /// centered at `0` and `+-2 * ones / sqrt(d)`.
    pub fn standard(dim: usize) -> Self {
        let mut members = Vec::new();
        for i in 0..dim {
            members.push(TestFunction::TanhCoord(i));
            members.push(TestFunction::HalfLogCoshCoord(i));
        }
        let unit = 1.0 / (dim as f64).sqrt();
        for offset in [-2.0, 0.0, 2.0] {
            members.push(TestFunction::GaussBump { center: vec![offset * unit; dim] });
        }
        TestFunctionSuite { members }
    }

    pub fn members(&self) -> &[TestFunction] {
        &self.members
    }
}

/// Order of the one-dimensional empirical Wasserstein distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WassersteinOrder {
    One,
    Two,
}

/// Empirical Wasserstein distance between two one-dimensional samples via
/// the sorted (quantile) coupling: `W_p^p = mean |a_(i) - b_(i)|^p`.
///
/// Unequal sample counts are reduced to the smaller count by taking evenly
/// spaced order statistics of the larger sample.
pub fn empirical_w_1d(a: &[f64], b: &[f64], order: WassersteinOrder) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySamples("empirical_w_1d"));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let n = sa.len().min(sb.len());
    let thin = |s: &Vec<f64>| -> Vec<f64> {
        if s.len() == n {
            s.clone()
        } else {
            (0..n)
                .map(|i| s[((i as f64 + 0.5) * s.len() as f64 / n as f64) as usize])
                .collect()
        }
    };
    let sa = thin(&sa);
    let sb = thin(&sb);
    let mean: f64 = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| {
            let d = (x - y).abs();
            match order {
                WassersteinOrder::One => d,
                WassersteinOrder::Two => d * d,
            }
        })
        .sum::<f64>()
        / n as f64;
    Ok(match order {
        WassersteinOrder::One => mean,
        WassersteinOrder::Two => mean.sqrt(),
    })
}

/// Bootstrap standard error of [`empirical_w_1d`] under independent
/// resampling of both sample sets.
pub fn bootstrap_w_se(
    a: &[f64],
    b: &[f64],
    order: WassersteinOrder,
    n_boot: usize,
    rng: &mut RngStreams,
) -> Result<f64> {
    if n_boot < 2 {
        return Err(Error::invalid("n_boot must be >= 2"));
    }
    let mut values = Vec::with_capacity(n_boot);
    let mut ra = vec![0.0; a.len()];
    let mut rb = vec![0.0; b.len()];
    for _ in 0..n_boot {
        for v in ra.iter_mut() {
            *v = a[rng.index(a.len())];
        }
        for v in rb.iter_mut() {
            *v = b[rng.index(b.len())];
        }
        values.push(empirical_w_1d(&ra, &rb, order)?);
    }
    Ok(std_dev(&values))
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Maximum mean discrepancy over the test-function suite: a lower bound on
/// the smooth-class distance between the sampled laws.
pub fn dg_proxy(
    samples_a: &[Vec<f64>],
    samples_b: &[Vec<f64>],
    suite: &TestFunctionSuite,
) -> Result<f64> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::EmptySamples("dg_proxy"));
    }
    let mut best = 0.0f64;
    for h in suite.members() {
        let ma = samples_a.iter().map(|x| h.eval(x)).sum::<f64>() / samples_a.len() as f64;
        let mb = samples_b.iter().map(|x| h.eval(x)).sum::<f64>() / samples_b.len() as f64;
        best = best.max((ma - mb).abs());
    }
    Ok(best)
}

/// [`dg_proxy`] for one-dimensional samples stored as plain scalars.
pub fn dg_proxy_1d(a: &[f64], b: &[f64], suite: &TestFunctionSuite) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySamples("dg_proxy_1d"));
    }
    let mut best = 0.0f64;
    for h in suite.members() {
        let ma = a.iter().map(|v| h.eval(std::slice::from_ref(v))).sum::<f64>() / a.len() as f64;
        let mb = b.iter().map(|v| h.eval(std::slice::from_ref(v))).sum::<f64>() / b.len() as f64;
        best = best.max((ma - mb).abs());
    }
    Ok(best)
}

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope.
    pub std_error: f64,
}

/// Least squares on `(x, y)` pairs (callers pass log-log or semi-log points
/// as appropriate). Requires at least three points with non-degenerate
/// abscissae.
pub fn slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let n = points.len();
    if n < 3 {
        return Err(Error::invalid("slope_fit needs at least 3 points"));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(Error::invalid("slope_fit abscissae are degenerate"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let std_error = (ss_res / (nf - 2.0) / sxx).max(0.0).sqrt();
    Ok(SlopeFit { slope, intercept, r_squared, std_error })
}

/// Drift coefficients of the one-step Lyapunov bound for `V(x) = |x|^2`:
/// `lambda = 1 - 2 m eta + (2 L^2 + 1) eta^2` and
/// `b = (2 + L^2) d eta + L^2 d eta^3`, valid for `eta` in `(0, m/L^2]`.
pub fn drift_constants(m: f64, lipschitz: f64, dim: usize, eta: f64) -> (f64, f64) {
    let l_sq = lipschitz * lipschitz;
    let d = dim as f64;
    let lambda = 1.0 - 2.0 * m * eta + (2.0 * l_sq + 1.0) * eta * eta;
    let b = (2.0 + l_sq) * d * eta + l_sq * d * eta.powi(3);
    (lambda, b)
}

/// One row of [`drift_check`].
#[derive(Debug, Clone)]
pub struct DriftRecord {
    pub x: Vec<f64>,
    /// Monte Carlo estimate of `E|X_1|^2` from `x`.
    pub estimate: f64,
    pub std_error: f64,
    /// `lambda V(x) + b`.
    pub bound: f64,
    /// `estimate <= bound + 3 * std_error`.
    pub pass: bool,
}

/// Estimate `Q_eta V(x) = E |X_1|^2` by `n_mc` one-step draws from each grid
/// point and compare against the drift bound `lambda V(x) + b`.
///
/// The one-sided pass criterion allows 3 standard errors of Monte Carlo
/// slack. Requires `eta` in `(0, m/L^2]`, the validity range of the bound.
pub fn drift_check(
    p: &Potential,
    eta: f64,
    x_grid: &[Vec<f64>],
    n_mc: usize,
    rng: &mut RngStreams,
) -> Result<Vec<DriftRecord>> {
    let max_eta = p.m() / (p.lipschitz() * p.lipschitz());
    if !(eta > 0.0 && eta <= max_eta) {
        return Err(Error::DriftStepOutOfRange { eta, max: max_eta });
    }
    if n_mc == 0 {
        return Err(Error::invalid("n_mc must be >= 1"));
    }
    let (lambda, b) = drift_constants(p.m(), p.lipschitz(), p.dim(), eta);
    let mut kernel = StepKernel::new(p.dim());
    let mut records = Vec::with_capacity(x_grid.len());
    for x in x_grid {
        if x.len() != p.dim() {
            return Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() });
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n_mc {
            let next = kernel.step(p, x, eta, rng)?;
            let v: f64 = next.iter().map(|t| t * t).sum();
            sum += v;
            sum_sq += v * v;
        }
        let nf = n_mc as f64;
        let estimate = sum / nf;
        let var = (sum_sq / nf - estimate * estimate).max(0.0);
        let std_error = (var / nf).sqrt();
        let v0: f64 = x.iter().map(|t| t * t).sum();
        let bound = lambda * v0 + b;
        records.push(DriftRecord {
            x: x.clone(),
            estimate,
            std_error,
            bound,
            pass: estimate <= bound + 3.0 * std_error,
        });
    }
    Ok(records)
}

/// One row of [`semigroup_gradient_decay`].
#[derive(Debug, Clone)]
pub struct GradDecayRecord {
    pub t: f64,
    /// Finite-difference estimate of `|grad P_t h(x)|`.
    pub estimate: f64,
    /// `sup |grad h| * e^{-m t}`.
    pub bound: f64,
    /// Monte Carlo and finite-difference slack added to the bound.
    pub tolerance: f64,
    pub pass: bool,
}

/// Check the semigroup gradient decay `|grad P_t h(x)| <= |grad h| e^{-mt}`
/// on a diagonal quadratic target, estimating the gradient by central
/// finite differences with common random numbers: the exact transition law
/// is sampled with the same Gaussian draws at `x + delta e_i` and
/// `x - delta e_i`.
///
/// The tolerance is `3 SE + delta^2` per time point (Monte Carlo noise of
/// the difference quotient plus the second-order finite-difference bias).
pub fn semigroup_gradient_decay(
    a_diag: &[f64],
    h: &TestFunction,
    t_grid: &[f64],
    x: &[f64],
    delta: f64,
    n_mc: usize,
    rng: &mut RngStreams,
) -> Result<Vec<GradDecayRecord>> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    if n_mc < 2 {
        return Err(Error::invalid("n_mc must be >= 2"));
    }
    let dim = x.len();
    let m = a_diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut records = Vec::with_capacity(t_grid.len());
    let mut z = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    for &t in t_grid {
        let law = oracle::ou_transition(a_diag, x, t)?;
        // Shifting the start by delta e_i shifts the transition mean by
        // delta e^{-lambda_i t} e_i; covariance is unchanged.
        let mean_shift: Vec<f64> = a_diag.iter().map(|&l| delta * (-l * t).exp()).collect();
        let mut sum = vec![0.0; dim];
        let mut sum_sq = vec![0.0; dim];
        for _ in 0..n_mc {
            rng.xi_into(&mut z);
            law.sample_with(&z, &mut y);
            for i in 0..dim {
                let base = y[i];
                y[i] = base + mean_shift[i];
                let plus = h.eval(&y);
                y[i] = base - mean_shift[i];
                let minus = h.eval(&y);
                y[i] = base;
                let q = (plus - minus) / (2.0 * delta);
                sum[i] += q;
                sum_sq[i] += q * q;
            }
        }
        let nf = n_mc as f64;
        let mut norm_sq = 0.0;
        let mut se_sq = 0.0;
        for i in 0..dim {
            let g = sum[i] / nf;
            let var = (sum_sq[i] / nf - g * g).max(0.0);
            norm_sq += g * g;
            se_sq += var / nf;
        }
        let estimate = norm_sq.sqrt();
        let bound = h.grad_bound() * (-m * t).exp();
        let tolerance = 3.0 * se_sq.sqrt() + delta * delta;
        records.push(GradDecayRecord {
            t,
            estimate,
            bound,
            tolerance,
            pass: estimate <= bound + tolerance,
        });
    }
    Ok(records)
}

/// Sufficient statistics of one block of a scalar time series.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlockMoments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl BlockMoments {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(&mut self, other: &BlockMoments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }
}

/// Sample variance pooled over blocks.
pub fn pooled_variance(blocks: &[BlockMoments]) -> Result<f64> {
    let mut total = BlockMoments::default();
    for b in blocks {
        total.merge(b);
    }
    if total.n < 2 {
        return Err(Error::EmptySamples("pooled_variance"));
    }
    let n = total.n as f64;
    let mean = total.sum / n;
    Ok((total.sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0))
}

/// Block-bootstrap standard error of the pooled sample variance: blocks are
/// resampled with replacement, which preserves the within-block serial
/// dependence of the chain.
pub fn block_bootstrap_variance_se(
    blocks: &[BlockMoments],
    n_boot: usize,
    rng: &mut RngStreams,
) -> Result<f64> {
    if blocks.len() < 2 {
        return Err(Error::EmptySamples("block_bootstrap_variance_se"));
    }
    if n_boot < 2 {
        return Err(Error::invalid("n_boot must be >= 2"));
    }
    let mut values = Vec::with_capacity(n_boot);
    let mut resample = Vec::with_capacity(blocks.len());
    for _ in 0..n_boot {
        resample.clear();
        for _ in 0..blocks.len() {
            resample.push(blocks[rng.index(blocks.len())]);
        }
        values.push(pooled_variance(&resample)?);
    }
    Ok(std_dev(&values))
}

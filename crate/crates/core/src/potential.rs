//! Target potentials with certified strong-convexity and gradient-Lipschitz
//! constants.
//!
//! Both shipped families have their minimizer pinned at the origin, so
//! `grad(0) = 0` holds exactly and the certified pair `(m, L)` brackets
//! every secant curvature of the gradient field.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::RngStreams;

/// Relative slack accepted when checking probed curvature against the
/// certified `(m, L)` pair of an exact-arithmetic family.
pub const CURVATURE_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
enum Kind {
    /// `U(x) = x' A x / 2` with `A` stored as its diagonal.
    QuadraticDiagonal { diag: Vec<f64> },
    /// `U(x) = x' A x / 2` with a dense symmetric positive definite `A`.
    QuadraticDense { matrix: DMatrix<f64> },
    /// `U(x) = (a/2)|x|^2 + b * sum_i log cosh(x_i)`.
    LogCoshRidge { a: f64, b: f64 },
}

/// A target potential `U` with gradient evaluation and certified constants
/// `0 < m <= L` such that `m I <= Hess U <= L I`.
#[derive(Debug, Clone)]
pub struct Potential {
    kind: Kind,
    dim: usize,
    m: f64,
    lipschitz: f64,
}

/// Extremal secant curvatures observed by [`Potential::probe_convexity`].
#[derive(Debug, Clone, Copy)]
pub struct CurvatureReport {
    pub min_curvature: f64,
    pub max_curvature: f64,
    pub n_pairs: usize,
}

impl CurvatureReport {
    /// True when the probed range is consistent with the certified pair up
    /// to [`CURVATURE_REL_TOL`] relative slack.
    pub fn certifies(&self, m: f64, lipschitz: f64) -> bool {
        let tol_m = CURVATURE_REL_TOL * m.abs();
        let tol_l = CURVATURE_REL_TOL * lipschitz.abs();
        self.min_curvature >= m - tol_m && self.max_curvature <= lipschitz + tol_l
    }
}

impl Potential {
    /// Quadratic potential with diagonal matrix `A = diag(entries)`.
    pub fn quadratic_diagonal(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("quadratic potential needs dimension >= 1"));
        }
        if diag.iter().any(|&a| !a.is_finite() || a <= 0.0) {
            return Err(Error::invalid(
                "quadratic diagonal entries must be positive and finite",
            ));
        }
        let m = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let lipschitz = diag.iter().cloned().fold(0.0_f64, f64::max);
        let dim = diag.len();
        Ok(Potential { kind: Kind::QuadraticDiagonal { diag }, dim, m, lipschitz })
    }

    /// Quadratic potential with a dense symmetric positive definite matrix.
    /// `m` and `L` are the extreme eigenvalues of `A`.
    pub fn quadratic(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid("quadratic matrix must be square and nonempty"));
        }
        let sym_err = (&matrix - matrix.transpose()).abs().max();
        if sym_err > 1e-12 * matrix.abs().max().max(1.0) {
            return Err(Error::invalid("quadratic matrix must be symmetric"));
        }
        let dim = matrix.nrows();
        let eig = matrix.clone().symmetric_eigen();
        let m = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let lipschitz = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::invalid(format!(
                "quadratic matrix must be positive definite (smallest eigenvalue {m})"
            )));
        }
        Ok(Potential { kind: Kind::QuadraticDense { matrix }, dim, m, lipschitz })
    }

    /// `U(x) = (a/2)|x|^2 + b * sum_i log cosh(x_i)` in dimension `dim`,
    /// with `m = a` and `L = a + b`.
    pub fn log_cosh_ridge(a: f64, b: f64, dim: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid("log-cosh ridge requires a > 0"));
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::invalid("log-cosh ridge requires b >= 0"));
        }
        if dim == 0 {
            return Err(Error::invalid("log-cosh ridge needs dimension >= 1"));
        }
        Ok(Potential { kind: Kind::LogCoshRidge { a, b }, dim, m: a, lipschitz: a + b })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Strong-convexity constant `m`.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Gradient-Lipschitz constant `L`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self.kind, Kind::QuadraticDiagonal { .. } | Kind::QuadraticDense { .. })
    }

    /// Diagonal of `A` when the potential is a diagonal quadratic.
    pub fn quadratic_diag(&self) -> Option<&[f64]> {
        match &self.kind {
            Kind::QuadraticDiagonal { diag } => Some(diag),
            _ => None,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Potential value `U(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            Kind::QuadraticDiagonal { diag } => {
                0.5 * x.iter().zip(diag).map(|(xi, ai)| ai * xi * xi).sum::<f64>()
            }
            Kind::QuadraticDense { matrix } => {
                let v = DVector::from_column_slice(x);
                0.5 * (matrix * &v).dot(&v)
            }
            Kind::LogCoshRidge { a, b } => {
                let sq = x.iter().map(|xi| xi * xi).sum::<f64>();
                let lc = x.iter().map(|&xi| log_cosh(xi)).sum::<f64>();
                0.5 * a * sq + b * lc
            }
        })
    }

    /// Gradient written into `out` without allocating.
    pub fn grad_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x)?;
        self.check_dim(out)?;
        match &self.kind {
            Kind::QuadraticDiagonal { diag } => {
                for i in 0..x.len() {
                    out[i] = diag[i] * x[i];
                }
            }
            Kind::QuadraticDense { matrix } => {
                for i in 0..x.len() {
                    let mut acc = 0.0;
                    for j in 0..x.len() {
                        acc += matrix[(i, j)] * x[j];
                    }
                    out[i] = acc;
                }
            }
            Kind::LogCoshRidge { a, b } => {
                for i in 0..x.len() {
                    out[i] = a * x[i] + b * x[i].tanh();
                }
            }
        }
        Ok(())
    }

    /// Gradient `grad U(x)`; satisfies `|grad U(x)| <= L |x|` and
    /// `<grad U(x), x> >= m |x|^2`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.grad_into(x, &mut out)?;
        Ok(out)
    }

    /// Estimate extremal secant curvatures
    /// `<grad U(x) - grad U(y), x - y> / |x - y|^2` over random pairs in the
    /// centered ball of the given radius.
    ///
    /// Uses gradient secants only; no Hessian is assembled.
    pub fn probe_convexity(
        &self,
        n_probes: usize,
        radius: f64,
        rng: &mut RngStreams,
    ) -> Result<CurvatureReport> {
        if n_probes == 0 {
            return Err(Error::invalid("n_probes must be >= 1"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("radius must be positive"));
        }
        let d = self.dim;
        let mut min_c = f64::INFINITY;
        let mut max_c = f64::NEG_INFINITY;
        let mut n_pairs = 0;
        let mut gx = vec![0.0; d];
        let mut gy = vec![0.0; d];
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        for _ in 0..n_probes {
            sample_in_ball(radius, &mut x, rng);
            sample_in_ball(radius, &mut y, rng);
            let dist_sq: f64 =
                x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
            if dist_sq <= 1e-24 * radius * radius {
                continue;
            }
            self.grad_into(&x, &mut gx)?;
            self.grad_into(&y, &mut gy)?;
            let num: f64 = gx
                .iter()
                .zip(&gy)
                .zip(x.iter().zip(&y))
                .map(|((gxi, gyi), (xi, yi))| (gxi - gyi) * (xi - yi))
                .sum();
            let q = num / dist_sq;
            min_c = min_c.min(q);
            max_c = max_c.max(q);
            n_pairs += 1;
        }
        if n_pairs == 0 {
            return Err(Error::invalid("all probe pairs degenerate"));
        }
        Ok(CurvatureReport { min_curvature: min_c, max_curvature: max_c, n_pairs })
    }
}

/// Overflow-safe `log(cosh(x))`.
fn log_cosh(x: f64) -> f64 {
    let t = x.abs();
    t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2
}

/// Uniform draw in the centered ball: Gaussian direction scaled by
/// `radius * u^(1/d)`.
fn sample_in_ball(radius: f64, out: &mut [f64], rng: &mut RngStreams) {
    let d = out.len();
    loop {
        rng.xi_into(out);
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let r = radius * rng.uniform().powf(1.0 / d as f64);
            for v in out.iter_mut() {
                *v *= r / norm;
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gradient_vanishes_at_origin() {
        let p = Potential::quadratic_diagonal(vec![1.0]).unwrap();
        assert_eq!(p.grad(&[0.0]).unwrap(), vec![0.0]);
        let q = Potential::log_cosh_ridge(1.0, 2.0, 3).unwrap();
        assert_eq!(q.grad(&[0.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn quadratic_gradient_is_matrix_vector_product() {
        let p = Potential::quadratic_diagonal(vec![1.0]).unwrap();
        assert_eq!(p.grad(&[2.0]).unwrap(), vec![2.0]);

        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let p = Potential::quadratic(a.clone()).unwrap();
        let x = [0.3, -1.7];
        let g = p.grad(&x).unwrap();
        let expect = &a * DVector::from_column_slice(&x);
        for i in 0..2 {
            assert_eq!(g[i], expect[i]);
        }
    }

    #[test]
    fn log_cosh_gradient_matches_analytic_and_finite_difference() {
        let p = Potential::log_cosh_ridge(1.0, 1.0, 1).unwrap();
        let g = p.grad(&[1.0]).unwrap()[0];
        assert_relative_eq!(g, 1.0 + 1.0_f64.tanh(), max_relative = 1e-15);

        // Independent oracle: central finite difference of U.
        let h = 1e-6;
        let fd = (p.value(&[1.0 + h]).unwrap() - p.value(&[1.0 - h]).unwrap()) / (2.0 * h);
        assert_relative_eq!(g, fd, max_relative = 1e-8);
    }

    #[test]
    fn certified_constants() {
        let p = Potential::quadratic_diagonal(vec![1.0, 4.0]).unwrap();
        assert_eq!((p.m(), p.lipschitz()), (1.0, 4.0));
        let q = Potential::log_cosh_ridge(1.0, 2.0, 1).unwrap();
        assert_eq!((q.m(), q.lipschitz()), (1.0, 3.0));

        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let dense = Potential::quadratic(a).unwrap();
        assert_relative_eq!(dense.m(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(dense.lipschitz(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_invalid_construction() {
        assert!(Potential::quadratic_diagonal(vec![]).is_err());
        assert!(Potential::quadratic_diagonal(vec![0.0]).is_err());
        assert!(Potential::quadratic_diagonal(vec![-1.0]).is_err());
        assert!(Potential::log_cosh_ridge(0.0, 1.0, 1).is_err());
        assert!(Potential::log_cosh_ridge(1.0, -0.5, 1).is_err());
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Potential::quadratic(indef).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(Potential::quadratic(asym).is_err());
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let p = Potential::quadratic_diagonal(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            p.grad(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn probe_quadratic_stays_in_eigenvalue_range() {
        let p = Potential::quadratic_diagonal(vec![1.0, 4.0]).unwrap();
        let mut rng = RngStreams::new(1);
        let rep = p.probe_convexity(500, 2.0, &mut rng).unwrap();
        assert!(rep.certifies(1.0, 4.0), "report {rep:?}");
        assert!(rep.min_curvature >= 1.0 - 1e-8 && rep.min_curvature <= 4.0);
        assert!(rep.max_curvature >= 1.0 && rep.max_curvature <= 4.0 + 1e-8);
    }

    #[test]
    fn probe_log_cosh_near_origin_sees_full_curvature() {
        let p = Potential::log_cosh_ridge(1.0, 2.0, 1).unwrap();
        let mut rng = RngStreams::new(2);
        let rep = p.probe_convexity(2000, 0.05, &mut rng).unwrap();
        // sech^2 at |x| <= 0.05 is above 0.9975, so the secant curvature
        // stays within a hair of a + b = 3.
        assert!(rep.max_curvature > 2.99 && rep.max_curvature <= 3.0 + 3e-8);
        assert!(rep.certifies(1.0, 3.0));
    }

    #[test]
    fn probe_log_cosh_far_from_origin_sees_ridge_only() {
        let p = Potential::log_cosh_ridge(1.0, 2.0, 1).unwrap();
        let mut rng = RngStreams::new(3);
        let rep = p.probe_convexity(4000, 25.0, &mut rng).unwrap();
        // Pairs with both points near |x| ~ 20 observe curvature ~ a = 1.
        assert!(rep.min_curvature < 1.05, "min {}", rep.min_curvature);
        assert!(rep.min_curvature >= 1.0 - 1e-8);
    }

    #[test]
    fn log_cosh_value_is_overflow_safe() {
        let p = Potential::log_cosh_ridge(1.0, 1.0, 1).unwrap();
        let v = p.value(&[800.0]).unwrap();
        assert!(v.is_finite());
        // log cosh(x) -> |x| - log 2 for large |x|.
        assert_relative_eq!(
            v,
            0.5 * 800.0 * 800.0 + 800.0 - std::f64::consts::LN_2,
            max_relative = 1e-14
        );
    }
}

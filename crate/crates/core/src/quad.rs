//! Gauss-Legendre and Gauss-Hermite quadrature rules.
//!
//! Nodes and weights come from the Golub-Welsch algorithm: the recurrence
//! coefficients of the orthogonal polynomial family form a symmetric
//! tridiagonal Jacobi matrix whose eigenvalues are the nodes and whose
//! eigenvector first components give the weights.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Gauss-Legendre rule on [-1, 1] (weight function 1).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Gauss-Hermite rule with weight `e^{-t^2}` on the whole real line.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Eigen-decompose the Jacobi matrix with zero diagonal and the given
/// off-diagonal entries; returns (nodes, squared first components).
fn golub_welsch(off_diag: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = off_diag.len() + 1;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for (k, &b) in off_diag.iter().enumerate() {
        jacobi[(k, k + 1)] = b;
        jacobi[(k + 1, k)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let first = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

impl GaussLegendre {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid("Gauss-Legendre degree must be >= 2"));
        }
        let off: Vec<f64> = (1..degree)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        let (nodes, first_sq) = golub_welsch(&off);
        // Total weight on [-1, 1] is 2.
        let weights = first_sq.into_iter().map(|w| 2.0 * w).collect();
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes mapped to `[a, b]` with matching weights (weights sum to `b - a`).
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

impl GaussHermite {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid("Gauss-Hermite degree must be >= 2"));
        }
        let off: Vec<f64> = (1..degree).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let (nodes, first_sq) = golub_welsch(&off);
        // Total weight is integral of e^{-t^2} = sqrt(pi).
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let weights = first_sq.into_iter().map(|w| sqrt_pi * w).collect();
        Ok(GaussHermite { nodes, weights })
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `integral e^{-t^2} f(t) dt`.
    pub fn integrate_weighted(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// `E[f(Z)]` for `Z ~ N(mean, sd^2)` via the substitution
    /// `z = mean + sqrt(2) sd t`.
    pub fn gaussian_expectation(&self, mean: f64, sd: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sd;
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| inv_sqrt_pi * w * f(mean + scale * t))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(5).unwrap();
        assert_relative_eq!(gl.integrate(0.0, 1.0, |x| x * x * x), 0.25, max_relative = 1e-14);
        assert_relative_eq!(
            gl.integrate(-1.0, 1.0, |x| x.powi(8)),
            2.0 / 9.0,
            max_relative = 1e-13
        );
        // Degree 5 is exact through polynomial degree 9.
        assert_relative_eq!(gl.integrate(-1.0, 1.0, |x| x.powi(9) + 1.0), 2.0, max_relative = 1e-13);
    }

    #[test]
    fn legendre_smooth_integrand() {
        let gl = GaussLegendre::new(24).unwrap();
        assert_relative_eq!(
            gl.integrate(0.0, std::f64::consts::PI, f64::sin),
            2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn legendre_weights_sum_to_interval_length() {
        let gl = GaussLegendre::new(64).unwrap();
        let total: f64 = gl.mapped(0.0, 1.0).map(|(_, w)| w).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn hermite_moments() {
        let gh = GaussHermite::new(32).unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_relative_eq!(gh.integrate_weighted(|_| 1.0), sqrt_pi, max_relative = 1e-13);
        assert_relative_eq!(gh.integrate_weighted(|t| t * t), sqrt_pi / 2.0, max_relative = 1e-13);
        assert_relative_eq!(
            gh.integrate_weighted(|t| t.powi(4)),
            0.75 * sqrt_pi,
            max_relative = 1e-13
        );
    }

    #[test]
    fn hermite_cosine_closed_form() {
        // integral e^{-t^2} cos t = sqrt(pi) e^{-1/4}
        let gh = GaussHermite::new(32).unwrap();
        assert_relative_eq!(
            gh.integrate_weighted(f64::cos),
            std::f64::consts::PI.sqrt() * (-0.25f64).exp(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn gaussian_expectation_matches_moments() {
        let gh = GaussHermite::new(32).unwrap();
        assert_relative_eq!(gh.gaussian_expectation(1.5, 2.0, |z| z), 1.5, max_relative = 1e-13);
        assert_relative_eq!(
            gh.gaussian_expectation(1.5, 2.0, |z| z * z),
            1.5 * 1.5 + 4.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn degree_guards() {
        assert!(GaussLegendre::new(1).is_err());
        assert!(GaussHermite::new(0).is_err());
    }
}

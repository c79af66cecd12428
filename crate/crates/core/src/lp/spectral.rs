//! Spectral quantities of the basis: power-method norm estimate, exact
//! singular values, and the symmetric embedding used by the linear-system
//! oracle.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

const POWER_ITERATION_CAP: usize = 20_000;

/// Result of [`estimate_sigma_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit; `value` is then the best estimate.
    pub converged: bool,
}

/// Estimates the largest singular value by power iteration on `AᵀA`.
///
/// Every iterate satisfies `‖Av‖ ≤ σ_max`, so the estimate never overshoots.
/// Iteration continues until the estimate stalls, which is far tighter than
/// the requested `(1 - ε′)` relative accuracy.
pub fn estimate_sigma_max(matrix: &SparseMatrix, eps_prime: f64) -> Result<SigmaEstimate> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps' = {eps_prime} must lie in (0, 1)"
        )));
    }
    if matrix.nnz() == 0 {
        return Err(Error::InvalidParameter(
            "power method on a zero matrix".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_5eed);
    let mut v: Vec<f64> = (0..matrix.ncols())
        .map(|_| rng.gen_range(0.5..1.5))
        .collect();
    normalize(&mut v);
    let mut sigma = norm(&matrix.mul_vec(&v));
    let tol = (1e-15f64).min(eps_prime * 1e-6);
    for it in 1..=POWER_ITERATION_CAP {
        let av = matrix.mul_vec(&v);
        let mut next = matrix.tr_mul_vec(&av);
        if norm(&next) == 0.0 {
            // v landed in the null space; restart along a coordinate axis
            next = vec![0.0; v.len()];
            next[it % v.len()] = 1.0;
        }
        normalize(&mut next);
        let next_sigma = norm(&matrix.mul_vec(&next));
        v = next;
        let delta = next_sigma - sigma;
        sigma = sigma.max(next_sigma);
        if delta.abs() <= tol * sigma {
            return Ok(SigmaEstimate {
                value: sigma,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(SigmaEstimate {
        value: sigma,
        iterations: POWER_ITERATION_CAP,
        converged: false,
    })
}

/// Singular values in decreasing order.
pub fn singular_values(matrix: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = matrix.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Exact condition number `σ_max / σ_min` of a square matrix.
pub fn condition_number(matrix: &DMatrix<f64>) -> Result<f64> {
    let sv = singular_values(matrix);
    let (max, min) = (sv[0], *sv.last().unwrap());
    if max == 0.0 || min <= 1e-12 * max {
        return Err(Error::BasisSingular);
    }
    Ok(max / min)
}

/// The symmetric embedding `[[0, A], [Aᵀ, 0]]` with right-hand side `(b, 0)`.
#[derive(Debug, Clone)]
pub struct SymmetrizedSystem {
    matrix: DMatrix<f64>,
    half: usize,
}

impl SymmetrizedSystem {
    pub fn new(a: &DMatrix<f64>) -> Self {
        assert!(a.is_square(), "embedding expects a square basis");
        let m = a.nrows();
        let mut matrix = DMatrix::zeros(2 * m, 2 * m);
        matrix.view_mut((0, m), (m, m)).copy_from(a);
        matrix.view_mut((m, 0), (m, m)).copy_from(&a.transpose());
        Self { matrix, half: m }
    }

    pub fn dimension(&self) -> usize {
        2 * self.half
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn embed_rhs(&self, b: &[f64]) -> DVector<f64> {
        let mut rhs = DVector::zeros(2 * self.half);
        rhs.rows_mut(0, self.half).copy_from_slice(b);
        rhs
    }

    /// Solves the embedded system and returns the `x` block of `(0, x)`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let z = self
            .matrix
            .clone()
            .lu()
            .solve(&self.embed_rhs(b))
            .ok_or(Error::BasisSingular)?;
        Ok(z.rows(self.half, self.half).iter().copied().collect())
    }

    /// Eigenvalues sorted increasingly.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    v.iter_mut().for_each(|x| *x /= n);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_permutation() {
        let eps = 1e-4;
        let diag = SparseMatrix::from_dense(&DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0])));
        let est = estimate_sigma_max(&diag, eps).unwrap();
        assert!(est.value <= 3.0 && est.value >= 3.0 * (1.0 - eps));
        assert!(est.converged);
        let perm = SparseMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let est = estimate_sigma_max(&perm, eps).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_matrix() {
        let z = SparseMatrix::from_columns(2, &[vec![], vec![]]).unwrap();
        assert!(estimate_sigma_max(&z, 1e-4).is_err());
    }

    #[test]
    fn symmetric_embedding_solves_original_system() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let sys = SymmetrizedSystem::new(&a);
        let x = sys.solve(&[3.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert_eq!(sys.dimension(), 4);
    }

    #[test]
    fn condition_number_of_singular_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(condition_number(&a), Err(Error::BasisSingular));
    }
}

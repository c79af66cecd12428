use nalgebra::DMatrix;

use super::instance::LpInstance;
use super::spectral::{condition_number, estimate_sigma_max, SigmaEstimate};
use crate::error::{Error, Result};

pub const DEFAULT_EPS_PRIME: f64 = 1e-4;

/// An ordered basis together with the scale factors that bring the data into
/// the regime the quantum subroutines expect (`‖c_B‖ = 1`, `‖A_B‖ ≤ 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct BasisState {
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Multiplier applied to `c`; `1/‖c_B‖` after normalization.
    pub cost_scale: f64,
    /// Multiplier applied to `A`; `(1 - ε′)/σ̂_max` after normalization.
    pub matrix_scale: f64,
    /// Condition number bound valid for the scaled basis.
    pub kappa: f64,
    pub basis_row_nnz_max: usize,
    pub basis_sparsity: usize,
    /// Set when `c_B = 0` and cost normalization was skipped.
    pub cost_degenerate: bool,
    pub sigma_estimate: Option<SigmaEstimate>,
}

/// Sparsity and conditioning of a basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityStats {
    pub d_c: usize,
    pub d_r: usize,
    pub d: usize,
    pub kappa: f64,
}

impl BasisState {
    /// Validates `basis` (m distinct in-range columns, nonsingular) and
    /// records its statistics. Scale factors start at 1.
    pub fn new(instance: &LpInstance, basis: Vec<usize>) -> Result<Self> {
        let m = instance.num_rows();
        let n = instance.num_cols();
        if basis.len() != m {
            return Err(Error::InvalidInstance(format!(
                "basis has {} columns, expected {m}",
                basis.len()
            )));
        }
        let mut seen = vec![false; n];
        for &j in &basis {
            if j >= n || seen[j] {
                return Err(Error::BasisSingular);
            }
            seen[j] = true;
        }
        let nonbasic = (0..n).filter(|&j| !seen[j]).collect();
        let stats = sparsity_stats(instance, &basis)?;
        Ok(Self {
            basis,
            nonbasic,
            cost_scale: 1.0,
            matrix_scale: 1.0,
            kappa: stats.kappa,
            basis_row_nnz_max: stats.d_r,
            basis_sparsity: stats.d,
            cost_degenerate: false,
            sigma_estimate: None,
        })
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn nonbasic(&self) -> &[usize] {
        &self.nonbasic
    }

    pub fn num_rows(&self) -> usize {
        self.basis.len()
    }

    /// Basis after replacing the column in position `leaving_row` by `entering`.
    pub fn pivot(&self, instance: &LpInstance, entering: usize, leaving_row: usize) -> Result<BasisState> {
        let mut basis = self.basis.clone();
        basis[leaving_row] = entering;
        BasisState::new(instance, basis)
    }

    /// Scaled basis matrix `matrix_scale · A_B`.
    pub fn scaled_basis_matrix(&self, instance: &LpInstance) -> DMatrix<f64> {
        instance.basis_matrix(&self.basis) * self.matrix_scale
    }

    /// Scaled column `matrix_scale · A_k`.
    pub fn scaled_column(&self, instance: &LpInstance, k: usize) -> Vec<f64> {
        instance
            .matrix()
            .column_dense(k)
            .into_iter()
            .map(|v| v * self.matrix_scale)
            .collect()
    }

    /// Scaled cost vector `cost_scale · c`.
    pub fn scaled_costs(&self, instance: &LpInstance) -> Vec<f64> {
        instance.cost().iter().map(|v| v * self.cost_scale).collect()
    }

    pub fn scaled_basis_costs(&self, instance: &LpInstance) -> Vec<f64> {
        self.basis.iter().map(|&j| instance.cost()[j] * self.cost_scale).collect()
    }
}

/// Rescales `c` so that `‖c_B‖ = 1` and `A` so that `‖A_B‖ ≤ 1`, inflating
/// κ by `1/(1 - ε′)` so that the scaled spectrum lies in `[1/κ, 1]`.
///
/// A zero `c_B` leaves the cost scale at 1 and sets `cost_degenerate`.
pub fn normalize(instance: &LpInstance, state: &BasisState, eps_prime: f64) -> Result<BasisState> {
    if !(eps_prime > 0.0 && eps_prime < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "eps' = {eps_prime} must lie in (0, 1/2)"
        )));
    }
    let basis = instance.matrix().select_columns(state.basis());
    let exact_kappa = condition_number(&basis.to_dense())?;
    let sigma = estimate_sigma_max(&basis, eps_prime)?;
    let cb_norm = instance
        .basis_costs(state.basis())
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    let mut out = state.clone();
    if cb_norm == 0.0 {
        out.cost_scale = 1.0;
        out.cost_degenerate = true;
    } else {
        out.cost_scale = 1.0 / cb_norm;
        out.cost_degenerate = false;
    }
    out.matrix_scale = (1.0 - eps_prime) / sigma.value;
    out.kappa = exact_kappa / (1.0 - eps_prime);
    out.sigma_estimate = Some(sigma);
    Ok(out)
}

/// Counts `d_c` over all of A, `d_r` over the rows of `A_B`, and computes the
/// exact condition number of `A_B` from a dense SVD.
pub fn sparsity_stats(instance: &LpInstance, basis: &[usize]) -> Result<SparsityStats> {
    let sub = instance.matrix().select_columns(basis);
    let d_c = instance.col_nnz_max();
    let d_r = sub.max_row_nnz();
    let kappa = condition_number(&sub.to_dense())?;
    Ok(SparsityStats {
        d_c,
        d_r,
        d: d_c.max(d_r),
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_lp(m: usize, cb: &[f64]) -> LpInstance {
        let mut a = DMatrix::zeros(m, m + 1);
        for i in 0..m {
            a[(i, i)] = 1.0;
            a[(i, m)] = 1.0;
        }
        let mut c = cb.to_vec();
        c.push(0.5);
        LpInstance::from_dense(&a, &vec![1.0; m], &c).unwrap()
    }

    #[test]
    fn identity_basis_scales() {
        let s2 = 2f64.sqrt();
        let lp = identity_lp(2, &[1.0, 1.0]);
        let st = BasisState::new(&lp, vec![0, 1]).unwrap();
        let norm = normalize(&lp, &st, 1e-4).unwrap();
        assert!((norm.cost_scale - 1.0 / s2).abs() < 1e-15);
        assert!((norm.matrix_scale - 0.9999).abs() < 1e-12);
        assert!((norm.kappa - 1.0 / 0.9999).abs() < 1e-12);
        assert!(!norm.cost_degenerate);
    }

    #[test]
    fn unit_cost_vector_keeps_scale() {
        let lp = identity_lp(4, &[0.0, 1.0, 0.0, 0.0]);
        let st = BasisState::new(&lp, vec![0, 1, 2, 3]).unwrap();
        let norm = normalize(&lp, &st, 1e-4).unwrap();
        assert_eq!(norm.cost_scale, 1.0);
        let stats = sparsity_stats(&lp, st.basis()).unwrap();
        assert_eq!(stats.d_r, 1);
        assert!((stats.kappa - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_basic_cost_is_flagged() {
        let lp = identity_lp(2, &[0.0, 0.0]);
        let st = BasisState::new(&lp, vec![0, 1]).unwrap();
        let norm = normalize(&lp, &st, 1e-4).unwrap();
        assert!(norm.cost_degenerate);
        assert_eq!(norm.cost_scale, 1.0);
    }

    #[test]
    fn invalid_bases_are_rejected() {
        let lp = identity_lp(2, &[1.0, 1.0]);
        assert_eq!(BasisState::new(&lp, vec![0, 0]), Err(Error::BasisSingular));
        assert!(BasisState::new(&lp, vec![0]).is_err());
        assert_eq!(BasisState::new(&lp, vec![0, 7]), Err(Error::BasisSingular));
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let sing = LpInstance::from_dense(&a, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(BasisState::new(&sing, vec![0, 1]), Err(Error::BasisSingular));
    }

    #[test]
    fn rejects_out_of_range_eps_prime() {
        let lp = identity_lp(2, &[1.0, 1.0]);
        let st = BasisState::new(&lp, vec![0, 1]).unwrap();
        assert!(normalize(&lp, &st, 0.5).is_err());
        assert!(normalize(&lp, &st, 0.0).is_err());
    }
}

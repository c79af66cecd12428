use nalgebra::{DMatrix, DVector};

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// Standard-form LP `min cᵀx s.t. Ax = b, x ≥ 0` with sparse `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    a: SparseMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    col_nnz_max: usize,
    max_abs_entry: f64,
    pub row_names: Option<Vec<String>>,
    pub col_names: Option<Vec<String>>,
}

impl LpInstance {
    pub fn new(a: SparseMatrix, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidInstance(
                "m and n must be positive".to_string(),
            ));
        }
        if b.len() != a.nrows() {
            return Err(Error::InvalidInstance(format!(
                "rhs has length {} but m = {}",
                b.len(),
                a.nrows()
            )));
        }
        if c.len() != a.ncols() {
            return Err(Error::InvalidInstance(format!(
                "cost has length {} but n = {}",
                c.len(),
                a.ncols()
            )));
        }
        if b.iter().chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance(
                "non-finite value in b or c".to_string(),
            ));
        }
        let col_nnz_max = a.max_column_nnz();
        let max_abs_entry = round_up_pow2(a.max_abs());
        Ok(Self {
            a,
            b,
            c,
            col_nnz_max,
            max_abs_entry,
            row_names: None,
            col_names: None,
        })
    }

    pub fn from_dense(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> Result<Self> {
        Self::new(SparseMatrix::from_dense(a), b.to_vec(), c.to_vec())
    }

    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn cost(&self) -> &[f64] {
        &self.c
    }

    /// d_c: maximum nonzeros in any column of A.
    pub fn col_nnz_max(&self) -> usize {
        self.col_nnz_max
    }

    /// L: largest |A_ij| rounded up to a power of two.
    pub fn max_abs_entry(&self) -> f64 {
        self.max_abs_entry
    }

    pub fn basis_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        self.a.select_columns(basis).to_dense()
    }

    pub fn basis_costs(&self, basis: &[usize]) -> Vec<f64> {
        basis.iter().map(|&j| self.c[j]).collect()
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        DVector::from_vec(self.a.column_dense(j))
    }

    /// Finds an identity sub-basis (one unit column per row) when `b ≥ 0`.
    /// Slack columns are conventionally appended, so the last unit column of
    /// each row wins.
    pub fn slack_basis(&self) -> Option<Vec<usize>> {
        if self.b.iter().any(|&v| v < 0.0) {
            return None;
        }
        let m = self.num_rows();
        let mut basis = vec![usize::MAX; m];
        for j in (0..self.num_cols()).rev() {
            let (rows, vals) = self.a.column(j);
            if rows.len() == 1 && vals[0] == 1.0 && basis[rows[0]] == usize::MAX {
                basis[rows[0]] = j;
            }
        }
        basis.iter().all(|&j| j != usize::MAX).then_some(basis)
    }
}

fn round_up_pow2(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    2f64.powi(x.log2().ceil() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_is_power_of_two_bound() {
        for (x, l) in [(0.3, 0.5), (1.0, 1.0), (3.0, 4.0), (4.0, 4.0), (5.0, 8.0)] {
            assert_eq!(round_up_pow2(x), l);
        }
    }

    #[test]
    fn finds_slack_basis() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 1.0]);
        let lp = LpInstance::from_dense(&a, &[1.0, 2.0], &[-1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(lp.slack_basis(), Some(vec![2, 3]));
        assert_eq!(lp.col_nnz_max(), 2);
        assert_eq!(lp.max_abs_entry(), 4.0);
        let neg = LpInstance::from_dense(&a, &[1.0, -2.0], &[0.0; 4]).unwrap();
        assert_eq!(neg.slack_basis(), None);
    }

    #[test]
    fn dense_column_counts() {
        let mut a = DMatrix::identity(5, 6);
        for i in 0..5 {
            a[(i, 5)] = 1.0 + i as f64;
        }
        let lp = LpInstance::from_dense(&a, &[1.0; 5], &[0.0; 6]).unwrap();
        assert_eq!(lp.col_nnz_max(), 5);
    }

    #[test]
    fn rejects_shape_mismatch() {
        let a = DMatrix::identity(2, 2);
        assert!(LpInstance::from_dense(&a, &[1.0], &[0.0, 0.0]).is_err());
        assert!(LpInstance::from_dense(&a, &[1.0, 1.0], &[0.0]).is_err());
    }
}

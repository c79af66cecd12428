//! Column-major sparse storage.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Compressed sparse column matrix with sorted row indices in every column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from per-column `(row, value)` lists.
    ///
    /// Explicit zeros are dropped. Rows must be in range, values finite, and
    /// no row may appear twice within one column.
    pub fn from_columns(nrows: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for (j, col) in columns.iter().enumerate() {
            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for &(row, value) in col {
                if row >= nrows {
                    return Err(Error::InvalidInstance(format!(
                        "column {j}: row index {row} out of range (m = {nrows})"
                    )));
                }
                if !value.is_finite() {
                    return Err(Error::InvalidInstance(format!(
                        "column {j}: non-finite entry at row {row}"
                    )));
                }
                if value != 0.0 {
                    entries.push((row, value));
                }
            }
            entries.sort_by_key(|&(r, _)| r);
            if entries.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidInstance(format!(
                    "column {j}: duplicate row index"
                )));
            }
            for (r, v) in entries {
                row_idx.push(r);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            nrows,
            ncols: columns.len(),
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let columns: Vec<Vec<(usize, f64)>> = (0..dense.ncols())
            .map(|j| {
                (0..dense.nrows())
                    .filter(|&i| dense[(i, j)] != 0.0)
                    .map(|i| (i, dense[(i, j)]))
                    .collect()
            })
            .collect();
        Self::from_columns(dense.nrows(), &columns).expect("dense matrix entries are valid")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn column_dense(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        let (rows, vals) = self.column(j);
        for (&r, &v) in rows.iter().zip(vals) {
            out[r] = v;
        }
        out
    }

    pub fn column_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    pub fn max_column_nnz(&self) -> usize {
        (0..self.ncols).map(|j| self.column_nnz(j)).max().unwrap_or(0)
    }

    /// Maximum number of nonzeros in any row, from a row-major count.
    pub fn max_row_nnz(&self) -> usize {
        let mut counts = vec![0usize; self.nrows];
        for &r in &self.row_idx {
            counts[r] += 1;
        }
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        self.column(j).1.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        let columns: Vec<Vec<(usize, f64)>> = cols
            .iter()
            .map(|&j| {
                let (rows, vals) = self.column(j);
                rows.iter().copied().zip(vals.iter().copied()).collect()
            })
            .collect();
        SparseMatrix::from_columns(self.nrows, &columns).expect("selected columns are valid")
    }

    pub fn scaled(&self, factor: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            let (rows, vals) = self.column(j);
            for (&r, &v) in rows.iter().zip(vals) {
                out[(r, j)] = v;
            }
        }
        out
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&r, &v) in rows.iter().zip(vals) {
                y[r] += v * xj;
            }
        }
        y
    }

    /// `y = Aᵀ x`
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        (0..self.ncols)
            .map(|j| {
                let (rows, vals) = self.column(j);
                rows.iter().zip(vals).map(|(&r, &v)| v * x[r]).sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_zeros_and_sorts_rows() {
        let m = SparseMatrix::from_columns(3, &[vec![(2, 1.0), (0, 0.0), (1, -2.0)]]).unwrap();
        assert_eq!(m.column(0), (&[1usize, 2][..], &[-2.0, 1.0][..]));
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn rejects_duplicates_and_bad_rows() {
        assert!(SparseMatrix::from_columns(2, &[vec![(0, 1.0), (0, 2.0)]]).is_err());
        assert!(SparseMatrix::from_columns(2, &[vec![(2, 1.0)]]).is_err());
        assert!(SparseMatrix::from_columns(2, &[vec![(0, f64::NAN)]]).is_err());
    }

    #[test]
    fn products_match_dense() {
        let dense = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, -1.0]);
        let s = SparseMatrix::from_dense(&dense);
        let x = [1.0, 2.0, 3.0];
        assert_eq!(s.mul_vec(&x), vec![7.0, 3.0]);
        assert_eq!(s.tr_mul_vec(&[1.0, 1.0]), vec![1.0, 3.0, 1.0]);
        assert_eq!(s.max_row_nnz(), 2);
        assert_eq!(s.max_column_nnz(), 2);
        assert_eq!(s.to_dense(), dense);
    }
}

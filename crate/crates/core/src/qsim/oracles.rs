//! Column-loading oracle `|p⟩|0⟩ ↦ |p⟩|A_{k_p}⟩` and its Frobenius-weighted
//! superposition.

use super::circuit::{prepare_state_on, PreparedUnitary};
use super::state::qubits_for;
use crate::error::{Error, Result};
use crate::lp::LpInstance;

#[derive(Debug, Clone)]
pub struct ColumnOracle {
    /// Column of A addressed by each index-register value.
    pub columns: Vec<usize>,
    pub index_qubits: usize,
    pub row_qubits: usize,
    /// Loads `|A_{k_p}⟩` into the row register, controlled on index `p`.
    pub indexed: PreparedUnitary,
    /// Prepares `Σ_p (‖A_{k_p}‖/‖A_N‖_F) |p⟩ ⊗ |A_{k_p}⟩` from `|0⟩`.
    pub weighted: PreparedUnitary,
    /// `‖A_{k_p}‖` per index.
    pub norms: Vec<f64>,
    pub frobenius: f64,
}

impl ColumnOracle {
    /// Basis index of `|p⟩ ⊗ |i⟩` (row register in the low qubits).
    pub fn index_of(&self, p: usize, row: usize) -> usize {
        (p << self.row_qubits) | row
    }
}

/// Builds both forms of the column oracle over `columns`.
pub fn column_superposition_oracle(instance: &LpInstance, columns: &[usize]) -> Result<ColumnOracle> {
    if columns.is_empty() {
        return Err(Error::InvalidParameter("column oracle over an empty set".to_string()));
    }
    let row_qubits = qubits_for(instance.num_rows());
    let index_qubits = qubits_for(columns.len());
    let mut indexed = PreparedUnitary::from_circuit(super::circuit::Circuit::new(row_qubits + index_qubits));
    let mut norms = Vec::with_capacity(columns.len());
    for (p, &k) in columns.iter().enumerate() {
        let col = instance.matrix().column_dense(k);
        let norm = instance.matrix().column_norm(k);
        if norm == 0.0 {
            return Err(Error::ZeroColumn(k));
        }
        norms.push(norm);
        let mut load = prepare_state_on(&col, row_qubits)?;
        for bit in 0..index_qubits {
            load = load.controlled(row_qubits + bit, (p >> bit) & 1 == 1);
        }
        indexed = indexed.followed_by(&load);
    }
    let frobenius = norms.iter().map(|v| v * v).sum::<f64>().sqrt();
    let index_prep = prepare_state_on(&norms, index_qubits)?;
    let index_prep = PreparedUnitary {
        circuit: index_prep.circuit.shifted(row_qubits),
        gate_cost: index_prep.gate_cost,
        real_amplitudes: true,
    };
    let weighted = index_prep.followed_by(&indexed);
    Ok(ColumnOracle {
        columns: columns.to_vec(),
        index_qubits,
        row_qubits,
        indexed,
        weighted,
        norms,
        frobenius,
    })
}

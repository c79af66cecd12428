//! Gate-model circuits, prepared unitaries and sparse state preparation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{qubits_for, StateVector};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    X,
    H,
    /// `Ry(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`
    Ry(f64),
    /// `diag(1, e^{iφ})`
    Phase(f64),
}

impl GateKind {
    fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::H => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
            }
            GateKind::Phase(phi) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, phi)]],
        }
    }

    fn inverse(self) -> GateKind {
        match self {
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Phase(p) => GateKind::Phase(-p),
            other => other,
        }
    }

    fn is_real(self) -> bool {
        !matches!(self, GateKind::Phase(_))
    }
}

/// A single-qubit gate with any number of positive (`true`) or negative
/// (`false`) controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<(usize, bool)>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self { kind, target, controls: Vec::new() }
    }

    pub fn controlled(kind: GateKind, target: usize, controls: Vec<(usize, bool)>) -> Self {
        Self { kind, target, controls }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert!(gate.target < self.num_qubits);
        debug_assert!(gate.controls.iter().all(|&(q, _)| q < self.num_qubits && q != gate.target));
        self.gates.push(gate);
    }

    /// Appends `other`, which runs after the gates already present.
    pub fn append(&mut self, other: &Circuit) {
        self.num_qubits = self.num_qubits.max(other.num_qubits);
        self.gates.extend(other.gates.iter().cloned());
    }

    /// Same gates on a register of `num_qubits ≥ self.num_qubits()` qubits.
    pub fn widened(&self, num_qubits: usize) -> Circuit {
        assert!(num_qubits >= self.num_qubits);
        Circuit { num_qubits, gates: self.gates.clone() }
    }

    /// The same circuit acting on qubits `offset ..`.
    pub fn shifted(&self, offset: usize) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits + offset,
            gates: self
                .gates
                .iter()
                .map(|g| Gate {
                    kind: g.kind,
                    target: g.target + offset,
                    controls: g.controls.iter().map(|&(q, v)| (q + offset, v)).collect(),
                })
                .collect(),
        }
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self
                .gates
                .iter()
                .rev()
                .map(|g| Gate { kind: g.kind.inverse(), target: g.target, controls: g.controls.clone() })
                .collect(),
        }
    }

    /// The circuit conditioned on `control == value`; widens the register if
    /// the control qubit lies outside it.
    pub fn controlled(&self, control: usize, value: bool) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits.max(control + 1),
            gates: self
                .gates
                .iter()
                .map(|g| {
                    let mut controls = g.controls.clone();
                    controls.push((control, value));
                    Gate { kind: g.kind, target: g.target, controls }
                })
                .collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.gates.iter().all(|g| g.kind.is_real())
    }

    /// Applies the circuit to the low `num_qubits()` qubits of `state`.
    pub fn apply(&self, state: &mut StateVector) {
        assert!(state.num_qubits() >= self.num_qubits, "state register too small for circuit");
        for g in &self.gates {
            state.apply_1q(g.target, g.kind.matrix(), &g.controls);
        }
        state.renormalize_if_drifted();
    }

    /// Dense unitary, column `j` being the image of basis state `j`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.num_qubits;
        let mut out = DMatrix::from_element(dim, dim, ZERO);
        for j in 0..dim {
            let mut s = StateVector::basis(self.num_qubits, j);
            self.apply(&mut s);
            for (i, a) in s.amplitudes().iter().enumerate() {
                out[(i, j)] = *a;
            }
        }
        out
    }
}

/// A state-preparation unitary with its accounted gate cost.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedUnitary {
    pub circuit: Circuit,
    /// One unit per (multi-)controlled rotation or controlled-X.
    pub gate_cost: u64,
    /// Set when `U|0⟩` has real amplitudes.
    pub real_amplitudes: bool,
}

impl PreparedUnitary {
    pub fn from_circuit(circuit: Circuit) -> Self {
        let gate_cost = circuit.gates().len() as u64;
        let real_amplitudes = circuit.is_real();
        Self { circuit, gate_cost, real_amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn apply(&self, state: &mut StateVector) {
        self.circuit.apply(state);
    }

    pub fn apply_inverse(&self, state: &mut StateVector) {
        self.circuit.inverse().apply(state);
    }

    pub fn inverse(&self) -> PreparedUnitary {
        PreparedUnitary {
            circuit: self.circuit.inverse(),
            gate_cost: self.gate_cost,
            real_amplitudes: self.real_amplitudes,
        }
    }

    pub fn controlled(&self, control: usize, value: bool) -> PreparedUnitary {
        PreparedUnitary {
            circuit: self.circuit.controlled(control, value),
            gate_cost: self.gate_cost,
            real_amplitudes: self.real_amplitudes,
        }
    }

    /// `then ∘ self`
    pub fn followed_by(&self, then: &PreparedUnitary) -> PreparedUnitary {
        let mut circuit = self.circuit.clone();
        circuit.append(&then.circuit);
        PreparedUnitary {
            circuit,
            gate_cost: self.gate_cost + then.gate_cost,
            real_amplitudes: self.real_amplitudes && then.real_amplitudes,
        }
    }

    /// `U|0…0⟩` on a register of `num_qubits()` qubits.
    pub fn prepared_state(&self) -> StateVector {
        let mut s = StateVector::zero(self.num_qubits());
        self.apply(&mut s);
        s
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        self.circuit.matrix()
    }
}

/// Binary-tree preparation of `|v⟩` on `qubits_for(v.len())` qubits.
pub fn prepare_sparse_state(v: &[f64]) -> Result<PreparedUnitary> {
    prepare_state_on(v, qubits_for(v.len()))
}

/// Binary-tree preparation of `|v⟩` on `num_qubits` qubits (`v` is padded
/// with zeros). Each tree node with mass splits it between its children with
/// one rotation controlled on the node's prefix; leaves use signed angles so
/// negative entries come out exactly. Nodes whose split is trivial emit no
/// gate, so the cost is at most `nnz(v) · num_qubits`.
pub fn prepare_state_on(v: &[f64], num_qubits: usize) -> Result<PreparedUnitary> {
    let dim = 1usize << num_qubits;
    if v.len() > dim {
        return Err(Error::InvalidParameter(format!(
            "vector of length {} does not fit on {num_qubits} qubits",
            v.len()
        )));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut padded = vec![0.0; dim];
    for (p, &x) in padded.iter_mut().zip(v) {
        *p = x / norm;
    }
    // mass[level][node]: squared norm of each subtree, level 0 = root
    let mut mass: Vec<Vec<f64>> = vec![padded.iter().map(|x| x * x).collect()];
    while mass.last().unwrap().len() > 1 {
        let prev = mass.last().unwrap();
        mass.push(prev.chunks(2).map(|c| c[0] + c[1]).collect());
    }
    mass.reverse();
    let mut circuit = Circuit::new(num_qubits);
    for level in 0..num_qubits {
        let target = num_qubits - 1 - level;
        let leaf = level + 1 == num_qubits;
        for node in 0..(1usize << level) {
            if mass[level][node] == 0.0 {
                continue;
            }
            let (l, r) = (2 * node, 2 * node + 1);
            let angle = if leaf {
                padded[r].atan2(padded[l])
            } else {
                mass[level + 1][r].sqrt().atan2(mass[level + 1][l].sqrt())
            };
            if angle == 0.0 {
                continue;
            }
            let controls = (0..level)
                .map(|i| (num_qubits - 1 - i, (node >> (level - 1 - i)) & 1 == 1))
                .collect();
            circuit.push(Gate::controlled(GateKind::Ry(2.0 * angle), target, controls));
        }
    }
    Ok(PreparedUnitary::from_circuit(circuit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_prepares(v: &[f64], u: &PreparedUnitary) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = u.prepared_state();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = v.get(i).copied().unwrap_or(0.0) / norm;
            assert!((a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12, "index {i}: {a} vs {want}");
        }
    }

    #[test]
    fn basis_vector_preparation() {
        let mut v = vec![0.0; 8];
        v[3] = 1.0;
        let u = prepare_sparse_state(&v).unwrap();
        assert_prepares(&v, &u);
        assert!(u.gate_cost <= 3);
        assert_eq!(u.num_qubits(), 3);
    }

    #[test]
    fn uniform_two_qubit_state() {
        let v = [0.5; 4];
        assert_prepares(&v, &prepare_sparse_state(&v).unwrap());
    }

    #[test]
    fn random_sparse_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut v = vec![0.0; 16];
            for _ in 0..3 {
                v[rng.gen_range(0..16)] = rng.gen_range(-1.0..1.0);
            }
            if v.iter().all(|&x| x == 0.0) {
                continue;
            }
            let u = prepare_sparse_state(&v).unwrap();
            assert_prepares(&v, &u);
            assert!(u.gate_cost <= 3 * 4);
            assert!(u.real_amplitudes);
        }
    }

    #[test]
    fn negative_entries_and_zero_vector() {
        let v = [-1.0, 0.0, 0.0, -2.0, 0.5];
        assert_prepares(&v, &prepare_sparse_state(&v).unwrap());
        assert_eq!(prepare_sparse_state(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn inverse_undoes_and_controls_select() {
        let v = [0.3, -0.2, 0.9, 0.1];
        let u = prepare_sparse_state(&v).unwrap();
        let mut s = u.prepared_state();
        u.apply_inverse(&mut s);
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-12);

        let cu = u.controlled(2, true);
        let mut off = StateVector::zero(3);
        cu.apply(&mut off);
        assert!((off.amplitude(0).re - 1.0).abs() < 1e-12);
        let mut on = StateVector::basis(3, 4);
        cu.apply(&mut on);
        assert!((on.amplitude(4 + 2).re - 0.9 / 0.95f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn prepared_unitaries_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = prepare_sparse_state(&v).unwrap();
        for _ in 0..20 {
            let mut s = StateVector::random(3, &mut rng);
            u.apply(&mut s);
            assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }
}

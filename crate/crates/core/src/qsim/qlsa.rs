//! Ideal quantum linear-system oracle with injectable error.
//!
//! The solution is computed classically through the symmetric embedding,
//! perturbed by exactly `ε_ls` according to the error mode, and loaded with
//! the binary-tree state preparation. Query and gate costs are charged from
//! the closed-form solve cost.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{prepare_state_on, PreparedUnitary};
use super::state::{gaussian, qubits_for};
use super::stats::QueryStats;
use crate::cost::{qlsa_cost, QlsaCost};
use crate::error::{Error, Result};
use crate::lp::SymmetrizedSystem;

/// Relative slack on the spectrum check.
const SPECTRUM_TOL: f64 = 1e-9;

/// Deviation of the returned state from the exact normalized solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QlsaErrorMode {
    /// Exact state.
    #[default]
    Zero,
    /// Rotation by exactly `ε_ls` that lowers a caller-supplied functional
    /// as much as possible.
    Worst,
    /// Rotation by exactly `ε_ls` toward a uniformly random orthogonal
    /// direction.
    Random,
}

#[derive(Debug, Clone)]
pub struct QlsaOracle {
    matrix: DMatrix<f64>,
    system: SymmetrizedSystem,
    kappa: f64,
    eps_ls: f64,
    error: QlsaErrorMode,
    sparsity: usize,
    /// Probability that the success flag is raised.
    pub success_probability: f64,
}

/// Result of one solve.
#[derive(Debug, Clone)]
pub struct QlsaOutput {
    /// `A⁻¹b`, unnormalized.
    pub solution: Vec<f64>,
    /// `A⁻¹b/‖A⁻¹b‖` padded to the register.
    pub exact_state: Vec<f64>,
    /// The returned state `|x̃⟩` on the register.
    pub state: Vec<f64>,
    pub success: bool,
    pub prep: PreparedUnitary,
    pub num_qubits: usize,
    pub cost: QlsaCost,
}

impl QlsaOutput {
    /// `‖|x̃⟩ − |x⟩‖`
    pub fn deviation(&self) -> f64 {
        self.state
            .iter()
            .zip(&self.exact_state)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl QlsaOracle {
    /// Checks that the singular values of `matrix` lie in `[1/κ, 1]`.
    pub fn new(matrix: DMatrix<f64>, kappa: f64, eps_ls: f64, error: QlsaErrorMode, sparsity: usize) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidParameter("linear system must be square and nonempty".to_string()));
        }
        if !(eps_ls > 0.0 && eps_ls < 2.0) {
            return Err(Error::InvalidParameter(format!("QLSA precision {eps_ls} outside (0, 2)")));
        }
        let system = SymmetrizedSystem::new(&matrix);
        let eig = system.eigenvalues();
        let sigma_min = eig.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let sigma_max = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if sigma_max > 1.0 + SPECTRUM_TOL || sigma_min < (1.0 - SPECTRUM_TOL) / kappa {
            return Err(Error::SpectrumOutOfRange { sigma_min, sigma_max, kappa });
        }
        Ok(Self {
            matrix,
            system,
            kappa,
            eps_ls,
            error,
            sparsity: sparsity.max(1),
            success_probability: 1.0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eps_ls(&self) -> f64 {
        self.eps_ls
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Cost of one solve.
    pub fn cost(&self) -> QlsaCost {
        qlsa_cost(self.sparsity, self.kappa, self.eps_ls, self.matrix.nrows())
    }

    /// Solves `A x = rhs` and returns `|x̃⟩` on `num_qubits` qubits (at least
    /// enough for the solution). In worst-case mode the deviation lowers
    /// `⟨adversary, x̃⟩`; without an adversary it falls back to a random
    /// direction.
    pub fn apply<R: Rng>(
        &self,
        rhs: &[f64],
        adversary: Option<&[f64]>,
        num_qubits: Option<usize>,
        rng: &mut R,
        stats: &mut QueryStats,
    ) -> Result<QlsaOutput> {
        let n = self.dimension();
        if rhs.len() != n {
            return Err(Error::InvalidParameter(format!("rhs has length {}, expected {n}", rhs.len())));
        }
        if rhs.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroVector);
        }
        let q = num_qubits.unwrap_or(0).max(qubits_for(n));
        let dim = 1usize << q;
        let solution = self.system.solve(rhs)?;
        let norm = solution.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut exact_state = vec![0.0; dim];
        for (e, s) in exact_state.iter_mut().zip(&solution) {
            *e = s / norm;
        }
        let direction = match (self.error, adversary) {
            (QlsaErrorMode::Zero, _) => None,
            (QlsaErrorMode::Worst, Some(w)) => Some(adversarial_direction(&exact_state, w)),
            (QlsaErrorMode::Worst, None) | (QlsaErrorMode::Random, _) => Some(random_direction(&exact_state, rng)),
        };
        let state = match direction {
            None => exact_state.clone(),
            Some(d) => {
                let phi = 2.0 * (self.eps_ls / 2.0).asin();
                exact_state
                    .iter()
                    .zip(&d)
                    .map(|(x, d)| phi.cos() * x + phi.sin() * d)
                    .collect()
            }
        };
        let success = self.success_probability >= 1.0 || rng.gen::<f64>() < self.success_probability;
        let prep = prepare_state_on(&state, q)?;
        let cost = self.cost();
        stats.qlsa_invocations += 1;
        stats.p_a_queries += cost.p_a_queries;
        stats.p_b_queries += cost.p_b_queries;
        stats.gate_tally += cost.gates + prep.gate_cost;
        Ok(QlsaOutput { solution, exact_state, state, success, prep, num_qubits: q, cost })
    }
}

fn unit_orthogonal(x: &[f64], v: &[f64]) -> Option<Vec<f64>> {
    let proj: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    let w: Vec<f64> = v.iter().zip(x).map(|(b, a)| b - proj * a).collect();
    let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
    (n > 1e-12).then(|| w.iter().map(|a| a / n).collect())
}

/// Unit vector orthogonal to `x` pointing along `−w` as far as possible.
fn adversarial_direction(x: &[f64], w: &[f64]) -> Vec<f64> {
    let mut padded = vec![0.0; x.len()];
    for (p, v) in padded.iter_mut().zip(w) {
        *p = -v;
    }
    unit_orthogonal(x, &padded).unwrap_or_else(|| {
        // w ∥ x: any orthogonal direction lowers ⟨w, x̃⟩ when ⟨w, x⟩ > 0;
        // take the basis vector least aligned with x.
        let j = (0..x.len()).min_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap();
        let mut e = vec![0.0; x.len()];
        e[j] = 1.0;
        unit_orthogonal(x, &e).expect("register has at least two dimensions")
    })
}

fn random_direction<R: Rng>(x: &[f64], rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..x.len()).map(|_| gaussian(rng)).collect();
        if let Some(d) = unit_orthogonal(x, &g) {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(a: DMatrix<f64>, kappa: f64, eps: f64, mode: QlsaErrorMode, b: &[f64], w: Option<&[f64]>) -> QlsaOutput {
        let oracle = QlsaOracle::new(a, kappa, eps, mode, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        oracle.apply(b, w, None, &mut rng, &mut QueryStats::default()).unwrap()
    }

    #[test]
    fn identity_zero_error() {
        let out = run(DMatrix::identity(2, 2), 1.0, 0.1, QlsaErrorMode::Zero, &[1.0, 0.0], None);
        assert!((out.state[0] - 1.0).abs() < 1e-12 && out.state[1].abs() < 1e-12);
        assert!(out.success);
    }

    #[test]
    fn diagonal_system() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.5]));
        let s = 0.5f64.sqrt();
        let out = run(a, 2.0, 0.1, QlsaErrorMode::Zero, &[s, s], None);
        let r5 = 5f64.sqrt();
        assert!((out.state[0] - 1.0 / r5).abs() < 1e-12);
        assert!((out.state[1] - 2.0 / r5).abs() < 1e-12);
        let prepared = out.prep.prepared_state();
        assert!((prepared.amplitude(1).re - 2.0 / r5).abs() < 1e-12);
    }

    #[test]
    fn worst_case_deviation_is_exact() {
        let a = DMatrix::identity(3, 3) * 0.9;
        let w = [0.0, 1.0, 0.0, 0.0];
        let out = run(a, 1.0 / 0.9, 0.01, QlsaErrorMode::Worst, &[1.0, 1.0, 0.0], Some(&w));
        assert!((out.deviation() - 0.01).abs() < 1e-12);
        assert!(out.state[1] < out.exact_state[1]);
        let out = run(DMatrix::identity(3, 3), 1.0, 0.01, QlsaErrorMode::Random, &[1.0, 2.0, 3.0], None);
        assert!((out.deviation() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn spectrum_violation() {
        let a = DMatrix::identity(2, 2) * 2.0;
        assert!(matches!(
            QlsaOracle::new(a, 1.0, 0.1, QlsaErrorMode::Zero, 1),
            Err(Error::SpectrumOutOfRange { .. })
        ));
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.1]));
        assert!(QlsaOracle::new(a, 5.0, 0.1, QlsaErrorMode::Zero, 1).is_err());
    }

    #[test]
    fn charges_solve_cost() {
        let oracle = QlsaOracle::new(DMatrix::identity(2, 2), 1.0, 0.5, QlsaErrorMode::Zero, 1).unwrap();
        let mut stats = QueryStats::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        oracle.apply(&[1.0, 1.0], None, None, &mut rng, &mut stats).unwrap();
        assert_eq!(stats.qlsa_invocations, 1);
        assert_eq!(stats.p_a_queries, qlsa_cost(1, 1.0, 0.5, 2).p_a_queries);
        assert_eq!(stats.p_b_queries, 1);
    }
}

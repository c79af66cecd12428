//! The simplex subroutines: sign estimation, pricing, optimality and
//! unboundedness tests, the ratio test, norm estimation and the iteration
//! driver, composed from the primitives in [`crate::qsim`].

mod driver;
mod pricing;
mod ratio;
mod sign;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::BasisFactor;
use crate::error::{Error, Result};
use crate::lp::{normalize, BasisState, LpInstance};
use crate::qsim::{Mode, QlsaErrorMode, QlsaOracle, QueryStats};

pub use crate::cost::column_split;
pub use driver::{
    run_quantum_simplex, simplex_iter, Diagnostics, FailureKind, IterationOutcome, IterationRecord, OutcomeTag,
    RunStatus, RunSummary, SimplexOptions,
};
pub use pricing::{
    can_enter, find_column, is_optimal, norm_estimate, norm_estimate_column, red_cost_unitary, CanEnterResult,
    FindColumnOptions, FindColumnOutcome, IsOptimalOutcome, NormEstimate, RedCostUnitary,
};
pub use ratio::{find_row, find_row_bits, is_unbounded, FindRowOutcome, IsUnboundedOutcome};
pub use sign::{
    boosted_sign, nfn_bits, nfn_threshold, nfp_bits, nfp_threshold, sign_est, sign_est_nfn, sign_est_nfp,
    sign_est_plus, sign_gadget, BoostedBit, SignEstimate, SignSampler, SignVariant,
};

/// Precision parameters of one simplex iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionParams {
    /// Optimality tolerance, relative to `‖(A_B⁻¹A_k, c_k/‖c_B‖)‖`.
    pub epsilon: f64,
    /// Feasibility tolerance.
    pub delta: f64,
    /// Ratio-test precision multiplier.
    pub t: f64,
    /// Boosting repetitions (odd).
    pub repetitions: usize,
}

impl Default for PrecisionParams {
    fn default() -> Self {
        Self { epsilon: 0.1, delta: 0.1, t: 100.0, repetitions: 15 }
    }
}

impl PrecisionParams {
    pub fn new(epsilon: f64, delta: f64, t: f64, repetitions: usize) -> Result<Self> {
        let p = Self { epsilon, delta, t, repetitions };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(Error::InvalidParameter(format!("epsilon = {} outside (0, 1/2]", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(Error::InvalidParameter(format!("delta = {} outside (0, 1/2]", self.delta)));
        }
        if !(self.t >= 1.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t = {} must be at least 1", self.t)));
        }
        if self.repetitions == 0 || self.repetitions % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "repetitions = {} must be odd and positive",
                self.repetitions
            )));
        }
        Ok(())
    }
}

/// Simulation settings and per-run mutable state: the seeded generator and
/// the resource counters.
#[derive(Debug, Clone)]
pub struct QContext {
    pub mode: Mode,
    pub qlsa_error: QlsaErrorMode,
    /// Normalization constant of norm estimation; `None` means `κ`.
    pub alpha: Option<f64>,
    /// Shift applied to the NFN decision threshold inside `can_enter`; zero
    /// except when deliberately breaking the rule to exercise the checks.
    pub nfn_threshold_offset: f64,
    pub rng: ChaCha8Rng,
    pub stats: QueryStats,
}

impl QContext {
    pub fn new(seed: u64, mode: Mode, qlsa_error: QlsaErrorMode) -> Self {
        Self {
            mode,
            qlsa_error,
            alpha: None,
            nfn_threshold_offset: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            stats: QueryStats::default(),
        }
    }
}

/// An LP with a normalized basis: `Ã = matrix_scale·A`, `c̃ = cost_scale·c`.
#[derive(Debug, Clone)]
pub struct NormalizedLp<'a> {
    pub instance: &'a LpInstance,
    pub state: BasisState,
    ab: DMatrix<f64>,
    cb: Vec<f64>,
}

impl<'a> NormalizedLp<'a> {
    pub fn new(instance: &'a LpInstance, basis: &[usize], eps_prime: f64) -> Result<Self> {
        let raw = BasisState::new(instance, basis.to_vec())?;
        let state = normalize(instance, &raw, eps_prime)?;
        let ab = state.scaled_basis_matrix(instance);
        let cb = state.scaled_basis_costs(instance);
        Ok(Self { instance, state, ab, cb })
    }

    pub fn m(&self) -> usize {
        self.instance.num_rows()
    }

    pub fn basis(&self) -> &[usize] {
        self.state.basis()
    }

    pub fn nonbasic(&self) -> &[usize] {
        self.state.nonbasic()
    }

    pub fn kappa(&self) -> f64 {
        self.state.kappa
    }

    /// `d = max(d_c, d_r)`
    pub fn sparsity(&self) -> usize {
        self.state.basis_sparsity
    }

    /// Scaled basis matrix `Ã_B`.
    pub fn ab(&self) -> &DMatrix<f64> {
        &self.ab
    }

    /// Scaled basic costs `c̃_B`.
    pub fn cb(&self) -> &[f64] {
        &self.cb
    }

    pub fn scaled_column(&self, k: usize) -> Vec<f64> {
        self.state.scaled_column(self.instance, k)
    }

    pub fn scaled_cost(&self, k: usize) -> f64 {
        self.instance.cost()[k] * self.state.cost_scale
    }

    /// Linear-system oracle for `Ã_B` at precision `eps`.
    pub fn basis_oracle(&self, eps: f64, error: QlsaErrorMode) -> Result<QlsaOracle> {
        QlsaOracle::new(self.ab.clone(), self.kappa(), eps, error, self.sparsity())
    }

    /// `A_B⁻¹ A_k` (invariant under the scaling).
    pub fn direction(&self, k: usize) -> Result<Vec<f64>> {
        Ok(BasisFactor::new(self.instance, self.basis())?.solve(&self.instance.matrix().column_dense(k)))
    }

    /// `A_B⁻¹ b`
    pub fn basic_solution(&self) -> Result<Vec<f64>> {
        Ok(BasisFactor::new(self.instance, self.basis())?.solve(self.instance.rhs()))
    }

    /// Scaled reduced cost `c̄_k/‖c_B‖` (or `c̄_k` when `c_B = 0`).
    pub fn scaled_reduced_cost(&self, k: usize) -> Result<f64> {
        let u = self.direction(k)?;
        Ok(self.scaled_cost(k) - self.cb.iter().zip(&u).map(|(c, x)| c * x).sum::<f64>())
    }

    /// `‖(A_B⁻¹A_k, c̃_k)‖`
    pub fn pricing_norm(&self, k: usize) -> Result<f64> {
        let u = self.direction(k)?;
        let c = self.scaled_cost(k);
        Ok((u.iter().map(|x| x * x).sum::<f64>() + c * c).sqrt())
    }

    /// `ρ_k = (c̄_k/‖c_B‖) / ‖(A_B⁻¹A_k, c_k/‖c_B‖)‖`, the quantity the
    /// pricing tolerances refer to.
    pub fn scaled_ratio(&self, k: usize) -> Result<f64> {
        let norm = self.pricing_norm(k)?;
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok(self.scaled_reduced_cost(k)? / norm)
    }

    /// `1/‖(−c̃_B, 1)‖`: the factor relating the reduced-cost amplitude to `ρ_k`.
    pub fn amplitude_scale(&self) -> f64 {
        1.0 / (1.0 + self.cb.iter().map(|c| c * c).sum::<f64>()).sqrt()
    }
}

/// Median of a nonempty slice.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(PrecisionParams::new(0.1, 0.1, 100.0, 15).is_ok());
        assert!(PrecisionParams::new(0.6, 0.1, 100.0, 15).is_err());
        assert!(PrecisionParams::new(0.1, 0.0, 100.0, 15).is_err());
        assert!(PrecisionParams::new(0.1, 0.1, 0.5, 15).is_err());
        assert!(PrecisionParams::new(0.1, 0.1, 2.0, 4).is_err());
        assert!(PrecisionParams::new(0.5, 0.5, 1.0, 1).is_ok());
    }

    #[test]
    fn scaled_ratio_is_invariant_under_normalization() {
        let a = DMatrix::from_row_slice(2, 3, &[2.0, 0.5, 1.0, 0.3, 3.0, -1.0]);
        let lp = LpInstance::from_dense(&a, &[1.0, 1.0], &[1.5, -2.0, 0.7]).unwrap();
        let n = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let rc = crate::classical::reduced_cost(&lp, &[0, 1], 2).unwrap();
        let cbn = (1.5f64 * 1.5 + 4.0).sqrt();
        let u = crate::classical::direction(&lp, &[0, 1], 2).unwrap();
        let norm = (u.iter().map(|x| x * x).sum::<f64>() + (0.7 / cbn).powi(2)).sqrt();
        let rho = n.scaled_ratio(2).unwrap();
        assert_eq!(rho.signum(), rc.signum());
        assert!((rho - rc / cbn / norm).abs() < 1e-10);
    }
}

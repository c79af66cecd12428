//! One simplex iteration built from the quantum subroutines, and the loop
//! that runs it to termination.

use serde::{Deserialize, Serialize};

use super::pricing::{find_column, is_optimal, FindColumnOptions};
use super::ratio::{find_row, is_unbounded};
use super::{NormalizedLp, PrecisionParams, QContext};
use crate::classical::{self, iteration_cap};
use crate::cost::column_split;
use crate::error::{Error, Result};
use crate::lp::{LpInstance, DEFAULT_EPS_PRIME};
use crate::qsim::QueryStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// No row passed the ratio-test sign check although the column was
    /// judged bounded. Recovery options: relax the sign check, or treat the
    /// instance as numerically close to unbounded.
    NoPositiveDenominator,
    /// The pivot produced a singular basis.
    SingularPivot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum OutcomeTag {
    Optimal,
    Unbounded { column: usize },
    Pivot { entering: usize, leaving_row: usize },
    Failure { kind: FailureKind },
}

impl OutcomeTag {
    pub fn name(&self) -> &'static str {
        match self {
            OutcomeTag::Optimal => "optimal",
            OutcomeTag::Unbounded { .. } => "unbounded",
            OutcomeTag::Pivot { .. } => "pivot",
            OutcomeTag::Failure { .. } => "failure",
        }
    }
}

/// Estimates produced during an iteration next to their exact values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub kappa: f64,
    pub cost_scale: f64,
    pub matrix_scale: f64,
    /// `IsOptimal` said "not optimal" but no column could be found, so the
    /// basis was accepted as numerically optimal.
    pub numerically_optimal: bool,
    /// The entering column came from the NFP retry.
    pub recovered: bool,
    pub column_blocks: usize,
    /// Estimated and exact scaled reduced-cost ratio `ρ_k`.
    pub rho_estimate: Option<f64>,
    pub rho_exact: Option<f64>,
    /// Unscaled reduced cost `c̄_k`.
    pub reduced_cost: Option<f64>,
    /// Estimated and exact `x_ℓ/u_ℓ` at the chosen row.
    pub ratio_estimate: Option<f64>,
    pub ratio_exact: Option<f64>,
    /// All subroutines reported sound evaluations.
    pub sound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub tag: OutcomeTag,
    pub stats: QueryStats,
    pub diagnostics: Diagnostics,
}

/// Settings of the iteration loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub eps_prime: f64,
    /// Defaults to `50(m + n)`.
    pub max_iterations: Option<usize>,
    /// Search for the entering column in blocks when the split threshold holds.
    pub split: bool,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { eps_prime: DEFAULT_EPS_PRIME, max_iterations: None, split: false }
    }
}

/// Normalize, test optimality, price, test unboundedness, and run the
/// ratio test. The basis itself is not modified.
pub fn simplex_iter(
    instance: &LpInstance,
    basis: &[usize],
    params: &PrecisionParams,
    options: &SimplexOptions,
    ctx: &mut QContext,
) -> Result<IterationOutcome> {
    params.validate()?;
    let start = ctx.stats;
    let nlp = NormalizedLp::new(instance, basis, options.eps_prime)?;
    let mut diag = Diagnostics {
        kappa: nlp.kappa(),
        cost_scale: nlp.state.cost_scale,
        matrix_scale: nlp.state.matrix_scale,
        column_blocks: 1,
        sound: true,
        ..Diagnostics::default()
    };
    let finish = |tag, diag, ctx: &QContext| IterationOutcome { tag, stats: ctx.stats.since(&start), diagnostics: diag };

    let opt = is_optimal(&nlp, params, ctx)?;
    diag.sound &= opt.sound;
    if opt.optimal {
        return Ok(finish(OutcomeTag::Optimal, diag, ctx));
    }

    let blocks = if options.split {
        let m = instance.num_rows();
        column_split(nlp.nonbasic().len(), m, instance.col_nnz_max(), nlp.sparsity(), nlp.kappa())
    } else {
        None
    };
    let col = find_column(&nlp, params, FindColumnOptions { recovery: true, blocks }, ctx)?;
    diag.sound &= col.sound;
    diag.recovered = col.recovered;
    diag.column_blocks = col.blocks;
    let Some(k) = col.column else {
        diag.numerically_optimal = true;
        return Ok(finish(OutcomeTag::Optimal, diag, ctx));
    };
    diag.rho_estimate = col.rho_estimate;
    diag.rho_exact = Some(nlp.scaled_ratio(k)?);
    diag.reduced_cost = Some(classical::reduced_cost(instance, basis, k)?);

    let unb = is_unbounded(&nlp, k, params, ctx)?;
    diag.sound &= unb.sound;
    if unb.unbounded {
        return Ok(finish(OutcomeTag::Unbounded { column: k }, diag, ctx));
    }

    let row = find_row(&nlp, k, params, ctx)?;
    diag.sound &= row.sound;
    let Some(l) = row.row else {
        return Ok(finish(OutcomeTag::Failure { kind: FailureKind::NoPositiveDenominator }, diag, ctx));
    };
    let x = nlp.basic_solution()?;
    let u = nlp.direction(k)?;
    diag.ratio_estimate = row.ratio_estimate;
    diag.ratio_exact = Some(x[l] / u[l]);
    Ok(finish(OutcomeTag::Pivot { entering: k, leaving_row: l }, diag, ctx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub basis: Vec<usize>,
    pub objective: f64,
    pub outcome: OutcomeTag,
    pub stats: QueryStats,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Optimal,
    Unbounded { column: usize },
    Failure { kind: FailureKind },
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub basis: Vec<usize>,
    pub objective: f64,
    pub x_basic: Vec<f64>,
    pub iterations: usize,
    pub pivots: usize,
    pub stats: QueryStats,
    pub records: Vec<IterationRecord>,
}

/// Iterates from `start` (or the slack basis) until optimality,
/// unboundedness, failure or the iteration cap.
pub fn run_quantum_simplex(
    instance: &LpInstance,
    start: Option<Vec<usize>>,
    params: &PrecisionParams,
    options: &SimplexOptions,
    ctx: &mut QContext,
) -> Result<RunSummary> {
    params.validate()?;
    let mut basis = match start {
        Some(b) => b,
        None => instance
            .slack_basis()
            .ok_or_else(|| Error::InfeasibleStart("no slack basis; supply a starting basis".to_string()))?,
    };
    let x0 = classical::basic_solution(instance, &basis)?;
    if let Some(v) = x0.iter().find(|&&v| v < -1e-9) {
        return Err(Error::InfeasibleStart(format!("starting basis has x = {v}")));
    }
    let cap = options
        .max_iterations
        .unwrap_or_else(|| iteration_cap(instance.num_rows(), instance.num_cols()));
    let begin = ctx.stats;
    let mut records = Vec::new();
    let mut pivots = 0;
    let mut status = RunStatus::IterationCap;
    for iteration in 0..cap {
        let objective = classical::objective(instance, &basis)?;
        let out = simplex_iter(instance, &basis, params, options, ctx)?;
        records.push(IterationRecord {
            iteration,
            basis: basis.clone(),
            objective,
            outcome: out.tag,
            stats: out.stats,
            diagnostics: out.diagnostics,
        });
        match out.tag {
            OutcomeTag::Optimal => {
                status = RunStatus::Optimal;
                break;
            }
            OutcomeTag::Unbounded { column } => {
                status = RunStatus::Unbounded { column };
                break;
            }
            OutcomeTag::Failure { kind } => {
                status = RunStatus::Failure { kind };
                break;
            }
            OutcomeTag::Pivot { entering, leaving_row } => {
                let mut next = basis.clone();
                next[leaving_row] = entering;
                if classical::BasisFactor::new(instance, &next).is_err() {
                    status = RunStatus::Failure { kind: FailureKind::SingularPivot };
                    break;
                }
                basis = next;
                pivots += 1;
            }
        }
    }
    Ok(RunSummary {
        status,
        objective: classical::objective(instance, &basis)?,
        x_basic: classical::basic_solution(instance, &basis)?,
        basis,
        iterations: records.len(),
        pivots,
        stats: ctx.stats.since(&begin),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{solve_classical, ClassicalStatus, PivotRule};
    use crate::qsim::{Mode, QlsaErrorMode};
    use nalgebra::DMatrix;

    fn toy() -> LpInstance {
        // min −x1 − x2  s.t.  x1 + s1 = 1,  x2 + s2 = 1: two pivots
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        LpInstance::from_dense(&a, &[1.0, 1.0], &[-1.0, -1.0, 0.0, 0.0]).unwrap()
    }

    fn ctx(seed: u64) -> QContext {
        QContext::new(seed, Mode::Analytic, QlsaErrorMode::Worst)
    }

    #[test]
    fn two_pivot_toy_reaches_optimum() {
        let lp = toy();
        let params = PrecisionParams::default();
        let run = run_quantum_simplex(&lp, None, &params, &SimplexOptions::default(), &mut ctx(11)).unwrap();
        assert_eq!(run.status, RunStatus::Optimal);
        assert_eq!(run.pivots, 2);
        assert!((run.objective + 2.0).abs() < 1e-9);
        for (k, rc) in classical::reduced_costs(&lp, &run.basis).unwrap() {
            let nlp = NormalizedLp::new(&lp, &run.basis, 1e-4).unwrap();
            assert!(nlp.scaled_ratio(k).unwrap() >= -2.2 * params.epsilon, "column {k}: {rc}");
        }
        assert!(run.stats.grover_iterations > 0 || run.stats.u_calls + run.stats.controlled_u_calls > 0);
    }

    #[test]
    fn optimal_basis_is_recognized() {
        let lp = toy();
        let sol = solve_classical(&lp, &lp.slack_basis().unwrap(), PivotRule::Dantzig).unwrap();
        assert_eq!(sol.status, ClassicalStatus::Optimal);
        let out =
            simplex_iter(&lp, &sol.basis, &PrecisionParams::default(), &SimplexOptions::default(), &mut ctx(12))
                .unwrap();
        assert_eq!(out.tag, OutcomeTag::Optimal);
        assert!(out.stats.controlled_u_calls > 0);
    }

    #[test]
    fn unbounded_instance() {
        // min −x1  s.t.  −x1 + s1 = 1
        let a = DMatrix::from_row_slice(1, 2, &[-1.0, 1.0]);
        let lp = LpInstance::from_dense(&a, &[1.0], &[-1.0, 0.0]).unwrap();
        let out = simplex_iter(&lp, &[1], &PrecisionParams::default(), &SimplexOptions::default(), &mut ctx(13))
            .unwrap();
        assert_eq!(out.tag, OutcomeTag::Unbounded { column: 0 });
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let lp = LpInstance::from_dense(&a, &[-1.0], &[1.0, 0.0]).unwrap();
        let r = run_quantum_simplex(&lp, Some(vec![1]), &PrecisionParams::default(), &SimplexOptions::default(), &mut ctx(1));
        assert!(matches!(r, Err(Error::InfeasibleStart(_))));
    }
}

//! Exact classical simplex method, used as the reference every quantum
//! subroutine is checked against.

use nalgebra::{DMatrix, DVector, LU};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::LpInstance;

/// Tolerance under which a reduced cost counts as negative.
pub const PRICING_TOL: f64 = 1e-9;
/// Tolerance under which a direction component counts as positive.
pub const PIVOT_TOL: f64 = 1e-9;

/// LU factorization of `A_B` with the solves the simplex method needs.
pub struct BasisFactor {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_t: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl BasisFactor {
    pub fn new(instance: &LpInstance, basis: &[usize]) -> Result<Self> {
        let ab = instance.basis_matrix(basis);
        Self::from_matrix(ab)
    }

    pub fn from_matrix(ab: DMatrix<f64>) -> Result<Self> {
        let scale = ab.amax();
        let lu_t = ab.transpose().lu();
        let lu = ab.lu();
        let u = lu.u();
        let min_pivot = u.diagonal().iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if scale == 0.0 || min_pivot <= 1e-13 * scale {
            return Err(Error::BasisSingular);
        }
        Ok(Self { lu, lu_t })
    }

    /// `A_B⁻¹ v`
    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        let rhs = DVector::from_column_slice(v);
        self.lu
            .solve(&rhs)
            .expect("factor is nonsingular")
            .iter()
            .copied()
            .collect()
    }

    /// `A_B⁻ᵀ v`
    pub fn solve_transpose(&self, v: &[f64]) -> Vec<f64> {
        let rhs = DVector::from_column_slice(v);
        self.lu_t
            .solve(&rhs)
            .expect("factor is nonsingular")
            .iter()
            .copied()
            .collect()
    }
}

/// Reduced cost of any column `k` (zero for basic columns).
pub fn reduced_cost(instance: &LpInstance, basis: &[usize], k: usize) -> Result<f64> {
    if basis.contains(&k) {
        return Ok(0.0);
    }
    let factor = BasisFactor::new(instance, basis)?;
    let y = factor.solve_transpose(&instance.basis_costs(basis));
    Ok(column_reduced_cost(instance, &y, k))
}

fn column_reduced_cost(instance: &LpInstance, duals: &[f64], k: usize) -> f64 {
    let (rows, vals) = instance.matrix().column(k);
    instance.cost()[k] - rows.iter().zip(vals).map(|(&r, &v)| duals[r] * v).sum::<f64>()
}

/// `c̄_N = c_N − A_Nᵀ A_B⁻ᵀ c_B`, as `(column, reduced cost)` pairs over N.
pub fn reduced_costs(instance: &LpInstance, basis: &[usize]) -> Result<Vec<(usize, f64)>> {
    let factor = BasisFactor::new(instance, basis)?;
    let y = factor.solve_transpose(&instance.basis_costs(basis));
    Ok(nonbasic(instance, basis)
        .into_iter()
        .map(|k| (k, column_reduced_cost(instance, &y, k)))
        .collect())
}

pub fn nonbasic(instance: &LpInstance, basis: &[usize]) -> Vec<usize> {
    let mut is_basic = vec![false; instance.num_cols()];
    basis.iter().for_each(|&j| is_basic[j] = true);
    (0..instance.num_cols()).filter(|&j| !is_basic[j]).collect()
}

/// `x_B = A_B⁻¹ b`
pub fn basic_solution(instance: &LpInstance, basis: &[usize]) -> Result<Vec<f64>> {
    Ok(BasisFactor::new(instance, basis)?.solve(instance.rhs()))
}

/// `u = A_B⁻¹ A_k`
pub fn direction(instance: &LpInstance, basis: &[usize], k: usize) -> Result<Vec<f64>> {
    Ok(BasisFactor::new(instance, basis)?.solve(&instance.matrix().column_dense(k)))
}

pub fn objective(instance: &LpInstance, basis: &[usize]) -> Result<f64> {
    let x = basic_solution(instance, basis)?;
    Ok(basis.iter().zip(&x).map(|(&j, &v)| instance.cost()[j] * v).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RatioTest {
    Unbounded,
    /// Leaving position in the basis and the minimum ratio `r*`.
    Leaving { row: usize, ratio: f64 },
}

/// Ratio test over the rows with `u_j > δ‖u‖` (`u_j > 0` for `δ = 0`);
/// ties go to the lowest row.
pub fn ratio_test(instance: &LpInstance, basis: &[usize], k: usize, delta: f64) -> Result<RatioTest> {
    let factor = BasisFactor::new(instance, basis)?;
    let x = factor.solve(instance.rhs());
    let u = factor.solve(&instance.matrix().column_dense(k));
    Ok(ratio_test_vectors(&x, &u, delta, 0.0))
}

/// Ratio test on explicit `x_B` and `u`. A row enters the minimization when
/// `u_j > max(δ‖u‖, abs_tol)`.
pub fn ratio_test_vectors(x: &[f64], u: &[f64], delta: f64, abs_tol: f64) -> RatioTest {
    let unorm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = (delta * unorm).max(abs_tol);
    let mut best: Option<(usize, f64)> = None;
    for (j, (&xj, &uj)) in x.iter().zip(u).enumerate() {
        if uj > threshold {
            let r = xj / uj;
            if best.map_or(true, |(_, b)| r < b) {
                best = Some((j, r));
            }
        }
    }
    match best {
        Some((row, ratio)) => RatioTest::Leaving { row, ratio },
        None => RatioTest::Unbounded,
    }
}

/// Entering-column rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Most negative reduced cost.
    Dantzig,
    /// Lowest eligible index.
    Bland,
    /// Uniformly random eligible column, reproducible from the seed.
    RandomEligible { seed: u64 },
}

/// Per-iteration record of the classical method.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalPivotReport {
    pub reduced_costs: Vec<(usize, f64)>,
    pub eligible: Vec<usize>,
    pub entering: Option<usize>,
    pub direction: Vec<f64>,
    pub ratio_min: Option<f64>,
    pub leaving_row: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ClassicalStatus {
    Optimal,
    /// Column that proves unboundedness.
    Unbounded { column: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalSolution {
    pub status: ClassicalStatus,
    pub basis: Vec<usize>,
    pub objective: f64,
    pub x_basic: Vec<f64>,
    pub pivots: usize,
    pub reports: Vec<ClassicalPivotReport>,
    pub switched_to_bland: bool,
}

/// Iteration budget before falling back to Bland's rule.
pub fn iteration_cap(m: usize, n: usize) -> usize {
    50 * (m + n)
}

/// Runs the simplex method from a feasible basis until optimality or
/// unboundedness. After `50(m+n)` pivots the rule switches to Bland's, which
/// cannot cycle; a second budget of the same size guards against numerical
/// trouble.
pub fn solve_classical(
    instance: &LpInstance,
    start_basis: &[usize],
    rule: PivotRule,
) -> Result<ClassicalSolution> {
    let m = instance.num_rows();
    let cap = iteration_cap(m, instance.num_cols());
    let mut basis = start_basis.to_vec();
    let x0 = basic_solution(instance, &basis)?;
    if x0.iter().any(|&v| v < -1e-9) {
        return Err(Error::InfeasibleStart(format!(
            "starting basis has negative basic value {:e}",
            x0.iter().fold(f64::INFINITY, |a, &v| a.min(v))
        )));
    }
    let mut rng = match rule {
        PivotRule::RandomEligible { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut reports = Vec::new();
    let mut switched = false;
    for pivots in 0..2 * cap {
        let active_rule = if pivots >= cap {
            switched = true;
            PivotRule::Bland
        } else {
            rule
        };
        let factor = BasisFactor::new(instance, &basis)?;
        let y = factor.solve_transpose(&instance.basis_costs(&basis));
        let rc: Vec<(usize, f64)> = nonbasic(instance, &basis)
            .into_iter()
            .map(|k| (k, column_reduced_cost(instance, &y, k)))
            .collect();
        let eligible: Vec<usize> = rc.iter().filter(|(_, v)| *v < -PRICING_TOL).map(|(k, _)| *k).collect();
        let x = factor.solve(instance.rhs());
        let entering = match active_rule {
            _ if eligible.is_empty() => None,
            PivotRule::Dantzig => rc
                .iter()
                .filter(|(_, v)| *v < -PRICING_TOL)
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .map(|(k, _)| *k),
            PivotRule::Bland => eligible.first().copied(),
            PivotRule::RandomEligible { .. } => eligible.choose(rng.as_mut().unwrap()).copied(),
        };
        let Some(k) = entering else {
            reports.push(ClassicalPivotReport {
                reduced_costs: rc,
                eligible,
                entering: None,
                direction: Vec::new(),
                ratio_min: None,
                leaving_row: None,
            });
            let objective = basis.iter().zip(&x).map(|(&j, &v)| instance.cost()[j] * v).sum();
            return Ok(ClassicalSolution {
                status: ClassicalStatus::Optimal,
                basis,
                objective,
                x_basic: x,
                pivots,
                reports,
                switched_to_bland: switched,
            });
        };
        let u = factor.solve(&instance.matrix().column_dense(k));
        let test = ratio_test_vectors(&x, &u, 0.0, PIVOT_TOL);
        let (leaving_row, ratio_min) = match test {
            RatioTest::Leaving { row, ratio } => (Some(row), Some(ratio)),
            RatioTest::Unbounded => (None, None),
        };
        reports.push(ClassicalPivotReport {
            reduced_costs: rc,
            eligible,
            entering: Some(k),
            direction: u,
            ratio_min,
            leaving_row,
        });
        match leaving_row {
            None => {
                let objective = basis.iter().zip(&x).map(|(&j, &v)| instance.cost()[j] * v).sum();
                return Ok(ClassicalSolution {
                    status: ClassicalStatus::Unbounded { column: k },
                    basis,
                    objective,
                    x_basic: x,
                    pivots,
                    reports,
                    switched_to_bland: switched,
                });
            }
            Some(row) => basis[row] = k,
        }
    }
    Err(Error::IterationCap(2 * cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(rows: usize, cols: usize, a: &[f64], b: &[f64], c: &[f64]) -> LpInstance {
        LpInstance::from_dense(&DMatrix::from_row_slice(rows, cols, a), b, c).unwrap()
    }

    #[test]
    fn basic_column_has_zero_reduced_cost() {
        let inst = lp(2, 3, &[1.0, 0.0, 0.6, 0.0, 1.0, 0.8], &[1.0, 1.0], &[1.0, 2.0, 0.1]);
        assert_eq!(reduced_cost(&inst, &[0, 1], 1).unwrap(), 0.0);
    }

    #[test]
    fn reduced_cost_arithmetic() {
        let s = 2f64.sqrt();
        let inst = lp(2, 3, &[1.0, 0.0, 0.6, 0.0, 1.0, 0.8], &[1.0, 1.0], &[1.0 / s, 1.0 / s, 0.1]);
        let rc = reduced_costs(&inst, &[0, 1]).unwrap();
        assert_eq!(rc.len(), 1);
        assert_eq!(rc[0].0, 2);
        let expected = 0.1 - 1.4 / s;
        assert!((rc[0].1 - expected).abs() < 1e-14);
        assert!((rc[0].1 + 0.88995).abs() < 1e-5);
    }

    #[test]
    fn ratio_test_ties_and_unbounded() {
        // A_k = A_B x_B so u = x_B: every ratio equals 1
        let inst = lp(2, 3, &[2.0, 1.0, 5.0, 0.0, 1.0, 3.0], &[5.0, 3.0], &[0.0, 0.0, -1.0]);
        match ratio_test(&inst, &[0, 1], 2, 0.0).unwrap() {
            RatioTest::Leaving { row, ratio } => {
                assert_eq!(row, 0);
                assert!((ratio - 1.0).abs() < 1e-12);
            }
            RatioTest::Unbounded => panic!("bounded"),
        }
        let unb = lp(2, 3, &[1.0, 0.0, -1.0, 0.0, 1.0, 0.0], &[1.0, 1.0], &[0.0, 0.0, -1.0]);
        assert_eq!(ratio_test(&unb, &[0, 1], 2, 0.0).unwrap(), RatioTest::Unbounded);
    }

    #[test]
    fn delta_threshold_excludes_small_components() {
        let test = ratio_test_vectors(&[0.0, 1.0], &[0.01, 1.0], 0.1, 0.0);
        assert_eq!(test, RatioTest::Leaving { row: 1, ratio: 1.0 });
    }

    #[test]
    fn one_dimensional_lp() {
        // min -x1 s.t. x1 + s = 1
        let inst = lp(1, 2, &[1.0, 1.0], &[1.0], &[-1.0, 0.0]);
        let sol = solve_classical(&inst, &[1], PivotRule::Dantzig).unwrap();
        assert_eq!(sol.status, ClassicalStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-12);
        assert_eq!(sol.pivots, 1);
    }

    #[test]
    fn box_lp() {
        let inst = lp(
            2,
            4,
            &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0],
            &[1.0, 1.0],
            &[-1.0, -1.0, 0.0, 0.0],
        );
        for rule in [PivotRule::Dantzig, PivotRule::Bland, PivotRule::RandomEligible { seed: 3 }] {
            let sol = solve_classical(&inst, &[2, 3], rule).unwrap();
            assert!((sol.objective + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_unbounded() {
        // min -x1 s.t. x1 - x2 + s = 1
        let inst = lp(1, 3, &[1.0, -1.0, 1.0], &[1.0], &[0.0, -1.0, 0.0]);
        let sol = solve_classical(&inst, &[2], PivotRule::Dantzig).unwrap();
        assert_eq!(sol.status, ClassicalStatus::Unbounded { column: 1 });
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let inst = lp(1, 2, &[1.0, 1.0], &[-1.0], &[0.0, 0.0]);
        assert!(matches!(
            solve_classical(&inst, &[1], PivotRule::Dantzig),
            Err(Error::InfeasibleStart(_))
        ));
    }
}

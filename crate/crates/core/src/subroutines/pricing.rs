//! Pricing: the reduced-cost unitary, `CanEnter`, `FindColumn`,
//! `IsOptimal` and Frobenius-norm estimation.
//!
//! Bounded-error predicates over column indices are realized once per
//! search: every index is evaluated (boosted), the search runs exact Grover
//! iterations on the realized marked set, and each oracle call inside the
//! search is charged at the most expensive realized evaluation.

use nalgebra::DMatrix;

use super::sign::{boosted_sign, SignSampler, SignVariant};
use super::{median, NormalizedLp, PrecisionParams, QContext};
use crate::cost::qlsa_cost;
use crate::error::{Error, Result};
use crate::qsim::state::gaussian;
use crate::qsim::{
    column_superposition_oracle, counting_search, prepare_state_on, qsearch, qubits_for, theta_of, AeSampler,
    PreparedUnitary, QlsaErrorMode, QlsaOracle, QlsaOutput, QueryStats, SearchOutcome,
};

/// `U_r` with `⟨0|U_r|0⟩ = ⟨s(−c̃_B, 1) | x̃⟩`, where `|x̃⟩` approximates the
/// normalized solution of `diag(Ã_B, 1)(x, y) = (Ã_k, c̃_k)` and
/// `s = 1/‖(−c̃_B, 1)‖`.
#[derive(Debug, Clone)]
pub struct RedCostUnitary {
    pub unitary: PreparedUnitary,
    /// Index whose amplitude encodes the reduced cost (always 0).
    pub target: usize,
    /// `s`, so that the ideal amplitude is `s·ρ_k`.
    pub scale: f64,
    /// The amplitude actually encoded.
    pub amplitude: f64,
    /// `s·ρ_k` computed from the exact solution.
    pub ideal_amplitude: f64,
    pub qlsa: QlsaOutput,
}

/// Linear-system oracle for `diag(Ã_B, 1)` at precision `eps_ls`.
fn extended_oracle(nlp: &NormalizedLp, eps_ls: f64, error: QlsaErrorMode) -> Result<QlsaOracle> {
    let m = nlp.m();
    let mut ext = DMatrix::zeros(m + 1, m + 1);
    ext.view_mut((0, 0), (m, m)).copy_from(nlp.ab());
    ext[(m, m)] = 1.0;
    QlsaOracle::new(ext, nlp.kappa(), eps_ls, error, nlp.sparsity())
}

/// `s·(−c̃_B, 1)`
fn cost_functional(nlp: &NormalizedLp) -> Vec<f64> {
    let s = nlp.amplitude_scale();
    let mut w: Vec<f64> = nlp.cb().iter().map(|c| -c * s).collect();
    w.push(s);
    w
}

fn extended_rhs(nlp: &NormalizedLp, k: usize) -> Vec<f64> {
    let mut rhs = nlp.scaled_column(k);
    rhs.push(nlp.scaled_cost(k));
    rhs
}

/// Builds `U_r` from one linear-system solve. `raise` orients the
/// worst-case solver error: `false` pushes the encoded reduced cost down
/// (adversarial for entering-column soundness), `true` pushes it up
/// (adversarial for the optimality test).
fn red_cost_with(
    nlp: &NormalizedLp,
    oracle: &QlsaOracle,
    k: usize,
    raise: bool,
    ctx: &mut QContext,
) -> Result<RedCostUnitary> {
    let w = cost_functional(nlp);
    let rhs = extended_rhs(nlp, k);
    let q = qubits_for(w.len());
    let adversary: Vec<f64> = if raise { w.iter().map(|v| -v).collect() } else { w.clone() };
    let mut scratch = QueryStats::default();
    let out = oracle.apply(&rhs, Some(&adversary), Some(q), &mut ctx.rng, &mut scratch)?;
    let uc = prepare_state_on(&w, q)?;
    let unitary = out.prep.followed_by(&uc.inverse());
    let dot = |x: &[f64]| x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
    Ok(RedCostUnitary {
        unitary,
        target: 0,
        scale: nlp.amplitude_scale(),
        amplitude: dot(&out.state),
        ideal_amplitude: dot(&out.exact_state),
        qlsa: out,
    })
}

/// `U_r` for column `k` with the solve at precision `eps·s/10`.
pub fn red_cost_unitary(nlp: &NormalizedLp, k: usize, eps: f64, ctx: &mut QContext) -> Result<RedCostUnitary> {
    let oracle = extended_oracle(nlp, eps * nlp.amplitude_scale() / 10.0, ctx.qlsa_error)?;
    red_cost_with(nlp, &oracle, k, false, ctx)
}

/// Outcome of a (boosted) `CanEnter` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanEnterResult {
    pub value: bool,
    /// Majority of the runs were accurate.
    pub sound: bool,
    /// Every linear-system solve raised its success flag.
    pub qlsa_success: bool,
    /// Median estimate of `ρ_k` implied by the sign-estimation outcomes.
    pub rho_estimate: f64,
    pub ones: usize,
    pub runs: usize,
}

/// Sign-test precision used by `CanEnter`: `11εs/10` (NFN) or `9εs/10` (NFP).
fn can_enter_precision(eps: f64, s: f64, variant: SignVariant) -> f64 {
    match variant {
        SignVariant::Nfn => 1.1 * eps * s,
        _ => 0.9 * eps * s,
    }
}

fn can_enter_with(
    nlp: &NormalizedLp,
    oracle: &QlsaOracle,
    k: usize,
    eps: f64,
    variant: SignVariant,
    repetitions: usize,
    ctx: &mut QContext,
) -> Result<CanEnterResult> {
    if extended_rhs(nlp, k).iter().all(|&v| v == 0.0) {
        // zero column with zero cost: reduced cost 0, never eligible
        return Ok(CanEnterResult {
            value: false,
            sound: true,
            qlsa_success: true,
            rho_estimate: 0.0,
            ones: 0,
            runs: 0,
        });
    }
    let s = nlp.amplitude_scale();
    let eps_sign = can_enter_precision(eps, s, variant);
    let raise = variant == SignVariant::Nfp;
    let qlsa = oracle.cost();
    let mut all_success = true;
    let mut rhos = Vec::with_capacity(repetitions);
    let b = boosted_sign(repetitions, || {
        let r = red_cost_with(nlp, oracle, k, raise, ctx)?;
        let mut sampler = SignSampler::new(&r.unitary, r.target, eps_sign, variant, ctx.mode)?;
        if variant == SignVariant::Nfn {
            sampler = sampler.with_threshold_offset(ctx.nfn_threshold_offset);
        }
        sampler.charge_embedded_qlsa(&qlsa);
        let e = sampler.sample(&mut ctx.rng, &mut ctx.stats);
        all_success &= r.qlsa.success;
        rhos.push(e.alpha_estimate / s);
        Ok((!e.bit && r.qlsa.success, e.accurate))
    })?;
    Ok(CanEnterResult {
        value: b.value,
        sound: b.sound,
        qlsa_success: all_success,
        rho_estimate: median(&mut rhos),
        ones: b.ones,
        runs: b.runs,
    })
}

/// `CanEnter` for column `k`, majority-voted over `repetitions` runs. The
/// NFN variant returns 1 only for `ρ_k < −ε`; the NFP variant returns 1 for
/// every `ρ_k ≤ −ε`.
pub fn can_enter(
    nlp: &NormalizedLp,
    k: usize,
    eps: f64,
    variant: SignVariant,
    repetitions: usize,
    ctx: &mut QContext,
) -> Result<CanEnterResult> {
    let oracle = extended_oracle(nlp, eps * nlp.amplitude_scale() / 10.0, ctx.qlsa_error)?;
    can_enter_with(nlp, &oracle, k, eps, variant, repetitions, ctx)
}

/// A predicate over a column domain, realized for one search.
struct Realized {
    marked: Vec<bool>,
    sound: bool,
    results: Vec<CanEnterResult>,
    per_call: QueryStats,
}

fn realize_can_enter(
    nlp: &NormalizedLp,
    domain: &[usize],
    eps: f64,
    variant: SignVariant,
    repetitions: usize,
    ctx: &mut QContext,
) -> Result<Realized> {
    let oracle = extended_oracle(nlp, eps * nlp.amplitude_scale() / 10.0, ctx.qlsa_error)?;
    let outer = std::mem::take(&mut ctx.stats);
    let mut per_call = QueryStats::default();
    let mut results = Vec::with_capacity(domain.len());
    for &k in domain {
        ctx.stats = QueryStats::default();
        let r = can_enter_with(nlp, &oracle, k, eps, variant, repetitions, ctx);
        per_call = per_call.max(&ctx.stats);
        match r {
            Ok(r) => results.push(r),
            Err(e) => {
                ctx.stats = outer;
                return Err(e);
            }
        }
    }
    ctx.stats = outer;
    Ok(Realized {
        marked: results.iter().map(|r| r.value).collect(),
        sound: results.iter().all(|r| r.sound),
        results,
        per_call,
    })
}

/// Charges the oracle calls of a search: each Grover iteration applies the
/// oracle and its inverse, each classical check one evaluation.
fn charge_search(ctx: &mut QContext, per_call: &QueryStats, s: &SearchOutcome) {
    ctx.stats.add_scaled(per_call, 2 * s.iterations + s.checks);
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FindColumnOptions {
    /// Retry with the NFP variant when the NFN search finds nothing.
    pub recovery: bool,
    /// Search the nonbasic columns in this many blocks of size `⌈n/h⌉`.
    pub blocks: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FindColumnOutcome {
    pub column: Option<usize>,
    /// Every realized evaluation was sound.
    pub sound: bool,
    /// Columns marked by the realized predicate in the searched blocks.
    pub marked: Vec<usize>,
    /// The column came from the NFP retry.
    pub recovered: bool,
    pub blocks: usize,
    pub grover_iterations: u64,
    /// Measured candidates checked classically.
    pub checks: u64,
    /// Estimated `ρ_k` of the returned column.
    pub rho_estimate: Option<f64>,
}

/// Searches the nonbasic columns for one with `ρ_k < −ε`.
pub fn find_column(
    nlp: &NormalizedLp,
    params: &PrecisionParams,
    options: FindColumnOptions,
    ctx: &mut QContext,
) -> Result<FindColumnOutcome> {
    let domain = nlp.nonbasic().to_vec();
    let h = options.blocks.unwrap_or(1).clamp(1, domain.len().max(1));
    let size = domain.len().div_ceil(h).max(1);
    let mut out = FindColumnOutcome {
        column: None,
        sound: true,
        marked: Vec::new(),
        recovered: false,
        blocks: h,
        grover_iterations: 0,
        checks: 0,
        rho_estimate: None,
    };
    let mut passes: Vec<(SignVariant, Vec<&[usize]>)> = vec![(SignVariant::Nfn, domain.chunks(size).collect())];
    if options.recovery {
        passes.push((SignVariant::Nfp, vec![&domain[..]]));
    }
    for (variant, blocks) in passes {
        for block in blocks {
            let r = realize_can_enter(nlp, block, params.epsilon, variant, params.repetitions, ctx)?;
            let s = qsearch(&r.marked, None, &mut ctx.rng, &mut ctx.stats);
            charge_search(ctx, &r.per_call, &s);
            out.sound &= r.sound;
            out.grover_iterations += s.iterations;
            out.checks += s.checks;
            out.marked.extend(block.iter().zip(&r.marked).filter(|(_, &m)| m).map(|(&k, _)| k));
            if let Some(i) = s.found {
                out.column = Some(block[i]);
                out.rho_estimate = Some(r.results[i].rho_estimate);
                out.recovered = variant == SignVariant::Nfp;
                return Ok(out);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsOptimalOutcome {
    pub optimal: bool,
    pub sound: bool,
    pub marked: Vec<usize>,
    pub witness: Option<usize>,
    pub grover_iterations: u64,
}

/// Counting search over `CanEnter` with the NFP variant: returns optimal
/// only if no column has `ρ_k ≤ −ε` (when all evaluations are sound).
pub fn is_optimal(nlp: &NormalizedLp, params: &PrecisionParams, ctx: &mut QContext) -> Result<IsOptimalOutcome> {
    let domain = nlp.nonbasic().to_vec();
    if domain.is_empty() {
        return Ok(IsOptimalOutcome { optimal: true, sound: true, marked: vec![], witness: None, grover_iterations: 0 });
    }
    let r = realize_can_enter(nlp, &domain, params.epsilon, SignVariant::Nfp, params.repetitions, ctx)?;
    let s = counting_search(&r.marked, &mut ctx.rng, &mut ctx.stats);
    charge_search(ctx, &r.per_call, &s);
    Ok(IsOptimalOutcome {
        optimal: s.found.is_none(),
        sound: r.sound,
        marked: domain.iter().zip(&r.marked).filter(|(_, &m)| m).map(|(&k, _)| k).collect(),
        witness: s.found.map(|i| domain[i]),
        grover_iterations: s.iterations,
    })
}

/// Estimate of a squared Frobenius norm `‖A_B⁻¹A_S‖²_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub estimate: f64,
    /// Dense value, for comparison.
    pub exact: f64,
    pub relative_error: f64,
    pub alpha: f64,
    /// Success probability of the auxiliary flag, `‖Ã_B⁻¹Ã_S‖²_F/(α²‖Ã_S‖²_F)`.
    pub probability: f64,
    pub bits: u32,
    /// Majority of the amplitude-estimation runs were accurate.
    pub sound: bool,
}

/// Estimates `‖A_B⁻¹A_N‖²_F` to relative error `ε`: amplitude estimation of
/// the flag probability of the inverted Frobenius-weighted column
/// superposition, median over the boosting runs.
pub fn norm_estimate(
    nlp: &NormalizedLp,
    params: &PrecisionParams,
    ctx: &mut QContext,
) -> Result<NormEstimate> {
    let columns = nlp.nonbasic().to_vec();
    norm_estimate_columns(nlp, &columns, params, ctx)
}

/// `‖A_B⁻¹A_k‖²` for a single column.
pub fn norm_estimate_column(
    nlp: &NormalizedLp,
    k: usize,
    params: &PrecisionParams,
    ctx: &mut QContext,
) -> Result<NormEstimate> {
    norm_estimate_columns(nlp, &[k], params, ctx)
}

fn norm_estimate_columns(
    nlp: &NormalizedLp,
    columns: &[usize],
    params: &PrecisionParams,
    ctx: &mut QContext,
) -> Result<NormEstimate> {
    let eps = params.epsilon;
    let columns: Vec<usize> = columns
        .iter()
        .copied()
        .filter(|&k| nlp.instance.matrix().column_nnz(k) > 0)
        .collect();
    if columns.is_empty() {
        return Err(Error::InvalidParameter("norm estimation over zero columns".to_string()));
    }
    let m = nlp.m();
    let n = columns.len();
    let alpha = ctx.alpha.unwrap_or(nlp.kappa());
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    let inv = nlp.ab().clone().try_inverse().ok_or(Error::BasisSingular)?;
    let mut an = DMatrix::zeros(m, n);
    for (j, &k) in columns.iter().enumerate() {
        an.set_column(j, &nalgebra::DVector::from_vec(nlp.scaled_column(k)));
    }
    let an_f2 = an.norm_squared();
    // Ã_B⁻¹Ã_S = A_B⁻¹A_S: the matrix scale cancels.
    let exact = (&inv * &an).norm_squared();
    // The operator the solver actually applies, off by ε/(2n) in norm.
    let eps_op = eps / (2.0 * n as f64);
    let applied = match ctx.qlsa_error {
        QlsaErrorMode::Zero => inv.clone(),
        QlsaErrorMode::Worst => &inv + &inv * (eps_op / inv.norm()),
        QlsaErrorMode::Random => {
            let g = DMatrix::from_fn(m, m, |_, _| gaussian(&mut ctx.rng));
            let gn = g.norm();
            &inv + g * (eps_op / gn)
        }
    };
    let probability = ((&applied * &an).norm_squared() / (alpha * alpha * an_f2)).min(1.0);
    let bits = (4.0 * std::f64::consts::PI * alpha * alpha / eps).log2().ceil().max(1.0) as u32;
    let oracle = column_superposition_oracle(nlp.instance, &columns)?;
    let mut ae = AeSampler::from_theta(theta_of(probability.sqrt()), bits, oracle.weighted.gate_cost);
    ae.charge_embedded_qlsa(&qlsa_cost(nlp.sparsity(), nlp.kappa(), eps_op, m));
    let radius = 2f64.powi(-(bits as i32));
    let mut values = Vec::with_capacity(params.repetitions);
    let mut accurate = 0;
    for _ in 0..params.repetitions {
        let s = ae.sample(&mut ctx.rng, &mut ctx.stats);
        accurate += (s.error <= radius) as usize;
        values.push(s.estimate * s.estimate);
    }
    let estimate = median(&mut values) * alpha * alpha * an_f2;
    Ok(NormEstimate {
        estimate,
        exact,
        relative_error: (estimate - exact).abs() / exact,
        alpha,
        probability,
        bits,
        sound: 2 * accurate > params.repetitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LpInstance;
    use crate::qsim::{Mode, QlsaErrorMode};

    fn module_example() -> LpInstance {
        // c̄_2 ≈ −0.88995 with ‖(A_B⁻¹A_2, c_2/‖c_B‖)‖ ≈ 1.00499
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.6, 0.0, 1.0, 0.8]);
        let h = 0.5f64.sqrt();
        LpInstance::from_dense(&a, &[1.0, 1.0], &[h, h, 0.1]).unwrap()
    }

    fn ctx(error: QlsaErrorMode) -> QContext {
        QContext::new(7, Mode::Analytic, error)
    }

    #[test]
    fn basic_column_has_zero_amplitude() {
        let a = DMatrix::from_row_slice(2, 3, &[2.0, 0.5, 2.0, 0.3, 3.0, 0.3]);
        let lp = LpInstance::from_dense(&a, &[1.0, 1.0], &[1.5, -2.0, 1.5]).unwrap();
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let mut c = ctx(QlsaErrorMode::Worst);
        let r = red_cost_unitary(&nlp, 2, 0.1, &mut c).unwrap();
        assert!(r.ideal_amplitude.abs() < 1e-10);
        assert!(r.amplitude.abs() <= 0.1 * r.scale / 10.0 + 1e-12);
        let state = r.unitary.prepared_state();
        assert!((state.amplitude(0).re - r.amplitude).abs() < 1e-10);
    }

    #[test]
    fn reduced_cost_amplitude_matches_arithmetic() {
        let lp = module_example();
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let mut c = ctx(QlsaErrorMode::Zero);
        let r = red_cost_unitary(&nlp, 2, 0.1, &mut c).unwrap();
        let rho = nlp.scaled_ratio(2).unwrap();
        assert!((rho - (-0.88995 / 1.00499)).abs() < 1e-4);
        assert!((r.amplitude - (-0.6262)).abs() < 1e-4);
        assert!((r.amplitude - rho / 2f64.sqrt()).abs() < 1e-10);
        assert!((r.unitary.prepared_state().amplitude(0).re - r.amplitude).abs() < 1e-10);
    }

    #[test]
    fn can_enter_examples() {
        let lp = module_example();
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let mut c = ctx(QlsaErrorMode::Worst);
        let r = can_enter(&nlp, 2, 0.1, SignVariant::Nfn, 15, &mut c).unwrap();
        assert!(r.value && r.sound && r.qlsa_success);
        assert!((r.rho_estimate - nlp.scaled_ratio(2).unwrap()).abs() < 0.1);
        // basic column: reduced cost zero
        let r = can_enter(&nlp, 0, 0.1, SignVariant::Nfn, 15, &mut c).unwrap();
        assert!(!r.value);
        assert!(c.stats.controlled_u_calls > 0 && c.stats.qlsa_invocations > 0);
    }

    #[test]
    fn find_column_and_is_optimal() {
        let lp = module_example();
        let params = PrecisionParams::default();
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let mut c = ctx(QlsaErrorMode::Worst);
        let f = find_column(&nlp, &params, FindColumnOptions::default(), &mut c).unwrap();
        assert_eq!(f.column, Some(2));
        assert!(f.sound);
        let o = is_optimal(&nlp, &params, &mut c).unwrap();
        assert!(!o.optimal);
        // nonnegative reduced costs everywhere
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.6, 0.0, 1.0, 0.8]);
        let lp = LpInstance::from_dense(&a, &[1.0, 1.0], &[0.6, 0.8, 2.0]).unwrap();
        assert!(crate::classical::reduced_cost(&lp, &[0, 1], 2).unwrap() > 0.0);
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let f = find_column(&nlp, &params, FindColumnOptions { recovery: true, blocks: None }, &mut c).unwrap();
        assert_eq!(f.column, None);
        assert!(is_optimal(&nlp, &params, &mut c).unwrap().optimal);
    }

    #[test]
    fn is_optimal_with_empty_domain() {
        let a = DMatrix::<f64>::identity(2, 2);
        let lp = LpInstance::from_dense(&a, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let mut c = ctx(QlsaErrorMode::Zero);
        assert!(is_optimal(&nlp, &PrecisionParams::default(), &mut c).unwrap().optimal);
    }

    #[test]
    fn norm_estimate_examples() {
        // identity basis
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.3, 0.5, 0.0, 1.0, 0.4, -0.2]);
        let lp = LpInstance::from_dense(&a, &[1.0, 1.0], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        for eps in [0.2, 0.1, 0.05] {
            let params = PrecisionParams { epsilon: eps, ..PrecisionParams::default() };
            let mut c = ctx(QlsaErrorMode::Worst);
            let r = norm_estimate(&nlp, &params, &mut c).unwrap();
            assert!((r.exact - (0.09 + 0.16 + 0.25 + 0.04)).abs() < 1e-12);
            assert!(r.relative_error <= eps, "eps {eps}: {r:?}");
        }
        // diag(1, 1/2) basis
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.3, 0.5, 0.0, 0.5, 0.4, -0.2]);
        let lp = LpInstance::from_dense(&a, &[1.0, 1.0], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let nlp = NormalizedLp::new(&lp, &[0, 1], 1e-4).unwrap();
        let mut c = ctx(QlsaErrorMode::Random);
        let r = norm_estimate(&nlp, &PrecisionParams::default(), &mut c).unwrap();
        assert!((r.exact - (0.09 + 0.64 + 0.25 + 0.16)).abs() < 1e-12);
        assert!(r.relative_error <= 0.1 && r.sound);
        let one = norm_estimate_column(&nlp, 2, &PrecisionParams::default(), &mut c).unwrap();
        assert!((one.exact - 0.73).abs() < 1e-12 && one.relative_error <= 0.1);
    }
}

//! Property suites for the precision, probability and cost guarantees,
//! shared by the `verify` command and the acceptance tests.
//!
//! Each suite draws seeded random instances, runs the simulated subroutines
//! and compares against the classical oracle. Probabilistic guarantees are
//! checked on exact analytic distributions where possible, otherwise as
//! empirical rates conditioned on the runs' own soundness indicators.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{self, ratio_test_vectors, solve_classical, ClassicalStatus, PivotRule, RatioTest};
use crate::cost::{blocked_pricing_cost, quantum_pricing_cost, split_threshold_holds, CostInputs, CostReport};
use crate::error::Result;
use crate::lp::{spectral::condition_number, LpInstance, DEFAULT_EPS_PRIME};
use crate::qsim::{
    counting_search, pe_accuracy, pe_distribution, pe_total_bits, prepare_state_on, qsearch, Mode, QlsaErrorMode,
    QueryStats,
};
use crate::subroutines::{
    find_column, find_row, is_unbounded, norm_estimate, run_quantum_simplex, FindColumnOptions, NormalizedLp,
    PrecisionParams, QContext, RunStatus, SignSampler, SignVariant, SimplexOptions,
};

/// Largest condition number accepted for generated bases.
pub const MAX_KAPPA: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub qlsa_error: QlsaErrorMode,
    pub mode: Mode,
    /// Shift of the NFN decision threshold (zero for a faithful run).
    pub nfn_threshold_offset: f64,
    pub repetitions: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            qlsa_error: QlsaErrorMode::Zero,
            mode: Mode::Analytic,
            nfn_threshold_offset: 0.0,
            repetitions: 15,
        }
    }
}

impl VerifyConfig {
    fn rng(&self, suite: u64, run: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.run_seed(suite, run))
    }

    fn run_seed(&self, suite: u64, run: u64) -> u64 {
        self.seed ^ (suite << 40) ^ run.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    fn ctx(&self, seed: u64) -> QContext {
        let mut c = QContext::new(seed, self.mode, self.qlsa_error);
        c.nfn_threshold_offset = self.nfn_threshold_offset;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
    /// Seed of the first run that violated a zero-tolerance property.
    pub counterexample_seed: Option<u64>,
}

impl SuiteResult {
    fn new(criterion: u32, name: &str) -> Self {
        Self { criterion, name: name.to_string(), passed: true, details: Vec::new(), counterexample_seed: None }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(format!("[{}] {detail}", if ok { "ok" } else { "FAIL" }));
    }

    fn counterexample(&mut self, seed: u64) {
        self.counterexample_seed.get_or_insert(seed);
    }

    /// One line: `criterion N <name>: PASS|FAIL`.
    pub fn summary_line(&self) -> String {
        format!("criterion {:>2} {}: {}", self.criterion, self.name, if self.passed { "PASS" } else { "FAIL" })
    }
}

fn rate(hits: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        hits as f64 / total as f64
    }
}

// ---------------------------------------------------------------------------
// Random instances

/// `A = [R | I]` with `R` uniform in `[−1, 1]` (or `[0.1, 1]` when
/// `bounded`), `b` uniform in `[0.5, 1.5]`, structural costs in `[−1, 1]`
/// and slack costs in `[−0.3, 0.3]` (zero when `bounded`).
pub fn random_lp<R: Rng>(m: usize, n: usize, bounded: bool, rng: &mut R) -> LpInstance {
    assert!(n > m);
    let s = n - m;
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..s {
            a[(i, j)] = if bounded { rng.gen_range(0.1..1.0) } else { rng.gen_range(-1.0..1.0) };
        }
        a[(i, s + i)] = 1.0;
    }
    let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..1.5)).collect();
    let c: Vec<f64> = (0..n)
        .map(|j| match (j < s, bounded) {
            (true, _) => rng.gen_range(-1.0..1.0),
            (false, true) => 0.0,
            (false, false) => rng.gen_range(-0.3..0.3),
        })
        .collect();
    LpInstance::from_dense(&a, &b, &c).expect("generated instance is valid")
}

/// A feasible basis reached from the slack basis by up to `pivots` random
/// feasible pivots, with `κ ≤ MAX_KAPPA` and `x_B ≥ 10⁻³`.
pub fn random_basis<R: Rng>(lp: &LpInstance, pivots: usize, rng: &mut R) -> Option<Vec<usize>> {
    let mut basis = lp.slack_basis()?;
    let steps = rng.gen_range(0..=pivots);
    for _ in 0..steps {
        let nb = classical::nonbasic(lp, &basis);
        let k = nb[rng.gen_range(0..nb.len())];
        let x = classical::basic_solution(lp, &basis).ok()?;
        let u = classical::direction(lp, &basis, k).ok()?;
        if let RatioTest::Leaving { row, .. } = ratio_test_vectors(&x, &u, 0.0, 1e-6) {
            let mut next = basis.clone();
            next[row] = k;
            if classical::BasisFactor::new(lp, &next).is_ok() {
                basis = next;
            }
        }
    }
    let x = classical::basic_solution(lp, &basis).ok()?;
    let kappa = condition_number(&lp.basis_matrix(&basis)).ok()?;
    (kappa <= MAX_KAPPA && x.iter().all(|&v| v >= 1e-3)).then_some(basis)
}

/// Scaled reduced-cost ratios `ρ_k` over the nonbasic columns.
pub fn scaled_ratios(lp: &LpInstance, basis: &[usize]) -> Result<Vec<(usize, f64)>> {
    let nlp = NormalizedLp::new(lp, basis, DEFAULT_EPS_PRIME)?;
    nlp.nonbasic().iter().map(|&k| Ok((k, nlp.scaled_ratio(k)?))).collect()
}

/// Real unitary on two qubits with `⟨0|U|0⟩ = α`.
fn unitary_with_alpha(alpha: f64) -> crate::qsim::PreparedUnitary {
    let rest = (1.0 - alpha * alpha).max(0.0).sqrt();
    prepare_state_on(&[alpha, rest * 0.6, 0.0, rest * 0.8], 2).expect("unit vector")
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Well-conditioned random `m × m` matrix `2I + G`, `G` uniform in `[−1, 1]`.
fn random_basis_matrix<R: Rng>(m: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let a = DMatrix::from_fn(m, m, |i, j| rng.gen_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 });
        if condition_number(&a).is_ok_and(|k| k <= MAX_KAPPA) {
            return a;
        }
    }
}

/// Instance `[A_B | A_B u]` with basis `0..m`, `x_B` uniform in `[0.5, 1.5]`.
fn instance_with_direction<R: Rng>(ab: &DMatrix<f64>, u: &[f64], rng: &mut R) -> LpInstance {
    let m = ab.nrows();
    let ak = ab * DVector::from_column_slice(u);
    let x = DVector::from_fn(m, |_, _| rng.gen_range(0.5..1.5));
    let b = ab * x;
    let mut a = DMatrix::zeros(m, m + 1);
    a.view_mut((0, 0), (m, m)).copy_from(ab);
    a.set_column(m, &ak);
    let c: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    LpInstance::from_dense(&a, b.as_slice(), &c).expect("generated instance is valid")
}

// ---------------------------------------------------------------------------
// Suites

/// Criterion 1: phase estimation with `q + ⌈log₂(2 + 1/(2ε))⌉` bits is
/// `2^−q`-accurate with probability at least `1 − ε`.
pub fn phase_estimation_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(1, "phase-estimation accuracy");
    let mut rng = cfg.rng(1, 0);
    let phases: Vec<f64> = (0..50).map(|_| rng.gen::<f64>()).collect();
    for q in [2u32, 3, 4, 5] {
        for eps in [0.25, 0.1, 0.05, 0.01] {
            let bits = pe_total_bits(q, eps);
            let worst = phases
                .iter()
                .map(|&phi| pe_accuracy(&pe_distribution(phi, bits), phi, q))
                .fold(1.0, f64::min);
            let ok = worst >= 1.0 - eps;
            if !ok {
                res.counterexample(cfg.run_seed(1, 0));
            }
            res.check(ok, format!("q = {q}, eps = {eps}, bits = {bits}: min accuracy {worst:.6} >= {:.2}", 1.0 - eps));
        }
    }
    res
}

/// Criterion 2: the four NFN/NFP implications on a 101-point `α` grid.
pub fn sign_estimation_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(2, "NFN/NFP sign estimation");
    for eps in [0.05, 0.1, 0.2] {
        let mut violations = [0usize; 4];
        let mut margins = [f64::INFINITY; 4];
        for i in 0..=100 {
            let alpha = (i as f64 - 50.0) / 100.0;
            let u = unitary_with_alpha(alpha);
            let nfn = SignSampler::new(&u, 0, eps, SignVariant::Nfn, cfg.mode)
                .expect("valid sign test")
                .with_threshold_offset(cfg.nfn_threshold_offset)
                .probability_one();
            let nfp = SignSampler::new(&u, 0, eps, SignVariant::Nfp, cfg.mode).expect("valid sign test").probability_one();
            let checks = [
                (alpha >= -eps - 1e-12, nfn - 0.75),
                (alpha < -2.0 * eps - 1e-12, 0.25 - nfn),
                (alpha <= -eps + 1e-12, (1.0 - nfp) - 0.75),
                (alpha > eps / 3.0 + 1e-12, 0.25 - (1.0 - nfp)),
            ];
            for (j, (applies, margin)) in checks.into_iter().enumerate() {
                if applies {
                    margins[j] = margins[j].min(margin);
                    if margin < 0.0 {
                        violations[j] += 1;
                    }
                }
            }
        }
        let names = ["Pr(NFN=1 | a >= -eps) >= 3/4", "Pr(NFN=1 | a < -2eps) <= 1/4", "Pr(NFP=0 | a <= -eps) >= 3/4", "Pr(NFP=0 | a > eps/3) <= 1/4"];
        for j in 0..4 {
            if violations[j] > 0 {
                res.counterexample(cfg.run_seed(2, 0));
            }
            res.check(
                violations[j] == 0,
                format!("eps = {eps}: {} violated at {} grid points (min margin {:.4})", names[j], violations[j], margins[j]),
            );
        }
    }
    res
}

/// Criterion 3: soundness and completeness of `FindColumn` (without the NFP
/// retry) on random LPs with `m = 4`, `n = 12`, `ε = 0.05`.
pub fn find_column_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(3, "FindColumn soundness");
    let eps = 0.05;
    let params = PrecisionParams { epsilon: eps, repetitions: cfg.repetitions, ..PrecisionParams::default() };
    let (runs, mut flagged, mut flagged_valid, mut successes) = (200, 0, 0, 0);
    let (mut strong, mut strong_marked) = (0, 0);
    let mut run = 0u64;
    let mut done = 0;
    while done < runs {
        run += 1;
        let mut rng = cfg.rng(3, run);
        let lp = random_lp(4, 12, false, &mut rng);
        let Some(basis) = random_basis(&lp, 3, &mut rng) else { continue };
        let Ok(ratios) = scaled_ratios(&lp, &basis) else { continue };
        if !ratios.iter().any(|&(_, r)| r < -2.2 * eps) {
            continue;
        }
        done += 1;
        let nlp = NormalizedLp::new(&lp, &basis, DEFAULT_EPS_PRIME).expect("basis normalizes");
        let mut ctx = cfg.ctx(cfg.run_seed(3, run));
        let out = match find_column(&nlp, &params, FindColumnOptions::default(), &mut ctx) {
            Ok(o) => o,
            Err(e) => {
                res.check(false, format!("run {run}: {e}"));
                continue;
            }
        };
        for &(k, r) in &ratios {
            if r < -2.2 * eps {
                strong += 1;
                strong_marked += out.marked.contains(&k) as usize;
            }
        }
        if let Some(k) = out.column {
            let r = ratios.iter().find(|&&(j, _)| j == k).map(|&(_, r)| r).expect("nonbasic");
            if out.sound {
                flagged += 1;
                if r < -eps {
                    flagged_valid += 1;
                    successes += 1;
                } else {
                    res.counterexample(cfg.run_seed(3, run));
                }
            }
        }
    }
    res.check(
        flagged_valid == flagged,
        format!("{flagged_valid}/{flagged} success-flagged columns satisfy rho < -eps (required: all)"),
    );
    let s = rate(successes, runs);
    res.check(s >= 0.75, format!("success rate {s:.3} over {runs} runs (required >= 0.75)"));
    let c = rate(strong_marked, strong);
    res.check(c >= 0.75, format!("{strong_marked}/{strong} columns with rho < -2.2 eps marked ({c:.3}, required >= 0.75)"));
    res
}

/// Criterion 4: the ratio-test bound for `t ∈ {2, 10, 100}`.
pub fn find_row_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(4, "FindRow ratio bound");
    let delta = 0.1;
    for (ti, t) in [2.0, 10.0, 100.0].into_iter().enumerate() {
        let params = PrecisionParams { delta, t, repetitions: cfg.repetitions, ..PrecisionParams::default() };
        let (mut sound, mut held, mut held_sound, mut worst_rel) = (0, 0, 0, 0.0f64);
        let triples = 100;
        let mut run = 0u64;
        let mut done = 0;
        while done < triples {
            run += 1;
            let mut rng = cfg.rng(4, run);
            let lp = random_lp(4, 10, false, &mut rng);
            let Some(basis) = random_basis(&lp, 3, &mut rng) else { continue };
            let nb = classical::nonbasic(&lp, &basis);
            let k = nb[rng.gen_range(0..nb.len())];
            let x = classical::basic_solution(&lp, &basis).expect("factorizable");
            let u = classical::direction(&lp, &basis, k).expect("factorizable");
            let RatioTest::Leaving { ratio: r_star, .. } = ratio_test_vectors(&x, &u, delta, 0.0) else { continue };
            done += 1;
            let nlp = NormalizedLp::new(&lp, &basis, DEFAULT_EPS_PRIME).expect("basis normalizes");
            let mut ctx = cfg.ctx(cfg.run_seed(4, run) ^ ti as u64);
            let out = match find_row(&nlp, k, &params, &mut ctx) {
                Ok(o) => o,
                Err(e) => {
                    res.check(false, format!("t = {t}, run {run}: {e}"));
                    continue;
                }
            };
            let bound = 2.0 / (2.0 * t - 1.0) * norm(&x) / norm(&u) + (2.0 * t + 1.0) / (2.0 * t - 1.0) * r_star;
            let ok = out.row.is_some_and(|l| u[l] > 0.0 && x[l] / u[l] <= bound + 1e-12);
            if let Some(l) = out.row.filter(|&l| u[l] > 0.0) {
                if r_star > 0.0 {
                    worst_rel = worst_rel.max(x[l] / u[l] / r_star - 1.0);
                }
            }
            sound += out.sound as usize;
            held += ok as usize;
            held_sound += (ok && out.sound) as usize;
        }
        let cond = rate(held_sound, sound);
        let overall = rate(held_sound, triples);
        res.check(
            cond >= 0.75 && overall >= 0.75,
            format!(
                "t = {t}: bound held in {held_sound}/{sound} sound runs ({cond:.3}), {held}/{triples} overall; \
                 success rate {overall:.3} (required >= 0.75); worst relative excess over r* {worst_rel:.4}"
            ),
        );
    }
    res
}

/// Criterion 5: `IsUnbounded` on 50 unbounded and 50 bounded directions.
pub fn is_unbounded_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(5, "IsUnbounded soundness");
    let params = PrecisionParams { repetitions: cfg.repetitions, ..PrecisionParams::default() };
    let delta = params.delta;
    let (mut claims, mut claims_ok, mut detected) = (0, 0, 0);
    for run in 0..100u64 {
        let mut rng = cfg.rng(5, run);
        let m = 4;
        let ab = random_basis_matrix(m, &mut rng);
        let unbounded = run < 50;
        let u: Vec<f64> = loop {
            let u: Vec<f64> = (0..m)
                .map(|_| {
                    let g: f64 = rng.gen_range(-1.0..1.0);
                    if unbounded {
                        if rng.gen_bool(0.3) { 0.0 } else { -g.abs() }
                    } else {
                        g
                    }
                })
                .collect();
            let pos = u.iter().any(|&v| v > 0.0);
            if norm(&u) > 1e-3 && pos != unbounded {
                break u;
            }
        };
        let lp = instance_with_direction(&ab, &u, &mut rng);
        let basis: Vec<usize> = (0..m).collect();
        let nlp = NormalizedLp::new(&lp, &basis, DEFAULT_EPS_PRIME).expect("basis normalizes");
        let mut ctx = cfg.ctx(cfg.run_seed(5, run));
        let out = match is_unbounded(&nlp, m, &params, &mut ctx) {
            Ok(o) => o,
            Err(e) => {
                res.check(false, format!("run {run}: {e}"));
                continue;
            }
        };
        let u_exact = classical::direction(&lp, &basis, m).expect("factorizable");
        let un = norm(&u_exact);
        if out.unbounded && out.sound {
            claims += 1;
            if u_exact.iter().all(|&v| v < delta * un) {
                claims_ok += 1;
            } else {
                res.counterexample(cfg.run_seed(5, run));
            }
        }
        if unbounded && out.unbounded {
            detected += 1;
        }
    }
    res.check(claims_ok == claims, format!("{claims_ok}/{claims} sound 'unbounded' answers have all components < delta |u| (required: all)"));
    let d = rate(detected, 50);
    res.check(d >= 0.75, format!("detected {detected}/50 unbounded directions ({d:.3}, required >= 0.75)"));
    res
}

/// Criterion 6: relative error of the Frobenius-norm estimate at `ε = 0.1`.
pub fn norm_estimate_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(6, "norm estimation");
    let params = PrecisionParams { epsilon: 0.1, repetitions: cfg.repetitions, ..PrecisionParams::default() };
    let (mut within, mut worst) = (0, 0.0f64);
    let mut run = 0u64;
    let mut done = 0;
    while done < 30 {
        run += 1;
        let mut rng = cfg.rng(6, run);
        let lp = random_lp(4, 10, false, &mut rng);
        let Some(basis) = random_basis(&lp, 3, &mut rng) else { continue };
        done += 1;
        let nlp = NormalizedLp::new(&lp, &basis, DEFAULT_EPS_PRIME).expect("basis normalizes");
        let mut ctx = cfg.ctx(cfg.run_seed(6, run));
        match norm_estimate(&nlp, &params, &mut ctx) {
            Ok(r) => {
                worst = worst.max(r.relative_error);
                within += (r.relative_error <= params.epsilon) as usize;
            }
            Err(e) => res.check(false, format!("run {run}: {e}")),
        }
    }
    let s = rate(within, 30);
    res.check(s >= 0.75, format!("{within}/30 estimates within relative error 0.1 ({s:.3}, required >= 0.75); worst {worst:.4}"));
    res
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// `min c x` over `[R | I]` with two rows, where `R` has `n` positive
/// columns of zero cost except one random column of cost −1: exactly one
/// column can enter at the slack basis (slack costs are 1).
fn one_marked_lp<R: Rng>(n: usize, rng: &mut R) -> LpInstance {
    let mut a = DMatrix::zeros(2, n + 2);
    let star = rng.gen_range(0..n);
    let mut c = vec![1.0; n + 2];
    for j in 0..n {
        let w = rng.gen_range(0.2..1.0);
        a[(0, j)] = w;
        a[(1, j)] = 1.0 - w;
        c[j] = if j == star { -1.0 } else { 1.0 };
    }
    a[(0, n)] = 1.0;
    a[(1, n + 1)] = 1.0;
    LpInstance::from_dense(&a, &[1.0, 1.0], &c).expect("generated instance is valid")
}

/// Criterion 7: measured amplitude-estimation repetitions scale as `1/ε`
/// and Grover iterations as `√n`.
pub fn scaling_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(7, "query scaling");
    let u = unitary_with_alpha(-0.2);
    let mut rng = cfg.rng(7, 0);
    let eps: Vec<f64> = (0..4).map(|i| 0.2 / 2f64.powi(i)).collect();
    let reps: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let s = SignSampler::new(&u, 0, e, SignVariant::Nfn, cfg.mode).expect("valid sign test");
            let mut stats = QueryStats::default();
            s.sample(&mut rng, &mut stats);
            stats.ae_repetitions as f64
        })
        .collect();
    let slope = loglog_slope(&eps, &reps);
    res.check((slope + 1.0).abs() <= 0.1, format!("AE repetitions vs eps: log-log slope {slope:.4} (required -1 +- 0.1)"));

    // FindColumn on LPs whose only improving column is a random one.
    let params = PrecisionParams { epsilon: 0.1, repetitions: 3, ..PrecisionParams::default() };
    let ns: Vec<usize> = vec![8, 16, 32, 64];
    let trials = 200u64;
    let mut iters = Vec::new();
    let mut queries = Vec::new();
    for &n in &ns {
        let (mut it, mut q) = (0u64, 0u64);
        for trial in 0..trials {
            let mut rng = cfg.rng(7, (n as u64) << 20 | trial);
            let lp = one_marked_lp(n, &mut rng);
            let nlp = NormalizedLp::new(&lp, &[n, n + 1], DEFAULT_EPS_PRIME).expect("identity basis");
            let mut ctx = cfg.ctx(cfg.run_seed(7, (n as u64) << 20 | trial));
            let out = find_column(&nlp, &params, FindColumnOptions::default(), &mut ctx).expect("valid instance");
            it += out.grover_iterations;
            q += 2 * out.grover_iterations + out.checks;
        }
        iters.push(it as f64 / trials as f64);
        queries.push(q as f64 / trials as f64);
    }
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&nf, &iters);
    res.check(
        (slope - 0.5).abs() <= 0.15,
        format!("FindColumn Grover iterations vs n in {ns:?} (one marked): log-log slope {slope:.4} (required 0.5 +- 0.15); means {iters:.2?}"),
    );
    let qslope = loglog_slope(&nf, &queries);
    res.details.push(format!("[info] FindColumn oracle calls (2 x iterations + checks): slope {qslope:.4}; means {queries:.2?}"));
    let big: Vec<usize> = vec![1 << 10, 1 << 12, 1 << 14];
    let big_iters: Vec<f64> = big
        .iter()
        .map(|&n| {
            let mut stats = QueryStats::default();
            for _ in 0..200 {
                let mut marked = vec![false; n];
                marked[rng.gen_range(0..n)] = true;
                qsearch(&marked, None, &mut rng, &mut stats);
            }
            stats.grover_iterations as f64 / 200.0
        })
        .collect();
    let bf: Vec<f64> = big.iter().map(|&n| n as f64).collect();
    res.details.push(format!(
        "[info] QSearch iterations vs n in {big:?}: slope {:.4}; means {big_iters:.2?}",
        loglog_slope(&bf, &big_iters)
    ));
    let counting: Vec<f64> = big
        .iter()
        .map(|&n| {
            let mut stats = QueryStats::default();
            counting_search(&vec![false; n], &mut rng, &mut stats);
            stats.grover_iterations.max(1) as f64
        })
        .collect();
    res.details.push(format!(
        "[info] counting-search iterations vs n (no marked item): slope {:.4}",
        loglog_slope(&bf, &counting)
    ));
    res
}

/// Criterion 8: the simulated loop ends at a basis with every
/// `ρ_k ≥ −2.2ε`, and the classical solver reaches exact optimality.
pub fn end_to_end_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(8, "end-to-end loop");
    let params = PrecisionParams { epsilon: 0.1, delta: 0.1, t: 10.0, repetitions: cfg.repetitions };
    let (mut good, mut classical_ok, mut worst_gap) = (0, 0, 0.0f64);
    let total = 20;
    let mut run = 0u64;
    let mut done = 0;
    while done < total {
        run += 1;
        let mut rng = cfg.rng(8, run);
        let m = rng.gen_range(2..=5);
        let n = rng.gen_range(m + 2..=10.max(m + 2));
        let lp = random_lp(m, n, true, &mut rng);
        let start = lp.slack_basis().expect("slack columns present");
        let Ok(sol) = solve_classical(&lp, &start, PivotRule::Bland) else { continue };
        // nondegenerate along the classical path and at the optimum
        let nondegenerate = sol.x_basic.iter().all(|&v| v > 1e-6)
            && sol.reports.iter().all(|r| r.ratio_min.is_none_or(|v| v > 1e-6));
        if sol.status != ClassicalStatus::Optimal || !nondegenerate {
            continue;
        }
        done += 1;
        let exact = classical::reduced_costs(&lp, &sol.basis).expect("factorizable").iter().all(|&(_, c)| c >= -1e-9);
        classical_ok += exact as usize;
        let mut ctx = cfg.ctx(cfg.run_seed(8, run));
        let out = match run_quantum_simplex(&lp, None, &params, &SimplexOptions::default(), &mut ctx) {
            Ok(o) => o,
            Err(e) => {
                res.details.push(format!("[info] run {run}: {e}"));
                continue;
            }
        };
        let ok = out.status == RunStatus::Optimal
            && scaled_ratios(&lp, &out.basis).is_ok_and(|r| r.iter().all(|&(_, v)| v >= -2.2 * params.epsilon));
        if ok {
            good += 1;
            worst_gap = worst_gap.max(out.objective - sol.objective);
        } else {
            res.details.push(format!("[info] run {run}: status {:?} after {} iterations", out.status, out.iterations));
        }
    }
    let r = rate(good, total);
    res.check(r >= 0.75, format!("{good}/{total} runs end with all rho_k >= -2.2 eps ({r:.3}, required >= 0.75); worst objective gap {worst_gap:.3e}"));
    res.check(classical_ok == total, format!("classical solver exactly optimal on {classical_ok}/{total} instances"));
    res
}

/// Criterion 9: criteria 3–6 with the worst-case solver error.
pub fn adversarial_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(9, "worst-case solver error");
    let worst = VerifyConfig { qlsa_error: QlsaErrorMode::Worst, ..*cfg };
    for sub in [find_column_suite(&worst), find_row_suite(&worst), is_unbounded_suite(&worst), norm_estimate_suite(&worst)] {
        if let Some(s) = sub.counterexample_seed {
            res.counterexample(s);
        }
        res.check(sub.passed, format!("criterion {} ({}) under worst-case error", sub.criterion, sub.name));
        res.details.extend(sub.details.iter().map(|d| format!("    {d}")));
    }
    res
}

/// Criterion 10: over a parameter grid, the blocked pricing cost at the
/// chosen split is below the unsplit cost exactly when `n/m ≥ 2κd²/d_c`.
pub fn column_split_suite(_cfg: &VerifyConfig) -> SuiteResult {
    let mut res = SuiteResult::new(10, "column split");
    let (mut points, mut agree, mut split_vs_unsplit) = (0, 0, 0);
    for m in [4usize, 16, 64] {
        for n in [16usize, 64, 256, 1024, 4096, 16384] {
            for d_c in [1usize, 2, 4] {
                for d in [d_c, 2 * d_c, 4] {
                    let d = d.max(d_c);
                    for kappa in [1.0, 2.0, 5.0, 20.0] {
                        let report = CostReport::new(
                            CostInputs {
                                m,
                                n,
                                d_c,
                                d_r: d,
                                kappa,
                                mu_basis: 1.0,
                                a_n_frobenius: 1.0,
                                epsilon: 0.1,
                                delta: 0.1,
                                t: 10.0,
                            },
                            None,
                        );
                        let blocked = report.formula("quantum_pricing_blocked").and_then(|f| f.value).expect("always set");
                        let unsplit = report.formula("quantum_pricing").and_then(|f| f.value).expect("always set");
                        let holds = split_threshold_holds(m, n, d_c, d, kappa);
                        points += 1;
                        agree += ((blocked < unsplit) == holds) as usize;
                        let direct = blocked_pricing_cost(m, n, d_c, d, kappa, 0.1, report.split_blocks.unwrap_or(1));
                        let reference = quantum_pricing_cost(m, n, d_c, d, kappa, 0.1, false, false).expect("no split");
                        if (direct - blocked).abs() > 1e-9 * blocked || (reference - unsplit).abs() > 1e-9 * unsplit {
                            res.check(false, format!("report disagrees with the formulas at m={m} n={n}"));
                        }
                        if let Some(split) = report.formula("quantum_pricing_split").and_then(|f| f.value) {
                            split_vs_unsplit += (split < unsplit) as usize;
                        }
                    }
                }
            }
        }
    }
    res.check(agree == points, format!("blocked < unsplit iff threshold holds at {agree}/{points} grid points"));
    res.details.push(format!(
        "[info] closed-form split formula below the unsplit formula at {split_vs_unsplit} of the grid points where it is defined"
    ));
    res
}

/// Runs one criterion (1–10).
pub fn run_criterion(criterion: u32, cfg: &VerifyConfig) -> Option<SuiteResult> {
    Some(match criterion {
        1 => phase_estimation_suite(cfg),
        2 => sign_estimation_suite(cfg),
        3 => find_column_suite(cfg),
        4 => find_row_suite(cfg),
        5 => is_unbounded_suite(cfg),
        6 => norm_estimate_suite(cfg),
        7 => scaling_suite(cfg),
        8 => end_to_end_suite(cfg),
        9 => adversarial_suite(cfg),
        10 => column_split_suite(cfg),
        _ => return None,
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<SuiteResult> {
    (1..=10).filter_map(|c| run_criterion(c, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_produce_valid_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut found = 0;
        for _ in 0..20 {
            let lp = random_lp(4, 12, false, &mut rng);
            if let Some(b) = random_basis(&lp, 3, &mut rng) {
                found += 1;
                assert!(classical::basic_solution(&lp, &b).unwrap().iter().all(|&v| v >= 1e-3));
            }
        }
        assert!(found > 10);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.0)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cheap_suites_pass() {
        let cfg = VerifyConfig::default();
        for s in [phase_estimation_suite(&cfg), column_split_suite(&cfg)] {
            assert!(s.passed, "{s:?}");
        }
    }

    #[test]
    fn broken_nfn_threshold_is_detected() {
        let cfg = VerifyConfig { nfn_threshold_offset: 0.05, ..VerifyConfig::default() };
        let res = sign_estimation_suite(&cfg);
        assert!(res.details.iter().any(|d| d.starts_with("[FAIL] eps = 0.05: Pr(NFN=1 | a >= -eps)")), "{res:?}");
        let faithful = sign_estimation_suite(&VerifyConfig::default());
        assert!(faithful.details.iter().filter(|d| d.starts_with("[FAIL]")).all(|d| d.contains("eps = 0.2")));
    }
}

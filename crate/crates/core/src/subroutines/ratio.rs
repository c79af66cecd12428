//! Unboundedness test and ratio test on the normalized basis.

use std::f64::consts::PI;

use super::sign::{boosted_sign, SignSampler, SignVariant};
use super::{median, NormalizedLp, PrecisionParams, QContext};
use crate::classical::{ratio_test_vectors, RatioTest, PIVOT_TOL};
use crate::error::{Error, Result};
use crate::qsim::{counting_search, min_finding, qubits_for, AeSampler, QlsaOracle, QlsaOutput, QueryStats};

#[derive(Debug, Clone, PartialEq)]
pub struct IsUnboundedOutcome {
    pub unbounded: bool,
    /// Every realized evaluation was sound and every solve succeeded.
    pub sound: bool,
    /// Rows flagged as having a component `≥ δ‖A_B⁻¹A_k‖`.
    pub marked: Vec<usize>,
    pub witness: Option<usize>,
    pub grover_iterations: u64,
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    e
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0)
}

/// Solves once, measuring the solve separately from the caller's counters.
fn solve(
    oracle: &QlsaOracle,
    rhs: &[f64],
    adversary: &[f64],
    ctx: &mut QContext,
) -> Result<QlsaOutput> {
    let mut scratch = QueryStats::default();
    oracle.apply(rhs, Some(adversary), Some(qubits_for(rhs.len())), &mut ctx.rng, &mut scratch)
}

/// Evaluates `f` on every row with fresh counters and returns the results
/// with the most expensive evaluation's cost.
fn realize<T>(
    m: usize,
    ctx: &mut QContext,
    mut f: impl FnMut(usize, &mut QContext) -> Result<T>,
) -> Result<(Vec<T>, QueryStats)> {
    let outer = std::mem::take(&mut ctx.stats);
    let mut per_call = QueryStats::default();
    let mut out = Vec::with_capacity(m);
    for h in 0..m {
        ctx.stats = QueryStats::default();
        let r = f(h, ctx);
        per_call = per_call.max(&ctx.stats);
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                ctx.stats = outer;
                return Err(e);
            }
        }
    }
    ctx.stats = outer;
    Ok((out, per_call))
}

/// Decides whether `A_B⁻¹A_k` has no component `≥ δ‖A_B⁻¹A_k‖`: solve at
/// precision `δ/10`, mark rows with NFN⁺ at `9δ/10`, and count marked rows.
pub fn is_unbounded(
    nlp: &NormalizedLp,
    k: usize,
    params: &PrecisionParams,
    ctx: &mut QContext,
) -> Result<IsUnboundedOutcome> {
    let m = nlp.m();
    let delta = params.delta;
    let ak = nlp.scaled_column(k);
    if ak.iter().all(|&v| v == 0.0) {
        return Ok(IsUnboundedOutcome { unbounded: true, sound: true, marked: vec![], witness: None, grover_iterations: 0 });
    }
    let oracle = nlp.basis_oracle(delta / 10.0, ctx.qlsa_error)?;
    // the worst-case error hides the largest component
    let adversary = unit(m, argmax(&nlp.direction(k)?));
    let qlsa = oracle.cost();
    let (evals, per_call) = realize(m, ctx, |h, ctx| {
        let mut success = true;
        let b = boosted_sign(params.repetitions, || {
            let out = solve(&oracle, &ak, &adversary, ctx)?;
            let mut s = SignSampler::new(&out.prep, h, 0.9 * delta, SignVariant::NfnPlus, ctx.mode)?;
            s.charge_embedded_qlsa(&qlsa);
            let e = s.sample(&mut ctx.rng, &mut ctx.stats);
            success &= out.success;
            Ok((e.bit && out.success, e.accurate))
        })?;
        Ok((b, success))
    })?;
    let marked: Vec<bool> = evals.iter().map(|(b, _)| b.value).collect();
    let s = counting_search(&marked, &mut ctx.rng, &mut ctx.stats);
    ctx.stats.add_scaled(&per_call, 2 * s.iterations + s.checks);
    Ok(IsUnboundedOutcome {
        unbounded: s.found.is_none(),
        sound: evals.iter().all(|(b, ok)| b.sound && *ok),
        marked: (0..m).filter(|&h| marked[h]).collect(),
        witness: s.found,
        grover_iterations: s.iterations,
    })
}

/// `⌈log₂(16πt/δ)⌉ + 2`, amplitude precision `δ/(16πt)`.
pub fn find_row_bits(delta: f64, t: f64) -> u32 {
    ((16.0 * PI * t / delta).log2().ceil() as u32) + 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct FindRowOutcome {
    /// Leaving row, or `None` when no row passed the sign check.
    pub row: Option<usize>,
    /// Sign checks, amplitude estimates and solves all sound, and the
    /// minimum finder returned the realized minimum.
    pub sound: bool,
    /// Realized `g(h)` (`∞` where the sign check failed).
    pub values: Vec<f64>,
    /// `g(ℓ)·‖A_B⁻¹b‖/‖A_B⁻¹A_k‖`, the estimated ratio at the returned row.
    pub ratio_estimate: Option<f64>,
    pub grover_iterations: u64,
}

/// Per-row evaluation of `g`.
struct RowEval {
    value: f64,
    sound: bool,
}

/// Approximate ratio test: `g(h) = ã_ξ(h)/ã_ψ(h)` on rows passing NFP⁺ at
/// `δ/2`, minimized with Dürr–Høyer.
pub fn find_row(
    nlp: &NormalizedLp,
    k: usize,
    params: &PrecisionParams,
    ctx: &mut QContext,
) -> Result<FindRowOutcome> {
    let m = nlp.m();
    let (delta, t) = (params.delta, params.t);
    let x = nlp.basic_solution()?;
    let u = nlp.direction(k)?;
    let ak = nlp.scaled_column(k);
    let b = nlp.instance.rhs().to_vec();
    if ak.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroColumn(k));
    }
    // The adversary targets the row the exact ratio test would pick.
    let star = match ratio_test_vectors(&x, &u, delta, PIVOT_TOL) {
        RatioTest::Leaving { row, .. } => row,
        RatioTest::Unbounded => argmax(&u),
    };
    let e_star = unit(m, star);
    let neg_star: Vec<f64> = e_star.iter().map(|v| -v).collect();
    let fine = nlp.basis_oracle(delta / (16.0 * t), ctx.qlsa_error)?;
    let coarse = nlp.basis_oracle(delta / 2.0, ctx.qlsa_error)?;
    let b_zero = b.iter().all(|&v| v == 0.0);
    let xi = if b_zero { None } else { Some(solve(&fine, &b, &neg_star, ctx)?) };
    let psi = solve(&fine, &ak, &e_star, ctx)?;
    let bits = find_row_bits(delta, t);
    let radius = 2f64.powi(-(bits as i32 - 2));
    let fine_cost = fine.cost();
    let coarse_cost = coarse.cost();
    let mode = ctx.mode;
    let reps = params.repetitions;

    // median amplitude estimate of |h⟩ in a prepared solution state
    let estimate = |out: &QlsaOutput, h: usize, ctx: &mut QContext| -> Result<(f64, bool)> {
        let mut ae = AeSampler::new(&out.prep, &[h], bits, mode, false)?;
        ae.charge_embedded_qlsa(&fine_cost);
        let mut vals = Vec::with_capacity(reps);
        let mut accurate = 0;
        for _ in 0..reps {
            let s = ae.sample(&mut ctx.rng, &mut ctx.stats);
            vals.push(s.estimate);
            accurate += (s.error < radius) as usize;
        }
        Ok((median(&mut vals), 2 * accurate > reps))
    };

    let (evals, per_call) = realize(m, ctx, |h, ctx| {
        let mut success = true;
        let check = boosted_sign(reps, || {
            let out = solve(&coarse, &ak, &e_star, ctx)?;
            let mut s = SignSampler::new(&out.prep, h, delta / 2.0, SignVariant::NfpPlus, mode)?;
            s.charge_embedded_qlsa(&coarse_cost);
            let e = s.sample(&mut ctx.rng, &mut ctx.stats);
            success &= out.success;
            Ok((e.bit && out.success, e.accurate))
        })?;
        if !check.value {
            return Ok(RowEval { value: f64::INFINITY, sound: check.sound && success });
        }
        let (num, num_ok) = match &xi {
            Some(out) => estimate(out, h, ctx)?,
            None => (0.0, true),
        };
        let (den, den_ok) = estimate(&psi, h, ctx)?;
        let value = if den > 0.0 { num / den } else { f64::INFINITY };
        let ok = check.sound && success && num_ok && den_ok;
        Ok(RowEval { value, sound: ok })
    })?;
    let values: Vec<f64> = evals.iter().map(|e| e.value).collect();
    let solves_ok = psi.success && xi.as_ref().is_none_or(|o| o.success);
    let mut sound = solves_ok && evals.iter().all(|e| e.sound);
    let found = match min_finding(&values, &mut ctx.rng, &mut ctx.stats) {
        Ok(r) => r,
        Err(Error::AllInfinite) => {
            return Ok(FindRowOutcome { row: None, sound, values, ratio_estimate: None, grover_iterations: 0 });
        }
        Err(e) => return Err(e),
    };
    ctx.stats.add_scaled(&per_call, 2 * found.iterations + found.checks);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    sound &= values[found.index] == min;
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(FindRowOutcome {
        row: Some(found.index),
        sound,
        ratio_estimate: Some(values[found.index] * xn / un),
        values,
        grover_iterations: found.iterations,
    })
}

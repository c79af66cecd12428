//! Grover search for an unknown number of marked items, its counting
//! variant, and Dürr–Høyer minimum finding.
//!
//! Oracles are supplied as realized truth tables: the caller evaluates its
//! (bounded-error) predicate once per index for the run and the search then
//! simulates exact Grover iterations on the realized marked set.

use std::f64::consts::PI;

use rand::Rng;

use super::state::sample_index;
use super::stats::QueryStats;
use crate::error::{Error, Result};

/// Growth factor of the iteration range between rounds.
pub const QSEARCH_LAMBDA: f64 = 6.0 / 5.0;
/// Iteration budget of one search, in units of `√N`.
pub const QSEARCH_BUDGET: f64 = 18.0;
/// Safety cap on measurement rounds.
pub const QSEARCH_MAX_ROUNDS: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    pub found: Option<usize>,
    /// Grover iterations performed (oracle applications in superposition).
    pub iterations: u64,
    /// Measured candidates checked classically.
    pub checks: u64,
}

/// Measures the register after `iterations` Grover iterations from the
/// uniform superposition over `marked.len()` items.
fn grover_measure<R: Rng>(marked: &[bool], iterations: u64, rng: &mut R) -> usize {
    let n = marked.len();
    let mut amps = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..iterations {
        for (a, &m) in amps.iter_mut().zip(marked) {
            if m {
                *a = -*a;
            }
        }
        let mean = amps.iter().sum::<f64>() / n as f64;
        amps.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
    }
    let probs: Vec<f64> = amps.iter().map(|a| a * a).collect();
    sample_index(&probs, rng)
}

/// QSearch with randomized iteration counts: in each round draw `j`
/// uniformly from `[0, ⌈r⌉)`, run `j` iterations, measure and check; grow `r`
/// by 6/5 up to `√N`. Stops when a marked item is found or when the budget
/// (default `18√N`) is spent.
pub fn qsearch<R: Rng>(marked: &[bool], budget: Option<u64>, rng: &mut R, stats: &mut QueryStats) -> SearchOutcome {
    let n = marked.len();
    let mut out = SearchOutcome { found: None, iterations: 0, checks: 0 };
    if n == 0 {
        return out;
    }
    let sqrt_n = (n as f64).sqrt();
    let cap = budget.unwrap_or((QSEARCH_BUDGET * sqrt_n).ceil() as u64);
    let mut range = 1.0f64;
    for _ in 0..QSEARCH_MAX_ROUNDS {
        let j = rng.gen_range(0..range.ceil() as u64);
        if out.iterations + j > cap {
            break;
        }
        let i = grover_measure(marked, j, rng);
        out.iterations += j;
        out.checks += 1;
        stats.grover_iterations += j;
        if marked[i] {
            out.found = Some(i);
            break;
        }
        range = (range * QSEARCH_LAMBDA).min(sqrt_n);
    }
    out
}

/// Existence test with a fixed budget of `3⌈π/4·√N⌉` iterations: repeated
/// trials with `j` uniform in `[0, ⌈π/4·√N⌉)`, each charged at least one
/// unit of budget.
pub fn counting_search<R: Rng>(marked: &[bool], rng: &mut R, stats: &mut QueryStats) -> SearchOutcome {
    let n = marked.len();
    let mut out = SearchOutcome { found: None, iterations: 0, checks: 0 };
    if n == 0 {
        return out;
    }
    let range = (PI / 4.0 * (n as f64).sqrt()).ceil() as u64;
    let budget = 3 * range;
    let mut spent = 0;
    while spent < budget {
        let j = rng.gen_range(0..range);
        let i = grover_measure(marked, j, rng);
        spent += j.max(1);
        out.iterations += j;
        out.checks += 1;
        stats.grover_iterations += j;
        if marked[i] {
            out.found = Some(i);
            break;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinOutcome {
    pub index: usize,
    pub iterations: u64,
    pub checks: u64,
}

/// Dürr–Høyer minimum finding over realized values (`∞` allowed), run twice
/// with the better result kept.
pub fn min_finding<R: Rng>(values: &[f64], rng: &mut R, stats: &mut QueryStats) -> Result<MinOutcome> {
    if values.is_empty() || values.iter().all(|v| v.is_infinite() && *v > 0.0) {
        return Err(Error::AllInfinite);
    }
    let a = min_finding_once(values, rng, stats);
    let b = min_finding_once(values, rng, stats);
    let best = if values[b.index] < values[a.index] { b.index } else { a.index };
    Ok(MinOutcome { index: best, iterations: a.iterations + b.iterations, checks: a.checks + b.checks })
}

/// One Dürr–Høyer schedule with budget `22.5√N + 1.4 log₂²N` iterations.
pub fn min_finding_once<R: Rng>(values: &[f64], rng: &mut R, stats: &mut QueryStats) -> MinOutcome {
    let n = values.len();
    let lg = (n as f64).log2();
    let budget = (22.5 * (n as f64).sqrt() + 1.4 * lg * lg).ceil() as u64;
    let mut y = rng.gen_range(0..n);
    let mut spent = 0u64;
    let mut out = MinOutcome { index: y, iterations: 0, checks: 0 };
    while spent < budget {
        let marked: Vec<bool> = values.iter().map(|v| *v < values[y]).collect();
        let s = qsearch(&marked, Some(budget - spent), rng, stats);
        spent += s.iterations + s.checks;
        out.iterations += s.iterations;
        out.checks += s.checks;
        match s.found {
            Some(i) => y = i,
            None => break,
        }
    }
    out.index = y;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_marked_needs_no_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut stats = QueryStats::default();
        let out = qsearch(&[true; 8], None, &mut rng, &mut stats);
        assert!(out.found.is_some());
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn none_marked_is_not_found() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut stats = QueryStats::default();
        assert_eq!(qsearch(&[false; 16], None, &mut rng, &mut stats).found, None);
        assert_eq!(counting_search(&[false; 16], &mut rng, &mut stats).found, None);
    }

    #[test]
    fn single_marked_of_sixteen() {
        let mut marked = [false; 16];
        marked[11] = true;
        let mut hits = 0;
        let mut total = 0;
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut stats = QueryStats::default();
            let out = qsearch(&marked, None, &mut rng, &mut stats);
            total += out.iterations;
            if out.found == Some(11) {
                hits += 1;
            }
        }
        assert!(hits >= 150, "hits = {hits}");
        assert!((total as f64 / 200.0) <= 4.5 * 4.0);
    }

    #[test]
    fn returned_item_is_uniform_over_marked() {
        let marked: Vec<bool> = (0..16).map(|i| i % 4 == 1).collect();
        let mut counts = [0usize; 16];
        for seed in 0..800 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let Some(i) = qsearch(&marked, None, &mut rng, &mut QueryStats::default()).found {
                counts[i] += 1;
            }
        }
        for i in [1, 5, 9, 13] {
            assert!(counts[i] > 150, "{counts:?}");
        }
    }

    #[test]
    fn counting_detects_single_item() {
        let mut marked = vec![false; 32];
        marked[3] = true;
        let hits = (0..200)
            .filter(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                counting_search(&marked, &mut rng, &mut QueryStats::default()).found.is_some()
            })
            .count();
        assert!(hits as f64 >= 200.0 * 5.0 / 6.0, "hits = {hits}");
    }

    #[test]
    fn min_finding_examples() {
        let g = [3.0, 1.0, 4.0, 1.0, 5.0];
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = min_finding(&g, &mut rng, &mut QueryStats::default()).unwrap();
            assert!(out.index == 1 || out.index == 3);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = min_finding(&[2.0; 6], &mut rng, &mut QueryStats::default()).unwrap();
        assert!(out.index < 6);
        assert_eq!(
            min_finding(&[f64::INFINITY; 3], &mut rng, &mut QueryStats::default()),
            Err(Error::AllInfinite)
        );
    }

    #[test]
    fn min_finding_random_values() {
        let mut ok = 0;
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g: Vec<f64> = (0..16).map(|_| rng.gen::<f64>()).collect();
            let best = g.iter().cloned().fold(f64::INFINITY, f64::min);
            let out = min_finding(&g, &mut rng, &mut QueryStats::default()).unwrap();
            if g[out.index] == best {
                ok += 1;
            }
        }
        assert!(ok >= 150, "ok = {ok}");
    }
}

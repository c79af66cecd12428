//! Unit-constant evaluation of the complexity formulas.
//!
//! Every asymptotic bound is evaluated with all hidden constants set to 1,
//! polylogarithmic factors set to 1 (except inside the linear-system cost,
//! where the logarithms are explicit), and `o(1)` exponents set to 0. Reports
//! carry the symbolic formula next to each number.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::QueryStats;

/// `max(log₂ x, 1)`, the logarithm used in the linear-system cost.
fn log_term(x: f64) -> f64 {
    x.log2().max(1.0)
}

/// Query and gate counts charged for one linear-system solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QlsaCost {
    pub p_a_queries: u64,
    pub p_b_queries: u64,
    pub gates: u64,
    /// `max(log₂(κ/ε), 1)`
    pub log_term: f64,
}

/// `d κ² L^2.5` queries to `P_A`, `κ √L` to `P_b` and
/// `d κ² L^2.5 (log₂ m + L^2.5)` further gates, `L = max(log₂(κ/ε), 1)`.
pub fn qlsa_cost(d: usize, kappa: f64, eps: f64, m: usize) -> QlsaCost {
    let l = log_term(kappa / eps);
    let base = d as f64 * kappa * kappa * l.powf(2.5);
    QlsaCost {
        p_a_queries: base.ceil() as u64,
        p_b_queries: (kappa * l.sqrt()).ceil() as u64,
        gates: (base * ((m.max(1) as f64).log2() + l.powf(2.5))).ceil() as u64,
        log_term: l,
    }
}

/// Block-encoding variant of the solve cost, `μ(A_B) κ²`.
pub fn qlsa_cost_qram(mu: f64, kappa: f64) -> f64 {
    mu * kappa * kappa
}

/// `d_c^0.7 m^1.9 + m² + d_c n`
pub fn classical_pricing_cost(m: usize, n: usize, d_c: usize) -> f64 {
    let (m, n, d_c) = (m as f64, n as f64, d_c as f64);
    d_c.powf(0.7) * m.powf(1.9) + m * m + d_c * n
}

/// `n/m ≥ 2κd²/d_c`, the condition for splitting the columns into blocks.
pub fn split_threshold_holds(m: usize, n: usize, d_c: usize, d: usize, kappa: f64) -> bool {
    n as f64 / m as f64 >= split_threshold(d_c, d, kappa)
}

/// `2κd²/d_c`
pub fn split_threshold(d_c: usize, d: usize, kappa: f64) -> f64 {
    2.0 * kappa * (d * d) as f64 / d_c as f64
}

/// Pricing cost. Without qRAM and without splitting:
/// `√n (κ d_c n + κ² d² m)/ε`; with splitting: `κ^1.5 d √d_c n √m / ε`;
/// with qRAM: `κ² √(mn)/ε`.
pub fn quantum_pricing_cost(
    m: usize,
    n: usize,
    d_c: usize,
    d: usize,
    kappa: f64,
    eps: f64,
    qram: bool,
    split: bool,
) -> Result<f64> {
    let (mf, nf, dcf, df) = (m as f64, n as f64, d_c as f64, d as f64);
    if qram {
        return Ok(kappa * kappa * (mf * nf).sqrt() / eps);
    }
    if split {
        if !split_threshold_holds(m, n, d_c, d, kappa) {
            return Err(Error::ThresholdViolation);
        }
        return Ok(kappa.powf(1.5) * df * dcf.sqrt() * nf * mf.sqrt() / eps);
    }
    Ok(nf.sqrt() * (kappa * dcf * nf + kappa * kappa * df * df * mf) / eps)
}

/// Pricing cost with the columns cut into `h` blocks searched one after the
/// other: `h · √(n/h) · (κ d_c n/h + κ² d² m)/ε`. Equals the unsplit cost at
/// `h = 1`.
pub fn blocked_pricing_cost(m: usize, n: usize, d_c: usize, d: usize, kappa: f64, eps: f64, h: usize) -> f64 {
    let (mf, nf, dcf, df, hf) = (m as f64, n as f64, d_c as f64, d as f64, h.max(1) as f64);
    (nf * hf).sqrt() * (kappa * dcf * nf / hf + kappa * kappa * df * df * mf) / eps
}

/// Ratio-test cost `(t/δ) κ² d² m^1.5`, or `(t/δ) κ² m` with qRAM.
pub fn quantum_ratio_test_cost(m: usize, d: usize, kappa: f64, delta: f64, t: f64, qram: bool) -> f64 {
    let mf = m as f64;
    if qram {
        t / delta * kappa * kappa * mf
    } else {
        t / delta * kappa * kappa * (d * d) as f64 * mf.powf(1.5)
    }
}

/// Unboundedness-test cost: the ratio-test cost without the factor `t`.
pub fn is_unbounded_cost(m: usize, d: usize, kappa: f64, delta: f64, qram: bool) -> f64 {
    quantum_ratio_test_cost(m, d, kappa, delta, 1.0, qram)
}

/// `s_p(A) = max_i Σ_j |A_ij|^p`, with `|0|^0 = 0` so `s_0` counts nonzeros.
pub fn s_p(a: &DMatrix<f64>, p: f64) -> f64 {
    (0..a.nrows())
        .map(|i| {
            a.row(i)
                .iter()
                .filter(|v| **v != 0.0)
                .map(|v| v.abs().powf(p))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `min(‖A‖_F, √(s_{2p}(A) s_{2(1−p)}(Aᵀ)))` for a single `p ∈ [0, 1]`.
pub fn mu_at(a: &DMatrix<f64>, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let candidate = (s_p(a, 2.0 * p) * s_p(&a.transpose(), 2.0 * (1.0 - p))).sqrt();
    Ok(a.norm().min(candidate))
}

/// `μ(A)`, minimized over `p ∈ {0, 0.1, …, 1}`.
pub fn mu(a: &DMatrix<f64>) -> f64 {
    (0..=10)
        .map(|i| mu_at(a, i as f64 / 10.0).expect("grid point in range"))
        .fold(f64::INFINITY, f64::min)
}

/// `⌊n d_c/(κ d² m)⌋` when `n/m ≥ 2κd²/d_c` and the result is at least 2;
/// `None` means no split.
pub fn column_split(n: usize, m: usize, d_c: usize, d: usize, kappa: f64) -> Option<usize> {
    if n == 0 || m == 0 || d_c == 0 || d == 0 || !(kappa >= 1.0) {
        return None;
    }
    if !split_threshold_holds(m, n, d_c, d, kappa) {
        return None;
    }
    let h = ((n * d_c) as f64 / (kappa * (d * d * m) as f64)).floor() as usize;
    (h >= 2).then_some(h)
}

/// One evaluated formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaValue {
    pub name: String,
    pub formula: String,
    pub value: Option<f64>,
    /// Why the value is absent (e.g. threshold not met).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Instance statistics and predicted costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub schema_version: u32,
    pub m: usize,
    pub n: usize,
    pub d_c: usize,
    pub d_r: usize,
    pub d: usize,
    pub kappa: f64,
    pub mu_basis: f64,
    pub a_n_frobenius: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub t: f64,
    pub split_threshold: f64,
    pub split_blocks: Option<usize>,
    pub formulas: Vec<FormulaValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<QueryStats>,
}

/// Inputs to [`CostReport::new`].
#[derive(Debug, Clone, Copy)]
pub struct CostInputs {
    pub m: usize,
    pub n: usize,
    pub d_c: usize,
    pub d_r: usize,
    pub kappa: f64,
    pub mu_basis: f64,
    pub a_n_frobenius: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub t: f64,
}

impl CostReport {
    pub fn new(inp: CostInputs, measured: Option<QueryStats>) -> Self {
        let CostInputs { m, n, d_c, d_r, kappa, epsilon: eps, delta, t, .. } = inp;
        let d = d_c.max(d_r);
        let h = column_split(n, m, d_c, d, kappa);
        let qlsa = qlsa_cost(d, kappa, eps, m);
        let val = |name: &str, formula: &str, value: f64| FormulaValue {
            name: name.to_string(),
            formula: formula.to_string(),
            value: Some(value),
            note: None,
        };
        let mut formulas = vec![
            val("classical_pricing", "d_c^0.7 m^1.9 + m^2 + d_c n", classical_pricing_cost(m, n, d_c)),
            val(
                "quantum_pricing",
                "sqrt(n) (kappa d_c n + kappa^2 d^2 m) / eps",
                quantum_pricing_cost(m, n, d_c, d, kappa, eps, false, false).expect("no split"),
            ),
        ];
        formulas.push(match quantum_pricing_cost(m, n, d_c, d, kappa, eps, false, true) {
            Ok(v) => val("quantum_pricing_split", "kappa^1.5 d sqrt(d_c) n sqrt(m) / eps", v),
            Err(_) => FormulaValue {
                name: "quantum_pricing_split".to_string(),
                formula: "kappa^1.5 d sqrt(d_c) n sqrt(m) / eps".to_string(),
                value: None,
                note: Some("n/m < 2 kappa d^2 / d_c".to_string()),
            },
        });
        formulas.push(val(
            "quantum_pricing_blocked",
            "sqrt(n h) (kappa d_c n / h + kappa^2 d^2 m) / eps, h = split blocks or 1",
            blocked_pricing_cost(m, n, d_c, d, kappa, eps, h.unwrap_or(1)),
        ));
        formulas.extend([
            val(
                "quantum_pricing_qram",
                "kappa^2 sqrt(m n) / eps",
                quantum_pricing_cost(m, n, d_c, d, kappa, eps, true, false).expect("qram"),
            ),
            val("quantum_ratio_test", "(t/delta) kappa^2 d^2 m^1.5", quantum_ratio_test_cost(m, d, kappa, delta, t, false)),
            val("quantum_ratio_test_qram", "(t/delta) kappa^2 m", quantum_ratio_test_cost(m, d, kappa, delta, t, true)),
            val("is_unbounded", "(1/delta) kappa^2 d^2 m^1.5", is_unbounded_cost(m, d, kappa, delta, false)),
            val("is_unbounded_qram", "(1/delta) kappa^2 m", is_unbounded_cost(m, d, kappa, delta, true)),
            val("qlsa_p_a_queries", "d kappa^2 L^2.5, L = max(log2(kappa/eps), 1)", qlsa.p_a_queries as f64),
            val("qlsa_p_b_queries", "kappa sqrt(L)", qlsa.p_b_queries as f64),
            val("qlsa_gates", "d kappa^2 L^2.5 (log2 m + L^2.5)", qlsa.gates as f64),
            val("qlsa_qram", "mu(A_B) kappa^2", qlsa_cost_qram(inp.mu_basis, kappa)),
            val("qram_update", "m (per iteration)", m as f64),
            val("qram_preparation", "d_c n (once)", (d_c * n) as f64),
        ]);
        CostReport {
            schema_version: 1,
            m,
            n,
            d_c,
            d_r,
            d,
            kappa,
            mu_basis: inp.mu_basis,
            a_n_frobenius: inp.a_n_frobenius,
            epsilon: eps,
            delta,
            t,
            split_threshold: split_threshold(d_c, d, kappa),
            split_blocks: h,
            formulas,
            measured,
        }
    }

    pub fn formula(&self, name: &str) -> Option<&FormulaValue> {
        self.formulas.iter().find(|f| f.name == name)
    }

    /// Aligned-column text rendering.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "m = {}  n = {}  d_c = {}  d_r = {}  d = {}  kappa = {:.6}  mu(A_B) = {:.6}  |A_N|_F = {:.6}\n\
             eps = {}  delta = {}  t = {}  split threshold n/m >= {:.4}  blocks = {}\n\n",
            self.m,
            self.n,
            self.d_c,
            self.d_r,
            self.d,
            self.kappa,
            self.mu_basis,
            self.a_n_frobenius,
            self.epsilon,
            self.delta,
            self.t,
            self.split_threshold,
            self.split_blocks.map_or("none".to_string(), |h| h.to_string()),
        );
        let w_name = self.formulas.iter().map(|f| f.name.len()).max().unwrap_or(4).max(4);
        let w_formula = self.formulas.iter().map(|f| f.formula.len()).max().unwrap_or(7).max(7);
        out += &format!("{:<w_name$}  {:<w_formula$}  {:>14}\n", "name", "formula", "value");
        for f in &self.formulas {
            let v = match (f.value, &f.note) {
                (Some(v), _) => format!("{v:.6e}"),
                (None, Some(note)) => format!("n/a ({note})"),
                (None, None) => "n/a".to_string(),
            };
            out += &format!("{:<w_name$}  {:<w_formula$}  {:>14}\n", f.name, f.formula, v);
        }
        if let Some(s) = &self.measured {
            out += &format!(
                "\nmeasured: u_calls = {}  controlled_u_calls = {}  qlsa = {}  P_A = {}  P_b = {}  grover = {}  ae_reps = {}  gates = {}\n",
                s.u_calls,
                s.controlled_u_calls,
                s.qlsa_invocations,
                s.p_a_queries,
                s.p_b_queries,
                s.grover_iterations,
                s.ae_repetitions,
                s.gate_tally
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_pricing_examples() {
        assert_eq!(classical_pricing_cost(1, 1, 1), 3.0);
        let v = classical_pricing_cost(1000, 10_000, 10);
        let expected = 10f64.powf(0.7) * 10f64.powf(5.7) + 1e6 + 1e5;
        assert!((v - expected).abs() / expected < 1e-12);
        let ratio = (classical_pricing_cost(200, 1, 1) - 200.0f64.powi(2) - 1.0)
            / (classical_pricing_cost(100, 1, 1) - 100.0f64.powi(2) - 1.0);
        assert!((ratio - 2f64.powf(1.9)).abs() < 1e-9);
    }

    #[test]
    fn quantum_pricing_examples() {
        let v = quantum_pricing_cost(10, 100, 1, 1, 1.0, 0.5, false, false).unwrap();
        assert!((v - 10.0 * 110.0 / 0.5).abs() < 1e-9);
        let q = quantum_pricing_cost(10, 40, 1, 1, 3.0, 0.1, true, false).unwrap();
        assert!((q - 9.0 * 20.0 / 0.1).abs() < 1e-9);
        assert_eq!(
            quantum_pricing_cost(10, 10, 1, 1, 1.0, 0.1, false, true),
            Err(Error::ThresholdViolation)
        );
        // threshold boundary n/m = 2κd²/d_c: both evaluate
        let (m, d_c, d, kappa) = (4, 2, 1, 2.0);
        let n = (split_threshold(d_c, d, kappa) * m as f64) as usize;
        assert!(quantum_pricing_cost(m, n, d_c, d, kappa, 0.1, false, true).is_ok());
        assert!(quantum_pricing_cost(m, n, d_c, d, kappa, 0.1, false, false).is_ok());
    }

    #[test]
    fn ratio_test_examples() {
        assert!((quantum_ratio_test_cost(100, 1, 1.0, 1.0, 1.0, false) - 1000.0).abs() < 1e-9);
        assert!((quantum_ratio_test_cost(100, 1, 1.0, 1.0, 1.0, true) - 100.0).abs() < 1e-9);
        assert!((is_unbounded_cost(100, 1, 1.0, 0.5, false) * 7.0 - quantum_ratio_test_cost(100, 1, 1.0, 0.5, 7.0, false)).abs() < 1e-6);
    }

    #[test]
    fn qlsa_cost_log_terms() {
        let c = qlsa_cost(1, 1.0, 0.5, 2);
        assert_eq!(c.log_term, 1.0);
        assert_eq!(c.p_a_queries, 1);
        assert_eq!(c.p_b_queries, 1);
        assert_eq!(c.gates, 2);
    }

    #[test]
    fn mu_examples() {
        assert!((mu(&DMatrix::identity(5, 5)) - 1.0).abs() < 1e-12);
        let ones = DMatrix::from_element(2, 2, 1.0);
        assert!((mu_at(&ones, 0.5).unwrap() - 2.0).abs() < 1e-12);
        assert!((mu(&ones) - 2.0).abs() < 1e-12);
        assert!(mu_at(&ones, 1.5).is_err());
    }

    #[test]
    fn column_split_examples() {
        assert_eq!(column_split(4096, 16, 2, 2, 2.0), Some(64));
        assert_eq!(column_split(10, 16, 2, 2, 2.0), None);
        assert_eq!(column_split(2, 1, 1, 1, 1.0), Some(2));
        assert_eq!(column_split(5, 3, 2, 1, 1.5), Some(2));
        // the threshold already forces h ≥ 2, so splits never degenerate
        for n in 1..60 {
            for kappa in [1.0, 1.3, 2.0, 3.7] {
                if let Some(h) = column_split(n, 3, 2, 1, kappa) {
                    assert!(h >= 2);
                }
            }
        }
    }

    #[test]
    fn blocked_cost_reduces_to_unsplit() {
        let a = blocked_pricing_cost(8, 64, 2, 2, 1.5, 0.1, 1);
        let b = quantum_pricing_cost(8, 64, 2, 2, 1.5, 0.1, false, false).unwrap();
        assert!((a - b).abs() < 1e-9 * b);
    }
}

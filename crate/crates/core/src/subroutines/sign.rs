//! Sign estimation of a real amplitude `α_k = ⟨k|U|0⟩` through the
//! Hadamard-interference gadget and amplitude estimation.
//!
//! The gadget prepares `½[|0⟩(|k⟩ + U|0⟩) + |1⟩(|k⟩ − U|0⟩)]`, so the
//! amplitude of `|0⟩|k⟩` is `(1+α_k)/2` and that of `|1⟩|k⟩` is
//! `(1−α_k)/2`. Amplitude estimation of the former decides the sign of
//! `α_k` against `−ε` (NFN, NFP); estimating the latter and complementing
//! gives the positive-sign tests (NFN⁺, NFP⁺).

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::QlsaCost;
use crate::error::{Error, Result};
use crate::qsim::{AeSampler, Circuit, Gate, GateKind, Mode, PreparedUnitary, QueryStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignVariant {
    /// No false negatives: `α ≥ −ε ⇒ 1`, `α < −2ε ⇒ 0`.
    Nfn,
    /// No false positives: `α ≤ −ε ⇒ 0`, `α > ε/3 ⇒ 1`.
    Nfp,
    /// `1 − NFP(−α)`: `α ≥ ε ⇒ 1`, `α < −ε/3 ⇒ 0`.
    NfnPlus,
    /// `1 − NFN(−α)`: `α > 2ε ⇒ 1`, `α ≤ ε ⇒ 0`.
    NfpPlus,
}

impl SignVariant {
    /// Whether the gadget target is `|1⟩|k⟩` (the positive-sign tests).
    pub fn is_plus(self) -> bool {
        matches!(self, SignVariant::NfnPlus | SignVariant::NfpPlus)
    }
}

/// `⌈log₂(√3π/ε)⌉ + 2`
pub fn nfn_bits(eps: f64) -> u32 {
    ((3f64.sqrt() * PI / eps).log2().ceil() as u32) + 2
}

/// `⌈log₂(9√3π/ε)⌉ + 2`
pub fn nfp_bits(eps: f64) -> u32 {
    ((9.0 * 3f64.sqrt() * PI / eps).log2().ceil() as u32) + 2
}

/// `1/6 − 2ε/(√3π)`
pub fn nfn_threshold(eps: f64) -> f64 {
    1.0 / 6.0 - 2.0 * eps / (3f64.sqrt() * PI)
}

/// `1/6 − 2ε/(3√3π)`
pub fn nfp_threshold(eps: f64) -> f64 {
    1.0 / 6.0 - 2.0 * eps / (3.0 * 3f64.sqrt() * PI)
}

/// The interference gadget on `U`'s register plus one auxiliary qubit (the
/// top one): `H(aux)`, `U` controlled on `aux = 1`, `X` on the set bits of
/// `k` controlled on `aux = 0`, `H(aux)`.
pub fn sign_gadget(u: &PreparedUnitary, k: usize) -> Result<PreparedUnitary> {
    let q = u.num_qubits();
    if k >= 1usize << q {
        return Err(Error::InvalidParameter(format!("index {k} outside a {q}-qubit register")));
    }
    let mut c = Circuit::new(q + 1);
    c.push(Gate::new(GateKind::H, q));
    c.append(&u.circuit.controlled(q, true));
    for bit in (0..q).filter(|b| (k >> b) & 1 == 1) {
        c.push(Gate::controlled(GateKind::X, bit, vec![(q, false)]));
    }
    c.push(Gate::new(GateKind::H, q));
    Ok(PreparedUnitary {
        circuit: c,
        gate_cost: u.gate_cost + (k.count_ones() as u64) + 2,
        real_amplitudes: u.real_amplitudes,
    })
}

/// One sign-estimation outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignEstimate {
    pub bit: bool,
    /// Folded amplitude-estimation outcome.
    pub fold: f64,
    /// The implied estimate of `α_k`.
    pub alpha_estimate: f64,
    /// Whether the estimation landed within `2^−(bits−2)` of the true phase,
    /// the event under which the variant's guarantees hold.
    pub accurate: bool,
}

/// A sign test with its amplitude-estimation distribution prepared once.
#[derive(Debug, Clone)]
pub struct SignSampler {
    variant: SignVariant,
    eps: f64,
    threshold: f64,
    ae: AeSampler,
}

impl SignSampler {
    pub fn new(u: &PreparedUnitary, k: usize, eps: f64, variant: SignVariant, mode: Mode) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("sign-estimation precision {eps} outside (0, 1)")));
        }
        if !u.real_amplitudes {
            return Err(Error::InvalidParameter("sign estimation needs a real-amplitude unitary".to_string()));
        }
        let (bits, threshold) = match variant {
            SignVariant::Nfn | SignVariant::NfpPlus => (nfn_bits(eps), nfn_threshold(eps)),
            SignVariant::Nfp | SignVariant::NfnPlus => (nfp_bits(eps), nfp_threshold(eps)),
        };
        let gadget = sign_gadget(u, k)?;
        let target = if variant.is_plus() { k | (1usize << u.num_qubits()) } else { k };
        let ae = AeSampler::new(&gadget, &[target], bits, mode, true)?;
        Ok(Self { variant, eps, threshold, ae })
    }

    pub fn variant(&self) -> SignVariant {
        self.variant
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn bits(&self) -> u32 {
        self.ae.bits()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Shifts the decision threshold; a test hook for checking that the
    /// verification suites notice a broken rule.
    pub fn with_threshold_offset(mut self, offset: f64) -> Self {
        self.threshold += offset;
        self
    }

    /// Charges a linear-system solve for every application of `U`.
    pub fn charge_embedded_qlsa(&mut self, cost: &QlsaCost) {
        self.ae.charge_embedded_qlsa(cost);
    }

    pub fn cost_per_sample(&self) -> QueryStats {
        self.ae.cost_per_sample()
    }

    /// `α_k` as encoded in the gadget target.
    pub fn alpha(&self) -> f64 {
        let a = (PI * self.ae.theta()).sin();
        if self.variant.is_plus() {
            1.0 - 2.0 * a
        } else {
            2.0 * a - 1.0
        }
    }

    fn decide(&self, fold: f64) -> bool {
        match self.variant {
            SignVariant::Nfn => fold >= self.threshold,
            SignVariant::Nfp => fold > self.threshold,
            SignVariant::NfnPlus => fold <= self.threshold,
            SignVariant::NfpPlus => fold < self.threshold,
        }
    }

    /// Exact probability of returning 1.
    pub fn probability_one(&self) -> f64 {
        self.ae.probability(|f| self.decide(f))
    }

    /// Exact probability that one run is accurate.
    pub fn probability_accurate(&self) -> f64 {
        let radius = self.accuracy_radius();
        let theta = self.ae.theta();
        self.ae.probability(|f| (f - theta).abs() < radius)
    }

    fn accuracy_radius(&self) -> f64 {
        2f64.powi(-(self.ae.bits() as i32 - 2))
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, stats: &mut QueryStats) -> SignEstimate {
        let s = self.ae.sample(rng, stats);
        let alpha_estimate = if self.variant.is_plus() { 1.0 - 2.0 * s.estimate } else { 2.0 * s.estimate - 1.0 };
        SignEstimate {
            bit: self.decide(s.fold),
            fold: s.fold,
            alpha_estimate,
            accurate: s.error < self.accuracy_radius(),
        }
    }
}

pub fn sign_est<R: Rng>(
    u: &PreparedUnitary,
    k: usize,
    eps: f64,
    variant: SignVariant,
    mode: Mode,
    rng: &mut R,
    stats: &mut QueryStats,
) -> Result<SignEstimate> {
    Ok(SignSampler::new(u, k, eps, variant, mode)?.sample(rng, stats))
}

pub fn sign_est_nfn<R: Rng>(
    u: &PreparedUnitary,
    k: usize,
    eps: f64,
    mode: Mode,
    rng: &mut R,
    stats: &mut QueryStats,
) -> Result<SignEstimate> {
    sign_est(u, k, eps, SignVariant::Nfn, mode, rng, stats)
}

pub fn sign_est_nfp<R: Rng>(
    u: &PreparedUnitary,
    k: usize,
    eps: f64,
    mode: Mode,
    rng: &mut R,
    stats: &mut QueryStats,
) -> Result<SignEstimate> {
    sign_est(u, k, eps, SignVariant::Nfp, mode, rng, stats)
}

/// Positive-sign test; `base` selects NFN⁺ (`Nfn`) or NFP⁺ (`Nfp`).
pub fn sign_est_plus<R: Rng>(
    u: &PreparedUnitary,
    k: usize,
    eps: f64,
    base: SignVariant,
    mode: Mode,
    rng: &mut R,
    stats: &mut QueryStats,
) -> Result<SignEstimate> {
    let variant = match base {
        SignVariant::Nfn | SignVariant::NfnPlus => SignVariant::NfnPlus,
        SignVariant::Nfp | SignVariant::NfpPlus => SignVariant::NfpPlus,
    };
    sign_est(u, k, eps, variant, mode, rng, stats)
}

/// Majority vote over repeated runs of a bounded-error bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoostedBit {
    pub value: bool,
    pub ones: usize,
    pub runs: usize,
    /// More than half of the runs were accurate, so the majority inherits the
    /// single-run guarantee.
    pub sound: bool,
}

/// Runs `f` `repetitions` times; `f` returns `(bit, accurate)`.
pub fn boosted_sign<F>(repetitions: usize, mut f: F) -> Result<BoostedBit>
where
    F: FnMut() -> Result<(bool, bool)>,
{
    let mut ones = 0;
    let mut accurate = 0;
    for _ in 0..repetitions {
        let (bit, acc) = f()?;
        ones += bit as usize;
        accurate += acc as usize;
    }
    Ok(BoostedBit {
        value: 2 * ones > repetitions,
        ones,
        runs: repetitions,
        sound: 2 * accurate > repetitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::prepare_state_on;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Real unitary on two qubits with `⟨0|U|0⟩ = α`.
    fn with_alpha(alpha: f64) -> PreparedUnitary {
        let rest = (1.0 - alpha * alpha).max(0.0).sqrt();
        prepare_state_on(&[alpha, rest * 0.6, 0.0, rest * 0.8], 2).unwrap()
    }

    #[test]
    fn gadget_coefficients() {
        let u = with_alpha(0.3);
        let g = sign_gadget(&u, 0).unwrap();
        let s = g.prepared_state();
        assert!((s.amplitude(0).re - 0.65).abs() < 1e-12);
        assert!((s.amplitude(4).re - 0.35).abs() < 1e-12);
        assert_eq!(g.gate_cost, u.gate_cost + 2);
    }

    #[test]
    fn identity_prep_returns_one() {
        let u = PreparedUnitary::from_circuit(Circuit::new(1));
        let s = SignSampler::new(&u, 0, 0.1, SignVariant::Nfn, Mode::Analytic).unwrap();
        assert!(s.probability_one() >= 0.75);
        assert!((s.alpha() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nfn_and_nfp_guarantees_on_examples() {
        let eps = 0.1;
        let nfn = SignSampler::new(&with_alpha(-3.0 * eps), 0, eps, SignVariant::Nfn, Mode::Analytic).unwrap();
        assert!(nfn.probability_one() <= 0.25);
        let nfp = SignSampler::new(&with_alpha(-eps), 0, eps, SignVariant::Nfp, Mode::Analytic).unwrap();
        assert!(nfp.probability_one() <= 0.25);
        let nfp = SignSampler::new(&with_alpha(1.0), 0, eps, SignVariant::Nfp, Mode::Analytic).unwrap();
        assert!(nfp.probability_one() >= 0.75);
    }

    #[test]
    fn plus_variants_mirror_the_base_tests() {
        let eps = 0.1;
        for i in 0..=20 {
            let alpha = -0.5 + i as f64 * 0.05;
            let plus = SignSampler::new(&with_alpha(alpha), 0, eps, SignVariant::NfnPlus, Mode::Analytic).unwrap();
            let base = SignSampler::new(&with_alpha(-alpha), 0, eps, SignVariant::Nfp, Mode::Analytic).unwrap();
            assert!((plus.probability_one() - (1.0 - base.probability_one())).abs() < 1e-9);
            let plus = SignSampler::new(&with_alpha(alpha), 0, eps, SignVariant::NfpPlus, Mode::Analytic).unwrap();
            let base = SignSampler::new(&with_alpha(-alpha), 0, eps, SignVariant::Nfn, Mode::Analytic).unwrap();
            assert!((plus.probability_one() - (1.0 - base.probability_one())).abs() < 1e-9);
        }
        let one = SignSampler::new(&with_alpha(1.0), 0, eps, SignVariant::NfnPlus, Mode::Analytic).unwrap();
        assert!(one.probability_one() >= 0.75);
        let neg = SignSampler::new(&with_alpha(-1.0), 0, eps, SignVariant::NfnPlus, Mode::Analytic).unwrap();
        assert!(neg.probability_one() <= 0.25);
    }

    #[test]
    fn sampling_mode_matches_analytic() {
        let u = with_alpha(-0.15);
        let a = SignSampler::new(&u, 0, 0.2, SignVariant::Nfn, Mode::Analytic).unwrap();
        let s = SignSampler::new(&u, 0, 0.2, SignVariant::Nfn, Mode::Sampling).unwrap();
        assert!((a.probability_one() - s.probability_one()).abs() < 1e-6);
    }

    #[test]
    fn accurate_runs_are_likely_and_boosting_is_sound() {
        let u = with_alpha(0.05);
        let s = SignSampler::new(&u, 0, 0.1, SignVariant::Nfn, Mode::Analytic).unwrap();
        assert!(s.probability_accurate() > 0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut stats = QueryStats::default();
        let b = boosted_sign(15, || {
            let e = s.sample(&mut rng, &mut stats);
            Ok((e.bit, e.accurate))
        })
        .unwrap();
        assert!(b.value && b.sound);
        assert_eq!(b.runs, 15);
        assert_eq!(stats.controlled_u_calls, 15 * (1 + 2 * ((1 << s.bits()) - 1)));
    }
}

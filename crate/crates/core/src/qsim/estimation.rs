//! Phase estimation and amplitude estimation, each available as a closed-form
//! outcome kernel (analytic mode) and as a gate-level statevector simulation
//! (sampling mode).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Gate, GateKind, PreparedUnitary};
use super::state::{sample_index, StateVector};
use super::stats::QueryStats;
use crate::cost::QlsaCost;
use crate::error::{Error, Result};

/// How outcome distributions are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form kernels evaluated from the simulated state.
    #[default]
    Analytic,
    /// Full statevector simulation of the estimation circuit.
    Sampling,
}

/// Largest register (counting plus system qubits) simulated gate by gate.
/// Beyond it the circuit's output is computed from the exact action of the
/// Grover operator on the two-dimensional subspace it preserves.
pub const MAX_GATE_LEVEL_QUBITS: usize = 16;

/// Fejér kernel of a `bits`-qubit phase estimation:
/// `K(Δ) = sin²(MπΔ) / (M² sin²(πΔ))`, with `K = 1` at integer `Δ`.
pub fn kernel(bits: u32, delta: f64) -> f64 {
    let m = (1u64 << bits) as f64;
    let d = delta - delta.round();
    if d.abs() < 1e-12 {
        return 1.0 - (m * m - 1.0) * PI * PI * d * d / 3.0;
    }
    let num = (m * PI * d).sin();
    let den = m * (PI * d).sin();
    (num / den).powi(2)
}

/// Circular distance on the unit interval.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Total counting qubits so that the first `q` bits are accurate with
/// probability `1 − ε_fail`: `q + ⌈log₂(2 + 1/(2ε_fail))⌉`.
pub fn pe_total_bits(q: u32, eps_fail: f64) -> u32 {
    q + (2.0 + 1.0 / (2.0 * eps_fail)).log2().ceil() as u32
}

/// Exact outcome distribution over `y ∈ [0, 2^bits)` of phase estimation on
/// an eigenstate with phase `phi`: `P(y) = K(y/M − φ)`.
pub fn pe_distribution(phi: f64, bits: u32) -> Vec<f64> {
    let m = 1usize << bits;
    (0..m).map(|y| kernel(bits, y as f64 / m as f64 - phi)).collect()
}

/// Probability mass of outcomes within circular distance `< 2^{-q}` of `phi`.
pub fn pe_accuracy(dist: &[f64], phi: f64, q: u32) -> f64 {
    let m = dist.len() as f64;
    let tol = 0.5f64.powi(q as i32);
    dist.iter()
        .enumerate()
        .filter(|(y, _)| circular_distance(*y as f64 / m, phi) < tol)
        .map(|(_, p)| p)
        .sum()
}

/// Outcome distribution of phase estimation with `bits` counting qubits,
/// controlled powers of `u`, and input `state`. In analytic mode an
/// eigenstate is recognised and the kernel is returned; anything else is
/// simulated gate by gate.
pub fn phase_estimation(u: &DMatrix<Complex64>, state: &StateVector, bits: u32, mode: Mode) -> Vec<f64> {
    if mode == Mode::Analytic {
        let psi = DVector::from_column_slice(state.amplitudes());
        let image = u * &psi;
        let lambda = psi.dotc(&image);
        if (image - &psi * lambda).norm() < 1e-10 && (lambda.norm() - 1.0).abs() < 1e-10 {
            let phi = (lambda.arg() / (2.0 * PI)).rem_euclid(1.0);
            return pe_distribution(phi, bits);
        }
    }
    phase_estimation_circuit(u, state, bits)
}

/// Gate-level phase estimation: Hadamards on the counting register,
/// controlled `U^{2^j}` (built by repeated squaring), inverse QFT, and the
/// marginal distribution of the counting register.
pub fn phase_estimation_circuit(u: &DMatrix<Complex64>, state: &StateVector, bits: u32) -> Vec<f64> {
    let sys_qubits = state.num_qubits();
    let dim = state.dim();
    let m = 1usize << bits;
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    let mut full = vec![Complex64::new(0.0, 0.0); m * dim];
    for y in 0..m {
        for (s, a) in state.amplitudes().iter().enumerate() {
            full[y * dim + s] = amp * a;
        }
    }
    let mut power = u.clone();
    for j in 0..bits {
        for y in (0..m).filter(|y| y >> j & 1 == 1) {
            let block = DVector::from_column_slice(&full[y * dim..(y + 1) * dim]);
            let out = &power * block;
            full[y * dim..(y + 1) * dim].copy_from_slice(out.as_slice());
        }
        power = &power * &power;
    }
    let mut sv = StateVector::from_amplitudes(full);
    inverse_qft(bits as usize, sys_qubits).apply(&mut sv);
    let probs = sv.probabilities();
    (0..m).map(|y| probs[y * dim..(y + 1) * dim].iter().sum()).collect()
}

/// QFT on qubits `offset .. offset + n`, `|x⟩ ↦ M^{-1/2} Σ_y e^{2πixy/M}|y⟩`.
pub fn qft(n: usize, offset: usize) -> Circuit {
    let mut c = Circuit::new(offset + n);
    for i in (0..n).rev() {
        c.push(Gate::new(GateKind::H, offset + i));
        for k in (0..i).rev() {
            let phi = PI / (1u64 << (i - k)) as f64;
            c.push(Gate::controlled(GateKind::Phase(phi), offset + i, vec![(offset + k, true)]));
        }
    }
    for i in 0..n / 2 {
        let (a, b) = (offset + i, offset + n - 1 - i);
        c.push(Gate::controlled(GateKind::X, b, vec![(a, true)]));
        c.push(Gate::controlled(GateKind::X, a, vec![(b, true)]));
        c.push(Gate::controlled(GateKind::X, b, vec![(a, true)]));
    }
    c
}

pub fn inverse_qft(n: usize, offset: usize) -> Circuit {
    qft(n, offset).inverse()
}

/// `θ ∈ [0, 1/2]` with `sin(πθ) = amplitude`.
pub fn theta_of(amplitude: f64) -> f64 {
    amplitude.clamp(0.0, 1.0).asin() / PI
}

/// Folds an outcome `y/M` into `[0, 1/2]`.
pub fn fold(y: usize, bits: u32) -> f64 {
    let x = y as f64 / (1u64 << bits) as f64;
    if x >= 0.5 {
        1.0 - x
    } else {
        x
    }
}

/// Exact amplitude-estimation outcome distribution for true phase `θ`:
/// `P(y) = ½[K(y/M − θ) + K(y/M + θ)]`.
pub fn ae_distribution(theta: f64, bits: u32) -> Vec<f64> {
    let m = 1usize << bits;
    (0..m)
        .map(|y| {
            let x = y as f64 / m as f64;
            0.5 * (kernel(bits, x - theta) + kernel(bits, x + theta))
        })
        .collect()
}

/// One amplitude-estimation outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeSample {
    pub y: usize,
    /// `y/M` folded into `[0, 1/2]`.
    pub fold: f64,
    /// `sin(π·fold)`, the amplitude estimate.
    pub estimate: f64,
    /// `|fold − θ|`, known to the simulation only.
    pub error: f64,
}

#[derive(Debug, Clone)]
enum Source {
    Kernel,
    Table(Vec<f64>),
}

/// Amplitude estimation of the mass of `good` basis states in `prep|0⟩`,
/// with the outcome distribution computed once and sampled repeatedly.
#[derive(Debug, Clone)]
pub struct AeSampler {
    bits: u32,
    theta: f64,
    source: Source,
    /// Cost charged per sample.
    cost: QueryStats,
}

impl AeSampler {
    /// `controlled` records whether the preparation unitary is applied in
    /// controlled form inside the estimation (it is in the sign gadgets).
    pub fn new(prep: &PreparedUnitary, good: &[usize], bits: u32, mode: Mode, controlled: bool) -> Result<Self> {
        if bits == 0 || bits > 30 {
            return Err(Error::InvalidParameter(format!("amplitude estimation with {bits} bits")));
        }
        let state = prep.prepared_state();
        if good.iter().any(|&g| g >= state.dim()) {
            return Err(Error::InvalidParameter("target index outside the register".to_string()));
        }
        let mass: f64 = good.iter().map(|&g| state.amplitude(g).norm_sqr()).sum();
        let theta = theta_of(mass.sqrt());
        let source = match mode {
            Mode::Analytic => Source::Kernel,
            Mode::Sampling => Source::Table(ae_circuit_distribution(prep, good, bits)),
        };
        let m = 1u64 << bits;
        let prep_calls = 1 + 2 * (m - 1);
        let iqft_gates = (bits as u64) * (bits as u64 + 1) / 2 + 3 * (bits as u64 / 2);
        let mut cost = QueryStats {
            ae_repetitions: m - 1,
            gate_tally: prep.gate_cost * prep_calls + iqft_gates + bits as u64,
            ..QueryStats::default()
        };
        if controlled {
            cost.controlled_u_calls = prep_calls;
        } else {
            cost.u_calls = prep_calls;
        }
        Ok(Self { bits, theta, source, cost })
    }

    /// Sampler for a known phase, used by estimates whose state is defined
    /// through its success probability.
    pub fn from_theta(theta: f64, bits: u32, cost_per_prep: u64) -> Self {
        let m = 1u64 << bits;
        Self {
            bits,
            theta,
            source: Source::Kernel,
            cost: QueryStats {
                u_calls: 1 + 2 * (m - 1),
                ae_repetitions: m - 1,
                gate_tally: cost_per_prep * (1 + 2 * (m - 1)) + (bits as u64).pow(2),
                ..QueryStats::default()
            },
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of applications of the preparation unitary per sample.
    pub fn prep_calls(&self) -> u64 {
        1 + 2 * ((1u64 << self.bits) - 1)
    }

    /// Adds the cost of a linear-system solve embedded in every application
    /// of the preparation unitary.
    pub fn charge_embedded_qlsa(&mut self, cost: &QlsaCost) {
        let calls = self.prep_calls();
        self.cost.qlsa_invocations += calls;
        self.cost.p_a_queries += cost.p_a_queries * calls;
        self.cost.p_b_queries += cost.p_b_queries * calls;
        self.cost.gate_tally += cost.gates * calls;
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cost_per_sample(&self) -> QueryStats {
        self.cost
    }

    /// Exact distribution over outcomes `y`.
    pub fn distribution(&self) -> Vec<f64> {
        match &self.source {
            Source::Kernel => ae_distribution(self.theta, self.bits),
            Source::Table(t) => t.clone(),
        }
    }

    /// Exact probability that the folded outcome satisfies `pred`.
    pub fn probability(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.distribution()
            .iter()
            .enumerate()
            .filter(|(y, _)| pred(fold(*y, self.bits)))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, stats: &mut QueryStats) -> AeSample {
        stats.add(&self.cost);
        let y = match &self.source {
            Source::Kernel => sample_ae_kernel(self.theta, self.bits, rng),
            Source::Table(t) => sample_index(t, rng),
        };
        let f = fold(y, self.bits);
        AeSample {
            y,
            fold: f,
            estimate: (PI * f).sin(),
            error: (f - self.theta).abs(),
        }
    }
}

/// Draws from `½[K(·−θ) + K(·+θ)]`: pick a branch, then walk outward from the
/// kernel peak accumulating mass. The walk takes `O(log M)` steps on average.
fn sample_ae_kernel<R: Rng>(theta: f64, bits: u32, rng: &mut R) -> usize {
    let m = 1usize << bits;
    let center = if rng.gen_bool(0.5) { theta } else { 1.0 - theta };
    let y0 = ((center * m as f64).round() as usize) % m;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for step in 0..m {
        let offset = if step % 2 == 1 { (step + 1) / 2 } else { m - step / 2 };
        let y = (y0 + offset) % m;
        acc += kernel(bits, y as f64 / m as f64 - center);
        if u < acc {
            return y;
        }
    }
    y0
}

/// Outcome distribution of the amplitude-estimation circuit built from
/// `Q = −A S₀ A† S_χ`.
pub fn ae_circuit_distribution(prep: &PreparedUnitary, good: &[usize], bits: u32) -> Vec<f64> {
    let a = prep.matrix();
    let dim = a.nrows();
    let mut s0 = DMatrix::<Complex64>::identity(dim, dim);
    s0[(0, 0)] = Complex64::new(-1.0, 0.0);
    let mut schi = DMatrix::<Complex64>::identity(dim, dim);
    for &g in good {
        schi[(g, g)] = Complex64::new(-1.0, 0.0);
    }
    let q = -(&a * &s0 * a.adjoint() * &schi);
    let start = prep.prepared_state();
    if bits as usize + start.num_qubits() <= MAX_GATE_LEVEL_QUBITS {
        return phase_estimation_circuit(&q, &start, bits);
    }
    invariant_plane_distribution(&q, &start, good, bits).unwrap_or_else(|| phase_estimation_circuit(&q, &start, bits))
}

/// Exact phase-estimation output when `start` lies in a two-dimensional
/// `Q`-invariant plane (spanned by its good and bad parts): the
/// distribution is `Σ_j |c_j|² K(y/M − φ_j)` over the eigenpairs of `Q`
/// restricted to that plane. Returns `None` if the plane is not invariant.
fn invariant_plane_distribution(
    q: &DMatrix<Complex64>,
    start: &StateVector,
    good: &[usize],
    bits: u32,
) -> Option<Vec<f64>> {
    let dim = start.dim();
    let psi = DVector::from_column_slice(start.amplitudes());
    let mut g = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for &i in good {
        g[i] = psi[i];
    }
    let b = &psi - &g;
    let (gn, bn) = (g.norm(), b.norm());
    let basis: Vec<DVector<Complex64>> = match (gn > 1e-14, bn > 1e-14) {
        (true, true) => vec![g / Complex64::new(gn, 0.0), b / Complex64::new(bn, 0.0)],
        (true, false) => vec![g / Complex64::new(gn, 0.0)],
        (false, true) => vec![b / Complex64::new(bn, 0.0)],
        (false, false) => return None,
    };
    let k = basis.len();
    let mut r = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    for (j, v) in basis.iter().enumerate() {
        let image = q * v;
        let mut resid = image.clone();
        for (i, w) in basis.iter().enumerate() {
            let c = w.dotc(&image);
            r[(i, j)] = c;
            resid -= w * c;
        }
        if resid.norm() > 1e-9 {
            return None;
        }
    }
    let coords = DVector::from_iterator(k, basis.iter().map(|w| w.dotc(&psi)));
    let eig = eigen_small(&r)?;
    let m = 1usize << bits;
    let mut dist = vec![0.0; m];
    for (lambda, vec) in eig {
        let weight = vec.dotc(&coords).norm_sqr();
        let phi = (lambda.arg() / (2.0 * PI)).rem_euclid(1.0);
        for (y, p) in dist.iter_mut().enumerate() {
            *p += weight * kernel(bits, y as f64 / m as f64 - phi);
        }
    }
    Some(dist)
}

/// Orthonormal eigenpairs of a 1×1 or 2×2 unitary.
fn eigen_small(r: &DMatrix<Complex64>) -> Option<Vec<(Complex64, DVector<Complex64>)>> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if r.nrows() == 1 {
        return Some(vec![(r[(0, 0)], DVector::from_element(1, one))]);
    }
    let (a, b, c, d) = (r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let mut out = Vec::new();
    for lambda in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
        let v = if b.norm() > 1e-14 {
            DVector::from_vec(vec![b, lambda - a])
        } else if c.norm() > 1e-14 {
            DVector::from_vec(vec![lambda - d, c])
        } else if out.is_empty() {
            DVector::from_vec(vec![one, zero])
        } else {
            DVector::from_vec(vec![zero, one])
        };
        let n = v.norm();
        if n < 1e-14 {
            return None;
        }
        out.push((lambda, v / Complex64::new(n, 0.0)));
    }
    Some(out)
}

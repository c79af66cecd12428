use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on `‖ψ‖ = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Drift beyond which composite steps renormalize.
pub const RENORM_TOL: f64 = 1e-12;

/// Amplitudes of a `q`-qubit register. Basis index bit `i` is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// Number of qubits needed to index `len` entries (at least one).
pub fn qubits_for(len: usize) -> usize {
    let mut q = 1;
    while (1usize << q) < len {
        q += 1;
    }
    q
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    /// Amplitude encoding `v/‖v‖` padded with zeros to `2^num_qubits` entries.
    pub fn from_real(num_qubits: usize, v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || v.len() > 1 << num_qubits {
            return Err(Error::ZeroVector);
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        for (a, &x) in amps.iter_mut().zip(v) {
            *a = Complex64::new(x / norm, 0.0);
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(amps.len().is_power_of_two() && amps.len() >= 2);
        let num_qubits = amps.len().trailing_zeros() as usize;
        Self { num_qubits, amps }
    }

    /// Haar-like random state from normalized complex Gaussians.
    pub fn random<R: Rng>(num_qubits: usize, rng: &mut R) -> Self {
        let amps: Vec<Complex64> = (0..1usize << num_qubits)
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let mut s = Self { num_qubits, amps };
        s.normalize();
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= n);
    }

    /// Renormalizes only when accumulated drift exceeds [`RENORM_TOL`].
    pub fn renormalize_if_drifted(&mut self) {
        if (self.norm() - 1.0).abs() > RENORM_TOL {
            self.normalize();
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Real parts after removing the global phase of the largest amplitude.
    pub fn real_parts(&self) -> Vec<f64> {
        let pivot = self
            .amps
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
        self.amps.iter().map(|a| (a * phase).re).collect()
    }

    /// Applies the 2×2 matrix `[[m00, m01], [m10, m11]]` to `target` on the
    /// subspace where every `(qubit, value)` control matches.
    pub fn apply_1q(&mut self, target: usize, m: [[Complex64; 2]; 2], controls: &[(usize, bool)]) {
        let tbit = 1usize << target;
        let (mut cmask, mut cval) = (0usize, 0usize);
        for &(q, v) in controls {
            cmask |= 1 << q;
            if v {
                cval |= 1 << q;
            }
        }
        for i in 0..self.amps.len() {
            if i & tbit != 0 || i & cmask != cval {
                continue;
            }
            let j = i | tbit;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Samples a basis index from the Born distribution.
    pub fn measure<R: Rng>(&self, rng: &mut R) -> usize {
        sample_index(&self.probabilities(), rng)
    }
}

/// Inverse-CDF draw from unnormalized weights.
pub fn sample_index<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Standard normal draw (Box–Muller).
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_counts() {
        assert_eq!(qubits_for(1), 1);
        assert_eq!(qubits_for(2), 1);
        assert_eq!(qubits_for(5), 3);
        assert_eq!(qubits_for(8), 3);
    }

    #[test]
    fn amplitude_encoding_is_normalized() {
        let s = StateVector::from_real(2, &[3.0, 4.0]).unwrap();
        assert!((s.norm() - 1.0).abs() < NORM_TOL);
        assert!((s.amplitude(1).re - 0.8).abs() < 1e-15);
        assert_eq!(StateVector::from_real(2, &[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn random_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for q in 1..5 {
            assert!((StateVector::random(q, &mut rng).norm() - 1.0).abs() < NORM_TOL);
        }
    }
}

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;

use super::kernel;
use super::pauli::PauliString;
use super::unitary::Unitary;
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::scalar::{is_finite, Scalar};

pub const MAX_QUBITS: usize = 24;

/// Branches below this probability are never selected by a measurement.
pub const DEGENERATE_BRANCH: f64 = 1e-12;

/// Dense pure state over `num_qubits` qubits.
///
/// Amplitude index bit `q` is qubit `q` (qubit 0 least significant). Ket
/// labels print qubit 0 first, so index 1 on three qubits is `|100>`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

pub(crate) fn check_capacity(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count",
            requested: num_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl<T: Scalar> StateVector<T> {
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero_state(num_qubits)?;
        if index >= s.amplitudes.len() {
            return Err(Error::Validation(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        s.amplitudes[0] = Complex::new(T::zero(), T::zero());
        s.amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    /// Accepts a normalized amplitude vector whose length is a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Validation(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_capacity(num_qubits)?;
        if !amplitudes.iter().all(is_finite) {
            return Err(Error::Validation("non-finite amplitude".into()));
        }
        let s = Self {
            num_qubits,
            amplitudes,
        };
        let dev = (s.norm_sqr() - 1.0).abs();
        if dev > T::VALIDATION_TOL {
            return Err(Error::Validation(format!(
                "state not normalized (|norm^2 - 1| = {dev:e})"
            )));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr().to_f64_lossy())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z))
    }

    /// Largest entrywise distance to `other` after removing the global phase
    /// that best aligns the two states.
    pub fn distance_up_to_phase(&self, other: &Self) -> Result<f64> {
        let ov = self.inner(other)?;
        let phase = if ov.norm() > T::zero() {
            ov / Complex::new(ov.norm(), T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (*a * phase - *b).norm().to_f64_lossy())
            .fold(0.0, f64::max))
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (*a - *b).norm().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitIndex {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub(crate) fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &q) in targets.iter().enumerate() {
            self.check_qubit(q)?;
            if targets[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    pub(crate) fn buffer_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    /// Applies `gate` on `targets` (bit `j` of the gate index is `targets[j]`).
    pub fn apply_unitary(&mut self, gate: &Unitary<T>, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        if gate.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                got: gate.dim(),
            });
        }
        let deviation = gate.unitarity_deviation();
        if !(deviation <= T::VALIDATION_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
        match gate.as_mat2() {
            Some(m) => kernel::apply_1q(&mut self.amplitudes, targets[0], &m),
            None => kernel::apply_dense(&mut self.amplitudes, gate.entries(), targets),
        }
        Ok(())
    }

    /// Probability that `qubit` reads 1.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr().to_f64_lossy())
            .sum())
    }

    /// Projects `qubit` onto `outcome` and renormalizes. Returns the branch
    /// probability; fails on a degenerate branch.
    pub fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        let p1 = self.probability_one(qubit)?;
        let p = if outcome { p1 } else { 1.0 - p1 };
        if p < DEGENERATE_BRANCH {
            return Err(Error::Validation(format!(
                "outcome {} on qubit {qubit} has probability {p:e}",
                outcome as u8
            )));
        }
        let mask = 1usize << qubit;
        let scale = T::from_f64_lossy(1.0 / p.sqrt());
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & mask != 0) == outcome {
                *a = *a * scale;
            } else {
                *a = Complex::new(T::zero(), T::zero());
            }
        }
        Ok(p)
    }

    /// Z-basis measurement in place.
    pub fn measure<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<bool> {
        let p1 = self.probability_one(qubit)?;
        let p0 = 1.0 - p1;
        let outcome = if p0 < DEGENERATE_BRANCH {
            true
        } else if p1 < DEGENERATE_BRANCH {
            false
        } else {
            rng.gen::<f64>() >= p0
        };
        self.collapse(qubit, outcome)?;
        Ok(outcome)
    }

    /// Measures `qubit` and flips it back to |0>.
    pub fn reset<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<()> {
        if self.measure(qubit, rng)? {
            kernel::apply_x(&mut self.amplitudes, qubit);
        }
        Ok(())
    }

    /// Joint Born distribution of `qubits`; bit `j` of the index is `qubits[j]`.
    pub fn marginal_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_targets(qubits)?;
        if qubits.len() > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "marginal width",
                requested: qubits.len(),
                limit: MAX_QUBITS,
            });
        }
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr().to_f64_lossy();
            if p == 0.0 {
                continue;
            }
            let key = qubits
                .iter()
                .enumerate()
                .fold(0usize, |k, (j, &q)| k | ((i >> q & 1) << j));
            dist[key] += p;
        }
        Ok(dist)
    }

    /// Histogram of `shots` Z-basis samples of `qubits`. Shot `k` draws from
    /// `source.substream(k)`. Bitstring character `j` is `qubits[j]`.
    pub fn sample_counts(
        &self,
        qubits: &[usize],
        shots: usize,
        source: &RandomSource,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::Validation("shots must be >= 1".into()));
        }
        let dist = self.marginal_distribution(qubits)?;
        let sampler = OutcomeSampler::new(&dist);
        let mut counts = BTreeMap::new();
        for shot in 0..shots {
            let mut g = source.substream(shot as u64).generator();
            let outcome = sampler.sample(&mut g);
            *counts.entry(bitstring(outcome, qubits.len())).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// `<psi|P|psi>` for a Pauli string of length `num_qubits`.
    pub fn pauli_expectation(&self, pauli: &str) -> Result<f64> {
        let p: PauliString = pauli.parse()?;
        self.pauli_string_expectation(&p)
    }

    pub fn pauli_string_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: p.len(),
            });
        }
        let (xmask, zmask, ys) = p.masks();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, a) in self.amplitudes.iter().enumerate() {
            let b = self.amplitudes[i ^ xmask];
            let term = b.conj() * a;
            if (i & zmask).count_ones() % 2 == 1 {
                acc = acc - term;
            } else {
                acc = acc + term;
            }
        }
        // Y|b> = i(-1)^b |b^1>, so each Y contributes a factor of i.
        let phase = match ys % 4 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
        Ok((acc * phase).re.to_f64_lossy())
    }
}

/// Inverse-CDF sampler over a discrete distribution. Zero-probability
/// outcomes are never returned.
#[derive(Debug, Clone)]
pub(crate) struct OutcomeSampler {
    cumulative: Vec<(f64, usize)>,
}

impl OutcomeSampler {
    pub(crate) fn new(dist: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cumulative = Vec::new();
        for (i, &p) in dist.iter().enumerate() {
            if p >= DEGENERATE_BRANCH {
                acc += p;
                cumulative.push((acc, i));
            }
        }
        Self { cumulative }
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.cumulative.last().map_or(1.0, |c| c.0);
        let u = rng.gen::<f64>() * total;
        let pos = self.cumulative.partition_point(|&(c, _)| c <= u);
        self.cumulative[pos.min(self.cumulative.len() - 1)].1
    }
}

/// `width` characters, bit `j` of `value` at position `j`.
pub fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .map(|j| if value >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Ket label with qubit 0 first.
pub fn ket_label(index: usize, num_qubits: usize) -> String {
    format!("|{}>", bitstring(index, num_qubits))
}

/// Measures `qubit` and returns the outcome with the collapsed state.
pub fn measure_z<T: Scalar, R: Rng + ?Sized>(
    mut state: StateVector<T>,
    qubit: usize,
    rng: &mut R,
) -> Result<(bool, StateVector<T>)> {
    let bit = state.measure(qubit, rng)?;
    Ok((bit, state))
}

use num_complex::Complex;

use super::kernel::{self, Mat2};
use super::linalg;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense `2^n x 2^n` density matrix, row-major, same qubit-to-bit convention
/// as [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    num_qubits: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn from_pure(state: &StateVector<T>) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(amps[r] * amps[c].conj());
            }
        }
        Self {
            num_qubits: state.num_qubits(),
            entries,
        }
    }

    /// Reduced state of a pure state on `keep` without forming the full
    /// density matrix; qubit `keep[j]` becomes qubit `j`.
    pub fn reduced_from_pure(state: &StateVector<T>, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Validation("partial trace needs at least one kept qubit".into()));
        }
        state.check_targets(keep)?;
        let kd = 1usize << keep.len();
        let keep_mask: usize = keep.iter().map(|&q| 1usize << q).sum();
        let spread: Vec<usize> = (0..kd)
            .map(|local| {
                keep.iter()
                    .enumerate()
                    .fold(0, |acc, (j, &q)| acc | ((local >> j & 1) << q))
            })
            .collect();
        let amps = state.amplitudes();
        let mut entries = vec![Complex::new(T::zero(), T::zero()); kd * kd];
        for env in 0..amps.len() {
            if env & keep_mask != 0 {
                continue;
            }
            for r in 0..kd {
                let ar = amps[env | spread[r]];
                if ar.re == T::zero() && ar.im == T::zero() {
                    continue;
                }
                for c in 0..kd {
                    entries[r * kd + c] = entries[r * kd + c] + ar * amps[env | spread[c]].conj();
                }
            }
        }
        Ok(Self {
            num_qubits: keep.len(),
            entries,
        })
    }

    /// Wraps raw entries; checks shape only (see [`DensityMatrix::validate`]).
    pub fn from_entries(num_qubits: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self {
            num_qubits,
            entries,
        })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        let w = T::one() / T::from_usize(dim).unwrap();
        for i in 0..dim {
            entries[i * dim + i] = Complex::new(w, T::zero());
        }
        Self {
            num_qubits,
            entries,
        }
    }

    pub fn zeros(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self {
            num_qubits,
            entries: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex<T> {
        let d = self.dim();
        (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.entries[i * d + i]
        })
    }

    /// Diagonal as probabilities.
    pub fn diagonal(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| self.entries[i * d + i].re.to_f64_lossy()).collect()
    }

    /// `self += weight * other`
    pub fn accumulate(&mut self, other: &Self, weight: f64) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        let w = T::from_f64_lossy(weight);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = *a + *b * w;
        }
        Ok(())
    }

    /// Reduced state on `keep`; qubit `keep[j]` becomes qubit `j`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Validation("partial trace needs at least one kept qubit".into()));
        }
        for (i, &q) in keep.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
            if keep[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let d = self.dim();
        let spread = |local: usize, qubits: &[usize]| -> usize {
            qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | ((local >> j & 1) << q))
        };
        let mut entries = vec![Complex::new(T::zero(), T::zero()); kd * kd];
        for env in 0..(1usize << traced.len()) {
            let e = spread(env, &traced);
            for r in 0..kd {
                let row = spread(r, keep) | e;
                for c in 0..kd {
                    let col = spread(c, keep) | e;
                    entries[r * kd + c] = entries[r * kd + c] + self.entries[row * d + col];
                }
            }
        }
        Ok(Self {
            num_qubits: keep.len(),
            entries,
        })
    }

    /// `<psi|rho|psi>` clamped to `[0, 1]`.
    pub fn fidelity_pure(&self, psi: &StateVector<T>) -> Result<f64> {
        let d = self.dim();
        if psi.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: psi.dim(),
            });
        }
        let a = psi.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for r in 0..d {
            let mut row = Complex::new(T::zero(), T::zero());
            for c in 0..d {
                row = row + self.entries[r * d + c] * a[c];
            }
            acc = acc + a[r].conj() * row;
        }
        Ok(acc.re.to_f64_lossy().clamp(0.0, 1.0))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                let dev = (self.entries[r * d + c] - self.entries[c * d + r].conj()).norm();
                worst = worst.max(dev.to_f64_lossy());
            }
        }
        worst
    }

    /// Ascending eigenvalues (the matrix is treated as Hermitian).
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries, self.dim())
            .into_iter()
            .map(Scalar::to_f64_lossy)
            .collect()
    }

    /// Checks Hermiticity (1e-10), unit trace (1e-9) and eigenvalues >= -1e-9,
    /// scaled up for single precision.
    pub fn validate(&self) -> Result<()> {
        let scale = T::VALIDATION_TOL / 1e-10;
        let herm = self.hermiticity_deviation();
        if herm > 1e-10 * scale {
            return Err(Error::Validation(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        let tr_dev = ((tr.re.to_f64_lossy() - 1.0).powi(2) + tr.im.to_f64_lossy().powi(2)).sqrt();
        if tr_dev > 1e-9 * scale {
            return Err(Error::Validation(format!("trace deviates from 1 by {tr_dev:e}")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-9 * scale {
            return Err(Error::Validation(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Nearest unit-trace positive semidefinite matrix in Frobenius norm:
    /// eigenvalues are projected onto the probability simplex. Returns the
    /// projected matrix and the largest eigenvalue shift.
    pub fn project_physical(&self) -> (Self, f64) {
        let d = self.dim();
        let herm: Vec<Complex<T>> = (0..d * d)
            .map(|k| {
                let (r, c) = (k / d, k % d);
                let half = T::from_f64_lossy(0.5);
                (self.entries[r * d + c] + self.entries[c * d + r].conj()) * half
            })
            .collect();
        let mut moved = 0.0f64;
        let entries = linalg::hermitian_spectral_map(&herm, d, |values| {
            let projected = linalg::project_to_simplex(values);
            moved = values
                .iter()
                .zip(&projected)
                .map(|(a, b)| (*a - *b).abs().to_f64_lossy())
                .fold(0.0, f64::max);
            projected
        });
        (
            Self {
                num_qubits: self.num_qubits,
                entries,
            },
            moved,
        )
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).norm_sqr().to_f64_lossy())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        if self.num_qubits != other.num_qubits {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).norm().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    /// `rho -> U rho U^dagger` for a single-qubit gate on `qubit`.
    pub(crate) fn conjugate_1q(&mut self, qubit: usize, m: &Mat2<T>) {
        let n = self.num_qubits;
        // Flat index = row << n | col: rows live on bits n.., columns on bits 0..n.
        kernel::apply_1q(&mut self.entries, n + qubit, m);
        let conj = [
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ];
        kernel::apply_1q(&mut self.entries, qubit, &conj);
    }
}

/// Free-function forms matching the operation names used across the crate.
pub fn pure_density<T: Scalar>(state: &StateVector<T>) -> DensityMatrix<T> {
    DensityMatrix::from_pure(state)
}

pub fn partial_trace<T: Scalar>(rho: &DensityMatrix<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    rho.partial_trace(keep)
}

pub fn fidelity_pure<T: Scalar>(rho: &DensityMatrix<T>, psi: &StateVector<T>) -> Result<f64> {
    rho.fidelity_pure(psi)
}

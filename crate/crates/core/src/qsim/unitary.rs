use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Dense `dim x dim` unitary, row-major. For a k-qubit gate applied to
/// `targets`, bit `j` of the row/column index corresponds to `targets[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary<T: Scalar> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> Unitary<T> {
    /// Validating constructor: `U^dagger U = I` within the precision's tolerance.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        let u = Self::new_unchecked(dim, entries)?;
        let deviation = u.unitarity_deviation();
        if !(deviation <= T::VALIDATION_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub(crate) fn new_unchecked(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Validation(format!(
                "unitary dimension {dim} is not a power of two"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut entries = self.entries.clone();
        for r in 0..d {
            for col in 0..d {
                entries[col * d + r] = self.entries[r * d + col].conj();
            }
        }
        Self { dim: d, entries }
    }

    /// `self * rhs`
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for col in 0..d {
                    entries[r * d + col] = entries[r * d + col] + a * rhs.entries[k * d + col];
                }
            }
        }
        Ok(Self { dim: d, entries })
    }

    /// `max |(U^dagger U - I)_ij|`
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for col in 0..d {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..d {
                    acc = acc + self.entries[k * d + r].conj() * self.entries[k * d + col];
                }
                if r == col {
                    acc = acc - Complex::new(T::one(), T::zero());
                }
                let dev = acc.norm().to_f64_lossy();
                if !dev.is_finite() {
                    return f64::INFINITY;
                }
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Largest entrywise distance to `other`.
    pub fn max_distance(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).norm().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    pub(crate) fn as_mat2(&self) -> Option<[[Complex<T>; 2]; 2]> {
        (self.dim == 2).then(|| {
            [
                [self.entries[0], self.entries[1]],
                [self.entries[2], self.entries[3]],
            ]
        })
    }

    fn from_rows(rows: &[&[(f64, f64)]]) -> Self {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&(re, im)| c(re, im)))
            .collect();
        Self { dim, entries }
    }

    pub fn h() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_rows(&[&[(s, 0.0), (s, 0.0)], &[(s, 0.0), (-s, 0.0)]])
    }

    pub fn x() -> Self {
        Self::from_rows(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]])
    }

    pub fn y() -> Self {
        Self::from_rows(&[&[(0.0, 0.0), (0.0, -1.0)], &[(0.0, 1.0), (0.0, 0.0)]])
    }

    pub fn z() -> Self {
        Self::phase(std::f64::consts::PI)
    }

    pub fn s() -> Self {
        Self::phase(std::f64::consts::FRAC_PI_2)
    }

    pub fn sdg() -> Self {
        Self::phase(-std::f64::consts::FRAC_PI_2)
    }

    pub fn t() -> Self {
        Self::phase(std::f64::consts::FRAC_PI_4)
    }

    pub fn tdg() -> Self {
        Self::phase(-std::f64::consts::FRAC_PI_4)
    }

    /// diag(1, e^{i phi}); exact for the multiples of pi/2 used by Z, S and S-dagger.
    pub fn phase(phi: f64) -> Self {
        let (re, im) = exact_unit(phi);
        Self::from_rows(&[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (re, im)]])
    }

    /// Rotation about Y: `[[cos t/2, -sin t/2], [sin t/2, cos t/2]]`.
    pub fn ry(theta: f64) -> Self {
        let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        Self::from_rows(&[&[(cs, 0.0), (-sn, 0.0)], &[(sn, 0.0), (cs, 0.0)]])
    }

    /// Targets `[control, target]`.
    pub fn cnot() -> Self {
        Self::permutation(4, |i| if i & 1 == 1 { i ^ 2 } else { i })
    }

    pub fn cz() -> Self {
        let mut u = Self::identity(4);
        u.entries[15] = c(-1.0, 0.0);
        u
    }

    pub fn swap() -> Self {
        Self::permutation(4, |i| ((i & 1) << 1) | (i >> 1))
    }

    /// Targets `[control_a, control_b, target]`.
    pub fn toffoli() -> Self {
        Self::permutation(8, |i| if i & 3 == 3 { i ^ 4 } else { i })
    }

    fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for col in 0..dim {
            entries[f(col) * dim + col] = Complex::new(T::one(), T::zero());
        }
        Self { dim, entries }
    }
}

fn exact_unit(phi: f64) -> (f64, f64) {
    let quarter = phi / std::f64::consts::FRAC_PI_2;
    if (quarter - quarter.round()).abs() < 1e-15 {
        match (quarter.round() as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (phi.cos(), phi.sin())
    }
}

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Result<Self> {
        match ch {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauli(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }
}

/// Tensor product of single-qubit Paulis. Character `i` acts on qubit `i`,
/// so `"IZIZ"` is Z on qubits 1 and 3.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self(factors)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.0
    }

    /// Qubits acted on non-trivially.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a.anticommutes(**b))
            .count()
            % 2
            == 0
    }

    /// Bit masks `(x, z)`: X sets x, Z sets z, Y sets both.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let (mut x, mut z, mut ys) = (0usize, 0usize, 0u32);
        for (i, p) in self.0.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => x |= 1 << i,
                Pauli::Z => z |= 1 << i,
                Pauli::Y => {
                    x |= 1 << i;
                    z |= 1 << i;
                    ys += 1;
                }
            }
        }
        (x, z, ys)
    }

    /// Dense `2^n x 2^n` matrix, row-major, by explicit Kronecker products.
    pub fn to_dense<T: Scalar>(&self) -> Vec<Complex<T>> {
        let n = self.0.len();
        let dim = 1usize << n;
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        let single = |p: Pauli| -> [[Complex<T>; 2]; 2] {
            match p {
                Pauli::I => [[one, zero], [zero, one]],
                Pauli::X => [[zero, one], [one, zero]],
                Pauli::Y => [[zero, -i], [i, zero]],
                Pauli::Z => [[one, zero], [zero, -one]],
            }
        };
        let mut out = vec![zero; dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                let mut acc = one;
                for (q, p) in self.0.iter().enumerate() {
                    acc = acc * single(*p)[r >> q & 1][col >> q & 1];
                }
                out[r * dim + col] = acc;
            }
        }
        out
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().map(Pauli::from_char).collect::<Result<_>>().map(Self)
    }
}

impl TryFrom<String> for PauliString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

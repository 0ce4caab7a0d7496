//! Dense state-vector simulation of teleportation-based error correction.
//!
//! Qubit `q` is bit `q` of an amplitude index (little-endian). Ket labels and
//! measured bitstrings are printed with qubit 0 (or classical bit 0) first, so
//! `|011>` means qubit 0 is `0` and qubits 1 and 2 are `1`. A Pauli string's
//! character `i` acts on qubit `i`.

pub mod channels;
pub mod circuit;
pub mod error;
pub mod layout;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod tec;
pub mod tomography;

pub use error::{Error, Result};
pub use rng::RandomSource;
pub use scalar::{Amplitude, Scalar};

pub type StateVectorF64 = qsim::StateVector<f64>;
pub type StateVectorF32 = qsim::StateVector<f32>;
pub type DensityMatrixF64 = qsim::DensityMatrix<f64>;
pub type DensityMatrixF32 = qsim::DensityMatrix<f32>;
pub type UnitaryF64 = qsim::Unitary<f64>;
pub type UnitaryF32 = qsim::Unitary<f32>;

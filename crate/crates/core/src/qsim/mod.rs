//! Exact dense state-vector simulation.

pub mod density;
pub(crate) mod kernel;
pub mod linalg;
pub mod pauli;
pub mod state;
pub mod unitary;

pub use density::{fidelity_pure, partial_trace, pure_density, DensityMatrix};
pub use pauli::{Pauli, PauliString};
pub use state::{bitstring, ket_label, measure_z, StateVector, MAX_QUBITS};
pub use unitary::Unitary;

#[cfg(test)]
mod tests;

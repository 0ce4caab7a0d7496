//! Teleportation-based error correction pipelines.
//!
//! Two codes are covered: the three-qubit repetition code against a single
//! bit flip (or, with a Hadamard sandwich around the channel, a single phase
//! flip), and the four-qubit parity code `(|00>±|11>)(|00>±|11>)` against a
//! single erasure. Each pipeline encodes a message, prepares a logical Bell
//! pair, runs a transversal CNOT from the message into the first Bell block,
//! and teleports the message onto the second Bell block. The Bell
//! measurement is realized coherently (controlled gates from the measured
//! blocks onto the output), or measured and post-processed as a Pauli frame.
//!
//! Block positions are zero-based throughout: code qubit 1 of a block is its
//! position 0.

mod bitflip;
mod erasure;
mod eval;
mod fragments;
mod frame;

use std::f64::consts::FRAC_PI_8;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use crate::channels::ErasureFlag;
use crate::channels::ErrorSpec;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qsim::{PauliString, StateVector};

pub use bitflip::{build_bitflip_tec_circuit, build_phaseflip_tec_circuit};
pub use erasure::{
    append_erasure_back, build_erasure_tec_circuit, erasure_front, extract_erasure_flag,
    qnd_flag, select_logical_representatives, QndReport,
};
pub use eval::{
    decoded_density, decoded_fidelity, logical_counts, logical_distribution,
    noisy_decoded_density, syndrome_distribution, syndrome_record,
};
pub use fragments::{
    coherent_correct, decode_parity4, decode_repetition3, encode_parity4, encode_repetition3,
    erasure_conditionals, prepare_logical_bell_3, prepare_logical_bell_erasure,
    prepare_message, qnd_detect, syndrome_extract, teleport_conditionals_3,
};
pub use frame::{LogicalReadout, PauliFrame};

/// Real message amplitudes `alpha|0> + beta|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for MessageParams {
    /// `alpha = cos(pi/8)`, `beta = sin(pi/8)`.
    fn default() -> Self {
        Self {
            alpha: FRAC_PI_8.cos(),
            beta: FRAC_PI_8.sin(),
        }
    }
}

impl MessageParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.alpha * self.alpha + self.beta * self.beta;
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "alpha^2 + beta^2 = {norm}, expected 1"
            )));
        }
        Ok(())
    }

    /// Ry angle taking |0> to the message.
    pub fn theta(&self) -> f64 {
        2.0 * self.beta.atan2(self.alpha)
    }

    pub fn state(&self) -> StateVector<f64> {
        let amps = vec![
            num_complex::Complex::new(self.alpha, 0.0),
            num_complex::Complex::new(self.beta, 0.0),
        ];
        StateVector::from_amplitudes(amps).expect("validated message is normalized")
    }
}

/// How the single-qubit message is prepared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepMode {
    /// `Ry(theta)` with `theta = 2 atan2(beta, alpha)`.
    #[default]
    Rotation,
    /// T, then H, then S. This yields `(|0> + i|1>)/sqrt(2)` whatever the
    /// requested amplitudes; it is kept for replication only.
    GateSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Bitflip,
    Phaseflip,
    Erasure,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::Bitflip => "bitflip",
            Pipeline::Phaseflip => "phaseflip",
            Pipeline::Erasure => "erasure",
        })
    }
}

/// Qubit blocks of a pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub message: Vec<usize>,
    pub bell_first: Vec<usize>,
    pub bell_second: Vec<usize>,
    pub ancilla: Vec<usize>,
}

impl BlockLayout {
    /// Eleven qubits: message 0-2, Bell blocks 3-5 and 6-8, ancillas 9-10.
    pub fn bitflip() -> Self {
        Self {
            message: vec![0, 1, 2],
            bell_first: vec![3, 4, 5],
            bell_second: vec![6, 7, 8],
            ancilla: vec![9, 10],
        }
    }

    /// Sixteen qubits: message 0-3, Bell blocks 4-7 and 8-11, QND ancillas 12-15.
    pub fn erasure() -> Self {
        Self {
            message: vec![0, 1, 2, 3],
            bell_first: vec![4, 5, 6, 7],
            bell_second: vec![8, 9, 10, 11],
            ancilla: vec![12, 13, 14, 15],
        }
    }

    /// Fourteen-qubit variant keeping only the two pair-check ancillas.
    pub fn erasure_device_faithful() -> Self {
        Self {
            ancilla: vec![12, 13],
            ..Self::erasure()
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.all().max().map_or(0, |m| m + 1)
    }

    fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.message
            .iter()
            .chain(&self.bell_first)
            .chain(&self.bell_second)
            .chain(&self.ancilla)
            .copied()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for q in self.all() {
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        let k = self.message.len();
        if self.bell_first.len() != k || self.bell_second.len() != k {
            return Err(Error::Validation("code blocks must have equal size".into()));
        }
        Ok(())
    }
}

/// Ancilla parities: `a1 = Z1Z2`, `a2 = Z1Z3` of the first Bell block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub a1: bool,
    pub a2: bool,
}

impl fmt::Display for SyndromeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a1 as u8, self.a2 as u8)
    }
}

/// What the builders append after the teleportation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Coherent conditionals and decoder; no measurement.
    #[default]
    State,
    /// As `State`, then a Z measurement of the decoded qubit into cbit 0.
    Decoded,
    /// Coherent conditionals, then the output block measured in the basis of
    /// its logical Z (Z for the repetition code, X for the parity code).
    Block,
    /// Bell measurement done by measuring the message and first Bell blocks;
    /// corrections are applied to the output record as a Pauli frame.
    PauliFrame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TecOptions {
    pub message: MessageParams,
    pub prep: PrepMode,
    pub readout: Readout,
    /// Erasure pipeline: drop the two QND ancillas that do not fit a
    /// 14-qubit device.
    pub device_faithful: bool,
    /// Erasure pipeline: use these representatives instead of the flag
    /// derived from the QND outcomes.
    pub representatives: Option<ErasureFlag>,
}

impl Default for TecOptions {
    fn default() -> Self {
        Self {
            message: MessageParams::default(),
            prep: PrepMode::Rotation,
            readout: Readout::State,
            device_faithful: false,
            representatives: None,
        }
    }
}

impl TecOptions {
    pub fn with_readout(readout: Readout) -> Self {
        Self {
            readout,
            ..Self::default()
        }
    }
}

/// Erasure-detection outcome carried by an erasure pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureDecoding {
    pub hint: ErasureFlag,
    pub qnd: Option<QndReport>,
    pub flag: ErasureFlag,
    pub x_rep: PauliString,
    pub z_rep: PauliString,
}

/// A built pipeline with the information needed to evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct TecCircuit {
    pub pipeline: Pipeline,
    pub circuit: Circuit,
    pub layout: BlockLayout,
    pub spec: ErrorSpec,
    pub readout: LogicalReadout,
    /// Qubit carrying the decoded message (`State`/`Decoded` readouts).
    pub decoded_qubit: Option<usize>,
    /// Ideal single-qubit message state.
    pub target: StateVector<f64>,
    pub erasure: Option<ErasureDecoding>,
}

#[cfg(test)]
mod tests;

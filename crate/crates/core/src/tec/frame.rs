//! Pauli frames and the classical interpretation of measured records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pending Pauli corrections on an output block, one X and one Z bit per
/// physical qubit. Applied to measured bits instead of as gates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x_mask: Vec<bool>,
    pub z_mask: Vec<bool>,
}

impl PauliFrame {
    pub fn identity(len: usize) -> Self {
        Self {
            x_mask: vec![false; len],
            z_mask: vec![false; len],
        }
    }

    pub fn new(x_mask: Vec<bool>, z_mask: Vec<bool>) -> Result<Self> {
        if x_mask.len() != z_mask.len() {
            return Err(Error::DimensionMismatch {
                expected: x_mask.len(),
                got: z_mask.len(),
            });
        }
        Ok(Self { x_mask, z_mask })
    }

    pub fn len(&self) -> usize {
        self.x_mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_mask.is_empty()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: len,
            });
        }
        Ok(())
    }

    /// Product of two frames (Pauli group up to phase): masks XOR.
    pub fn compose(&self, other: &PauliFrame) -> Result<PauliFrame> {
        self.check(other.len())?;
        let xor = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(x, y)| x ^ y).collect();
        Ok(PauliFrame {
            x_mask: xor(&self.x_mask, &other.x_mask),
            z_mask: xor(&self.z_mask, &other.z_mask),
        })
    }

    /// Corrects Z-basis outcomes: X components flip them, Z components do not.
    pub fn apply_to_z_basis(&self, bits: &[bool]) -> Result<Vec<bool>> {
        self.check(bits.len())?;
        Ok(bits.iter().zip(&self.x_mask).map(|(b, x)| b ^ x).collect())
    }

    /// Corrects X-basis outcomes: Z components flip them, X components do not.
    pub fn apply_to_x_basis(&self, bits: &[bool]) -> Result<Vec<bool>> {
        self.check(bits.len())?;
        Ok(bits.iter().zip(&self.z_mask).map(|(b, z)| b ^ z).collect())
    }
}

/// How a classical record maps to the logical output bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicalReadout {
    /// Nothing measured.
    None,
    /// The decoded qubit was measured into `cbit`.
    Decoded { cbit: usize },
    /// Repetition-code output block read in Z; logical bit is the majority.
    Majority { output: Vec<usize> },
    /// Parity-code output block read in X; logical bit is the parity of the
    /// positions in `support` (the selected logical-Z representative).
    Parity { output: Vec<usize>, support: Vec<usize> },
    /// Measured Bell measurement of the repetition code. The message block
    /// (X basis) sets the Z mask, the majority of the first Bell block
    /// (Z basis) sets the X mask.
    RepetitionFrame {
        message: Vec<usize>,
        first: Vec<usize>,
        output: Vec<usize>,
    },
    /// Measured Bell measurement of the parity code. The parity of the
    /// message bits (X basis, on `z_support`) sets Z on `x_support`; the parity
    /// of the first-block bits (Z basis, on `x_support`) sets X on
    /// `z_support`. Output block read in X.
    ParityFrame {
        message: Vec<usize>,
        first: Vec<usize>,
        output: Vec<usize>,
        x_support: Vec<usize>,
        z_support: Vec<usize>,
    },
}

fn bits_of(record: &str, cbits: &[usize]) -> Result<Vec<bool>> {
    let raw = record.as_bytes();
    cbits
        .iter()
        .map(|&c| match raw.get(c) {
            Some(b'0') => Ok(false),
            Some(b'1') => Ok(true),
            _ => Err(Error::Validation(format!(
                "record {record:?} has no classical bit {c}"
            ))),
        })
        .collect()
}

fn parity(bits: impl IntoIterator<Item = bool>) -> bool {
    bits.into_iter().fold(false, |a, b| a ^ b)
}

fn majority(bits: &[bool]) -> bool {
    2 * bits.iter().filter(|&&b| b).count() > bits.len()
}

impl LogicalReadout {
    /// Frame implied by a measured record (identity for coherent readouts).
    pub fn frame(&self, record: &str) -> Result<Option<PauliFrame>> {
        match self {
            LogicalReadout::RepetitionFrame { message, first, output } => {
                let z_mask = bits_of(record, message)?;
                let flip = majority(&bits_of(record, first)?);
                Ok(Some(PauliFrame::new(vec![flip; output.len()], z_mask)?))
            }
            LogicalReadout::ParityFrame {
                message,
                first,
                output,
                x_support,
                z_support,
            } => {
                let z_on = parity(bits_of(record, message)?);
                let x_on = parity(bits_of(record, first)?);
                let mut frame = PauliFrame::identity(output.len());
                for &i in x_support {
                    frame.z_mask[i] = z_on;
                }
                for &i in z_support {
                    frame.x_mask[i] = x_on;
                }
                Ok(Some(frame))
            }
            _ => Ok(None),
        }
    }

    /// Logical Z outcome encoded in `record` (classical bit 0 first).
    pub fn logical_bit(&self, record: &str) -> Result<bool> {
        match self {
            LogicalReadout::None => Err(Error::Unsupported(
                "circuit has no logical readout".into(),
            )),
            LogicalReadout::Decoded { cbit } => Ok(bits_of(record, &[*cbit])?[0]),
            LogicalReadout::Majority { output } => Ok(majority(&bits_of(record, output)?)),
            LogicalReadout::Parity { output, support } => {
                let bits = bits_of(record, output)?;
                Ok(parity(support.iter().map(|&i| bits[i])))
            }
            LogicalReadout::RepetitionFrame { output, .. } => {
                let frame = self.frame(record)?.expect("frame readout");
                let corrected = frame.apply_to_z_basis(&bits_of(record, output)?)?;
                Ok(majority(&corrected))
            }
            LogicalReadout::ParityFrame { output, z_support, .. } => {
                let frame = self.frame(record)?.expect("frame readout");
                let corrected = frame.apply_to_x_basis(&bits_of(record, output)?)?;
                Ok(parity(z_support.iter().map(|&i| corrected[i])))
            }
        }
    }
}

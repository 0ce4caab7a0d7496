//! Circuit IR: typed gate list over qubit and classical-bit registers.

mod json;
mod sim;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};

pub use json::{deserialize, serialize};
pub use sim::{
    apply_gate, exact_branches, exact_distribution, exact_reduced_density, exact_state,
    simulate, simulate_with, unitary_of, Branch, SimOptions, SimResult, UNITARY_QUBIT_LIMIT,
};

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Ry { theta: f64 },
    Cnot,
    Cz,
    Swap,
    Toffoli,
    /// Z-basis measurement written to classical bit `cbit`.
    Measure { cbit: usize },
    /// Measure-and-flip back to |0>.
    Reset,
    /// Named no-op marking a channel location; any number of qubits.
    Marker { label: String },
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::Ry { .. } => "Ry",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::Toffoli => "Toffoli",
            GateKind::Measure { .. } => "Measure",
            GateKind::Reset => "Reset",
            GateKind::Marker { .. } => "Marker",
        }
    }

    /// Required qubit count; `None` for markers, which accept any positive count.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => Some(2),
            GateKind::Toffoli => Some(3),
            GateKind::Marker { .. } => None,
            _ => Some(1),
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(
            self,
            GateKind::Measure { .. } | GateKind::Reset | GateKind::Marker { .. }
        )
    }

    /// Non-unitary, state-changing operations.
    pub fn is_nonunitary(&self) -> bool {
        matches!(self, GateKind::Measure { .. } | GateKind::Reset)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: impl Into<Vec<usize>>) -> Self {
        Self {
            kind,
            qubits: qubits.into(),
        }
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.qubits.contains(&qubit)
    }

    /// Checks arity, distinctness, angle finiteness and index ranges.
    pub fn validate(&self, num_qubits: usize, num_cbits: usize) -> Result<()> {
        match self.kind.arity() {
            Some(n) if n != self.qubits.len() => {
                return Err(Error::Arity {
                    kind: self.kind.name().into(),
                    expected: n,
                    got: self.qubits.len(),
                })
            }
            None if self.qubits.is_empty() => {
                return Err(Error::Arity {
                    kind: "Marker".into(),
                    expected: 1,
                    got: 0,
                })
            }
            _ => {}
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    num_qubits,
                });
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        match &self.kind {
            GateKind::Ry { theta } if !theta.is_finite() => {
                Err(Error::Validation(format!("Ry angle {theta} is not finite")))
            }
            GateKind::Measure { cbit } if *cbit >= num_cbits => Err(Error::CbitIndex {
                index: *cbit,
                num_cbits,
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GateKind::Ry { theta } => write!(f, "Ry({theta})")?,
            GateKind::Measure { cbit } => write!(f, "Measure->c{cbit}")?,
            GateKind::Marker { label } => write!(f, "Marker({label})")?,
            k => f.write_str(k.name())?,
        }
        write!(f, " {:?}", self.qubits)
    }
}

/// Ordered program over `num_qubits` qubits and `num_cbits` classical bits.
///
/// Every mutation validates: indices in range, arity, unique marker labels and
/// single-assignment classical bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_cbits: usize,
    ops: Vec<GateOp>,
    metadata: BTreeMap<String, Value>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_cbits: usize) -> Self {
        Self {
            num_qubits,
            num_cbits,
            ops: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    /// Builds and validates a circuit from raw parts.
    pub fn from_parts(
        num_qubits: usize,
        num_cbits: usize,
        ops: Vec<GateOp>,
        metadata: BTreeMap<String, Value>,
    ) -> Result<Self> {
        let c = Self {
            num_qubits,
            num_cbits,
            ops,
            metadata,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_cbits(&self) -> usize {
        self.num_cbits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }

    pub fn set_metadata(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn validate(&self) -> Result<()> {
        let mut labels = BTreeSet::new();
        let mut cbits = BTreeSet::new();
        for op in &self.ops {
            op.validate(self.num_qubits, self.num_cbits)?;
            match &op.kind {
                GateKind::Marker { label } if !labels.insert(label.as_str()) => {
                    return Err(Error::DuplicateMarker(label.clone()))
                }
                GateKind::Measure { cbit } if !cbits.insert(*cbit) => {
                    return Err(Error::CbitReassigned(*cbit))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn check_insertable(&self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits, self.num_cbits)?;
        for existing in &self.ops {
            match (&op.kind, &existing.kind) {
                (GateKind::Marker { label: a }, GateKind::Marker { label: b }) if a == b => {
                    return Err(Error::DuplicateMarker(a.clone()))
                }
                (GateKind::Measure { cbit: a }, GateKind::Measure { cbit: b }) if a == b => {
                    return Err(Error::CbitReassigned(*a))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        self.check_insertable(&op)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn insert(&mut self, index: usize, op: GateOp) -> Result<&mut Self> {
        if index > self.ops.len() {
            return Err(Error::Validation(format!(
                "insert position {index} beyond {} ops",
                self.ops.len()
            )));
        }
        self.check_insertable(&op)?;
        self.ops.insert(index, op);
        Ok(self)
    }

    /// Keeps only the ops for which `keep` returns true.
    pub fn retain(&mut self, mut keep: impl FnMut(usize, &GateOp) -> bool) {
        let mut index = 0;
        self.ops.retain(|op| {
            let k = keep(index, op);
            index += 1;
            k
        });
    }

    /// Appends `fragment` with fragment qubit `i` placed on `qubits[i]`.
    /// Fragment classical bits keep their indices.
    pub fn append_mapped(&mut self, fragment: &Circuit, qubits: &[usize]) -> Result<&mut Self> {
        if qubits.len() != fragment.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: fragment.num_qubits,
                got: qubits.len(),
            });
        }
        for op in &fragment.ops {
            let mapped = op.qubits.iter().map(|&q| qubits[q]).collect::<Vec<_>>();
            self.push(GateOp::new(op.kind.clone(), mapped))?;
        }
        Ok(self)
    }

    /// Appends a same-width circuit.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        let identity: Vec<usize> = (0..other.num_qubits).collect();
        self.append_mapped(other, &identity)
    }

    /// Op index of the marker labelled `label`.
    pub fn marker_position(&self, label: &str) -> Result<usize> {
        self.ops
            .iter()
            .position(|op| matches!(&op.kind, GateKind::Marker { label: l } if l == label))
            .ok_or_else(|| Error::UnknownMarker(label.into()))
    }

    pub fn has_nonunitary(&self) -> bool {
        self.ops.iter().any(|op| op.kind.is_nonunitary())
    }

    /// Same circuit without markers.
    pub fn without_markers(&self) -> Circuit {
        let mut c = self.clone();
        c.retain(|_, op| !matches!(op.kind, GateKind::Marker { .. }));
        c
    }

    pub fn to_json(&self) -> String {
        json::serialize(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        json::deserialize(text)
    }

    fn gate(&mut self, kind: GateKind, qubits: &[usize]) -> Result<&mut Self> {
        self.push(GateOp::new(kind, qubits))
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::H, &[q])
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::X, &[q])
    }

    pub fn y(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Y, &[q])
    }

    pub fn z(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Z, &[q])
    }

    pub fn s(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::S, &[q])
    }

    pub fn sdg(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Sdg, &[q])
    }

    pub fn t(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::T, &[q])
    }

    pub fn tdg(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Tdg, &[q])
    }

    pub fn ry(&mut self, q: usize, theta: f64) -> Result<&mut Self> {
        self.gate(GateKind::Ry { theta }, &[q])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::Cnot, &[control, target])
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.gate(GateKind::Cz, &[a, b])
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.gate(GateKind::Swap, &[a, b])
    }

    pub fn toffoli(&mut self, c1: usize, c2: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::Toffoli, &[c1, c2, target])
    }

    pub fn measure(&mut self, q: usize, cbit: usize) -> Result<&mut Self> {
        self.gate(GateKind::Measure { cbit }, &[q])
    }

    pub fn reset(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Reset, &[q])
    }

    pub fn marker(&mut self, label: impl Into<String>, qubits: &[usize]) -> Result<&mut Self> {
        self.gate(
            GateKind::Marker {
                label: label.into(),
            },
            qubits,
        )
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit: {} qubits, {} cbits", self.num_qubits, self.num_cbits)?;
        for (i, op) in self.ops.iter().enumerate() {
            writeln!(f, "{i:4}  {op}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;

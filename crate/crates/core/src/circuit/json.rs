//! Versioned JSON wire format.
//!
//! ```json
//! {"version":1,"num_qubits":3,"num_cbits":1,
//!  "ops":[{"kind":"Ry","theta":0.7853981633974483,"qubits":[0]},
//!         {"kind":"Marker","label":"eps","qubits":[0,1,2]},
//!         {"kind":"Measure","qubits":[2],"cbit":0}],
//!  "metadata":{}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCircuit {
    version: u32,
    num_qubits: usize,
    num_cbits: usize,
    ops: Vec<WireOp>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireOp {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cbit: Option<usize>,
}

impl From<&GateOp> for WireOp {
    fn from(op: &GateOp) -> Self {
        let mut w = WireOp {
            kind: op.kind.name().to_string(),
            theta: None,
            label: None,
            qubits: op.qubits.clone(),
            cbit: None,
        };
        match &op.kind {
            GateKind::Ry { theta } => w.theta = Some(*theta),
            GateKind::Measure { cbit } => w.cbit = Some(*cbit),
            GateKind::Marker { label } => w.label = Some(label.clone()),
            _ => {}
        }
        w
    }
}

fn decode_op(index: usize, w: WireOp) -> Result<GateOp> {
    let at = |field: &str| format!("ops[{index}].{field}");
    let kind = match w.kind.as_str() {
        "H" => GateKind::H,
        "X" => GateKind::X,
        "Y" => GateKind::Y,
        "Z" => GateKind::Z,
        "S" => GateKind::S,
        "Sdg" => GateKind::Sdg,
        "T" => GateKind::T,
        "Tdg" => GateKind::Tdg,
        "Ry" => GateKind::Ry {
            theta: w
                .theta
                .ok_or_else(|| Error::parse(at("theta"), "required for Ry"))?,
        },
        "CNOT" => GateKind::Cnot,
        "CZ" => GateKind::Cz,
        "SWAP" => GateKind::Swap,
        "Toffoli" => GateKind::Toffoli,
        "Measure" => GateKind::Measure {
            cbit: w
                .cbit
                .ok_or_else(|| Error::parse(at("cbit"), "required for Measure"))?,
        },
        "Reset" => GateKind::Reset,
        "Marker" => GateKind::Marker {
            label: w
                .label
                .clone()
                .ok_or_else(|| Error::parse(at("label"), "required for Marker"))?,
        },
        other => {
            return Err(Error::parse(
                at("kind"),
                format!("unknown gate kind {other:?}"),
            ))
        }
    };
    let misplaced = [
        ("theta", w.theta.is_some(), matches!(kind, GateKind::Ry { .. })),
        ("cbit", w.cbit.is_some(), matches!(kind, GateKind::Measure { .. })),
        ("label", w.label.is_some(), matches!(kind, GateKind::Marker { .. })),
    ];
    for (field, present, allowed) in misplaced {
        if present && !allowed {
            return Err(Error::parse(
                at(field),
                format!("not allowed for {}", kind.name()),
            ));
        }
    }
    Ok(GateOp::new(kind, w.qubits))
}

/// Pretty-printed JSON; stable across runs (ordered metadata, shortest
/// round-trip float formatting).
pub fn serialize(circuit: &Circuit) -> String {
    let wire = WireCircuit {
        version: FORMAT_VERSION,
        num_qubits: circuit.num_qubits,
        num_cbits: circuit.num_cbits,
        ops: circuit.ops.iter().map(WireOp::from).collect(),
        metadata: circuit.metadata.clone(),
    };
    serde_json::to_string_pretty(&wire).expect("circuit JSON is always serializable")
}

pub fn deserialize(text: &str) -> Result<Circuit> {
    let wire: WireCircuit = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    if wire.version != FORMAT_VERSION {
        return Err(Error::parse(
            "version",
            format!("unsupported version {} (expected {FORMAT_VERSION})", wire.version),
        ));
    }
    let ops = wire
        .ops
        .into_iter()
        .enumerate()
        .map(|(i, w)| decode_op(i, w))
        .collect::<Result<Vec<_>>>()?;
    let circuit = Circuit {
        num_qubits: wire.num_qubits,
        num_cbits: wire.num_cbits,
        ops,
        metadata: wire.metadata,
    };
    circuit.validate().map_err(|e| Error::parse("ops", e.to_string()))?;
    Ok(circuit)
}

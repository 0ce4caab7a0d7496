//! Device coupling maps, circuit validation against them, and SWAP routing.

mod route;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};

pub use route::{decompose_toffoli, route, routing_equivalence_error, truncate, RoutedCircuit};

/// Static per-qubit calibration values; informational only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitAnnotation {
    pub freq_ghz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_ghz: Option<f64>,
}

/// Directed CNOT connectivity: edge `(c, t)` allows CNOT with control `c`
/// and target `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    num_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
    annotations: BTreeMap<usize, QubitAnnotation>,
}

impl CouplingMap {
    pub fn new(num_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        for &(a, b) in &edges {
            for q in [a, b] {
                if q >= num_qubits {
                    return Err(Error::QubitIndex {
                        index: q,
                        num_qubits,
                    });
                }
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop on qubit {a}")));
            }
        }
        Ok(Self {
            num_qubits,
            edges,
            annotations: BTreeMap::new(),
        })
    }

    pub fn with_annotations(mut self, annotations: BTreeMap<usize, QubitAnnotation>) -> Result<Self> {
        if let Some(&q) = annotations.keys().find(|&&q| q >= self.num_qubits) {
            return Err(Error::QubitIndex {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        self.annotations = annotations;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn annotations(&self) -> &BTreeMap<usize, QubitAnnotation> {
        &self.annotations
    }

    pub fn has_edge(&self, control: usize, target: usize) -> bool {
        self.edges.contains(&(control, target))
    }

    /// Connected in either direction.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Undirected neighbours in ascending order.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| match (a == q, b == q) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }

    /// Undirected BFS shortest path `from ..= to`. Neighbours are expanded in
    /// ascending order, so among equal-length paths the one through lower
    /// indices wins.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from >= self.num_qubits || to >= self.num_qubits {
            return None;
        }
        let mut parent = vec![usize::MAX; self.num_qubits];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            if q == to {
                let mut path = vec![to];
                while *path.last().unwrap() != from {
                    path.push(parent[*path.last().unwrap()]);
                }
                path.reverse();
                return Some(path);
            }
            for n in self.neighbors(q) {
                if parent[n] == usize::MAX {
                    parent[n] = q;
                    queue.push_back(n);
                }
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        (1..self.num_qubits).all(|q| self.shortest_path(0, q).is_some())
    }

    pub fn to_wire(&self) -> CouplingMapJson {
        CouplingMapJson {
            version: 1,
            num_qubits: self.num_qubits,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            annotations: self
                .annotations
                .iter()
                .map(|(q, a)| (q.to_string(), *a))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("coupling map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: CouplingMapJson = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        if wire.version != 1 {
            return Err(Error::parse("version", format!("unsupported version {}", wire.version)));
        }
        let annotations = wire
            .annotations
            .iter()
            .map(|(k, a)| {
                k.parse::<usize>()
                    .map(|q| (q, *a))
                    .map_err(|_| Error::parse(format!("annotations.{k}"), "key is not a qubit index"))
            })
            .collect::<Result<_>>()?;
        CouplingMap::new(wire.num_qubits, wire.edges.iter().map(|e| (e[0], e[1])))?
            .with_annotations(annotations)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingMapJson {
    pub version: u32,
    pub num_qubits: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub annotations: BTreeMap<String, QubitAnnotation>,
}

/// Directed CNOT edges of the 14-qubit Melbourne processor.
pub const MELBOURNE_EDGES: [(usize, usize); 17] = [
    (1, 0),
    (1, 2),
    (2, 3),
    (4, 10),
    (5, 9),
    (5, 6),
    (5, 4),
    (6, 8),
    (7, 8),
    (9, 8),
    (9, 10),
    (11, 12),
    (11, 10),
    (11, 3),
    (12, 2),
    (13, 12),
    (13, 1),
];

/// Qubit frequency and readout-resonator frequency (GHz) per qubit.
const MELBOURNE_FREQUENCIES: [(f64, f64); 14] = [
    (5.1000, 6.95518),
    (5.2384, 7.05693),
    (5.0328, 6.97179),
    (4.8961, 7.04784),
    (5.0262, 6.94523),
    (5.0670, 7.07587),
    (4.9237, 6.95297),
    (4.9744, 6.96377),
    (4.7381, 7.04930),
    (4.9633, 6.96707),
    (4.9450, 7.05513),
    (5.0046, 6.95492),
    (4.7598, 7.06722),
    (4.9685, 6.94433),
];

pub fn melbourne_map() -> CouplingMap {
    let annotations = MELBOURNE_FREQUENCIES
        .iter()
        .enumerate()
        .map(|(q, &(freq, readout))| {
            (
                q,
                QubitAnnotation {
                    freq_ghz: freq,
                    readout_ghz: Some(readout),
                },
            )
        })
        .collect();
    CouplingMap::new(14, MELBOURNE_EDGES)
        .and_then(|m| m.with_annotations(annotations))
        .expect("static map")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionPolicy {
    /// CNOTs must follow a directed edge.
    #[default]
    Strict,
    /// Adjacency in either direction suffices.
    AllowReversed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub op_index: usize,
    pub op: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "op {} ({}): {}", self.op_index, self.op, self.reason)
    }
}

/// Gates that do not fit the map. CZ and SWAP need adjacency only (they are
/// built from CNOTs in whichever direction exists); three-qubit gates always
/// need decomposition. Markers are ignored.
pub fn validate(circuit: &Circuit, map: &CouplingMap, policy: DirectionPolicy) -> Result<Vec<Violation>> {
    if circuit.num_qubits() > map.num_qubits() {
        return Err(Error::Capacity {
            what: "circuit qubits on coupling map",
            requested: circuit.num_qubits(),
            limit: map.num_qubits(),
        });
    }
    let mut out = Vec::new();
    for (i, op) in circuit.ops().iter().enumerate() {
        let reason = match (&op.kind, op.qubits.as_slice()) {
            (GateKind::Toffoli, _) => Some("requires decomposition".to_string()),
            (GateKind::Cnot, &[c, t]) => match policy {
                _ if map.has_edge(c, t) => None,
                DirectionPolicy::AllowReversed if map.has_edge(t, c) => None,
                DirectionPolicy::Strict if map.has_edge(t, c) => {
                    Some(format!("edge runs {t}->{c}; reversed CNOT not allowed"))
                }
                _ => Some(format!("qubits {c} and {t} not coupled")),
            },
            (GateKind::Cz | GateKind::Swap, &[a, b]) if !map.adjacent(a, b) => {
                Some(format!("qubits {a} and {b} not coupled"))
            }
            _ => None,
        };
        if let Some(reason) = reason {
            out.push(Violation {
                op_index: i,
                op: op.to_string(),
                reason,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;

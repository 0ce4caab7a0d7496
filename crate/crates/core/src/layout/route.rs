//! Greedy SWAP routing, Toffoli decomposition and equivalence checking.

use rayon::prelude::*;

use super::CouplingMap;
use crate::circuit::{apply_gate, Circuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::qsim::StateVector;

/// Largest original circuit checked by [`routing_equivalence_error`].
pub const EQUIVALENCE_QUBIT_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    /// Circuit on the map's qubits; every two-qubit gate is a CNOT along a
    /// directed edge.
    pub circuit: Circuit,
    /// `initial_layout[l]` is the physical qubit holding logical qubit `l`.
    /// Logical qubits beyond the original circuit's width are idle.
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    pub swaps_inserted: usize,
}

/// Standard 15-gate network (6 CNOTs with H, T, T-dagger) per Toffoli.
pub fn decompose_toffoli(circuit: &Circuit) -> Circuit {
    let mut ops = Vec::with_capacity(circuit.ops().len());
    for op in circuit.ops() {
        if op.kind != GateKind::Toffoli {
            ops.push(op.clone());
            continue;
        }
        let (a, b, t) = (op.qubits[0], op.qubits[1], op.qubits[2]);
        use GateKind::*;
        let net = [
            (H, vec![t]),
            (Cnot, vec![b, t]),
            (Tdg, vec![t]),
            (Cnot, vec![a, t]),
            (T, vec![t]),
            (Cnot, vec![b, t]),
            (Tdg, vec![t]),
            (Cnot, vec![a, t]),
            (T, vec![b]),
            (T, vec![t]),
            (H, vec![t]),
            (Cnot, vec![a, b]),
            (T, vec![a]),
            (Tdg, vec![b]),
            (Cnot, vec![a, b]),
        ];
        ops.extend(net.into_iter().map(|(k, q)| GateOp::new(k, q)));
    }
    Circuit::from_parts(
        circuit.num_qubits(),
        circuit.num_cbits(),
        ops,
        circuit.metadata().clone(),
    )
    .expect("decomposition keeps a valid circuit valid")
}

/// Unitary part of `circuit` restricted to qubits `0..width`: ops touching
/// any qubit at or beyond `width` are dropped, as are markers, measurements
/// and resets.
pub fn truncate(circuit: &Circuit, width: usize) -> Circuit {
    let ops = circuit
        .ops()
        .iter()
        .filter(|op| op.kind.is_unitary() && op.qubits.iter().all(|&q| q < width))
        .cloned()
        .collect();
    Circuit::from_parts(width.min(circuit.num_qubits()), 0, ops, Default::default())
        .expect("subset of a valid circuit")
}

struct Router<'a> {
    map: &'a CouplingMap,
    out: Circuit,
    l2p: Vec<usize>,
    p2l: Vec<usize>,
    swaps: usize,
}

impl Router<'_> {
    fn cnot(&mut self, c: usize, t: usize) -> Result<()> {
        if self.map.has_edge(c, t) {
            self.out.cnot(c, t)?;
        } else if self.map.has_edge(t, c) {
            self.out.h(c)?.h(t)?.cnot(t, c)?.h(c)?.h(t)?;
        } else {
            return Err(Error::Routing(format!("no edge between {c} and {t}")));
        }
        Ok(())
    }

    fn swap_gates(&mut self, a: usize, b: usize) -> Result<()> {
        self.cnot(a, b)?;
        self.cnot(b, a)?;
        self.cnot(a, b)
    }

    /// Swaps the logical qubit at `path[0]` along `path` until it sits next
    /// to the path's last qubit.
    fn walk(&mut self, path: &[usize]) -> Result<()> {
        for w in path[..path.len() - 1].windows(2) {
            let (a, b) = (w[0], w[1]);
            self.swap_gates(a, b)?;
            let (la, lb) = (self.p2l[a], self.p2l[b]);
            self.p2l.swap(a, b);
            self.l2p[la] = b;
            self.l2p[lb] = a;
            self.swaps += 1;
        }
        Ok(())
    }

    fn two_qubit(&mut self, index: usize, op: &GateOp) -> Result<()> {
        let (la, lb) = (op.qubits[0], op.qubits[1]);
        let (pa, pb) = (self.l2p[la], self.l2p[lb]);
        if !self.map.adjacent(pa, pb) {
            let path = self.map.shortest_path(pa, pb).ok_or_else(|| {
                Error::Routing(format!(
                    "op {index} ({op}): physical qubits {pa} and {pb} are disconnected"
                ))
            })?;
            self.walk(&path)?;
        }
        let (pa, pb) = (self.l2p[la], self.l2p[lb]);
        match op.kind {
            GateKind::Cnot => self.cnot(pa, pb),
            GateKind::Cz => {
                self.out.h(pb)?;
                self.cnot(pa, pb)?;
                self.out.h(pb)?;
                Ok(())
            }
            _ => self.swap_gates(pa, pb),
        }
    }
}

/// Routes `circuit` onto `map` from the identity layout. A two-qubit gate on
/// uncoupled qubits first moves its first operand along a BFS shortest path
/// (lower indices win ties) until adjacent; SWAPs are three CNOTs, CZ is
/// H-CNOT-H, and CNOTs against an edge's direction are H-conjugated.
/// Toffolis must be decomposed first.
pub fn route(circuit: &Circuit, map: &CouplingMap) -> Result<RoutedCircuit> {
    let n = map.num_qubits();
    if circuit.num_qubits() > n {
        return Err(Error::Capacity {
            what: "circuit qubits on coupling map",
            requested: circuit.num_qubits(),
            limit: n,
        });
    }
    let mut out = Circuit::new(n, circuit.num_cbits());
    for (k, v) in circuit.metadata() {
        out.set_metadata(k.clone(), v.clone());
    }
    let mut r = Router {
        map,
        out,
        l2p: (0..n).collect(),
        p2l: (0..n).collect(),
        swaps: 0,
    };
    for (i, op) in circuit.ops().iter().enumerate() {
        match op.kind {
            GateKind::Toffoli => {
                return Err(Error::Routing(format!(
                    "op {i} ({op}) requires decomposition before routing"
                )))
            }
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => r.two_qubit(i, op)?,
            _ => {
                let qubits: Vec<usize> = op.qubits.iter().map(|&q| r.l2p[q]).collect();
                r.out.push(GateOp::new(op.kind.clone(), qubits))?;
            }
        }
    }
    Ok(RoutedCircuit {
        circuit: r.out,
        initial_layout: (0..n).collect(),
        final_layout: r.l2p,
        swaps_inserted: r.swaps,
    })
}

/// Largest amplitude deviation between `original` and `routed` over all
/// computational-basis inputs, reading the routed output through the final
/// layout. Both circuits must be unitary apart from markers.
pub fn routing_equivalence_error(original: &Circuit, routed: &RoutedCircuit) -> Result<f64> {
    let k = original.num_qubits();
    if k > EQUIVALENCE_QUBIT_LIMIT {
        return Err(Error::Capacity {
            what: "qubits for routing equivalence",
            requested: k,
            limit: EQUIVALENCE_QUBIT_LIMIT,
        });
    }
    let n = routed.circuit.num_qubits();
    let place = |layout: &[usize], x: usize| -> usize {
        (0..k).filter(|&q| x >> q & 1 == 1).map(|q| 1 << layout[q]).sum()
    };
    let errors = (0..1usize << k)
        .into_par_iter()
        .map(|x| -> Result<f64> {
            let mut a = StateVector::<f64>::basis_state(k, x)?;
            for op in original.ops() {
                apply_gate(&mut a, op)?;
            }
            let mut b = StateVector::<f64>::basis_state(n, place(&routed.initial_layout, x))?;
            for op in routed.circuit.ops() {
                apply_gate(&mut b, op)?;
            }
            let (amps_a, amps_b) = (a.amplitudes(), b.amplitudes());
            let mut worst = 0.0f64;
            let mut image = vec![false; amps_b.len()];
            for (y, amp) in amps_a.iter().enumerate() {
                let j = place(&routed.final_layout, y);
                image[j] = true;
                worst = worst.max((amp - amps_b[j]).norm());
            }
            // Weight that leaked onto ancilla (non-logical) qubits.
            let leaked: f64 = amps_b
                .iter()
                .zip(&image)
                .filter(|(_, &hit)| !hit)
                .map(|(z, _)| z.norm_sqr())
                .sum();
            Ok(worst.max(leaked.sqrt()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

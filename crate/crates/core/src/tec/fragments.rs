//! Circuit fragments. Fixed-size fragments are built on local qubits and
//! placed with [`Circuit::append_mapped`]; layout-level fragments are built on
//! the full pipeline width.

use super::{BlockLayout, MessageParams, PrepMode};
use crate::circuit::Circuit;
use crate::error::Result;
use crate::qsim::PauliString;

/// One-qubit message preparation from |0>.
pub fn prepare_message(params: &MessageParams, mode: PrepMode) -> Result<Circuit> {
    params.validate()?;
    let mut c = Circuit::new(1, 0);
    match mode {
        PrepMode::Rotation => {
            let theta = params.theta();
            if theta != 0.0 {
                c.ry(0, theta)?;
            }
        }
        PrepMode::GateSequence => {
            c.t(0)?.h(0)?.s(0)?;
        }
    }
    Ok(c)
}

/// `a|0> + b|1>` on qubit 0 to `a|000> + b|111>`.
pub fn encode_repetition3() -> Circuit {
    let mut c = Circuit::new(3, 0);
    c.cnot(0, 1).and_then(|c| c.cnot(0, 2)).expect("static fragment");
    c
}

/// Inverse of [`encode_repetition3`] (the same two CNOTs).
pub fn decode_repetition3() -> Circuit {
    encode_repetition3()
}

/// `(|000000> + |111111>)/sqrt(2)` on six fresh qubits.
pub fn prepare_logical_bell_3() -> Circuit {
    let mut c = Circuit::new(6, 0);
    c.h(0).expect("static fragment");
    for t in 1..6 {
        c.cnot(0, t).expect("static fragment");
    }
    c
}

/// Parities of the first Bell block onto the two ancillas:
/// `a1 <- q1 xor q2`, `a2 <- q1 xor q3`.
pub fn syndrome_extract(layout: &BlockLayout) -> Result<Circuit> {
    let (b, a) = (&layout.bell_first, &layout.ancilla);
    let mut c = Circuit::new(layout.num_qubits(), 0);
    c.cnot(b[0], a[0])?.cnot(b[1], a[0])?;
    c.cnot(b[0], a[1])?.cnot(b[2], a[1])?;
    Ok(c)
}

/// Two ancilla-controlled CNOTs, then three Toffolis; undoes any single X on
/// the first Bell block given the syndrome.
pub fn coherent_correct(layout: &BlockLayout) -> Result<Circuit> {
    let (b, a) = (&layout.bell_first, &layout.ancilla);
    let mut c = Circuit::new(layout.num_qubits(), 0);
    c.cnot(a[0], b[1])?.cnot(a[1], b[2])?;
    for &t in b {
        c.toffoli(a[0], a[1], t)?;
    }
    Ok(c)
}

/// Coherent Bell-measurement conditionals of the repetition-code pipeline:
/// the first Bell block controls X on the output (Z-basis outcome), and the
/// message, rotated to the X basis, controls Z on the output.
pub fn teleport_conditionals_3(layout: &BlockLayout) -> Result<Circuit> {
    let mut c = Circuit::new(layout.num_qubits(), 0);
    for (&f, &s) in layout.bell_first.iter().zip(&layout.bell_second) {
        c.cnot(f, s)?;
    }
    for &m in &layout.message {
        c.h(m)?;
    }
    for (&m, &s) in layout.message.iter().zip(&layout.bell_second) {
        c.cz(m, s)?;
    }
    Ok(c)
}

/// `a|0> + b|1>` on qubit 0 to
/// `(a/2)(|00>+|11>)(|00>+|11>) + (b/2)(|00>-|11>)(|00>-|11>)`.
pub fn encode_parity4() -> Circuit {
    let mut c = Circuit::new(4, 0);
    let steps: [(char, usize, usize); 9] = [
        ('c', 0, 1),
        ('c', 0, 2),
        ('c', 0, 3),
        ('c', 0, 1),
        ('c', 2, 3),
        ('h', 0, 0),
        ('h', 2, 2),
        ('c', 0, 1),
        ('c', 2, 3),
    ];
    for (g, a, b) in steps {
        match g {
            'c' => c.cnot(a, b),
            _ => c.h(a),
        }
        .expect("static fragment");
    }
    c
}

/// Inverse of [`encode_parity4`]: its gates in reverse order.
pub fn decode_parity4() -> Circuit {
    let enc = encode_parity4();
    let mut c = Circuit::new(4, 0);
    for op in enc.ops().iter().rev() {
        c.push(op.clone()).expect("static fragment");
    }
    c
}

/// Logical Bell pair of the parity code on eight fresh qubits: a physical
/// Bell pair on the two block leaders, then the encoder on each block.
pub fn prepare_logical_bell_erasure() -> Circuit {
    let mut c = Circuit::new(8, 0);
    c.h(0).and_then(|c| c.cnot(0, 4)).expect("static fragment");
    let enc = encode_parity4();
    c.append_mapped(&enc, &[0, 1, 2, 3]).expect("static fragment");
    c.append_mapped(&enc, &[4, 5, 6, 7]).expect("static fragment");
    c
}

/// Non-demolition checks of the message block: ancilla 0 gets `Z0Z1`,
/// ancilla 1 gets `Z2Z3`, and when present ancilla 2 gets `XXXX` and
/// ancilla 3 gets `ZZZZ`. All four commute with the code's logical operators,
/// so the encoded message is untouched; an erased qubit skips its checks.
pub fn qnd_detect(layout: &BlockLayout) -> Result<Circuit> {
    let (m, a) = (&layout.message, &layout.ancilla);
    let mut c = Circuit::new(layout.num_qubits(), 0);
    c.cnot(m[0], a[0])?.cnot(m[1], a[0])?;
    c.cnot(m[2], a[1])?.cnot(m[3], a[1])?;
    if let Some(&ax) = a.get(2) {
        c.h(ax)?;
        for &q in m {
            c.cnot(ax, q)?;
        }
        c.h(ax)?;
    }
    if let Some(&az) = a.get(3) {
        for &q in m {
            c.cnot(q, az)?;
        }
    }
    Ok(c)
}

/// Coherent Bell-measurement conditionals of the parity-code pipeline for
/// the chosen representatives.
///
/// The transversal CNOT acts on this code as a logical CNOT with reversed
/// direction, so the message carries the Z-type outcome measured through
/// `z_rep` (an X-type string, read in the X basis) and controls the output's
/// `x_rep`; the first Bell block carries the outcome of `x_rep` (Z-type, read
/// in the Z basis) and controls the output's `z_rep`. With `measured` the
/// controlled gates are left out (the Pauli frame takes their place).
pub fn erasure_conditionals(
    layout: &BlockLayout,
    x_rep: &PauliString,
    z_rep: &PauliString,
    measured: bool,
) -> Result<Circuit> {
    let (zs, xs) = (z_rep.support(), x_rep.support());
    let (m, f, s) = (&layout.message, &layout.bell_first, &layout.bell_second);
    let mut c = Circuit::new(layout.num_qubits(), 0);
    for &i in &zs {
        c.h(m[i])?;
    }
    if !measured {
        for &i in &zs {
            for &t in &xs {
                c.cz(m[i], s[t])?;
            }
        }
        for &i in &xs {
            for &t in &zs {
                c.cnot(f[i], s[t])?;
            }
        }
    }
    Ok(c)
}

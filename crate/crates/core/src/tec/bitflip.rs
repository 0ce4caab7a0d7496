//! Repetition-code pipelines (bit flip, and phase flip via a Hadamard
//! sandwich around the channel).

use super::fragments::*;
use super::{BlockLayout, LogicalReadout, Pipeline, Readout, TecCircuit, TecOptions};
use crate::channels::{inject, ErrorKind, ErrorSpec, DEFAULT_MARKER};
use crate::circuit::{exact_state, Circuit};
use crate::error::{Error, Result};

/// Eleven-qubit bit-flip pipeline: message preparation and encoding, channel
/// marker, logical Bell pair, transversal CNOT, syndrome extraction, coherent
/// correction, teleportation conditionals, then the requested readout.
pub fn build_bitflip_tec_circuit(spec: &ErrorSpec, opts: &TecOptions) -> Result<TecCircuit> {
    build(Pipeline::Bitflip, spec, opts)
}

/// As [`build_bitflip_tec_circuit`] with H on the message block right before
/// and right after the channel, which turns the code against phase flips.
pub fn build_phaseflip_tec_circuit(spec: &ErrorSpec, opts: &TecOptions) -> Result<TecCircuit> {
    build(Pipeline::Phaseflip, spec, opts)
}

fn build(pipeline: Pipeline, spec: &ErrorSpec, opts: &TecOptions) -> Result<TecCircuit> {
    let allowed = match pipeline {
        Pipeline::Bitflip => ErrorKind::BitFlip,
        _ => ErrorKind::PhaseFlip,
    };
    if spec.kind != ErrorKind::None && spec.kind != allowed {
        return Err(Error::ErrorSpec(format!(
            "the {pipeline} pipeline takes none or {allowed:?}, got {:?}",
            spec.kind
        )));
    }
    let layout = BlockLayout::bitflip();
    let (m, f, s, a) = (
        &layout.message,
        &layout.bell_first,
        &layout.bell_second,
        &layout.ancilla,
    );
    let num_cbits = match opts.readout {
        Readout::State => 0,
        Readout::Decoded => 1,
        Readout::Block => 3,
        Readout::PauliFrame => 11,
    };
    let mut c = Circuit::new(layout.num_qubits(), num_cbits);
    c.set_metadata("pipeline", pipeline.to_string());

    let prep = prepare_message(&opts.message, opts.prep)?;
    c.append_mapped(&prep, &m[..1])?;
    c.append_mapped(&encode_repetition3(), m)?;
    let sandwich = pipeline == Pipeline::Phaseflip;
    if sandwich {
        for &q in m {
            c.h(q)?;
        }
    }
    c.marker(DEFAULT_MARKER, m)?;
    if sandwich {
        for &q in m {
            c.h(q)?;
        }
    }
    let bell_qubits: Vec<usize> = f.iter().chain(s).copied().collect();
    c.append_mapped(&prepare_logical_bell_3(), &bell_qubits)?;
    for (&mq, &fq) in m.iter().zip(f) {
        c.cnot(mq, fq)?;
    }
    c.append(&syndrome_extract(&layout)?)?;
    c.append(&coherent_correct(&layout)?)?;

    let mut decoded_qubit = None;
    let readout = match opts.readout {
        Readout::State | Readout::Decoded => {
            c.append(&teleport_conditionals_3(&layout)?)?;
            c.append_mapped(&decode_repetition3(), s)?;
            decoded_qubit = Some(s[0]);
            if opts.readout == Readout::Decoded {
                c.measure(s[0], 0)?;
                LogicalReadout::Decoded { cbit: 0 }
            } else {
                LogicalReadout::None
            }
        }
        Readout::Block => {
            c.append(&teleport_conditionals_3(&layout)?)?;
            for (i, &q) in s.iter().enumerate() {
                c.measure(q, i)?;
            }
            LogicalReadout::Majority {
                output: vec![0, 1, 2],
            }
        }
        Readout::PauliFrame => {
            for &q in m {
                c.h(q)?;
            }
            for (i, &q) in m.iter().chain(f).chain(s).chain(a).enumerate() {
                c.measure(q, i)?;
            }
            LogicalReadout::RepetitionFrame {
                message: vec![0, 1, 2],
                first: vec![3, 4, 5],
                output: vec![6, 7, 8],
            }
        }
    };

    let circuit = inject(&c, spec)?;
    Ok(TecCircuit {
        pipeline,
        circuit,
        layout,
        spec: spec.clone(),
        readout,
        decoded_qubit,
        target: exact_state(&prep)?,
        erasure: None,
    })
}

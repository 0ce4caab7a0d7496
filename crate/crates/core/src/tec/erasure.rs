//! Parity-code pipeline against a single erasure.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fragments::*;
use super::{
    BlockLayout, ErasureDecoding, LogicalReadout, Pipeline, Readout, TecCircuit, TecOptions,
};
use crate::channels::{erase, ErasureFlag, ErasureMode, ErrorKind, ErrorSpec, DEFAULT_MARKER};
use crate::circuit::{exact_branches, exact_state, Circuit};
use crate::error::{Error, Result};
use crate::qsim::state::DEGENERATE_BRANCH;
use crate::qsim::{bitstring, PauliString};

/// Logical representatives `(x_rep, z_rep)` whose supports avoid the erased
/// qubit. `X_L` is `IZIZ` or `ZIZI`, `Z_L` is `IIXX` or `XXII`; with nothing
/// erased the defaults are `IZIZ` and `IIXX`.
pub fn select_logical_representatives(flag: &ErasureFlag) -> Result<(PauliString, PauliString)> {
    if flag.erased.len() > 1 {
        return Err(Error::Uncorrectable(format!(
            "{} erasures; the code corrects one",
            flag.erased.len()
        )));
    }
    let (x, z) = match flag.erased.iter().next() {
        None | Some(0) => ("IZIZ", "IIXX"),
        Some(1) => ("ZIZI", "IIXX"),
        Some(2) => ("IZIZ", "XXII"),
        Some(3) => ("ZIZI", "XXII"),
        Some(&k) => {
            return Err(Error::ErrorSpec(format!(
                "erased position {k} outside the 4-qubit block"
            )))
        }
    };
    Ok((x.parse()?, z.parse()?))
}

/// Maps QND outcomes plus the channel's location hint to the erasure flag.
///
/// `outcomes[0]` and `outcomes[1]` are the pair checks on qubits {0,1} and
/// {2,3}; further entries are whole-block checks. A fired pair check only
/// narrows the location to a pair, so the hint picks the qubit; a hint
/// outside the fired pair is rejected, as is a fired check with no hint.
pub fn extract_erasure_flag(outcomes: &[bool], hint: &ErasureFlag) -> Result<ErasureFlag> {
    if hint.erased.len() > 1 {
        return Err(Error::Uncorrectable(format!(
            "{} erasures; the code corrects one",
            hint.erased.len()
        )));
    }
    let pair_a = outcomes.first().copied().unwrap_or(false);
    let pair_b = outcomes.get(1).copied().unwrap_or(false);
    if pair_a && pair_b {
        return Err(Error::Uncorrectable(
            "both pair checks fired: erasures in both halves".into(),
        ));
    }
    let fired_pair = if pair_a {
        Some([0, 1])
    } else if pair_b {
        Some([2, 3])
    } else {
        None
    };
    match (hint.erased.iter().next(), fired_pair) {
        (Some(k), Some(pair)) if !pair.contains(k) => Err(Error::Validation(format!(
            "erasure hint {k} inconsistent with the fired pair check {pair:?}"
        ))),
        (Some(&k), _) => Ok(ErasureFlag::single(k)),
        (None, _) if outcomes.iter().any(|&b| b) => Err(Error::Validation(
            "QND signature shows an erasure but no location hint was given".into(),
        )),
        (None, _) => Ok(ErasureFlag::none()),
    }
}

/// QND signature distribution and the flag every outcome agrees on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QndReport {
    pub flag: ErasureFlag,
    /// Ancilla outcome string (first ancilla leftmost) to probability.
    pub signature: BTreeMap<String, f64>,
}

/// Evaluates the extraction rule on every QND outcome of `circuit` with
/// non-negligible probability; all outcomes must yield the same flag.
pub fn qnd_flag(circuit: &Circuit, layout: &BlockLayout, hint: &ErasureFlag) -> Result<QndReport> {
    let mut signature = BTreeMap::new();
    let mut flag: Option<ErasureFlag> = None;
    for branch in exact_branches::<f64>(circuit)? {
        let marginal = branch.state.marginal_distribution(&layout.ancilla)?;
        for (outcome, p) in marginal.into_iter().enumerate() {
            let p = p * branch.probability;
            if p < DEGENERATE_BRANCH {
                continue;
            }
            let bits: Vec<bool> = (0..layout.ancilla.len()).map(|j| outcome >> j & 1 == 1).collect();
            let f = extract_erasure_flag(&bits, hint)?;
            match &flag {
                Some(prev) if *prev != f => {
                    return Err(Error::Validation(
                        "QND outcomes disagree on the erasure location".into(),
                    ))
                }
                _ => flag = Some(f),
            }
            *signature
                .entry(bitstring(outcome, layout.ancilla.len()))
                .or_insert(0.0) += p;
        }
    }
    Ok(QndReport {
        flag: flag.unwrap_or_default(),
        signature,
    })
}

fn readout_cbits(readout: Readout) -> usize {
    match readout {
        Readout::State => 0,
        Readout::Decoded => 1,
        Readout::Block => 4,
        Readout::PauliFrame => 8,
    }
}

/// Everything up to and including the transversal CNOT: message preparation
/// and encoding, channel marker, logical Bell pair, QND checks.
pub fn erasure_front(opts: &TecOptions) -> Result<(Circuit, BlockLayout, Circuit)> {
    let layout = if opts.device_faithful {
        BlockLayout::erasure_device_faithful()
    } else {
        BlockLayout::erasure()
    };
    let (m, f, s) = (&layout.message, &layout.bell_first, &layout.bell_second);
    let mut c = Circuit::new(layout.num_qubits(), readout_cbits(opts.readout));
    c.set_metadata("pipeline", Pipeline::Erasure.to_string());
    let prep = prepare_message(&opts.message, opts.prep)?;
    c.append_mapped(&prep, &m[..1])?;
    c.append_mapped(&encode_parity4(), m)?;
    c.marker(DEFAULT_MARKER, m)?;
    let bell_qubits: Vec<usize> = f.iter().chain(s).copied().collect();
    c.append_mapped(&prepare_logical_bell_erasure(), &bell_qubits)?;
    c.append(&qnd_detect(&layout)?)?;
    for (&mq, &fq) in m.iter().zip(f) {
        c.cnot(mq, fq)?;
    }
    Ok((c, layout, prep))
}

/// Appends conditionals for the chosen representatives and the readout.
/// Returns the logical readout and, for `State`/`Decoded`, the decoded qubit.
pub fn append_erasure_back(
    c: &mut Circuit,
    layout: &BlockLayout,
    x_rep: &PauliString,
    z_rep: &PauliString,
    readout: Readout,
) -> Result<(LogicalReadout, Option<usize>)> {
    let (m, f, s) = (&layout.message, &layout.bell_first, &layout.bell_second);
    let measured = readout == Readout::PauliFrame;
    c.append(&erasure_conditionals(layout, x_rep, z_rep, measured)?)?;
    let (zs, xs) = (z_rep.support(), x_rep.support());
    Ok(match readout {
        Readout::State | Readout::Decoded => {
            c.append_mapped(&decode_parity4(), s)?;
            if readout == Readout::Decoded {
                c.measure(s[0], 0)?;
                (LogicalReadout::Decoded { cbit: 0 }, Some(s[0]))
            } else {
                (LogicalReadout::None, Some(s[0]))
            }
        }
        Readout::Block => {
            for (i, &q) in s.iter().enumerate() {
                c.h(q)?.measure(q, i)?;
            }
            (
                LogicalReadout::Parity {
                    output: (0..s.len()).collect(),
                    support: zs,
                },
                None,
            )
        }
        Readout::PauliFrame => {
            let mut cbit = 0;
            let mut take = |c: &mut Circuit, q: usize| -> Result<usize> {
                c.measure(q, cbit)?;
                cbit += 1;
                Ok(cbit - 1)
            };
            let message = zs.iter().map(|&i| take(c, m[i])).collect::<Result<Vec<_>>>()?;
            let first = xs.iter().map(|&i| take(c, f[i])).collect::<Result<Vec<_>>>()?;
            let mut output = Vec::new();
            for &q in s {
                c.h(q)?;
                output.push(take(c, q)?);
            }
            (
                LogicalReadout::ParityFrame {
                    message,
                    first,
                    output,
                    x_support: xs,
                    z_support: zs,
                },
                None,
            )
        }
    })
}

/// Sixteen-qubit erasure pipeline (fourteen with `device_faithful`). The
/// erasure flag is derived by simulating the circuit through the QND block
/// and applying [`extract_erasure_flag`]; it picks the representatives used
/// by the conditionals.
pub fn build_erasure_tec_circuit(spec: &ErrorSpec, opts: &TecOptions) -> Result<TecCircuit> {
    if !matches!(spec.kind, ErrorKind::None | ErrorKind::Erasure) {
        return Err(Error::ErrorSpec(format!(
            "the erasure pipeline takes none or Erasure, got {:?}",
            spec.kind
        )));
    }
    spec.validate()?;
    let (front, layout, prep) = erasure_front(opts)?;
    let (mut c, hint) = match spec.kind {
        ErrorKind::Erasure => erase(
            &front,
            &spec.marker,
            spec.qubit.unwrap_or(0),
            spec.erasure_mode.unwrap_or(ErasureMode::GateRemoval),
        )?,
        _ => (front, ErasureFlag::none()),
    };
    let (flag, qnd) = match &opts.representatives {
        Some(flag) => (flag.clone(), None),
        None => {
            let report = qnd_flag(&c, &layout, &hint)?;
            (report.flag.clone(), Some(report))
        }
    };
    let (x_rep, z_rep) = select_logical_representatives(&flag)?;
    let (readout, decoded_qubit) =
        append_erasure_back(&mut c, &layout, &x_rep, &z_rep, opts.readout)?;
    Ok(TecCircuit {
        pipeline: Pipeline::Erasure,
        circuit: c,
        layout,
        spec: spec.clone(),
        readout,
        decoded_qubit,
        target: exact_state(&prep)?,
        erasure: Some(ErasureDecoding {
            hint,
            qnd,
            flag,
            x_rep,
            z_rep,
        }),
    })
}

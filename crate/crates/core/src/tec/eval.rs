//! Exact and Monte-Carlo evaluation of built pipelines.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{LogicalReadout, Pipeline, SyndromeRecord, TecCircuit};
use crate::channels::{apply_noise, NoiseModel};
use crate::circuit::{exact_branches, exact_distribution, exact_reduced_density, simulate_with, SimOptions};
use crate::error::{Error, Result};
use crate::qsim::state::DEGENERATE_BRANCH;
use crate::qsim::{bitstring, DensityMatrix};
use crate::rng::RandomSource;
use crate::scalar::Scalar;

fn decoded_qubit(tec: &TecCircuit) -> Result<usize> {
    match (tec.decoded_qubit, &tec.readout) {
        (Some(q), LogicalReadout::None) => Ok(q),
        _ => Err(Error::Unsupported(
            "decoded state needs a pipeline built with the State readout".into(),
        )),
    }
}

/// Exact reduced state of the decoded qubit (mixture over any reset branches).
pub fn decoded_density<T: Scalar>(tec: &TecCircuit) -> Result<DensityMatrix<T>> {
    exact_reduced_density(&tec.circuit, &[decoded_qubit(tec)?])
}

/// `<psi|rho|psi>` of the decoded qubit against the ideal message.
pub fn decoded_fidelity(tec: &TecCircuit) -> Result<f64> {
    decoded_density::<f64>(tec)?.fidelity_pure(&tec.target)
}

/// Exact `[P(0), P(1)]` of the logical output bit.
pub fn logical_distribution(tec: &TecCircuit) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (record, p) in exact_distribution::<f64>(&tec.circuit, 0.0)? {
        out[tec.readout.logical_bit(&record)? as usize] += p;
    }
    Ok(out)
}

/// Sampled `[n0, n1]` of the logical output bit.
pub fn logical_counts(tec: &TecCircuit, opts: &SimOptions) -> Result<[u64; 2]> {
    if opts.shots == 0 {
        return Err(Error::Validation("sampling needs shots >= 1".into()));
    }
    let result = simulate_with::<f64>(&tec.circuit, opts)?;
    let mut out = [0u64; 2];
    for (record, n) in result.counts {
        out[tec.readout.logical_bit(&record)? as usize] += n;
    }
    Ok(out)
}

/// Exact distribution of the ancilla register (first ancilla leftmost).
pub fn syndrome_distribution(tec: &TecCircuit) -> Result<BTreeMap<String, f64>> {
    let ancilla = &tec.layout.ancilla;
    let mut dist = BTreeMap::new();
    for branch in exact_branches::<f64>(&tec.circuit)? {
        for (outcome, p) in branch.state.marginal_distribution(ancilla)?.into_iter().enumerate() {
            let p = p * branch.probability;
            if p >= DEGENERATE_BRANCH {
                *dist.entry(bitstring(outcome, ancilla.len())).or_insert(0.0) += p;
            }
        }
    }
    Ok(dist)
}

/// Deterministic syndrome of a repetition-code pipeline.
pub fn syndrome_record(tec: &TecCircuit) -> Result<SyndromeRecord> {
    if tec.pipeline == Pipeline::Erasure {
        return Err(Error::Unsupported(
            "syndrome records belong to the repetition-code pipelines".into(),
        ));
    }
    let dist = syndrome_distribution(tec)?;
    match dist.iter().find(|(_, &p)| p > 1.0 - 1e-10) {
        Some((key, _)) => Ok(SyndromeRecord {
            a1: key.as_bytes()[0] == b'1',
            a2: key.as_bytes()[1] == b'1',
        }),
        None => Err(Error::Validation(format!(
            "syndrome is not deterministic: {dist:?}"
        ))),
    }
}

/// Average decoded state over `trajectories` noise samples; trajectory `t`
/// draws from substream `t` of `seed`, so the same seed couples runs at
/// different noise strengths.
pub fn noisy_decoded_density(
    tec: &TecCircuit,
    model: &NoiseModel,
    trajectories: usize,
    seed: u64,
) -> Result<DensityMatrix<f64>> {
    let q = decoded_qubit(tec)?;
    if trajectories == 0 {
        return Err(Error::Validation("need at least one trajectory".into()));
    }
    let source = RandomSource::new(seed);
    let states = (0..trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = source.substream(t as u64).generator();
            let noisy = apply_noise(&tec.circuit, model, &mut rng)?;
            exact_reduced_density::<f64>(&noisy, &[q])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rho = DensityMatrix::zeros(1);
    let w = 1.0 / trajectories as f64;
    for s in &states {
        rho.accumulate(s, w)?;
    }
    Ok(rho)
}

//! Simulation driver.
//!
//! `shots == 0` is exact mode: measurement branches are enumerated and the
//! classical-bit distribution is returned analytically. With `shots > 0` the
//! histogram is Born-sampled; shot `k` always draws from substream `k`, so
//! counts do not depend on thread scheduling.
//!
//! Trailing measurements (a suffix made of measurements on distinct qubits and
//! markers) are never branched: they are read from the joint marginal of the
//! final state.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use super::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::qsim::kernel;
use crate::qsim::state::{check_capacity, OutcomeSampler, DEGENERATE_BRANCH};
use crate::qsim::{bitstring, DensityMatrix, StateVector, Unitary};
use crate::rng::RandomSource;
use crate::scalar::Scalar;

/// Widest circuit accepted by [`unitary_of`].
pub const UNITARY_QUBIT_LIMIT: usize = 10;

/// Most measurement branches tracked in exact mode.
const BRANCH_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub shots: usize,
    pub seed: u64,
    /// Probability that each recorded classical bit is flipped.
    pub readout_flip: f64,
}

impl SimOptions {
    pub fn exact() -> Self {
        Self {
            shots: 0,
            seed: 0,
            readout_flip: 0.0,
        }
    }

    pub fn sampled(shots: usize, seed: u64) -> Self {
        Self {
            shots,
            seed,
            readout_flip: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult<T: Scalar> {
    /// State before the trailing measurements, present when no measurement
    /// randomness precedes them.
    pub final_state: Option<StateVector<T>>,
    /// Histogram keyed by classical-bit string, bit 0 leftmost. Empty in
    /// exact mode.
    pub counts: BTreeMap<String, u64>,
    /// Per-shot classical record, in shot order.
    pub cbit_values: Vec<String>,
    /// Exact classical-bit distribution (exact mode only).
    pub probabilities: Option<BTreeMap<String, f64>>,
}

/// One outcome branch of exact simulation.
#[derive(Debug, Clone)]
pub struct Branch<T: Scalar> {
    pub probability: f64,
    /// Bit `j` is classical bit `j` (unwritten bits read 0).
    pub cbits: u64,
    pub state: StateVector<T>,
}

fn unit_phase<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

/// Applies a unitary op (markers are no-ops). Measurement and reset are
/// rejected; they need a random source or branch enumeration.
pub fn apply_gate<T: Scalar>(state: &mut StateVector<T>, op: &GateOp) -> Result<()> {
    state.check_targets(&op.qubits)?;
    let q = &op.qubits;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let buf = state.buffer_mut();
    match &op.kind {
        GateKind::X => kernel::apply_x(buf, q[0]),
        GateKind::Z => kernel::apply_phase(buf, q[0], unit_phase(-1.0, 0.0)),
        GateKind::S => kernel::apply_phase(buf, q[0], unit_phase(0.0, 1.0)),
        GateKind::Sdg => kernel::apply_phase(buf, q[0], unit_phase(0.0, -1.0)),
        GateKind::T => kernel::apply_phase(buf, q[0], unit_phase(s, s)),
        GateKind::Tdg => kernel::apply_phase(buf, q[0], unit_phase(s, -s)),
        GateKind::H | GateKind::Y | GateKind::Ry { .. } => {
            let u = match &op.kind {
                GateKind::H => Unitary::<T>::h(),
                GateKind::Y => Unitary::y(),
                GateKind::Ry { theta } => Unitary::ry(*theta),
                _ => unreachable!(),
            };
            kernel::apply_1q(buf, q[0], &u.as_mat2().expect("single-qubit gate"));
        }
        GateKind::Cnot => kernel::apply_controlled_x(buf, 1 << q[0], q[1]),
        GateKind::Toffoli => kernel::apply_controlled_x(buf, (1 << q[0]) | (1 << q[1]), q[2]),
        GateKind::Cz => kernel::apply_cz(buf, q[0], q[1]),
        GateKind::Swap => kernel::apply_swap(buf, q[0], q[1]),
        GateKind::Marker { .. } => {}
        GateKind::Measure { .. } | GateKind::Reset => {
            return Err(Error::Unsupported(format!(
                "{} needs a random source or branch enumeration",
                op.kind.name()
            )))
        }
    }
    Ok(())
}

/// Index where the trailing-measurement suffix starts.
fn tail_start(ops: &[GateOp]) -> usize {
    let mut seen = Vec::new();
    let mut start = ops.len();
    for (i, op) in ops.iter().enumerate().rev() {
        match op.kind {
            GateKind::Marker { .. } => start = i,
            GateKind::Measure { .. } if !seen.contains(&op.qubits[0]) => {
                seen.push(op.qubits[0]);
                start = i;
            }
            _ => break,
        }
    }
    start
}

/// (qubit, cbit) pairs of the trailing measurements, in op order.
fn tail_measurements(ops: &[GateOp]) -> Vec<(usize, usize)> {
    ops.iter()
        .filter_map(|op| match op.kind {
            GateKind::Measure { cbit } => Some((op.qubits[0], cbit)),
            _ => None,
        })
        .collect()
}

fn written_cbits(circuit: &Circuit) -> Vec<usize> {
    circuit
        .ops()
        .iter()
        .filter_map(|op| match op.kind {
            GateKind::Measure { cbit } => Some(cbit),
            _ => None,
        })
        .collect()
}

fn check_cbit_width(circuit: &Circuit) -> Result<()> {
    if circuit.num_cbits() > 64 {
        return Err(Error::Capacity {
            what: "classical bit count",
            requested: circuit.num_cbits(),
            limit: 64,
        });
    }
    Ok(())
}

fn run_branches<T: Scalar>(
    ops: &[GateOp],
    mut branches: Vec<Branch<T>>,
) -> Result<Vec<Branch<T>>> {
    for op in ops {
        match op.kind {
            GateKind::Measure { .. } | GateKind::Reset => {
                let q = op.qubits[0];
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    let p1 = b.state.probability_one(q)?;
                    for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
                        if p < DEGENERATE_BRANCH {
                            continue;
                        }
                        let mut state = b.state.clone();
                        state.collapse(q, outcome)?;
                        let mut cbits = b.cbits;
                        match op.kind {
                            GateKind::Measure { cbit } => {
                                cbits = (cbits & !(1 << cbit)) | ((outcome as u64) << cbit)
                            }
                            _ if outcome => kernel::apply_x(state.buffer_mut(), q),
                            _ => {}
                        }
                        next.push(Branch {
                            probability: b.probability * p,
                            cbits,
                            state,
                        });
                    }
                }
                if next.len() > BRANCH_LIMIT {
                    return Err(Error::Capacity {
                        what: "measurement branches",
                        requested: next.len(),
                        limit: BRANCH_LIMIT,
                    });
                }
                branches = next;
            }
            _ => {
                for b in &mut branches {
                    apply_gate(&mut b.state, op)?;
                }
            }
        }
    }
    Ok(branches)
}

fn initial_branch<T: Scalar>(circuit: &Circuit) -> Result<Vec<Branch<T>>> {
    check_capacity(circuit.num_qubits())?;
    check_cbit_width(circuit)?;
    Ok(vec![Branch {
        probability: 1.0,
        cbits: 0,
        state: StateVector::zero_state(circuit.num_qubits())?,
    }])
}

/// Every measurement/reset outcome branch of the whole circuit with its
/// probability, degenerate branches dropped.
pub fn exact_branches<T: Scalar>(circuit: &Circuit) -> Result<Vec<Branch<T>>> {
    run_branches(circuit.ops(), initial_branch(circuit)?)
}

/// Exact final state of a measurement-free circuit.
pub fn exact_state<T: Scalar>(circuit: &Circuit) -> Result<StateVector<T>> {
    if circuit.has_nonunitary() {
        return Err(Error::Unsupported(
            "exact_state needs a circuit without Measure/Reset".into(),
        ));
    }
    let mut branches = exact_branches::<T>(circuit)?;
    Ok(branches.remove(0).state)
}

/// Mixture over all branches of the reduced state on `keep`.
pub fn exact_reduced_density<T: Scalar>(
    circuit: &Circuit,
    keep: &[usize],
) -> Result<DensityMatrix<T>> {
    let branches = exact_branches::<T>(circuit)?;
    let mut rho = DensityMatrix::zeros(keep.len());
    for b in &branches {
        rho.accumulate(&DensityMatrix::reduced_from_pure(&b.state, keep)?, b.probability)?;
    }
    Ok(rho)
}

/// Joint distribution over trailing-measurement outcomes of one branch,
/// keyed by the full classical record.
fn branch_outcomes<T: Scalar>(
    branch: &Branch<T>,
    tail: &[(usize, usize)],
) -> Result<Vec<(u64, f64)>> {
    let qubits: Vec<usize> = tail.iter().map(|&(q, _)| q).collect();
    if qubits.is_empty() {
        return Ok(vec![(branch.cbits, 1.0)]);
    }
    let marginal = branch.state.marginal_distribution(&qubits)?;
    Ok(marginal
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(outcome, &p)| (compose_record(branch.cbits, outcome, tail), p))
        .collect())
}

fn compose_record(mut cbits: u64, outcome: usize, tail: &[(usize, usize)]) -> u64 {
    for (j, &(_, cbit)) in tail.iter().enumerate() {
        let bit = (outcome >> j & 1) as u64;
        cbits = (cbits & !(1 << cbit)) | (bit << cbit);
    }
    cbits
}

fn record_string(cbits: u64, width: usize) -> String {
    bitstring(cbits as usize, width)
}

/// Exact classical-bit distribution including readout flips. Outcomes below
/// the degenerate-branch threshold are omitted.
pub fn exact_distribution<T: Scalar>(
    circuit: &Circuit,
    readout_flip: f64,
) -> Result<BTreeMap<String, f64>> {
    let split = tail_start(circuit.ops());
    let (body, tail_ops) = circuit.ops().split_at(split);
    let tail = tail_measurements(tail_ops);
    let branches = run_branches(body, initial_branch::<T>(circuit)?)?;
    let mut dist: BTreeMap<u64, f64> = BTreeMap::new();
    for b in &branches {
        for (record, p) in branch_outcomes(b, &tail)? {
            *dist.entry(record).or_insert(0.0) += b.probability * p;
        }
    }
    if readout_flip > 0.0 {
        for cbit in written_cbits(circuit) {
            let mut flipped = BTreeMap::new();
            for (&record, &p) in &dist {
                *flipped.entry(record).or_insert(0.0) += (1.0 - readout_flip) * p;
                *flipped.entry(record ^ (1 << cbit)).or_insert(0.0) += readout_flip * p;
            }
            dist = flipped;
        }
    }
    Ok(dist
        .into_iter()
        .filter(|&(_, p)| p >= DEGENERATE_BRANCH)
        .map(|(record, p)| (record_string(record, circuit.num_cbits()), p))
        .collect())
}

pub fn simulate(circuit: &Circuit, shots: usize, seed: u64) -> Result<SimResult<f64>> {
    simulate_with(
        circuit,
        &SimOptions {
            shots,
            seed,
            readout_flip: 0.0,
        },
    )
}

fn apply_readout<R: Rng>(mut record: u64, cbits: &[usize], p: f64, rng: &mut R) -> u64 {
    if p > 0.0 {
        for &cbit in cbits {
            if rng.gen::<f64>() < p {
                record ^= 1 << cbit;
            }
        }
    }
    record
}

pub fn simulate_with<T: Scalar>(circuit: &Circuit, opts: &SimOptions) -> Result<SimResult<T>> {
    if !(0.0..=1.0).contains(&opts.readout_flip) {
        return Err(Error::Validation(format!(
            "readout flip probability {} outside [0, 1]",
            opts.readout_flip
        )));
    }
    let split = tail_start(circuit.ops());
    let (body, tail_ops) = circuit.ops().split_at(split);
    let tail = tail_measurements(tail_ops);
    let mut branches = run_branches(body, initial_branch::<T>(circuit)?)?;
    let width = circuit.num_cbits();

    if opts.shots == 0 {
        let probabilities = exact_distribution::<T>(circuit, opts.readout_flip)?;
        let final_state = (branches.len() == 1).then(|| branches.remove(0).state);
        return Ok(SimResult {
            final_state,
            counts: BTreeMap::new(),
            cbit_values: Vec::new(),
            probabilities: Some(probabilities),
        });
    }

    // Born sampling from the branch mixture: pick a branch, then sample its
    // trailing-measurement marginal.
    let branch_sampler =
        OutcomeSampler::new(&branches.iter().map(|b| b.probability).collect::<Vec<_>>());
    let per_branch = branches
        .iter()
        .map(|b| {
            let outcomes = branch_outcomes(b, &tail)?;
            let weights: Vec<f64> = outcomes.iter().map(|&(_, p)| p).collect();
            Ok((outcomes, OutcomeSampler::new(&weights)))
        })
        .collect::<Result<Vec<_>>>()?;
    let written = written_cbits(circuit);
    let source = RandomSource::new(opts.seed);
    let records: Vec<u64> = (0..opts.shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = source.substream(shot as u64).generator();
            let b = if per_branch.len() == 1 {
                0
            } else {
                branch_sampler.sample(&mut rng)
            };
            let (outcomes, sampler) = &per_branch[b];
            let record = outcomes[sampler.sample(&mut rng)].0;
            apply_readout(record, &written, opts.readout_flip, &mut rng)
        })
        .collect();
    let cbit_values: Vec<String> = records.iter().map(|&r| record_string(r, width)).collect();
    let mut counts = BTreeMap::new();
    for v in &cbit_values {
        *counts.entry(v.clone()).or_insert(0u64) += 1;
    }
    let final_state = (branches.len() == 1).then(|| branches.remove(0).state);
    Ok(SimResult {
        final_state,
        counts,
        cbit_values,
        probabilities: None,
    })
}

/// Full unitary of a measurement-free circuit, built column by column.
pub fn unitary_of<T: Scalar>(circuit: &Circuit) -> Result<Unitary<T>> {
    if circuit.has_nonunitary() {
        return Err(Error::Unsupported(
            "unitary_of needs a circuit without Measure/Reset".into(),
        ));
    }
    let n = circuit.num_qubits();
    if n > UNITARY_QUBIT_LIMIT {
        return Err(Error::Capacity {
            what: "qubit count for unitary_of",
            requested: n,
            limit: UNITARY_QUBIT_LIMIT,
        });
    }
    check_capacity(n)?;
    let dim = 1usize << n;
    let columns = (0..dim)
        .into_par_iter()
        .map(|col| {
            let mut s = StateVector::<T>::basis_state(n, col)?;
            for op in circuit.ops() {
                apply_gate(&mut s, op)?;
            }
            Ok(s.into_amplitudes())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    for (col, amps) in columns.iter().enumerate() {
        for (row, a) in amps.iter().enumerate() {
            entries[row * dim + col] = *a;
        }
    }
    Unitary::new_unchecked(dim, entries)
}

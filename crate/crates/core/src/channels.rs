//! Error injection at channel markers and gate-located Pauli noise.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};

/// Label of the channel marker placed by the pipeline builders.
pub const DEFAULT_MARKER: &str = "ε";

const ERASED_KEY: &str = "erased";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    None,
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    Erasure,
}

impl ErrorKind {
    /// The Pauli inserted for an operational error.
    pub fn pauli(self) -> Option<GateKind> {
        match self {
            ErrorKind::BitFlip => Some(GateKind::X),
            ErrorKind::PhaseFlip => Some(GateKind::Z),
            ErrorKind::BitPhaseFlip => Some(GateKind::Y),
            ErrorKind::None | ErrorKind::Erasure => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErasureMode {
    /// Drop every later gate on the erased qubit; it is left isolated.
    #[default]
    GateRemoval,
    /// Reset the erased qubit to |0> at the channel.
    ResetAndFlag,
}

fn default_marker() -> String {
    DEFAULT_MARKER.to_string()
}

/// Which error hits which qubit of the encoded block at which marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorSpec {
    pub kind: ErrorKind,
    /// Position within the marker's qubit list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<usize>,
    #[serde(default = "default_marker")]
    pub marker: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erasure_mode: Option<ErasureMode>,
}

impl ErrorSpec {
    pub fn none() -> Self {
        Self {
            kind: ErrorKind::None,
            qubit: None,
            marker: default_marker(),
            erasure_mode: None,
        }
    }

    fn operational(kind: ErrorKind, qubit: usize) -> Self {
        Self {
            kind,
            qubit: Some(qubit),
            marker: default_marker(),
            erasure_mode: None,
        }
    }

    pub fn bit_flip(qubit: usize) -> Self {
        Self::operational(ErrorKind::BitFlip, qubit)
    }

    pub fn phase_flip(qubit: usize) -> Self {
        Self::operational(ErrorKind::PhaseFlip, qubit)
    }

    pub fn bit_phase_flip(qubit: usize) -> Self {
        Self::operational(ErrorKind::BitPhaseFlip, qubit)
    }

    pub fn erasure(qubit: usize, mode: ErasureMode) -> Self {
        Self {
            kind: ErrorKind::Erasure,
            qubit: Some(qubit),
            marker: default_marker(),
            erasure_mode: Some(mode),
        }
    }

    pub fn with_marker(mut self, marker: impl Into<String>) -> Self {
        self.marker = marker.into();
        self
    }

    /// Checks field consistency (not the target circuit).
    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.qubit) {
            (ErrorKind::None, Some(_)) => {
                return Err(Error::ErrorSpec("kind none takes no qubit".into()))
            }
            (k, None) if k != ErrorKind::None => {
                return Err(Error::ErrorSpec(format!("{k:?} needs a qubit")))
            }
            _ => {}
        }
        if (self.kind == ErrorKind::Erasure) != self.erasure_mode.is_some() {
            return Err(Error::ErrorSpec(
                "erasure_mode is set exactly when kind is erasure".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for ErrorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::None => return f.write_str("none"),
            ErrorKind::BitFlip => "X",
            ErrorKind::PhaseFlip => "Z",
            ErrorKind::BitPhaseFlip => "Y",
            ErrorKind::Erasure => "erase",
        };
        write!(f, "{kind}{}", self.qubit.unwrap_or(0))?;
        if let Some(mode) = self.erasure_mode {
            write!(f, "/{mode:?}")?;
        }
        Ok(())
    }
}

/// Erased positions within the encoded block (at most one for the codes here).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErasureFlag {
    pub erased: BTreeSet<usize>,
}

impl ErasureFlag {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize) -> Self {
        Self {
            erased: BTreeSet::from([qubit]),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }
}

fn marker_block(circuit: &Circuit, label: &str) -> Result<(usize, Vec<usize>)> {
    let pos = circuit.marker_position(label)?;
    Ok((pos, circuit.ops()[pos].qubits.clone()))
}

fn block_qubit(block: &[usize], index: usize, label: &str) -> Result<usize> {
    block.get(index).copied().ok_or_else(|| {
        Error::ErrorSpec(format!(
            "qubit {index} outside the {}-qubit block at marker {label:?}",
            block.len()
        ))
    })
}

/// Applies `spec` at its marker. Operational errors insert one Pauli right
/// after the marker; erasures go through [`erase`].
pub fn inject(circuit: &Circuit, spec: &ErrorSpec) -> Result<Circuit> {
    spec.validate()?;
    let (pos, block) = marker_block(circuit, &spec.marker)?;
    match spec.kind {
        ErrorKind::None => Ok(circuit.clone()),
        ErrorKind::Erasure => {
            let mode = spec.erasure_mode.unwrap_or_default();
            erase(circuit, &spec.marker, spec.qubit.unwrap_or(0), mode).map(|(c, _)| c)
        }
        kind => {
            let q = block_qubit(&block, spec.qubit.unwrap_or(0), &spec.marker)?;
            let mut out = circuit.clone();
            out.insert(pos + 1, GateOp::new(kind.pauli().expect("operational"), vec![q]))?;
            Ok(out)
        }
    }
}

/// Erases block qubit `qubit` at marker `marker`; returns the modified circuit
/// and the known erasure location.
///
/// `GateRemoval` deletes every gate touching the qubit after the marker (the
/// qubit is then decoupled, equivalent to tracing it out); markers are kept.
/// `ResetAndFlag` inserts a reset right after the marker. A circuit can carry
/// one erasure only.
pub fn erase(
    circuit: &Circuit,
    marker: &str,
    qubit: usize,
    mode: ErasureMode,
) -> Result<(Circuit, ErasureFlag)> {
    if circuit.metadata().contains_key(ERASED_KEY) {
        return Err(Error::ErrorSpec(
            "circuit already carries an erasure; the code corrects one".into(),
        ));
    }
    let (pos, block) = marker_block(circuit, marker)?;
    let physical = block_qubit(&block, qubit, marker)?;
    let mut out = circuit.clone();
    match mode {
        ErasureMode::GateRemoval => out.retain(|i, op| {
            i <= pos || !op.touches(physical) || matches!(op.kind, GateKind::Marker { .. })
        }),
        ErasureMode::ResetAndFlag => {
            out.insert(pos + 1, GateOp::new(GateKind::Reset, vec![physical]))?;
        }
    }
    out.set_metadata(ERASED_KEY, physical);
    Ok((out, ErasureFlag::single(qubit)))
}

/// Physical qubit recorded by [`erase`], if any.
pub fn erased_qubit(circuit: &Circuit) -> Option<usize> {
    circuit
        .metadata()
        .get(ERASED_KEY)
        .and_then(|v| v.as_u64())
        .map(|q| q as usize)
}

/// Gate-located depolarizing noise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Error probability per qubit after each single-qubit gate.
    #[serde(default)]
    pub p1: f64,
    /// Error probability per touched qubit after each two- or three-qubit gate.
    #[serde(default)]
    pub p2: f64,
    /// Flip probability of each recorded measurement outcome.
    #[serde(default)]
    pub p_readout: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_readout: f64) -> Result<Self> {
        let m = Self { p1, p2, p_readout };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p_readout", self.p_readout)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p_readout == 0.0
    }
}

/// One sampled noise trajectory: after every unitary gate, each touched
/// qubit independently receives a uniformly random X, Y or Z with
/// probability `p1` (single-qubit gate) or `p2` (multi-qubit gate).
///
/// Two uniforms are drawn per (gate, qubit) whatever the probabilities, so
/// trajectories with the same generator state are coupled across noise
/// strengths: the inserted error set only grows with `p`.
/// Readout flips are not part of the circuit; pass `p_readout` to the sampler.
pub fn apply_noise<R: Rng + ?Sized>(
    circuit: &Circuit,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<Circuit> {
    model.validate()?;
    let mut ops = Vec::with_capacity(circuit.len());
    for op in circuit.ops() {
        ops.push(op.clone());
        if !op.kind.is_unitary() {
            continue;
        }
        let p = if op.qubits.len() == 1 { model.p1 } else { model.p2 };
        for &q in &op.qubits {
            let u: f64 = rng.gen();
            let which: u8 = rng.gen_range(0..3);
            if u < p {
                let kind = [GateKind::X, GateKind::Y, GateKind::Z][which as usize].clone();
                ops.push(GateOp::new(kind, vec![q]));
            }
        }
    }
    Circuit::from_parts(
        circuit.num_qubits(),
        circuit.num_cbits(),
        ops,
        circuit.metadata().clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    fn block_circuit() -> Circuit {
        let mut c = Circuit::new(4, 0);
        c.h(0).unwrap().cnot(0, 1).unwrap().cnot(0, 2).unwrap();
        c.marker(DEFAULT_MARKER, &[0, 1, 2]).unwrap();
        c.cnot(0, 3).unwrap().cnot(1, 3).unwrap().h(2).unwrap();
        c
    }

    #[test]
    fn inject_is_insertive() {
        let c = block_circuit();
        assert_eq!(inject(&c, &ErrorSpec::none()).unwrap(), c);
        for (spec, gate) in [
            (ErrorSpec::bit_flip(1), GateKind::X),
            (ErrorSpec::phase_flip(2), GateKind::Z),
            (ErrorSpec::bit_phase_flip(0), GateKind::Y),
        ] {
            let out = inject(&c, &spec).unwrap();
            assert_eq!(out.len(), c.len() + 1);
            let inserted = &out.ops()[4];
            assert_eq!(inserted.kind, gate);
            assert_eq!(inserted.qubits, vec![spec.qubit.unwrap()]);
            let mut stripped = out.clone();
            stripped.retain(|i, _| i != 4);
            assert_eq!(stripped, c);
            out.validate().unwrap();
        }
    }

    #[test]
    fn inject_errors() {
        let c = block_circuit();
        assert!(matches!(
            inject(&c, &ErrorSpec::bit_flip(3)),
            Err(Error::ErrorSpec(_))
        ));
        assert!(matches!(
            inject(&c, &ErrorSpec::bit_flip(0).with_marker("nope")),
            Err(Error::UnknownMarker(_))
        ));
        let bad = ErrorSpec {
            erasure_mode: Some(ErasureMode::GateRemoval),
            ..ErrorSpec::bit_flip(0)
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn erasure_modes() {
        let c = block_circuit();
        let (removed, flag) = erase(&c, DEFAULT_MARKER, 1, ErasureMode::GateRemoval).unwrap();
        assert_eq!(flag, ErasureFlag::single(1));
        // ops before the marker untouched; later ops on qubit 1 gone
        assert_eq!(&removed.ops()[..4], &c.ops()[..4]);
        assert!(removed.ops()[4..].iter().all(|op| !op.touches(1)));
        assert_eq!(removed.len(), c.len() - 1);
        assert_eq!(erased_qubit(&removed), Some(1));

        let (reset, flag) = erase(&c, DEFAULT_MARKER, 0, ErasureMode::ResetAndFlag).unwrap();
        assert_eq!(flag, ErasureFlag::single(0));
        assert_eq!(reset.ops()[4], GateOp::new(GateKind::Reset, vec![0]));

        assert!(erase(&reset, DEFAULT_MARKER, 2, ErasureMode::ResetAndFlag).is_err());
        assert!(erase(&c, DEFAULT_MARKER, 5, ErasureMode::GateRemoval).is_err());
    }

    #[test]
    fn noise_free_model_leaves_circuit_unchanged() {
        let c = block_circuit();
        let mut rng = RandomSource::new(1).generator();
        let out = apply_noise(&c, &NoiseModel::default(), &mut rng).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn certain_noise_inserts_one_pauli_per_qubit() {
        let mut c = Circuit::new(1, 0);
        c.x(0).unwrap();
        let model = NoiseModel::new(1.0, 0.0, 0.0).unwrap();
        let out = apply_noise(&c, &model, &mut RandomSource::new(4).generator()).unwrap();
        assert_eq!(out.len(), 2);
        assert!(matches!(out.ops()[1].kind, GateKind::X | GateKind::Y | GateKind::Z));
    }

    #[test]
    fn noise_is_coupled_across_strengths() {
        let c = block_circuit();
        let low = NoiseModel::new(0.1, 0.1, 0.0).unwrap();
        let high = NoiseModel::new(0.4, 0.4, 0.0).unwrap();
        for seed in 0..30 {
            let a = apply_noise(&c, &low, &mut RandomSource::new(seed).generator()).unwrap();
            let b = apply_noise(&c, &high, &mut RandomSource::new(seed).generator()).unwrap();
            assert!(a.len() <= b.len());
        }
    }

    #[test]
    fn rejects_invalid_probabilities() {
        assert!(NoiseModel::new(1.5, 0.0, 0.0).is_err());
        assert!(NoiseModel::new(0.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn spec_serde() {
        let json = r#"{"kind":"erasure","qubit":2,"erasure_mode":"reset_and_flag"}"#;
        let spec: ErrorSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, ErrorSpec::erasure(2, ErasureMode::ResetAndFlag));
        assert_eq!(spec.to_string(), "erase2/ResetAndFlag");
    }
}

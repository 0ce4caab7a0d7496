//! Executes an experiment config case by case.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tecsim_core::channels::{ErrorSpec, NoiseModel};
use tecsim_core::circuit::{exact_state, SimOptions};
use tecsim_core::layout::{decompose_toffoli, melbourne_map, route, validate, DirectionPolicy};
use tecsim_core::qsim::{bitstring, DensityMatrix, StateVector};
use tecsim_core::tec::{
    build_bitflip_tec_circuit, build_erasure_tec_circuit, build_phaseflip_tec_circuit,
    decoded_density, logical_counts, logical_distribution, noisy_decoded_density, prepare_message,
    syndrome_record, Pipeline, Readout, TecCircuit, TecOptions,
};
use tecsim_core::tomography::{counts_from_density, tomography_of_density, ReportJson, TomographySchedule};
use tecsim_core::RandomSource;

use crate::config::{ExperimentConfig, Format};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingSummary {
    pub swaps_inserted: usize,
    pub num_ops: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCheck {
    /// `[P(0), P(1)]` of the logical bit with coherent conditionals.
    pub coherent: [f64; 2],
    /// The same with measured Bell blocks and a Pauli-frame correction.
    pub pauli_frame: [f64; 2],
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub error: ErrorSpec,
    pub label: String,
    /// Fidelity of the decoded qubit (averaged over trajectories under noise).
    pub fidelity: f64,
    /// `[P(0), P(1)]` of the decoded qubit in the Z basis.
    pub logical_probabilities: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub syndrome: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erasure_flag: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qnd_signature: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_check: Option<FrameCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routing: Option<RoutingSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tomography: Option<ReportJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: u32,
    pub config: ExperimentConfig,
    pub cases: Vec<CaseRecord>,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid run record")
    }

    /// One row per case.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "case,pipeline,error,shots,fidelity,p0,p1,count0,count1,syndrome,erasure_flag,frame_deviation,swaps,tomography_fidelity\n",
        );
        for c in &self.cases {
            let count = |k: &str| {
                c.histogram
                    .as_ref()
                    .map(|h| h.get(k).copied().unwrap_or(0).to_string())
                    .unwrap_or_default()
            };
            let flag = c
                .erasure_flag
                .as_ref()
                .map(|f| f.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.index,
                self.config.pipeline,
                c.label,
                self.config.shots,
                c.fidelity,
                c.logical_probabilities[0],
                c.logical_probabilities[1],
                count("0"),
                count("1"),
                c.syndrome.as_deref().map(|s| format!("\"{s}\"")).unwrap_or_default(),
                flag,
                c.frame_check.as_ref().map(|f| f.max_deviation.to_string()).unwrap_or_default(),
                c.routing.as_ref().map(|r| r.swaps_inserted.to_string()).unwrap_or_default(),
                c.tomography.as_ref().map(|t| t.fidelity.to_string()).unwrap_or_default(),
            )
            .expect("write to string");
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

pub fn build(pipeline: Pipeline, spec: &ErrorSpec, opts: &TecOptions) -> tecsim_core::Result<TecCircuit> {
    match pipeline {
        Pipeline::Bitflip => build_bitflip_tec_circuit(spec, opts),
        Pipeline::Phaseflip => build_phaseflip_tec_circuit(spec, opts),
        Pipeline::Erasure => build_erasure_tec_circuit(spec, opts),
    }
}

/// Ideal message state of a config.
pub fn target_state(cfg: &ExperimentConfig) -> Result<StateVector<f64>> {
    Ok(exact_state(&prepare_message(&cfg.message, cfg.prep)?)?)
}

fn case_seed(seed: u64, index: usize) -> u64 {
    RandomSource::new(seed).substream(index as u64).generator().next_u64()
}

fn has_gate_noise(n: &NoiseModel) -> bool {
    n.p1 > 0.0 || n.p2 > 0.0
}

fn run_case(cfg: &ExperimentConfig, index: usize, spec: &ErrorSpec) -> Result<CaseRecord> {
    let start = Instant::now();
    let seed = case_seed(cfg.seed, index);
    let noise = cfg.noise();
    let opts = |readout| TecOptions {
        message: cfg.message,
        prep: cfg.prep,
        readout,
        device_faithful: cfg.device_faithful,
        representatives: None,
    };
    let ideal = build(cfg.pipeline, spec, &opts(Readout::State))?;

    let (syndrome, erasure_flag, qnd_signature) = match &ideal.erasure {
        None => (Some(syndrome_record(&ideal)?.to_string()), None, None),
        Some(e) => (
            None,
            Some(e.flag.erased.iter().copied().collect()),
            e.qnd.as_ref().map(|q| q.signature.clone()),
        ),
    };

    let frame_check = if noise.is_noiseless() {
        let coherent = logical_distribution(&build(cfg.pipeline, spec, &opts(Readout::Block))?)?;
        let pauli_frame = logical_distribution(&build(cfg.pipeline, spec, &opts(Readout::PauliFrame))?)?;
        let max_deviation = (coherent[0] - pauli_frame[0])
            .abs()
            .max((coherent[1] - pauli_frame[1]).abs());
        Some(FrameCheck {
            coherent,
            pauli_frame,
            max_deviation,
        })
    } else {
        None
    };

    let mut tec = ideal.clone();
    let routing = if cfg.route {
        let map = melbourne_map();
        let routed = route(&decompose_toffoli(&tec.circuit), &map)?;
        let violations = validate(&routed.circuit, &map, DirectionPolicy::AllowReversed)?.len();
        tec.decoded_qubit = tec.decoded_qubit.map(|q| routed.final_layout[q]);
        let summary = RoutingSummary {
            swaps_inserted: routed.swaps_inserted,
            num_ops: routed.circuit.len(),
            violations,
        };
        tec.circuit = routed.circuit;
        Some(summary)
    } else {
        None
    };

    let rho: DensityMatrix<f64> = if has_gate_noise(&noise) {
        noisy_decoded_density(&tec, &noise, cfg.trajectories, seed)?
    } else {
        decoded_density(&tec)?
    };
    let fidelity = rho.fidelity_pure(&tec.target)?;
    let diag = rho.diagonal();
    let logical_probabilities = [diag[0], diag[1]];

    let histogram = if cfg.shots == 0 {
        None
    } else if !has_gate_noise(&noise) && !cfg.route {
        let sampled = build(cfg.pipeline, spec, &opts(Readout::Decoded))?;
        let counts = logical_counts(
            &sampled,
            &SimOptions {
                shots: cfg.shots as usize,
                seed,
                readout_flip: noise.p_readout,
            },
        )?;
        Some(BTreeMap::from([("0".to_string(), counts[0]), ("1".to_string(), counts[1])]))
    } else {
        let z = TomographySchedule {
            num_qubits: 1,
            settings: vec!["Z".into()],
        };
        let mut h = counts_from_density(&rho, &z, cfg.shots, seed, noise.p_readout)?
            .remove(0)
            .histogram;
        for k in 0..2 {
            h.entry(bitstring(k, 1)).or_insert(0);
        }
        Some(h)
    };

    let tomography = if cfg.tomography {
        let tseed = RandomSource::new(seed).substream(1).generator().next_u64();
        let report = tomography_of_density(&rho, &tec.target, cfg.tomography_shots, tseed, noise.p_readout)?;
        Some(report.to_wire())
    } else {
        None
    };

    Ok(CaseRecord {
        index,
        error: spec.clone(),
        label: spec.to_string(),
        fidelity,
        logical_probabilities,
        histogram,
        syndrome,
        erasure_flag,
        qnd_signature,
        frame_check,
        routing,
        tomography,
        wall_time_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Runs every case of `cfg` (in parallel; results keep case order).
pub fn run(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let cases = cfg.cases();
    let records = cases
        .par_iter()
        .enumerate()
        .map(|(i, spec)| run_case(cfg, i, spec).with_context(|| format!("case {i} ({spec})")))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunRecord {
        version: 1,
        config: cfg.clone(),
        cases: records,
    })
}

/// Density-matrix bars of one case: measured next to ideal.
pub fn emit_plot_data(record: &RunRecord, case: usize) -> Result<String> {
    let c = record
        .cases
        .get(case)
        .with_context(|| format!("record has no case {case}"))?;
    let Some(t) = &c.tomography else {
        bail!("case {case} has no tomography report; run with --tomography");
    };
    let ideal = DensityMatrix::from_pure(&target_state(&record.config)?);
    let d = 1usize << t.n;
    let mut out = String::from("row,col,real_exp,imag_exp,real_ideal,imag_ideal\n");
    for r in 0..d {
        for col in 0..d {
            let z = ideal.get(r, col);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                bitstring(r, t.n),
                bitstring(col, t.n),
                t.real[r][col],
                t.imag[r][col],
                z.re,
                z.im
            )
            .expect("write to string");
        }
    }
    Ok(out)
}

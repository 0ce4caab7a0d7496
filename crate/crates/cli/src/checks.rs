//! Stand-alone checks behind the `reps`, `golden`, `route`, `calibrate` and
//! `determinism` subcommands.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tecsim_core::channels::{ErasureFlag, NoiseModel};
use tecsim_core::circuit::{apply_gate, exact_state, Circuit};
use tecsim_core::layout::{
    decompose_toffoli, melbourne_map, route, routing_equivalence_error, truncate, validate,
    CouplingMap, DirectionPolicy,
};
use tecsim_core::qsim::{PauliString, StateVector};
use tecsim_core::tec::{
    encode_parity4, encode_repetition3, noisy_decoded_density, prepare_logical_bell_3,
    prepare_logical_bell_erasure, prepare_message, select_logical_representatives, MessageParams,
    PrepMode, Readout, TecOptions,
};
use tecsim_core::tomography::{tomography_of_density, ReportJson};
use tecsim_core::RandomSource;

use crate::config::ExperimentConfig;
use crate::run::{build, RunRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeRow {
    pub erased: Vec<usize>,
    pub x_rep: String,
    pub z_rep: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeCheck {
    pub table: Vec<RepresentativeRow>,
    pub samples: usize,
    /// Largest `|<IZIZ> - <ZIZI>|` over the sampled code states.
    pub max_x_difference: f64,
    /// Largest `|<IIXX> - <XXII>|`.
    pub max_z_difference: f64,
}

/// `<psi|P|psi>` through the dense Pauli matrix.
fn dense_expectation(psi: &StateVector<f64>, p: &PauliString) -> f64 {
    let m = p.to_dense::<f64>();
    let a = psi.amplitudes();
    let d = a.len();
    let mut acc = Complex::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            acc += a[r].conj() * m[r * d + c] * a[c];
        }
    }
    acc.re
}

/// Parity-code state of a random complex message.
pub fn random_code_state(rng: &mut ChaCha8Rng) -> Result<StateVector<f64>> {
    let mut amps = vec![Complex::new(0.0, 0.0); 16];
    let (a, b) = (
        Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
        Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
    );
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    amps[0] = a / norm;
    amps[1] = b / norm;
    let mut s = StateVector::from_amplitudes(amps)?;
    for op in encode_parity4().ops() {
        apply_gate(&mut s, op)?;
    }
    Ok(s)
}

pub fn representative_check(samples: usize, seed: u64) -> Result<RepresentativeCheck> {
    let mut table = Vec::new();
    let flags = std::iter::once(ErasureFlag::none()).chain((0..4).map(ErasureFlag::single));
    for flag in flags {
        let (x, z) = select_logical_representatives(&flag)?;
        table.push(RepresentativeRow {
            erased: flag.erased.iter().copied().collect(),
            x_rep: x.to_string(),
            z_rep: z.to_string(),
        });
    }
    let p = |s: &str| -> Result<PauliString> { Ok(s.parse()?) };
    let (x1, x2, z1, z2) = (p("IZIZ")?, p("ZIZI")?, p("IIXX")?, p("XXII")?);
    let mut rng = RandomSource::new(seed).generator();
    let mut rng = ChaCha8Rng::seed_from_u64(rng.gen());
    let (mut dx, mut dz) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let s = random_code_state(&mut rng)?;
        dx = dx.max((dense_expectation(&s, &x1) - dense_expectation(&s, &x2)).abs());
        dz = dz.max((dense_expectation(&s, &z1) - dense_expectation(&s, &z2)).abs());
    }
    Ok(RepresentativeCheck {
        table,
        samples,
        max_x_difference: dx,
        max_z_difference: dz,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenResult {
    pub name: String,
    pub num_qubits: usize,
    pub max_deviation: f64,
    pub up_to_phase: bool,
}

#[derive(Debug, Deserialize)]
struct GoldenFile {
    num_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

pub const GOLDEN_NAMES: [&str; 4] = [
    "repetition_code",
    "logical_bell_repetition",
    "parity_code",
    "logical_bell_parity",
];

/// Builds each encoded state and compares it with `<dir>/<name>.json`.
pub fn golden_check(dir: &Path) -> Result<Vec<GoldenResult>> {
    let prep = prepare_message(&MessageParams::default(), PrepMode::Rotation)?;
    let with_prep = |n: usize, enc: Circuit| -> Result<Circuit> {
        let mut c = Circuit::new(n, 0);
        c.append(&prep)?.append(&enc)?;
        Ok(c)
    };
    let mut out = Vec::new();
    for name in GOLDEN_NAMES {
        let circuit = match name {
            "repetition_code" => with_prep(3, encode_repetition3())?,
            "logical_bell_repetition" => prepare_logical_bell_3(),
            "parity_code" => with_prep(4, encode_parity4())?,
            _ => prepare_logical_bell_erasure(),
        };
        let path = dir.join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let file: GoldenFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let want = StateVector::from_amplitudes(
            file.amplitudes.iter().map(|&[re, im]| Complex::new(re, im)).collect(),
        )?;
        let got: StateVector<f64> = exact_state(&circuit)?;
        let up_to_phase = name == "logical_bell_parity";
        let max_deviation = if up_to_phase {
            got.distance_up_to_phase(&want)?
        } else {
            got.max_distance(&want)
        };
        out.push(GoldenResult {
            name: name.into(),
            num_qubits: file.num_qubits,
            max_deviation,
            up_to_phase,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRouting {
    pub pipeline: String,
    pub qubits: usize,
    pub swaps_inserted: usize,
    pub violations_allow_reversed: usize,
    pub violations_strict: usize,
    /// Routing equivalence error of the unitary part on qubits 0..8.
    pub truncated_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingCheck {
    pub map_edges: Vec<[usize; 2]>,
    pub pipelines: Vec<PipelineRouting>,
    pub random_cases: usize,
    pub random_max_error: f64,
    pub random_violations: usize,
}

fn random_connected_map(rng: &mut ChaCha8Rng, n: usize) -> Result<CouplingMap> {
    let mut edges = Vec::new();
    for q in 1..n {
        let p = rng.gen_range(0..q);
        edges.push(if rng.gen() { (p, q) } else { (q, p) });
    }
    for _ in 0..rng.gen_range(0..n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && !edges.contains(&(b, a)) {
            edges.push((a, b));
        }
    }
    Ok(CouplingMap::new(n, edges)?)
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n, 0);
    for _ in 0..len {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        match rng.gen_range(0..8) {
            0 => c.h(a)?,
            1 => c.t(a)?,
            2 => c.ry(a, rng.gen_range(-3.2..3.2))?,
            3 | 4 => c.cnot(a, b)?,
            5 => c.cz(a, b)?,
            6 => c.swap(a, b)?,
            _ => c.sdg(a)?,
        };
    }
    Ok(c)
}

/// Routes both pipelines onto Melbourne and `random_cases` random circuits
/// (2 to 6 qubits) onto random connected maps.
pub fn routing_check(random_cases: usize, seed: u64) -> Result<RoutingCheck> {
    let map = melbourne_map();
    let mut pipelines = Vec::new();
    let faithful = TecOptions {
        device_faithful: true,
        ..TecOptions::with_readout(Readout::State)
    };
    for (name, pipeline, opts) in [
        ("bitflip", tecsim_core::tec::Pipeline::Bitflip, TecOptions::default()),
        ("phaseflip", tecsim_core::tec::Pipeline::Phaseflip, TecOptions::default()),
        ("erasure (14 qubits)", tecsim_core::tec::Pipeline::Erasure, faithful),
    ] {
        let tec = build(pipeline, &tecsim_core::channels::ErrorSpec::none(), &opts)?;
        let flat = decompose_toffoli(&tec.circuit);
        let routed = route(&flat, &map)?;
        let t = truncate(&flat, 8);
        let rt = route(&t, &map)?;
        pipelines.push(PipelineRouting {
            pipeline: name.into(),
            qubits: tec.circuit.num_qubits(),
            swaps_inserted: routed.swaps_inserted,
            violations_allow_reversed: validate(&routed.circuit, &map, DirectionPolicy::AllowReversed)?.len(),
            violations_strict: validate(&routed.circuit, &map, DirectionPolicy::Strict)?.len(),
            truncated_error: routing_equivalence_error(&t, &rt)?,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RandomSource::new(seed).generator().gen());
    let (mut worst, mut violations) = (0.0f64, 0usize);
    for _ in 0..random_cases {
        let n = rng.gen_range(2..=6);
        let m = random_connected_map(&mut rng, n)?;
        let c = random_circuit(&mut rng, n, 24)?;
        let r = route(&c, &m)?;
        violations += validate(&r.circuit, &m, DirectionPolicy::AllowReversed)?.len();
        worst = worst.max(routing_equivalence_error(&c, &r)?);
    }
    Ok(RoutingCheck {
        map_edges: map.edges().iter().map(|&(a, b)| [a, b]).collect(),
        pipelines,
        random_cases,
        random_max_error: worst,
        random_violations: violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub low: f64,
    pub high: f64,
    /// Chosen `p1 = p2`.
    pub p: f64,
    pub mean_fidelity: f64,
    pub tomography: ReportJson,
    /// `(p, mean fidelity)` at every bisection step.
    pub steps: Vec<[f64; 2]>,
    pub in_band: bool,
}

/// Bisects `p1 = p2` in `[0, p_max]` until the trajectory-averaged decoded
/// fidelity of the config's first case lands near the middle of
/// `[low, high]`, then runs tomography at that strength.
pub fn calibrate(cfg: &ExperimentConfig, low: f64, high: f64, p_max: f64) -> Result<Calibration> {
    cfg.validate()?;
    if !(0.0 < low && low < high && high < 1.0) {
        bail!("need 0 < low < high < 1");
    }
    let spec = cfg.cases().into_iter().next().context("config has no cases")?;
    let opts = TecOptions {
        message: cfg.message,
        prep: cfg.prep,
        readout: Readout::State,
        device_faithful: cfg.device_faithful,
        representatives: None,
    };
    let tec = build(cfg.pipeline, &spec, &opts)?;
    let readout = cfg.noise().p_readout;
    let seed = cfg.seed;
    let eval = |p: f64| -> Result<(f64, tecsim_core::DensityMatrixF64)> {
        let model = NoiseModel::new(p, p, readout)?;
        let rho = noisy_decoded_density(&tec, &model, cfg.trajectories, seed)?;
        Ok((rho.fidelity_pure(&tec.target)?, rho))
    };
    let mid = 0.5 * (low + high);
    let (f_max, _) = eval(p_max)?;
    if f_max >= mid {
        bail!("fidelity at p = {p_max} is {f_max:.4}, above the band middle; raise p_max");
    }
    let (mut lo, mut hi) = (0.0, p_max);
    let mut steps = Vec::new();
    let mut best = None;
    for _ in 0..40 {
        let p = 0.5 * (lo + hi);
        let (f, rho) = eval(p)?;
        steps.push([p, f]);
        best = Some((p, f, rho));
        if (f - mid).abs() < 0.25 * (high - low) {
            break;
        }
        if f > mid {
            lo = p;
        } else {
            hi = p;
        }
    }
    let (p, mean_fidelity, rho) = best.expect("at least one step");
    let report = tomography_of_density(&rho, &tec.target, cfg.tomography_shots, seed, readout)?;
    let tomo = report.to_wire();
    let in_band = (low..=high).contains(&mean_fidelity) && (low..=high).contains(&tomo.fidelity);
    Ok(Calibration {
        low,
        high,
        p,
        mean_fidelity,
        tomography: tomo,
        steps,
        in_band,
    })
}

/// Runs `cfg` twice and compares the rendered outputs byte for byte.
pub fn determinism_check(cfg: &ExperimentConfig) -> Result<(bool, usize)> {
    let a = crate::run::run(cfg)?.render(cfg.output.format);
    let b = crate::run::run(cfg)?.render(cfg.output.format);
    Ok((a.as_bytes() == b.as_bytes(), a.len()))
}

/// Reads a run record from disk.
pub fn load_record(path: &Path) -> Result<RunRecord> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RunRecord::from_json(&text)
}

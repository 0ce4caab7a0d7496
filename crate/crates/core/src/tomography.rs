//! Pauli-basis state tomography: measurement schedules, linear-inversion
//! reconstruction with a physicality projection, and a JSON report.
//!
//! Outcome strings follow the crate convention: character `i` is the result
//! on measured qubit `i`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{simulate_with, Circuit, SimOptions};
use crate::error::{Error, Result};
use crate::qsim::state::OutcomeSampler;
use crate::qsim::{bitstring, DensityMatrix, StateVector, Unitary};
use crate::rng::RandomSource;

/// Largest register for full tomography (3^n settings, 4^n Pauli terms).
pub const MAX_TOMOGRAPHY_QUBITS: usize = 3;

/// Eigenvalue shift above which a reconstruction counts as corrected.
pub const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographySchedule {
    pub num_qubits: usize,
    pub settings: Vec<String>,
}

/// All `3^n` settings over `{X, Y, Z}`, lexicographic with `X < Y < Z`.
pub fn schedule_full(num_qubits: usize) -> Result<TomographySchedule> {
    if num_qubits == 0 || num_qubits > MAX_TOMOGRAPHY_QUBITS {
        return Err(Error::Capacity {
            what: "tomography qubits",
            requested: num_qubits,
            limit: MAX_TOMOGRAPHY_QUBITS,
        });
    }
    let mut settings = vec![String::new()];
    for _ in 0..num_qubits {
        settings = settings
            .into_iter()
            .flat_map(|s| ['X', 'Y', 'Z'].map(|b| format!("{s}{b}")))
            .collect();
    }
    Ok(TomographySchedule {
        num_qubits,
        settings,
    })
}

fn check_setting(setting: &str) -> Result<()> {
    if setting.is_empty() {
        return Err(Error::Tomography("empty measurement setting".into()));
    }
    match setting.chars().find(|c| !matches!(c, 'X' | 'Y' | 'Z')) {
        Some(c) => Err(Error::InvalidPauli(c)),
        None => Ok(()),
    }
}

/// Basis change taking the setting's eigenbasis to Z: X gets H, Y gets
/// S-dagger then H, Z nothing. Qubit `i` follows character `i`.
pub fn rotation_fragment(setting: &str) -> Result<Circuit> {
    check_setting(setting)?;
    let mut c = Circuit::new(setting.len(), 0);
    for (q, b) in setting.chars().enumerate() {
        match b {
            'X' => {
                c.h(q)?;
            }
            'Y' => {
                c.sdg(q)?.h(q)?;
            }
            _ => {}
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisCounts {
    pub setting: String,
    pub histogram: BTreeMap<String, u64>,
}

impl BasisCounts {
    pub fn shots(&self) -> u64 {
        self.histogram.values().sum()
    }
}

/// Outcome distribution of one setting, indexed by outcome integer (bit `i`
/// is qubit `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct BasisProbabilities {
    pub setting: String,
    pub probabilities: Vec<f64>,
}

/// Probabilities of every scheduled setting on `rho` (the infinite-shot limit).
pub fn exact_probabilities(
    rho: &DensityMatrix<f64>,
    schedule: &TomographySchedule,
) -> Result<Vec<BasisProbabilities>> {
    if rho.num_qubits() != schedule.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: schedule.num_qubits,
            got: rho.num_qubits(),
        });
    }
    schedule
        .settings
        .iter()
        .map(|s| {
            Ok(BasisProbabilities {
                setting: s.clone(),
                probabilities: rotated(rho, s)?.diagonal(),
            })
        })
        .collect()
}

fn rotated(rho: &DensityMatrix<f64>, setting: &str) -> Result<DensityMatrix<f64>> {
    check_setting(setting)?;
    let h = Unitary::<f64>::h().as_mat2().expect("1-qubit gate");
    let sdg = Unitary::<f64>::sdg().as_mat2().expect("1-qubit gate");
    let mut out = rho.clone();
    for (q, b) in setting.chars().enumerate() {
        match b {
            'X' => out.conjugate_1q(q, &h),
            'Y' => {
                out.conjugate_1q(q, &sdg);
                out.conjugate_1q(q, &h);
            }
            _ => {}
        }
    }
    Ok(out)
}

fn setting_source(seed: u64, index: usize) -> RandomSource {
    RandomSource::new(seed).substream(index as u64)
}

/// Samples `shots` outcomes per setting from `rho`; each recorded bit is then
/// flipped with probability `readout_flip`. Setting `i` draws from substream
/// `i` of `seed`.
pub fn counts_from_density(
    rho: &DensityMatrix<f64>,
    schedule: &TomographySchedule,
    shots: u64,
    seed: u64,
    readout_flip: f64,
) -> Result<Vec<BasisCounts>> {
    check_shots(shots, readout_flip)?;
    let n = schedule.num_qubits;
    exact_probabilities(rho, schedule)?
        .into_par_iter()
        .enumerate()
        .map(|(i, bp)| {
            let sampler = OutcomeSampler::new(&bp.probabilities);
            let mut rng = setting_source(seed, i).generator();
            let mut histogram = BTreeMap::new();
            for _ in 0..shots {
                let mut outcome = sampler.sample(&mut rng);
                if readout_flip > 0.0 {
                    for q in 0..n {
                        if rng.gen::<f64>() < readout_flip {
                            outcome ^= 1 << q;
                        }
                    }
                }
                *histogram.entry(bitstring(outcome, n)).or_insert(0) += 1;
            }
            Ok(BasisCounts {
                setting: bp.setting,
                histogram,
            })
        })
        .collect()
}

/// Runs `prep` once per setting with the basis change on `qubits` and a
/// measurement of each into cbits `0..`; settings draw independent seeds.
pub fn counts_from_circuit(
    prep: &Circuit,
    qubits: &[usize],
    schedule: &TomographySchedule,
    shots: u64,
    seed: u64,
    readout_flip: f64,
) -> Result<Vec<BasisCounts>> {
    check_shots(shots, readout_flip)?;
    if qubits.len() != schedule.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: schedule.num_qubits,
            got: qubits.len(),
        });
    }
    schedule
        .settings
        .par_iter()
        .enumerate()
        .map(|(i, setting)| {
            let mut c = Circuit::new(prep.num_qubits(), prep.num_cbits().max(qubits.len()));
            c.append(prep)?;
            c.append_mapped(&rotation_fragment(setting)?, qubits)?;
            for (k, &q) in qubits.iter().enumerate() {
                c.measure(q, k)?;
            }
            let opts = SimOptions {
                shots: shots as usize,
                seed: setting_source(seed, i).generator().next_u64(),
                readout_flip,
            };
            let result = simulate_with::<f64>(&c, &opts)?;
            let mut histogram = BTreeMap::new();
            for (record, count) in result.counts {
                *histogram.entry(record[..qubits.len()].to_string()).or_insert(0) += count;
            }
            Ok(BasisCounts {
                setting: setting.clone(),
                histogram,
            })
        })
        .collect()
}

fn check_shots(shots: u64, readout_flip: f64) -> Result<()> {
    if shots == 0 {
        return Err(Error::Validation("tomography needs shots >= 1".into()));
    }
    if !(0.0..=1.0).contains(&readout_flip) {
        return Err(Error::Validation(format!(
            "readout flip probability {readout_flip} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Linear-inversion estimate `(1/2^n) sum_P <P> P` over all `4^n` Pauli
/// strings. Each expectation averages the parity over every setting that
/// agrees with `P` on its support. No projection is applied.
pub fn linear_inversion(data: &[BasisProbabilities]) -> Result<DensityMatrix<f64>> {
    let n = data
        .first()
        .map(|d| d.setting.len())
        .ok_or_else(|| Error::Tomography("no settings".into()))?;
    let schedule = schedule_full(n)?;
    let mut by_setting = BTreeMap::new();
    for d in data {
        check_setting(&d.setting)?;
        if d.setting.len() != n || d.probabilities.len() != 1 << n {
            return Err(Error::Tomography(format!(
                "setting {:?} does not match a {n}-qubit register",
                d.setting
            )));
        }
        if by_setting.insert(d.setting.as_str(), &d.probabilities).is_some() {
            return Err(Error::Tomography(format!("setting {:?} given twice", d.setting)));
        }
    }
    if let Some(missing) = schedule.settings.iter().find(|s| !by_setting.contains_key(s.as_str())) {
        return Err(Error::Tomography(format!("missing setting {missing:?}")));
    }

    let dim = 1usize << n;
    let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
    for code in 0..4usize.pow(n as u32) {
        // Pauli label per qubit: 0 = I, 1 = X, 2 = Y, 3 = Z.
        let labels: Vec<usize> = (0..n).map(|q| code / 4usize.pow(q as u32) % 4).collect();
        let support: usize = (0..n).filter(|&q| labels[q] != 0).map(|q| 1 << q).sum();
        let mut total = 0.0;
        let mut used = 0usize;
        for (setting, probs) in &by_setting {
            let compatible = setting
                .chars()
                .zip(&labels)
                .all(|(b, &l)| l == 0 || "XYZ".as_bytes()[l - 1] == b as u8);
            if !compatible {
                continue;
            }
            used += 1;
            total += probs
                .iter()
                .enumerate()
                .map(|(o, p)| if (o & support).count_ones() % 2 == 1 { -p } else { *p })
                .sum::<f64>();
        }
        let expectation = total / used as f64;
        for r in 0..dim {
            for c in 0..dim {
                let mut elem = Complex::new(expectation / dim as f64, 0.0);
                for (q, &l) in labels.iter().enumerate() {
                    let (rb, cb) = (r >> q & 1, c >> q & 1);
                    elem *= match (l, rb, cb) {
                        (0, a, b) | (3, a, b) if a != b => Complex::new(0.0, 0.0),
                        (0, _, _) => Complex::new(1.0, 0.0),
                        (3, a, _) => Complex::new(if a == 0 { 1.0 } else { -1.0 }, 0.0),
                        (1, a, b) if a != b => Complex::new(1.0, 0.0),
                        // Y = [[0, -i], [i, 0]]
                        (2, 0, 1) => Complex::new(0.0, -1.0),
                        (2, 1, 0) => Complex::new(0.0, 1.0),
                        _ => Complex::new(0.0, 0.0),
                    };
                }
                entries[r * dim + c] += elem;
            }
        }
    }
    DensityMatrix::from_entries(n, entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub rho: DensityMatrix<f64>,
    pub fidelity_to_target: f64,
    pub shots_per_setting: u64,
    pub physicality_corrected: bool,
}

/// Relative frequencies from equal-shot counts, then [`reconstruct_probabilities`].
pub fn reconstruct(counts: &[BasisCounts], target: &StateVector<f64>) -> Result<ReconstructionReport> {
    let shots = counts
        .first()
        .map(BasisCounts::shots)
        .ok_or_else(|| Error::Tomography("no settings".into()))?;
    let mut data = Vec::with_capacity(counts.len());
    for bc in counts {
        if bc.shots() != shots {
            return Err(Error::Tomography(format!(
                "setting {:?} has {} shots, expected {shots}",
                bc.setting,
                bc.shots()
            )));
        }
        let n = bc.setting.len();
        let mut probabilities = vec![0.0; 1 << n];
        for (key, &count) in &bc.histogram {
            let outcome = parse_outcome(key, n)?;
            probabilities[outcome] += count as f64 / shots as f64;
        }
        data.push(BasisProbabilities {
            setting: bc.setting.clone(),
            probabilities,
        });
    }
    let mut report = reconstruct_probabilities(&data, target)?;
    report.shots_per_setting = shots;
    Ok(report)
}

/// Linear inversion followed by projection onto the physical states.
/// `shots_per_setting` is left at 0.
pub fn reconstruct_probabilities(
    data: &[BasisProbabilities],
    target: &StateVector<f64>,
) -> Result<ReconstructionReport> {
    let raw = linear_inversion(data)?;
    let (rho, moved) = raw.project_physical();
    let fidelity_to_target = rho.fidelity_pure(target)?;
    Ok(ReconstructionReport {
        rho,
        fidelity_to_target,
        shots_per_setting: 0,
        physicality_corrected: moved > PHYSICALITY_TOL,
    })
}

fn parse_outcome(key: &str, n: usize) -> Result<usize> {
    if key.len() != n {
        return Err(Error::Tomography(format!("outcome {key:?} is not {n} bits")));
    }
    key.chars().enumerate().try_fold(0usize, |acc, (i, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        _ => Err(Error::Tomography(format!("outcome {key:?} is not a bitstring"))),
    })
}

/// Full single-run workflow on a known state: sample every setting of
/// `rho`, reconstruct, and score against `target`.
pub fn tomography_of_density(
    rho: &DensityMatrix<f64>,
    target: &StateVector<f64>,
    shots: u64,
    seed: u64,
    readout_flip: f64,
) -> Result<ReconstructionReport> {
    let schedule = schedule_full(rho.num_qubits())?;
    let counts = counts_from_density(rho, &schedule, shots, seed, readout_flip)?;
    reconstruct(&counts, target)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub version: u32,
    pub n: usize,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
    pub fidelity: f64,
    pub shots_per_setting: u64,
    pub physicality_corrected: bool,
}

impl ReconstructionReport {
    pub fn to_wire(&self) -> ReportJson {
        let d = self.rho.dim();
        let part = |f: fn(Complex<f64>) -> f64| -> Vec<Vec<f64>> {
            (0..d).map(|r| (0..d).map(|c| f(self.rho.get(r, c))).collect()).collect()
        };
        ReportJson {
            version: 1,
            n: self.rho.num_qubits(),
            real: part(|z| z.re),
            imag: part(|z| z.im),
            fidelity: self.fidelity_to_target.clamp(0.0, 1.0),
            shots_per_setting: self.shots_per_setting,
            physicality_corrected: self.physicality_corrected,
        }
    }

    /// Pretty JSON with row-major real and imaginary matrices.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("report serializes")
    }

    pub fn from_wire(wire: &ReportJson) -> Result<Self> {
        if wire.version != 1 {
            return Err(Error::parse("version", format!("unsupported version {}", wire.version)));
        }
        let d = 1usize << wire.n;
        let rows_ok = |m: &Vec<Vec<f64>>| m.len() == d && m.iter().all(|r| r.len() == d);
        if !rows_ok(&wire.real) || !rows_ok(&wire.imag) {
            return Err(Error::parse("real/imag", format!("expected {d}x{d} matrices")));
        }
        let entries = (0..d * d)
            .map(|k| Complex::new(wire.real[k / d][k % d], wire.imag[k / d][k % d]))
            .collect();
        Ok(Self {
            rho: DensityMatrix::from_entries(wire.n, entries)?,
            fidelity_to_target: wire.fidelity,
            shots_per_setting: wire.shots_per_setting,
            physicality_corrected: wire.physicality_corrected,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: ReportJson = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        Self::from_wire(&wire)
    }
}

//! Experiment configuration: a JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tecsim_core::channels::{ErasureMode, ErrorKind, ErrorSpec, NoiseModel};
use tecsim_core::tec::{MessageParams, Pipeline, PrepMode};

/// Error cases to run: one spec, an explicit list, or a sweep directive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ErrorDirective {
    Sweep(Sweep),
    Single(ErrorSpec),
    List(Vec<ErrorSpec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sweep {
    /// No error, then one correctable error per message qubit (bit/phase flip);
    /// one erasure per message qubit (erasure).
    #[serde(rename = "all-single")]
    AllSingle,
}

impl Default for ErrorDirective {
    fn default() -> Self {
        ErrorDirective::Single(ErrorSpec::none())
    }
}

impl ErrorDirective {
    pub fn expand(&self, pipeline: Pipeline, erasure_mode: ErasureMode) -> Vec<ErrorSpec> {
        match self {
            ErrorDirective::Single(s) => vec![s.clone()],
            ErrorDirective::List(v) => v.clone(),
            ErrorDirective::Sweep(Sweep::AllSingle) => match pipeline {
                Pipeline::Bitflip => std::iter::once(ErrorSpec::none())
                    .chain((0..3).map(ErrorSpec::bit_flip))
                    .collect(),
                Pipeline::Phaseflip => std::iter::once(ErrorSpec::none())
                    .chain((0..3).map(ErrorSpec::phase_flip))
                    .collect(),
                Pipeline::Erasure => (0..4).map(|q| ErrorSpec::erasure(q, erasure_mode)).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Destination file; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_trajectories() -> usize {
    1000
}

fn default_tomography_shots() -> u64 {
    8192
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    #[serde(default)]
    pub error: ErrorDirective,
    /// Erasure mode used by sweep directives.
    #[serde(default)]
    pub erasure_mode: ErasureMode,
    /// 0 runs in statevector mode (exact probabilities and fidelity).
    #[serde(default)]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
    /// Noise trajectories averaged per case when gate noise is on.
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(default)]
    pub tomography: bool,
    #[serde(default = "default_tomography_shots")]
    pub tomography_shots: u64,
    /// Route onto the Melbourne coupling map before simulating.
    #[serde(default)]
    pub route: bool,
    /// Erasure pipeline: 14-qubit variant with two QND ancillas.
    #[serde(default)]
    pub device_faithful: bool,
    #[serde(default)]
    pub message: MessageParams,
    #[serde(default)]
    pub prep: PrepMode,
    #[serde(default)]
    pub output: OutputSpec,
    /// Record wall time per case. Off by default so outputs are reproducible
    /// byte for byte.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(pipeline: Pipeline) -> Self {
        Self {
            pipeline,
            error: ErrorDirective::default(),
            erasure_mode: ErasureMode::default(),
            shots: 0,
            seed: 0,
            noise: None,
            trajectories: default_trajectories(),
            tomography: false,
            tomography_shots: default_tomography_shots(),
            route: false,
            device_faithful: false,
            message: MessageParams::default(),
            prep: PrepMode::default(),
            output: OutputSpec::default(),
            timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("invalid experiment config")?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        self.message.validate()?;
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        if self.trajectories == 0 {
            bail!("trajectories must be at least 1");
        }
        if self.tomography && self.tomography_shots == 0 {
            bail!("tomography_shots must be at least 1");
        }
        for spec in self.cases() {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn cases(&self) -> Vec<ErrorSpec> {
        self.error.expand(self.pipeline, self.erasure_mode)
    }
}

/// Command-line values that replace config fields when given.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    #[arg(long, value_parser = parse_pipeline)]
    pub pipeline: Option<Pipeline>,
    /// none, bit_flip, phase_flip, bit_phase_flip, erasure or all-single.
    #[arg(long)]
    pub error_kind: Option<String>,
    #[arg(long)]
    pub error_qubit: Option<usize>,
    /// gate_removal or reset_and_flag.
    #[arg(long, value_parser = parse_erasure_mode)]
    pub erasure_mode: Option<ErasureMode>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise_p1: Option<f64>,
    #[arg(long)]
    pub noise_p2: Option<f64>,
    #[arg(long)]
    pub noise_readout: Option<f64>,
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long)]
    pub tomography: bool,
    #[arg(long)]
    pub tomography_shots: Option<u64>,
    #[arg(long)]
    pub route: bool,
    #[arg(long)]
    pub device_faithful: bool,
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

pub fn parse_pipeline(s: &str) -> Result<Pipeline, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown pipeline {s:?} (bitflip, phaseflip, erasure)"))
}

fn parse_erasure_mode(s: &str) -> Result<ErasureMode, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown erasure mode {s:?} (gate_removal, reset_and_flag)"))
}

fn parse_kind(s: &str) -> Result<ErrorKind> {
    serde_json::from_value(serde_json::Value::String(s.into())).with_context(|| {
        format!("unknown error kind {s:?} (none, bit_flip, phase_flip, bit_phase_flip, erasure, all-single)")
    })
}

impl Overrides {
    /// Starts from `base` (or the pipeline default when no file was given).
    pub fn apply(&self, base: Option<ExperimentConfig>) -> Result<ExperimentConfig> {
        let mut cfg = match (base, self.pipeline) {
            (Some(cfg), _) => cfg,
            (None, Some(p)) => ExperimentConfig::new(p),
            (None, None) => bail!("give --config or --pipeline"),
        };
        if let Some(p) = self.pipeline {
            cfg.pipeline = p;
        }
        if let Some(mode) = self.erasure_mode {
            cfg.erasure_mode = mode;
        }
        match (&self.error_kind, self.error_qubit) {
            (Some(k), _) if k == "all-single" => cfg.error = ErrorDirective::Sweep(Sweep::AllSingle),
            (Some(k), q) => {
                let kind = parse_kind(k)?;
                let spec = match kind {
                    ErrorKind::None => ErrorSpec::none(),
                    ErrorKind::BitFlip => ErrorSpec::bit_flip(q.unwrap_or(0)),
                    ErrorKind::PhaseFlip => ErrorSpec::phase_flip(q.unwrap_or(0)),
                    ErrorKind::BitPhaseFlip => ErrorSpec::bit_phase_flip(q.unwrap_or(0)),
                    ErrorKind::Erasure => ErrorSpec::erasure(q.unwrap_or(0), cfg.erasure_mode),
                };
                cfg.error = ErrorDirective::Single(spec);
            }
            (None, Some(q)) => match &mut cfg.error {
                ErrorDirective::Single(spec) if spec.kind != ErrorKind::None => spec.qubit = Some(q),
                _ => bail!("--error-qubit needs a single-error config or --error-kind"),
            },
            (None, None) => {}
        }
        if let Some(v) = self.shots {
            cfg.shots = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.noise_p1.is_some() || self.noise_p2.is_some() || self.noise_readout.is_some() {
            let mut n = cfg.noise.unwrap_or_default();
            n.p1 = self.noise_p1.unwrap_or(n.p1);
            n.p2 = self.noise_p2.unwrap_or(n.p2);
            n.p_readout = self.noise_readout.unwrap_or(n.p_readout);
            cfg.noise = Some(n);
        }
        if let Some(v) = self.trajectories {
            cfg.trajectories = v;
        }
        if let Some(v) = self.tomography_shots {
            cfg.tomography_shots = v;
        }
        cfg.tomography |= self.tomography;
        cfg.route |= self.route;
        cfg.device_faithful |= self.device_faithful;
        cfg.timing |= self.timing;
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

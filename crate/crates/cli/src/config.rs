//! Experiment configuration, read from TOML.
//!
//! ```toml
//! scenario = "interference-scan"   # input-only | region-I | which-path | interference-scan
//!
//! [geometry]
//! length = 6.283185307179586       # box side L
//! cutoff = 1                       # lattice cutoff on max |n_i|
//!
//! [physics]
//! hbar = 1.0                       # optional, default 1
//! c = 1.0                          # optional, default 1
//! k0 = [1, 0, 0]                   # lattice vector of the input mode, in the xy-plane
//! polarization = 2                 # 1 or 2
//!
//! [interferometer]
//! phi = 0.0
//! circuit = "standard-mzi"         # or circuit text in the DSL
//!
//! [sampling]
//! seed = 7
//! ensemble = 8
//!
//! [run]
//! periods = 10.0
//! samples = 101
//! phi_steps = 24                   # interference scan: phi = j*pi/phi_steps, j = 0..=phi_steps
//! rtol = 1e-12
//! workers = 0                      # 0 = one per core; MZI_WORKERS overrides
//!
//! [output]
//! directory = "out"
//!
//! [tolerances]                     # all optional
//! oracle = 1e-8
//! energy = 1e-10
//! reality = 1e-12
//! interference = 1e-9
//! detection = 1e-12
//!
//! [detector]                       # required for which-path
//! reduced_mass = 1.0
//! charge = 3.5449077018110318
//! ionization_energy = 0.5
//! site = "C1"
//! time = 200.0
//! window = 0.4
//! k_points = 1200
//! theta_points = 8
//! phi_points = 8
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use causal_mzi::optics::{parse_circuit, CircuitDescription, MziLayout};
use causal_mzi::photodetection::{ChannelGrid, DetectorAtom, DetectorSite, POINTS_PER_LOBE};
use causal_mzi::{BoxGeometry, FieldModel, ModeIndex, Physics};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "input-only")]
    InputOnly,
    #[serde(rename = "region-I")]
    RegionI,
    #[serde(rename = "which-path")]
    WhichPath,
    #[serde(rename = "interference-scan")]
    InterferenceScan,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::InputOnly => "input-only",
            Scenario::RegionI => "region-I",
            Scenario::WhichPath => "which-path",
            Scenario::InterferenceScan => "interference-scan",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub length: f64,
    pub cutoff: u32,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub k0: [i32; 3],
    pub polarization: u8,
}

fn standard() -> String {
    "standard-mzi".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interferometer {
    pub phi: f64,
    #[serde(default = "standard")]
    pub circuit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub seed: u64,
    pub ensemble: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub periods: f64,
    pub samples: usize,
    pub phi_steps: usize,
    pub rtol: f64,
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { periods: 10.0, samples: 101, phi_steps: 24, rtol: 1e-12, workers: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub directory: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub oracle: f64,
    pub energy: f64,
    pub reality: f64,
    pub interference: f64,
    pub detection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { oracle: 1e-8, energy: 1e-10, reality: 1e-12, interference: 1e-9, detection: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub reduced_mass: f64,
    pub charge: f64,
    pub ionization_energy: f64,
    pub site: DetectorSite,
    pub time: f64,
    pub window: f64,
    pub k_points: usize,
    pub theta_points: usize,
    pub phi_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub geometry: Geometry,
    pub physics: PhysicsSection,
    pub interferometer: Interferometer,
    pub sampling: Sampling,
    #[serde(default)]
    pub run: RunSection,
    pub output: Output,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub detector: Option<DetectorSection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn finding(path: &str, message: impl Into<String>) -> Finding {
    Finding { path: path.to_string(), message: message.into() }
}

/// Parse TOML text; a syntax or schema error becomes a single finding.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<Finding>> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start].lines().count().max(1));
        let path = line.map_or_else(|| "<config>".to_string(), |l| format!("<config>:{l}"));
        vec![finding(&path, e.message().to_string())]
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, Vec<Finding>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![finding("<config>", format!("{}: {e}", path.display()))])?;
    parse_config(&text)
}

impl ExperimentConfig {
    pub fn physics(&self) -> Physics {
        Physics { hbar: self.physics.hbar, c: self.physics.c }
    }

    pub fn model(&self) -> anyhow::Result<FieldModel> {
        Ok(FieldModel::new(BoxGeometry::new(self.geometry.length, self.geometry.cutoff)?, self.physics())?)
    }

    pub fn input_mode(&self) -> anyhow::Result<ModeIndex> {
        Ok(ModeIndex::new(self.physics.k0, self.physics.polarization)?)
    }

    pub fn circuit(&self) -> anyhow::Result<CircuitDescription> {
        if self.interferometer.circuit.trim() == "standard-mzi" {
            Ok(CircuitDescription::standard())
        } else {
            Ok(parse_circuit(&self.interferometer.circuit)?)
        }
    }

    pub fn atom(&self) -> anyhow::Result<DetectorAtom> {
        let d = self.detector.as_ref().ok_or_else(|| anyhow::anyhow!("which-path needs a [detector] section"))?;
        Ok(DetectorAtom::new(d.reduced_mass, d.charge, d.ionization_energy, d.site)?)
    }

    /// Worker count, with `MZI_WORKERS` taking precedence over `run.workers`.
    pub fn workers(&self) -> usize {
        std::env::var("MZI_WORKERS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(self.run.workers)
    }
}

/// Every problem that would stop a run, with the offending field path.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Finding> {
    let mut out = Vec::new();
    let positive = |out: &mut Vec<Finding>, path: &str, v: f64| {
        if !(v > 0.0 && v.is_finite()) {
            out.push(finding(path, format!("must be positive and finite, got {v}")));
        }
    };

    positive(&mut out, "geometry.length", cfg.geometry.length);
    if cfg.geometry.cutoff == 0 {
        out.push(finding("geometry.cutoff", "must be at least 1"));
    }
    positive(&mut out, "physics.hbar", cfg.physics.hbar);
    positive(&mut out, "physics.c", cfg.physics.c);
    if !matches!(cfg.physics.polarization, 1 | 2) {
        out.push(finding("physics.polarization", "must be 1 or 2"));
    }
    match ModeIndex::new(cfg.physics.k0, cfg.physics.polarization.clamp(1, 2)) {
        Err(e) => out.push(finding("physics.k0", e.to_string())),
        Ok(mode) => {
            if !mode.is_canonical() {
                out.push(finding("physics.k0", "first nonzero component must be positive"));
            } else if let Err(e) = MziLayout::new(mode) {
                out.push(finding("physics.k0", format!("the turned arm leaves the canonical half-lattice: {e}")));
            }
            if mode.n()[2] != 0 {
                out.push(finding("physics.k0", "input must travel in the xy-plane of the interferometer"));
            }
            if mode.max_abs_component() > cfg.geometry.cutoff {
                out.push(finding("physics.k0", format!("exceeds the lattice cutoff {}", cfg.geometry.cutoff)));
            }
        }
    }
    if !cfg.interferometer.phi.is_finite() {
        out.push(finding("interferometer.phi", "must be finite"));
    }
    if let Err(e) = cfg.circuit() {
        out.push(finding("interferometer.circuit", e.to_string()));
    } else if let Ok(c) = cfg.circuit() {
        let needed = match cfg.scenario {
            Scenario::InputOnly => 0,
            Scenario::RegionI | Scenario::WhichPath => 1,
            Scenario::InterferenceScan => 2,
        };
        if c.splitter_count() < needed {
            out.push(finding(
                "interferometer.circuit",
                format!("scenario {} needs at least {needed} beam splitter(s)", cfg.scenario),
            ));
        }
    }
    if cfg.sampling.ensemble == 0 {
        out.push(finding("sampling.ensemble", "must be at least 1"));
    }
    positive(&mut out, "run.periods", cfg.run.periods);
    if cfg.run.samples < 5 {
        out.push(finding("run.samples", "need at least 5 samples"));
    }
    if cfg.scenario == Scenario::InterferenceScan && cfg.run.phi_steps == 0 {
        out.push(finding("run.phi_steps", "must be at least 1"));
    }
    positive(&mut out, "run.rtol", cfg.run.rtol);
    if cfg.output.directory.as_os_str().is_empty() {
        out.push(finding("output.directory", "must not be empty"));
    }
    let t = &cfg.tolerances;
    for (name, v) in [
        ("tolerances.oracle", t.oracle),
        ("tolerances.energy", t.energy),
        ("tolerances.reality", t.reality),
        ("tolerances.interference", t.interference),
        ("tolerances.detection", t.detection),
    ] {
        positive(&mut out, name, v);
    }

    if cfg.scenario == Scenario::WhichPath {
        match &cfg.detector {
            None => out.push(finding("detector", "which-path needs a [detector] section")),
            Some(d) => {
                positive(&mut out, "detector.reduced_mass", d.reduced_mass);
                positive(&mut out, "detector.charge", d.charge);
                positive(&mut out, "detector.ionization_energy", d.ionization_energy);
                positive(&mut out, "detector.time", d.time);
                positive(&mut out, "detector.window", d.window);
                for (name, v) in [("detector.k_points", d.k_points), ("detector.theta_points", d.theta_points), ("detector.phi_points", d.phi_points)] {
                    if v == 0 {
                        out.push(finding(name, "must be at least 1"));
                    }
                }
                if out.is_empty() {
                    check_detector(cfg, d, &mut out);
                }
            }
        }
    }
    out
}

fn check_detector(cfg: &ExperimentConfig, d: &DetectorSection, out: &mut Vec<Finding>) {
    let (Ok(model), Ok(mode), Ok(atom)) = (cfg.model(), cfg.input_mode(), cfg.atom()) else {
        return;
    };
    let kappa0 = model.kappa(&mode);
    if let Err(e) = atom.check_ionizes(&model.physics, kappa0) {
        out.push(finding("detector.ionization_energy", e.to_string()));
        return;
    }
    match ChannelGrid::around_shell(&model, &atom, kappa0, d.window, d.k_points, d.theta_points, d.phi_points) {
        Err(e) => out.push(finding("detector.window", e.to_string())),
        Ok(grid) => {
            let p = &model.physics;
            let k_shell = atom.shell_wave_number(p, kappa0).unwrap_or(f64::NAN);
            // sinc lobe 2πħ/t in energy, mapped to |k| through dE/dk = ħ²k/μ
            let lobe_k = 2.0 * PI / d.time * atom.reduced_mass / (p.hbar * k_shell);
            let ppl = lobe_k / grid.k_step;
            if !(ppl >= POINTS_PER_LOBE) {
                out.push(finding("detector.k_points", format!("{ppl:.2} points per sinc lobe, need {POINTS_PER_LOBE}")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const BASE: &str = r#"
scenario = "input-only"
[geometry]
length = 6.283185307179586
cutoff = 1
[physics]
k0 = [1, 0, 0]
polarization = 2
[interferometer]
phi = 0.0
[sampling]
seed = 1
ensemble = 2
[output]
directory = "out"
"#;

    #[test]
    fn base_config_is_valid() {
        let cfg = parse_config(BASE).unwrap();
        assert_eq!(validate(&cfg), Vec::new());
        assert_eq!(cfg.physics.hbar, 1.0);
        assert_eq!(cfg.run.rtol, 1e-12);
    }

    #[test]
    fn zero_cutoff_names_the_field() {
        let cfg = parse_config(&BASE.replace("cutoff = 1", "cutoff = 0")).unwrap();
        let f = validate(&cfg);
        assert!(f.iter().any(|f| f.path == "geometry.cutoff"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(&BASE.replace("seed = 1", "seed = 1\nsede = 2")).unwrap_err();
        assert!(err[0].message.contains("sede"));
    }
}

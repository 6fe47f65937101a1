//! Vacuum-plus-one-photon wave functionals and their phase.
//!
//! A one-photon state with amplitudes `c_j` on modes of common `|k| = κ0` is
//! `Φ ∝ (Σ_j c_j q*_j) Φ0 e^{-iκ0 c t}`. Writing `H = Σ_j c̄_j q_j` for the
//! overlap, the phase function is `S = -ħ arg H - E t` and
//! `∂S/∂q_j = (iħ/2) c̄_j / H`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mode_space::{FieldConfiguration, FieldModel, ModeError, ModeIndex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("configuration sits on a node of the wave functional (|overlap| = {0:e})")]
    Node(f64),
    #[error("state is not normalized: sum |c|^2 = {0}")]
    Normalization(f64),
    #[error("mode {mode} has |k| = {kappa}, expected {kappa0}")]
    KappaMismatch { mode: ModeIndex, kappa: f64, kappa0: f64 },
    #[error("mode {0} appears in more than one beam")]
    DuplicateMode(ModeIndex),
    #[error("beam label `{0}` used twice")]
    DuplicateLabel(String),
    #[error("excited mode {0} must be the canonical member of its pair")]
    NonCanonical(ModeIndex),
    #[error("configuration has no coordinate for mode {0}")]
    MissingCoordinate(ModeIndex),
    #[error(transparent)]
    Mode(#[from] ModeError),
}

/// Which part of the interferometer a state describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Input,
    I,
    II,
    /// Produced by a circuit other than the standard two-splitter layout.
    Custom,
    /// Field left in its ground state.
    Vacuum,
}

/// One excited mode with its single-photon amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub label: String,
    pub mode: ModeIndex,
    pub amplitude: Complex64,
}

/// Single-photon superposition. Splitter factors are folded into the
/// amplitudes, so a physical state has `Σ|c|² = 1`. An empty beam list is the
/// ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonState {
    beams: Vec<Beam>,
    kappa0: f64,
    pub region: Region,
}

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

impl PhotonState {
    pub fn new(model: &FieldModel, beams: Vec<Beam>, kappa0: f64, region: Region) -> Result<Self, WaveError> {
        for (i, b) in beams.iter().enumerate() {
            if !b.mode.is_canonical() {
                return Err(WaveError::NonCanonical(b.mode));
            }
            model.ensure_in_lattice(&b.mode)?;
            let kappa = model.kappa(&b.mode);
            if (kappa - kappa0).abs() > 1e-12 * kappa0.max(1.0) {
                return Err(WaveError::KappaMismatch { mode: b.mode, kappa, kappa0 });
            }
            for other in &beams[..i] {
                if other.mode == b.mode {
                    return Err(WaveError::DuplicateMode(b.mode));
                }
                if other.label == b.label {
                    return Err(WaveError::DuplicateLabel(b.label.clone()));
                }
            }
        }
        let state = PhotonState { beams, kappa0, region };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(WaveError::Normalization(norm));
        }
        Ok(state)
    }

    /// A single photon in `mode` with unit amplitude.
    pub fn input(model: &FieldModel, label: &str, mode: ModeIndex) -> Result<Self, WaveError> {
        let kappa0 = model.kappa(&mode);
        let beam = Beam { label: label.to_string(), mode, amplitude: Complex64::new(1.0, 0.0) };
        PhotonState::new(model, vec![beam], kappa0, Region::Input)
    }

    pub fn vacuum() -> Self {
        PhotonState { beams: Vec::new(), kappa0: 0.0, region: Region::Vacuum }
    }

    pub fn is_vacuum(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn beams(&self) -> &[Beam] {
        &self.beams
    }

    pub fn beam(&self, label: &str) -> Option<&Beam> {
        self.beams.iter().find(|b| b.label == label)
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn coefficient(&self, mode: &ModeIndex) -> Complex64 {
        self.beams.iter().find(|b| b.mode == *mode).map(|b| b.amplitude).unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.beams.iter().map(|b| b.amplitude.norm_sqr()).sum()
    }

    /// `H = Σ_j c̄_j q_j`.
    pub fn overlap(&self, config: &FieldConfiguration) -> Result<Complex64, WaveError> {
        self.beams.iter().try_fold(Complex64::new(0.0, 0.0), |acc, b| {
            let q = config.get(&b.mode).ok_or(WaveError::MissingCoordinate(b.mode))?;
            Ok(acc + b.amplitude.conj() * q)
        })
    }

    fn checked_overlap(&self, model: &FieldModel, config: &FieldConfiguration) -> Result<Complex64, WaveError> {
        let h = self.overlap(config)?;
        if h.norm() < model.node_tolerance {
            return Err(WaveError::Node(h.norm()));
        }
        Ok(h)
    }

    /// Photon energy plus the cutoff zero-point sum; equals `-∂S/∂t`.
    pub fn total_energy(&self, model: &FieldModel) -> f64 {
        let photon = if self.is_vacuum() { 0.0 } else { model.physics.hbar_c() * self.kappa0 };
        photon + model.zero_point_energy()
    }

    /// Principal-branch value of `S` at `config.time`.
    pub fn phase_function(&self, model: &FieldModel, config: &FieldConfiguration) -> Result<PhaseRecord, WaveError> {
        let time_part = -self.total_energy(model) * config.time;
        if self.is_vacuum() {
            return Ok(PhaseRecord { s: time_part, arg: 0.0, grad: PhaseGradient::default() });
        }
        let h = self.checked_overlap(model, config)?;
        let hbar = model.physics.hbar;
        // arg(Σ c q*) = -arg(H)
        let arg = (-h.arg()).rem_euclid(2.0 * PI);
        Ok(PhaseRecord { s: hbar * arg + time_part, arg, grad: self.gradient_from_overlap(model, h) })
    }

    /// `∂S/∂q_j` for the excited modes; every other mode gives zero.
    pub fn grad_s(&self, model: &FieldModel, config: &FieldConfiguration) -> Result<PhaseGradient, WaveError> {
        if self.is_vacuum() {
            return Ok(PhaseGradient::default());
        }
        let h = self.checked_overlap(model, config)?;
        Ok(self.gradient_from_overlap(model, h))
    }

    fn gradient_from_overlap(&self, model: &FieldModel, h: Complex64) -> PhaseGradient {
        let pref = Complex64::new(0.0, model.physics.hbar / 2.0) / h;
        PhaseGradient { entries: self.beams.iter().map(|b| (b.mode, pref * b.amplitude.conj())).collect() }
    }

    /// Classical lattice potential `Σ_canonical κ²|q|²` (half the sum over all `±k`).
    pub fn classical_potential(model: &FieldModel, config: &FieldConfiguration) -> f64 {
        config.iter().map(|(m, q)| model.kappa(m).powi(2) * q.norm_sqr()).sum()
    }

    /// `Q = -Σ κ²|q|² + ħcκ0 + E_zp - ħ²c² N / (4|H|²)` with `N = Σ|c|²`.
    pub fn quantum_potential(&self, model: &FieldModel, config: &FieldConfiguration) -> Result<f64, WaveError> {
        let classical = Self::classical_potential(model, config);
        if self.is_vacuum() {
            return Ok(model.zero_point_energy() - classical);
        }
        let h = self.checked_overlap(model, config)?;
        let hc = model.physics.hbar_c();
        Ok(self.total_energy(model) - classical - hc * hc * self.norm_sqr() / (4.0 * h.norm_sqr()))
    }

    /// `∂Q/∂q_j = -κ_j² q*_j + ħ²c² N c̄_j H* / (4|H|⁴)` for every stored mode.
    pub fn quantum_potential_gradient(
        &self,
        model: &FieldModel,
        config: &FieldConfiguration,
    ) -> Result<BTreeMap<ModeIndex, Complex64>, WaveError> {
        let mut out: BTreeMap<ModeIndex, Complex64> =
            config.iter().map(|(m, q)| (*m, -q.conj() * model.kappa(m).powi(2))).collect();
        if self.is_vacuum() {
            return Ok(out);
        }
        let h = self.checked_overlap(model, config)?;
        let hc = model.physics.hbar_c();
        let pref = h.conj() * (hc * hc * self.norm_sqr() / (4.0 * h.norm_sqr().powi(2)));
        for b in &self.beams {
            *out.entry(b.mode).or_default() += pref * b.amplitude.conj();
        }
        Ok(out)
    }

    /// Energy from the Hamilton-Jacobi split: kinetic `Σ_± (c²/2)|∂S/∂q|²`
    /// plus lattice potential plus `Q`.
    pub fn hamilton_jacobi_energy(&self, model: &FieldModel, config: &FieldConfiguration) -> Result<f64, WaveError> {
        let grad = self.grad_s(model, config)?;
        let c2 = model.physics.c.powi(2);
        // each canonical gradient appears once for k and once (conjugated) for -k
        let kinetic: f64 = grad.iter().map(|(_, g)| c2 * g.norm_sqr()).sum();
        Ok(kinetic + Self::classical_potential(model, config) + self.quantum_potential(model, config)?)
    }

    /// Largest `|q*_j c̄_l - q*_l c̄_j|` relative to `|H|`: zero exactly when the
    /// excited coordinates are proportional to the amplitudes.
    pub fn decoupling_defect(&self, config: &FieldConfiguration) -> Result<f64, WaveError> {
        let h = self.overlap(config)?.norm();
        let mut worst: f64 = 0.0;
        for (i, a) in self.beams.iter().enumerate() {
            for b in &self.beams[i + 1..] {
                let qa = config.get(&a.mode).ok_or(WaveError::MissingCoordinate(a.mode))?;
                let qb = config.get(&b.mode).ok_or(WaveError::MissingCoordinate(b.mode))?;
                let d = qa.conj() * b.amplitude.conj() - qb.conj() * a.amplitude.conj();
                worst = worst.max(d.norm());
            }
        }
        Ok(if h > 0.0 { worst / h } else { worst })
    }

    /// Excited coordinates set on-shell, `q_j = c_j q0 e^{-iθ0}`; everything
    /// else copied from `background`.
    pub fn on_shell_configuration(&self, q0: f64, theta0: f64, background: &FieldConfiguration) -> FieldConfiguration {
        let mut cfg = background.clone();
        let a = Complex64::from_polar(q0, -theta0);
        for b in &self.beams {
            cfg.set(&b.mode, b.amplitude * a);
        }
        cfg
    }
}

/// Phase gradient over the excited modes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseGradient {
    entries: BTreeMap<ModeIndex, Complex64>,
}

impl PhaseGradient {
    /// `∂S/∂q` for any mode; the `-k` partner gets the conjugate since
    /// `q_{-k} = q*_k` and `S` is real.
    pub fn get(&self, mode: &ModeIndex) -> Complex64 {
        if mode.is_canonical() {
            self.entries.get(mode).copied().unwrap_or_default()
        } else {
            self.entries.get(&mode.partner()).map(|g| g.conj()).unwrap_or_default()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeIndex, &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    /// `S` on the principal branch of the logarithm.
    pub s: f64,
    /// `arg(Σ c q*)` folded into `[0, 2π)`.
    pub arg: f64,
    pub grad: PhaseGradient,
}

/// Removes `2π` jumps from successive principal-branch phases so `S` stays
/// continuous along a trajectory.
#[derive(Debug, Clone, Default)]
pub struct PhaseTracker {
    last: Option<f64>,
    windings: i64,
}

impl PhaseTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feed the next `arg` in `[0, 2π)` and get the unwrapped value.
    pub fn unwrap(&mut self, arg: f64) -> f64 {
        if let Some(prev) = self.last {
            let jump = arg - prev;
            if jump > PI {
                self.windings -= 1;
            } else if jump < -PI {
                self.windings += 1;
            }
        }
        self.last = Some(arg);
        arg + 2.0 * PI * self.windings as f64
    }

    pub fn windings(&self) -> i64 {
        self.windings
    }
}

/// `h_I = -iα - β e^{-iφ}`.
pub fn region_i_overlap(alpha: Complex64, beta: Complex64, phi: f64) -> Complex64 {
    -Complex64::i() * alpha - beta * Complex64::from_polar(1.0, -phi)
}

/// `h_II = -(1 + e^{-iφ}) c - i(1 - e^{-iφ}) d`.
pub fn region_ii_overlap(c: Complex64, d: Complex64, phi: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, -phi);
    -(1.0 + e) * c - Complex64::i() * (1.0 - e) * d
}

/// Photon part of the region-I quantum potential, `-ħ²c² / (2|h_I|²)`.
pub fn region_i_photon_potential(hbar_c: f64, h: Complex64) -> f64 {
    -hbar_c * hbar_c / (2.0 * h.norm_sqr())
}

/// Photon part of the region-II quantum potential, `-ħ²c² / |h_II|²`.
pub fn region_ii_photon_potential(hbar_c: f64, h: Complex64) -> f64 {
    -hbar_c * hbar_c / h.norm_sqr()
}

//! First-order photoionization of a hydrogen-like atom placed in one arm.
//!
//! The interaction `-(e/μc) A·p` takes the one-photon field to the ground
//! state and the atom from `1s` to a box-normalized plane wave `e^{ik·x}/√V`.
//! In the dipole approximation the matrix element factorizes into
//! `-(e/μc) √(ħc/2V) · F · D` with the field factor `F = Σ_j c_j/√κ_j` and the
//! dipole factor `D = (ħ/√(Vπa³)) (ε·k) 8πa³/(1 + a²k²)²`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::FockState;
use crate::mode_space::{FieldModel, Physics};
use crate::wavefunctional::PhotonState;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectionError {
    #[error("atom parameter {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("quantum energy {photon} does not exceed the ionization energy {ionization}")]
    CannotIonize { photon: f64, ionization: f64 },
    #[error("the vacuum carries no quantum to absorb")]
    NoPhoton,
    #[error("channel grid too coarse: {points_per_lobe:.2} points per sinc lobe, need {required}")]
    Resolution { points_per_lobe: f64, required: f64 },
    #[error("channel grid is empty or inverted")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorSite {
    C1,
    D1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorAtom {
    pub reduced_mass: f64,
    pub charge: f64,
    pub ionization_energy: f64,
    pub site: DetectorSite,
}

impl DetectorAtom {
    pub fn new(reduced_mass: f64, charge: f64, ionization_energy: f64, site: DetectorSite) -> Result<Self, DetectionError> {
        for (name, value) in [("reduced_mass", reduced_mass), ("charge", charge), ("ionization_energy", ionization_energy)] {
            if !(value > 0.0) {
                return Err(DetectionError::NonPositive { name, value });
            }
        }
        Ok(DetectorAtom { reduced_mass, charge, ionization_energy, site })
    }

    /// Hydrogen in Heaviside-Lorentz natural units: `μ = 1`, `e² = 4π`, so
    /// `a = 1` and `E_ei = 1/2` when `ħ = 1`.
    pub fn hydrogen(site: DetectorSite) -> Self {
        DetectorAtom { reduced_mass: 1.0, charge: (4.0 * PI).sqrt(), ionization_energy: 0.5, site }
    }

    /// Bohr radius `4πħ²/(μ e²)`.
    pub fn bohr_radius(&self, physics: &Physics) -> f64 {
        4.0 * PI * physics.hbar.powi(2) / (self.reduced_mass * self.charge.powi(2))
    }

    pub fn check_ionizes(&self, physics: &Physics, kappa0: f64) -> Result<(), DetectionError> {
        let photon = physics.hbar_c() * kappa0;
        if photon > self.ionization_energy {
            Ok(())
        } else {
            Err(DetectionError::CannotIonize { photon, ionization: self.ionization_energy })
        }
    }

    /// Electron wave number on the energy shell, `ħ²k²/2μ = ħcκ0 - E_ei`.
    pub fn shell_wave_number(&self, physics: &Physics, kappa0: f64) -> Result<f64, DetectionError> {
        self.check_ionizes(physics, kappa0)?;
        Ok((2.0 * self.reduced_mass * (physics.hbar_c() * kappa0 - self.ionization_energy)).sqrt() / physics.hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectronChannel {
    pub wave_vector: Vector3<f64>,
}

impl ElectronChannel {
    pub fn new(wave_vector: Vector3<f64>) -> Self {
        ElectronChannel { wave_vector }
    }

    pub fn kinetic_energy(&self, atom: &DetectorAtom, physics: &Physics) -> f64 {
        (physics.hbar * self.wave_vector.norm()).powi(2) / (2.0 * atom.reduced_mass)
    }

    /// `E_en + E_ei - ħcκ0`, final minus initial energy. The zero-point sum
    /// appears on both sides and drops out.
    pub fn energy_mismatch(&self, atom: &DetectorAtom, physics: &Physics, kappa0: f64) -> f64 {
        self.kinetic_energy(atom, physics) + atom.ionization_energy - physics.hbar_c() * kappa0
    }
}

/// `⟨0| Σ_j a_j/√κ_j |Φ⟩ = Σ_j c_j/√κ_j`. Only the vacuum is reachable.
pub fn field_matrix_factor(model: &FieldModel, state: &PhotonState) -> Result<Complex64, DetectionError> {
    if state.is_vacuum() {
        return Err(DetectionError::NoPhoton);
    }
    Ok(state.beams().iter().map(|b| b.amplitude / model.kappa(&b.mode).sqrt()).sum())
}

/// `(ħ/√(Vπa³)) (ε·k) 8πa³/(1 + a²k²)²`.
pub fn dipole_matrix_factor(
    model: &FieldModel,
    atom: &DetectorAtom,
    channel: &ElectronChannel,
    polarization: &Vector3<f64>,
) -> f64 {
    let a = atom.bohr_radius(&model.physics);
    let k = channel.wave_vector;
    let norm = model.physics.hbar / (model.volume() * PI * a.powi(3)).sqrt();
    norm * polarization.dot(&k) * 8.0 * PI * a.powi(3) / (1.0 + a * a * k.norm_squared()).powi(2)
}

/// Polarization shared by the beams of `state`; the dipole factor assumes one.
pub fn common_polarization(state: &PhotonState) -> Result<Vector3<f64>, DetectionError> {
    state.beams().first().map(|b| b.mode.polarization()).ok_or(DetectionError::NoPhoton)
}

/// `H = -(e/μc) √(ħc/2V) · F · D`.
pub fn interaction_matrix_element(
    model: &FieldModel,
    atom: &DetectorAtom,
    channel: &ElectronChannel,
    state: &PhotonState,
) -> Result<Complex64, DetectionError> {
    let f = field_matrix_factor(model, state)?;
    let d = dipole_matrix_factor(model, atom, channel, &common_polarization(state)?);
    let p = &model.physics;
    let pref = -(atom.charge / (atom.reduced_mass * p.c)) * (p.hbar_c() / (2.0 * model.volume())).sqrt();
    Ok(f * (pref * d))
}

/// `a⁽¹⁾(t) = H (1 - e^{iΔE t/ħ}) / ΔE`, written as
/// `-i(t/ħ) H e^{ix/2} sinc(x/2)` with `x = ΔE t/ħ` so the on-shell limit is exact.
pub fn transition_amplitude(
    model: &FieldModel,
    atom: &DetectorAtom,
    channel: &ElectronChannel,
    state: &PhotonState,
    t: f64,
) -> Result<Complex64, DetectionError> {
    let h = interaction_matrix_element(model, atom, channel, state)?;
    let hbar = model.physics.hbar;
    let x = channel.energy_mismatch(atom, &model.physics, state.kappa0()) * t / hbar;
    Ok(h * Complex64::new(0.0, -t / hbar) * Complex64::from_polar(1.0, x / 2.0) * sinc(x / 2.0))
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Spherical product grid of outgoing wave vectors: midpoint rule in `|k|`,
/// `cos θ` and azimuth, with the box density of states `V/(2π)³` folded into
/// the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGrid {
    pub channels: Vec<ElectronChannel>,
    pub weights: Vec<f64>,
    pub k_step: f64,
}

impl ChannelGrid {
    pub fn spherical(
        model: &FieldModel,
        k_min: f64,
        k_max: f64,
        n_k: usize,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Self, DetectionError> {
        if !(k_max > k_min) || k_min < 0.0 || n_k == 0 || n_theta == 0 || n_phi == 0 {
            return Err(DetectionError::EmptyGrid);
        }
        let dk = (k_max - k_min) / n_k as f64;
        let dmu = 2.0 / n_theta as f64;
        let dphi = 2.0 * PI / n_phi as f64;
        let dos = model.volume() / (2.0 * PI).powi(3);
        let mut channels = Vec::with_capacity(n_k * n_theta * n_phi);
        let mut weights = Vec::with_capacity(channels.capacity());
        for i in 0..n_k {
            let k = k_min + (i as f64 + 0.5) * dk;
            for j in 0..n_theta {
                let mu = -1.0 + (j as f64 + 0.5) * dmu;
                let s = (1.0 - mu * mu).sqrt();
                for l in 0..n_phi {
                    let ph = (l as f64 + 0.5) * dphi;
                    channels.push(ElectronChannel::new(Vector3::new(s * ph.cos(), s * ph.sin(), mu) * k));
                    weights.push(dos * k * k * dk * dmu * dphi);
                }
            }
        }
        Ok(ChannelGrid { channels, weights, k_step: dk })
    }

    /// Grid centred on the energy shell, covering `±window` in electron energy.
    pub fn around_shell(
        model: &FieldModel,
        atom: &DetectorAtom,
        kappa0: f64,
        window: f64,
        n_k: usize,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Self, DetectionError> {
        let p = &model.physics;
        let e_shell = p.hbar_c() * kappa0 - atom.ionization_energy;
        atom.check_ionizes(p, kappa0)?;
        let k_of = |e: f64| (2.0 * atom.reduced_mass * e.max(0.0)).sqrt() / p.hbar;
        Self::spherical(model, k_of(e_shell - window), k_of(e_shell + window), n_k, n_theta, n_phi)
    }
}

/// Minimum grid points across one sinc lobe `2πħ/t` on the shell.
pub const POINTS_PER_LOBE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionReport {
    pub time: f64,
    pub amplitudes: Vec<Complex64>,
    /// `|a⁽¹⁾|²` per channel, before the channel weight.
    pub density: Vec<f64>,
    pub total: f64,
    pub points_per_lobe: f64,
    /// Whether the total stays below 0.1, where first order can be trusted.
    pub perturbative: bool,
}

pub fn absorption_probability(
    model: &FieldModel,
    atom: &DetectorAtom,
    grid: &ChannelGrid,
    state: &PhotonState,
    t: f64,
) -> Result<AbsorptionReport, DetectionError> {
    let p = &model.physics;
    let k_shell = atom.shell_wave_number(p, state.kappa0())?;
    // lobe width in |k| from dE/dk = ħ²k/μ
    let lobe_k = 2.0 * PI * p.hbar / t / (p.hbar * p.hbar * k_shell / atom.reduced_mass);
    let points_per_lobe = lobe_k / grid.k_step;
    if points_per_lobe < POINTS_PER_LOBE {
        return Err(DetectionError::Resolution { points_per_lobe, required: POINTS_PER_LOBE });
    }
    let amplitudes: Vec<Complex64> = grid
        .channels
        .par_iter()
        .map(|ch| transition_amplitude(model, atom, ch, state, t))
        .collect::<Result<_, _>>()?;
    let density: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let total = density.iter().zip(&grid.weights).map(|(d, w)| d * w).sum::<f64>();
    Ok(AbsorptionReport { time: t, amplitudes, density, total, points_per_lobe, perturbative: total < 0.1 })
}

/// State after the interaction branch: the field has given up its whole
/// quantum and sits in the ground state; the electron leaves as a plane wave.
#[derive(Debug, Clone, PartialEq)]
pub struct PostAbsorption {
    pub field: FockState,
    pub field_state: PhotonState,
    pub electron: ElectronChannel,
}

pub fn post_absorption_state(state: &PhotonState, channel: ElectronChannel) -> Result<PostAbsorption, DetectionError> {
    if state.is_vacuum() {
        return Err(DetectionError::NoPhoton);
    }
    Ok(PostAbsorption { field: FockState::vacuum(), field_state: PhotonState::vacuum(), electron: channel })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub site: DetectorSite,
    pub absorption: AbsorptionReport,
    pub post: PostAbsorption,
}

/// Absorption over `grid` plus the post-absorption record for the channel
/// with the largest density.
pub fn detect(
    model: &FieldModel,
    atom: &DetectorAtom,
    grid: &ChannelGrid,
    state: &PhotonState,
    t: f64,
) -> Result<DetectionResult, DetectionError> {
    let absorption = absorption_probability(model, atom, grid, state, t)?;
    let best = absorption
        .density
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or(DetectionError::EmptyGrid)?;
    let post = post_absorption_state(state, grid.channels[best])?;
    Ok(DetectionResult { site: atom.site, absorption, post })
}

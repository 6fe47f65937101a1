//! Integration constants of the on-shell solutions, `q*_b(t) = b0 e^{i(ω t + φ_b)}`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::CircuitDescription;
use super::pipeline::{run_circuit, MziLayout};
use super::OpticsError;
use crate::mode_space::{FieldModel, ModeIndex, Physics};
use crate::wavefunctional::Region;

/// Below this `|cos(φ/2)|` or `|sin(φ/2)|` the output beam counts as extinguished.
pub const EXTINCTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamConstants {
    pub label: String,
    pub mode: ModeIndex,
    /// Signed amplitude; `d0 = -q0 sin(φ/2)` is negative for `0 < φ < 2π`.
    pub amplitude: f64,
    pub phase: f64,
    /// Nonclassical frequency; `None` for an extinguished beam.
    pub omega: Option<f64>,
}

impl BeamConstants {
    pub fn is_extinct(&self) -> bool {
        self.omega.is_none()
    }

    /// `q*_b(t)`.
    pub fn conj_coordinate(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.omega.unwrap_or(0.0) * t + self.phase)
    }

    /// `q*_b(0)` as one complex number, independent of the sign convention.
    pub fn initial_conj(&self) -> Complex64 {
        self.conj_coordinate(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionConstants {
    pub region: Region,
    pub beams: Vec<BeamConstants>,
}

impl RegionConstants {
    pub fn beam(&self, label: &str) -> Option<&BeamConstants> {
        self.beams.iter().find(|b| b.label == label)
    }

    /// Rotation frequency shared by the live beams.
    pub fn omega(&self) -> Option<f64> {
        self.beams.iter().find_map(|b| b.omega)
    }
}

/// Constants for all three regions from the input amplitude and phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantSet {
    pub q0: f64,
    pub theta0: f64,
    pub phi: f64,
    pub omega0: f64,
    pub input: RegionConstants,
    pub region_i: RegionConstants,
    pub region_ii: RegionConstants,
}

fn wrap_angle(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

impl ConstantSet {
    pub fn region(&self, region: Region) -> Option<&RegionConstants> {
        match region {
            Region::Input => Some(&self.input),
            Region::I => Some(&self.region_i),
            Region::II => Some(&self.region_ii),
            _ => None,
        }
    }

    fn get(&self, region: &RegionConstants, label: &str) -> BeamConstants {
        region.beam(label).cloned().expect("standard beam labels present")
    }

    /// Defect of `α0 = β0` and `σ0 = τ0 + φ + π/2`.
    pub fn region_i_relation_defect(&self) -> f64 {
        let (a, b) = (self.get(&self.region_i, "alpha"), self.get(&self.region_i, "beta"));
        (a.amplitude - b.amplitude).abs().max(wrap_angle(a.phase - b.phase - self.phi - FRAC_PI_2).abs())
    }

    /// Defect of `d0 = -c0 tan(φ/2)` and `χ0 = ξ0`; the amplitude relation is
    /// skipped when `c0` is extinguished.
    pub fn region_ii_relation_defect(&self) -> f64 {
        let (c, d) = (self.get(&self.region_ii, "c"), self.get(&self.region_ii, "d"));
        let amp = if c.is_extinct() { 0.0 } else { (d.amplitude + c.amplitude * (self.phi / 2.0).tan()).abs() };
        amp.max(wrap_angle(c.phase - d.phase).abs())
    }

    /// Defect of the relations linking every region to `(q0, θ0)`.
    pub fn cross_region_defect(&self) -> f64 {
        let (q0, th, phi) = (self.q0, self.theta0, self.phi);
        let a = self.get(&self.region_i, "alpha");
        let b = self.get(&self.region_i, "beta");
        let c = self.get(&self.region_ii, "c");
        let d = self.get(&self.region_ii, "d");
        [
            (a.amplitude - q0 * FRAC_1_SQRT_2).abs(),
            (b.amplitude - q0 * FRAC_1_SQRT_2).abs(),
            wrap_angle(a.phase - (th - FRAC_PI_2)).abs(),
            wrap_angle(b.phase - (th - phi - PI)).abs(),
            (c.amplitude - q0 * (phi / 2.0).cos()).abs(),
            (d.amplitude + q0 * (phi / 2.0).sin()).abs(),
            wrap_angle(c.phase - (th - phi / 2.0 - PI)).abs(),
            wrap_angle(d.phase - (th - phi / 2.0 - PI)).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `ω0` followed by the frequencies of every live beam.
    pub fn frequency_chain(&self) -> Vec<f64> {
        std::iter::once(self.omega0)
            .chain([&self.input, &self.region_i, &self.region_ii].into_iter().flat_map(|r| r.beams.iter().filter_map(|b| b.omega)))
            .collect()
    }
}

/// Constants of the standard interferometer from the input amplitude `q0` and phase `θ0`.
pub fn match_constants(
    layout: &MziLayout,
    physics: &Physics,
    q0: f64,
    theta0: f64,
    phi: f64,
) -> Result<ConstantSet, OpticsError> {
    if !(q0 > 0.0 && q0.is_finite()) {
        return Err(OpticsError::NonPositiveAmplitude(q0));
    }
    let hc2 = physics.hbar * physics.c * physics.c;
    let omega0 = hc2 / (2.0 * q0 * q0);
    let beam = |label: &str, mode, amplitude: f64, phase: f64, omega| BeamConstants {
        label: label.to_string(),
        mode,
        amplitude,
        phase,
        omega,
    };

    let input = RegionConstants { region: Region::Input, beams: vec![beam("in", layout.input, q0, theta0, Some(omega0))] };

    let alpha0 = q0 * FRAC_1_SQRT_2;
    let beta0 = alpha0;
    let region_i = RegionConstants {
        region: Region::I,
        beams: vec![
            beam("alpha", layout.alpha(), alpha0, theta0 - FRAC_PI_2, Some(hc2 / (4.0 * alpha0 * alpha0))),
            beam("beta", layout.beta(), beta0, theta0 - phi - PI, Some(hc2 / (4.0 * beta0 * beta0))),
        ],
    };

    let (s, c) = (phi / 2.0).sin_cos();
    let chi0 = theta0 - phi / 2.0 - PI;
    // ω_c = ħc²(1 + cos φ)/4c0² and ω_d = ħc²(1 - cos φ)/4d0², written with
    // half angles so they stay accurate near extinction
    let (c0, omega_c) = if c.abs() < EXTINCTION_TOLERANCE {
        (0.0, None)
    } else {
        let c0 = q0 * c;
        (c0, Some(hc2 * 2.0 * c * c / (4.0 * c0 * c0)))
    };
    let (d0, omega_d) = if s.abs() < EXTINCTION_TOLERANCE {
        (0.0, None)
    } else {
        let d0 = -q0 * s;
        (d0, Some(hc2 * 2.0 * s * s / (4.0 * d0 * d0)))
    };
    let region_ii = RegionConstants {
        region: Region::II,
        beams: vec![beam("c", layout.c(), c0, chi0, omega_c), beam("d", layout.d(), d0, chi0, omega_d)],
    };

    Ok(ConstantSet { q0, theta0, phi, omega0, input, region_i, region_ii })
}

/// Constants read off by pushing the on-shell input coordinate through the
/// circuit: a beam with amplitude `c_b` starts at `q*_b(0) = c̄_b q0 e^{iθ0}`
/// and rotates at `ħc²|c_b|²/(2|q_b|²)`.
pub fn trace_constants(
    model: &FieldModel,
    circuit: &CircuitDescription,
    input_mode: ModeIndex,
    q0: f64,
    theta0: f64,
    phi: f64,
) -> Result<Vec<RegionConstants>, OpticsError> {
    if !(q0 > 0.0 && q0.is_finite()) {
        return Err(OpticsError::NonPositiveAmplitude(q0));
    }
    let hc2 = model.physics.hbar * model.physics.c.powi(2);
    let run = run_circuit(model, circuit, input_mode, phi)?;
    Ok(run
        .stages
        .iter()
        .map(|state| RegionConstants {
            region: state.region,
            beams: state
                .beams()
                .iter()
                .map(|b| {
                    let z = b.amplitude.conj() * Complex64::from_polar(q0, theta0);
                    let live = b.amplitude.norm() >= EXTINCTION_TOLERANCE;
                    BeamConstants {
                        label: b.label.clone(),
                        mode: b.mode,
                        amplitude: if live { z.norm() } else { 0.0 },
                        phase: z.arg(),
                        omega: live.then(|| hc2 * b.amplitude.norm_sqr() / (2.0 * z.norm_sqr())),
                    }
                })
                .collect(),
        })
        .collect())
}

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::rk45::{solve, Dopri5Options, IntegratorError, Stats};
use super::DynamicsError;
use crate::mode_space::{FieldConfiguration, FieldModel, ModeIndex};
use crate::wavefunctional::{PhotonState, Region, WaveError};

/// Relative decoupling defect above which initial data counts as off-shell.
pub const OFF_SHELL_TOLERANCE: f64 = 1e-10;

/// `dq*/dt = c² ∂S/∂q` for every stored mode; background modes get zero.
pub fn guidance_rhs(
    model: &FieldModel,
    state: &PhotonState,
    config: &FieldConfiguration,
) -> Result<BTreeMap<ModeIndex, Complex64>, WaveError> {
    let grad = state.grad_s(model, config)?;
    let c2 = model.physics.c.powi(2);
    Ok(config.iter().map(|(m, _)| (*m, grad.get(m) * c2)).collect())
}

/// Rotation frequency `ħc²N / (2|H|²)` of the overlap `H`; `|H|` is a
/// constant of the motion, so this holds along the whole trajectory.
pub fn guidance_frequency(model: &FieldModel, state: &PhotonState, config: &FieldConfiguration) -> Result<f64, WaveError> {
    let h = state.overlap(config)?;
    if h.norm() < model.node_tolerance {
        return Err(WaveError::Node(h.norm()));
    }
    Ok(model.physics.hbar * model.physics.c.powi(2) * state.norm_sqr() / (2.0 * h.norm_sqr()))
}

pub fn guidance_period(model: &FieldModel, state: &PhotonState, config: &FieldConfiguration) -> Result<f64, WaveError> {
    Ok(2.0 * PI / guidance_frequency(model, state, config)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub rtol: f64,
    pub atol: f64,
    /// Defaults to a fiftieth of the guidance period.
    pub max_step: Option<f64>,
    pub min_step: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Controls { rtol: 1e-10, atol: 1e-14, max_step: None, min_step: 1e-14 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Hamilton-Jacobi energy, kinetic plus lattice plus quantum potential.
    pub energy: f64,
    pub quantum_potential: f64,
    /// `|H|`, the distance from the node set.
    pub node_distance: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub region: Region,
    pub times: Vec<f64>,
    pub configs: Vec<FieldConfiguration>,
    pub diagnostics: Vec<Diagnostics>,
    /// Relative decoupling defect of the initial data.
    pub decoupling_defect: f64,
    pub off_shell: bool,
    pub stats: Stats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self, mode: &ModeIndex) -> Vec<Complex64> {
        self.configs.iter().map(|c| c.get(mode).unwrap_or_default()).collect()
    }

    /// Largest `|q - q_ref| / |q_ref|` over times and `modes`.
    pub fn max_relative_deviation(&self, reference: &Trajectory, modes: &[ModeIndex]) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.configs.iter().zip(&reference.configs) {
            for m in modes {
                let (qa, qb) = (a.get(m).unwrap_or_default(), b.get(m).unwrap_or_default());
                let scale = qb.norm();
                let d = (qa - qb).norm();
                worst = worst.max(if scale > 0.0 { d / scale } else { d });
            }
        }
        worst
    }
}

pub(crate) fn diagnostics(
    model: &FieldModel,
    state: &PhotonState,
    config: &FieldConfiguration,
) -> Result<Diagnostics, WaveError> {
    Ok(Diagnostics {
        energy: state.hamilton_jacobi_energy(model, config)?,
        quantum_potential: state.quantum_potential(model, config)?,
        node_distance: state.overlap(config)?.norm(),
    })
}

/// Evenly spaced sample times from `t0` to `t_end` inclusive.
pub fn uniform_times(t0: f64, t_end: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n).map(|i| t0 + (t_end - t0) * i as f64 / (n - 1) as f64).collect()
}

/// Integrate the guidance flow from `config0` to `t_end`, sampling `samples`
/// evenly spaced times.
pub fn integrate(
    model: &FieldModel,
    state: &PhotonState,
    config0: &FieldConfiguration,
    t_end: f64,
    samples: usize,
    controls: &Controls,
) -> Result<Trajectory, DynamicsError> {
    if !(t_end > config0.time) {
        return Err(DynamicsError::BadTimeGrid(format!("t_end = {t_end} must exceed t0 = {}", config0.time)));
    }
    integrate_at(model, state, config0, &uniform_times(config0.time, t_end, samples), controls)
}

/// Integrate and sample at the given ascending `times` (the first may equal `t0`).
pub fn integrate_at(
    model: &FieldModel,
    state: &PhotonState,
    config0: &FieldConfiguration,
    times: &[f64],
    controls: &Controls,
) -> Result<Trajectory, DynamicsError> {
    let t0 = config0.time;
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < t0) {
        return Err(DynamicsError::BadTimeGrid("sample times must increase from t0".into()));
    }
    if state.is_vacuum() {
        // the ground state drives no motion at all
        let configs: Vec<FieldConfiguration> =
            times.iter().map(|&t| {
                let mut c = config0.clone();
                c.time = t;
                c
            }).collect();
        let diagnostics = configs.iter().map(|c| diagnostics(model, state, c)).collect::<Result<_, _>>()?;
        return Ok(Trajectory {
            region: state.region,
            times: times.to_vec(),
            configs,
            diagnostics,
            decoupling_defect: 0.0,
            off_shell: false,
            stats: Stats::default(),
        });
    }
    let decoupling_defect = state.decoupling_defect(config0)?;
    let period = guidance_period(model, state, config0).map_err(|e| match e {
        WaveError::Node(h) => DynamicsError::Node { t: t0, overlap: h },
        other => other.into(),
    })?;

    let beams: Vec<(ModeIndex, Complex64)> = state.beams().iter().map(|b| (b.mode, b.amplitude)).collect();
    let mut y0 = Vec::with_capacity(2 * beams.len());
    for (m, _) in &beams {
        let q = config0.get(m).ok_or(WaveError::MissingCoordinate(*m))?;
        y0.extend([q.re, q.im]);
    }

    let hbar_c2 = model.physics.hbar * model.physics.c.powi(2);
    let node_tol = model.node_tolerance;
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), f64> {
        let h: Complex64 = beams.iter().enumerate().map(|(j, (_, c))| c.conj() * Complex64::new(y[2 * j], y[2 * j + 1])).sum();
        if h.norm() < node_tol {
            return Err(h.norm());
        }
        // dq/dt = conj(c² ∂S/∂q) = -(iħc²/2) c_j / H*
        let pref = Complex64::new(0.0, -hbar_c2 / 2.0) / h.conj();
        for (j, (_, c)) in beams.iter().enumerate() {
            let v = pref * c;
            dy[2 * j] = v.re;
            dy[2 * j + 1] = v.im;
        }
        Ok(())
    };
    let opts = Dopri5Options {
        rtol: controls.rtol,
        atol: controls.atol,
        max_step: controls.max_step.unwrap_or(period / 50.0),
        min_step: controls.min_step,
        ..Default::default()
    };
    let (ys, stats) = solve(rhs, t0, &y0, times, &opts).map_err(|e| match e {
        IntegratorError::Rhs { t, source } => DynamicsError::Node { t, overlap: source },
        IntegratorError::StepUnderflow { t, h } => DynamicsError::StepUnderflow { t, h },
        IntegratorError::StepLimit(t) => DynamicsError::StepLimit(t),
    })?;

    let mut configs = Vec::with_capacity(times.len());
    let mut diags = Vec::with_capacity(times.len());
    for (y, &t) in ys.iter().zip(times) {
        let mut cfg = config0.clone();
        cfg.time = t;
        for (j, (m, _)) in beams.iter().enumerate() {
            cfg.set(m, Complex64::new(y[2 * j], y[2 * j + 1]));
        }
        diags.push(diagnostics(model, state, &cfg)?);
        configs.push(cfg);
    }
    Ok(Trajectory {
        region: state.region,
        times: times.to_vec(),
        configs,
        diagnostics: diags,
        decoupling_defect,
        off_shell: decoupling_defect > OFF_SHELL_TOLERANCE,
        stats,
    })
}

//! Closed-form on-shell solutions used as oracles for the integrator.

use super::guidance::{diagnostics, Trajectory};
use super::rk45::Stats;
use super::DynamicsError;
use crate::mode_space::{FieldConfiguration, FieldModel};
use crate::optics::RegionConstants;
use crate::wavefunctional::PhotonState;

/// Configuration at `t`: every live beam follows `q*_b(t) = b0 e^{i(ω t + φ_b)}`,
/// everything else (background modes and extinguished beams) stays at its
/// value in `background`.
pub fn analytic_solution(constants: &RegionConstants, background: &FieldConfiguration, t: f64) -> FieldConfiguration {
    let mut cfg = background.clone();
    cfg.time = t;
    for b in constants.beams.iter().filter(|b| !b.is_extinct()) {
        cfg.set(&b.mode, b.conj_coordinate(t).conj());
    }
    cfg
}

/// Configuration at `t = 0` matching the constants.
pub fn initial_configuration(constants: &RegionConstants, background: &FieldConfiguration) -> FieldConfiguration {
    analytic_solution(constants, background, 0.0)
}

/// Analytic solution sampled at `times`.
pub fn analytic_trajectory(
    model: &FieldModel,
    state: &PhotonState,
    constants: &RegionConstants,
    background: &FieldConfiguration,
    times: &[f64],
) -> Result<Trajectory, DynamicsError> {
    let configs: Vec<FieldConfiguration> = times.iter().map(|&t| analytic_solution(constants, background, t)).collect();
    let diagnostics = configs.iter().map(|c| diagnostics(model, state, c)).collect::<Result<Vec<_>, _>>()?;
    let decoupling_defect = match configs.first() {
        Some(c) => state.decoupling_defect(c)?,
        None => 0.0,
    };
    Ok(Trajectory {
        region: constants.region,
        times: times.to_vec(),
        configs,
        diagnostics,
        decoupling_defect,
        off_shell: false,
        stats: Stats::default(),
    })
}

/// On-shell solution for any one-photon state, `q_j(t) = c_j q0 e^{-i(ω0 t + θ0)}`
/// with `ω0 = ħc²/(2 q0²)`.
pub fn on_shell_solution(
    model: &FieldModel,
    state: &PhotonState,
    q0: f64,
    theta0: f64,
    background: &FieldConfiguration,
    t: f64,
) -> FieldConfiguration {
    let omega0 = model.physics.hbar * model.physics.c.powi(2) * state.norm_sqr() / (2.0 * q0 * q0);
    let mut cfg = state.on_shell_configuration(q0, theta0 + omega0 * t, background);
    cfg.time = t;
    cfg
}

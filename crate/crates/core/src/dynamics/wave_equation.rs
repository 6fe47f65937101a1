//! Second-order form of the guidance flow, `(1/c²) q*'' + κ² q* + ∂Q/∂q = 0`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::guidance::Trajectory;
use super::DynamicsError;
use crate::mode_space::{FieldModel, ModeIndex};
use crate::wavefunctional::{region_i_overlap, region_ii_overlap, PhotonState};

#[derive(Debug, Clone)]
pub struct WaveResidual {
    /// Interior times where the five-point stencil applies.
    pub times: Vec<f64>,
    pub per_mode: BTreeMap<ModeIndex, Vec<Complex64>>,
    /// Largest `|residual|`.
    pub max_abs: f64,
    /// Largest `|residual|` divided by `|q*''|/c² + |κ² q*| + |∂Q/∂q|`.
    pub max_relative: f64,
}

/// Evaluate the residual along a trajectory with uniformly spaced samples.
pub fn wave_equation_residual(
    model: &FieldModel,
    state: &PhotonState,
    trajectory: &Trajectory,
) -> Result<WaveResidual, DynamicsError> {
    let n = trajectory.len();
    if n < 5 {
        return Err(DynamicsError::InsufficientPoints(n));
    }
    let h = trajectory.times[1] - trajectory.times[0];
    if trajectory.times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs()) {
        return Err(DynamicsError::BadTimeGrid("wave-equation residual needs uniform spacing".into()));
    }
    let c2 = model.physics.c.powi(2);
    let modes: Vec<ModeIndex> = trajectory.configs[0].iter().map(|(m, _)| *m).collect();
    let series: Vec<Vec<Complex64>> = modes.iter().map(|m| trajectory.series(m).iter().map(|q| q.conj()).collect()).collect();

    let mut per_mode: BTreeMap<ModeIndex, Vec<Complex64>> = modes.iter().map(|m| (*m, Vec::new())).collect();
    let mut times = Vec::new();
    let (mut max_abs, mut max_relative) = (0.0f64, 0.0f64);
    for i in 2..n - 2 {
        times.push(trajectory.times[i]);
        let dq = state.quantum_potential_gradient(model, &trajectory.configs[i])?;
        for (m, s) in modes.iter().zip(&series) {
            let second = (-s[i + 2] + 16.0 * s[i + 1] - 30.0 * s[i] + 16.0 * s[i - 1] - s[i - 2]) / (12.0 * h * h);
            let quantum = dq.get(m).copied().unwrap_or_default();
            let lattice = s[i] * model.kappa(m).powi(2);
            let r = second / c2 + lattice + quantum;
            let scale = second.norm() / c2 + lattice.norm() + quantum.norm();
            max_abs = max_abs.max(r.norm());
            if scale > 0.0 {
                max_relative = max_relative.max(r.norm() / scale);
            }
            per_mode.get_mut(m).expect("mode listed").push(r);
        }
    }
    Ok(WaveResidual { times, per_mode, max_abs, max_relative })
}

/// Region-I right-hand sides `((1/c²)α'', (1/c²)β'')`:
/// `-ħ²c²[α - iβe^{-iφ}] / 2|h_I|⁴` and `-ħ²c²[β + iαe^{iφ}] / 2|h_I|⁴`.
pub fn region_i_wave_rhs(hbar_c: f64, alpha: Complex64, beta: Complex64, phi: f64) -> (Complex64, Complex64) {
    let h2 = region_i_overlap(alpha, beta, phi).norm_sqr();
    let pref = -hbar_c * hbar_c / (2.0 * h2 * h2);
    let i = Complex64::i();
    (
        (alpha - i * beta * Complex64::from_polar(1.0, -phi)) * pref,
        (beta + i * alpha * Complex64::from_polar(1.0, phi)) * pref,
    )
}

/// Region-II right-hand sides `((1/c²)c'', (1/c²)d'')`:
/// `-2ħ²c²[(1 + cos φ)c - sin φ d] / |h_II|⁴` and
/// `-2ħ²c²[-sin φ c + (1 - cos φ)d] / |h_II|⁴`.
pub fn region_ii_wave_rhs(hbar_c: f64, c: Complex64, d: Complex64, phi: f64) -> (Complex64, Complex64) {
    let h2 = region_ii_overlap(c, d, phi).norm_sqr();
    let pref = -2.0 * hbar_c * hbar_c / (h2 * h2);
    let (s, co) = phi.sin_cos();
    (((1.0 + co) * c - s * d) * pref, (-s * c + (1.0 - co) * d) * pref)
}

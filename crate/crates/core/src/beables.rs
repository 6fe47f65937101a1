//! Field beables evaluated from a configuration and the phase gradient.
//!
//! Over the full lattice (both signs of `k`):
//! `A = V^{-1/2} Σ ε q e^{ik·x}`, `E = -(c/√V) Σ ε ∂S/∂q e^{-ik·x}`,
//! `B = ∇×A`, `I = c E×B`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::analytic_solution;
use crate::fock::FockState;
use crate::mode_space::{FieldConfiguration, FieldModel, ModeIndex};
use crate::optics::RegionConstants;
use crate::wavefunctional::{PhotonState, WaveError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeableError {
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
    #[error("region constants have no live beam")]
    NoLiveBeam,
    #[error("beams do not share one polarization vector")]
    MixedPolarization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldValues {
    pub a: Vector3<f64>,
    pub e: Vector3<f64>,
    pub b: Vector3<f64>,
    pub i: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub time: f64,
    pub points: Vec<Vector3<f64>>,
    pub values: Vec<FieldValues>,
    /// Largest imaginary part left over from the complex mode sums.
    pub max_imaginary: f64,
}

fn re_im(v: Vector3<Complex64>) -> (Vector3<f64>, f64) {
    (v.map(|z| z.re), v.iter().map(|z| z.im.abs()).fold(0.0, f64::max))
}

/// A, E, B, I at one point, plus the largest imaginary residue.
pub fn evaluate_at(
    model: &FieldModel,
    state: &PhotonState,
    config: &FieldConfiguration,
    x: &Vector3<f64>,
) -> Result<(FieldValues, f64), BeableError> {
    let grad = state.grad_s(model, config)?;
    Ok(evaluate_with_gradient(model, config, &grad, x))
}

fn evaluate_with_gradient(
    model: &FieldModel,
    config: &FieldConfiguration,
    grad: &crate::wavefunctional::PhaseGradient,
    x: &Vector3<f64>,
) -> (FieldValues, f64) {
    let norm = model.volume().sqrt().recip();
    let c = model.physics.c;
    let mut a = Vector3::<Complex64>::zeros();
    let mut e = Vector3::<Complex64>::zeros();
    let mut b = Vector3::<Complex64>::zeros();
    for (m, q) in config.full_lattice() {
        let k = model.wave_vector(&m);
        let eps = m.polarization();
        let phase = Complex64::from_polar(1.0, k.dot(x));
        let aq = q * phase * norm;
        a += eps.map(|v| aq * v);
        b += k.cross(&eps).map(|v| aq * Complex64::i() * v);
        let g = grad.get(&m);
        if g != Complex64::default() {
            let eg = -g * phase.conj() * (c * norm);
            e += eps.map(|v| eg * v);
        }
    }
    let (a, ia) = re_im(a);
    let (e, ie) = re_im(e);
    let (b, ib) = re_im(b);
    let i = e.cross(&b) * c;
    (FieldValues { a, e, b, i }, ia.max(ie).max(ib))
}

/// Beables on a set of points, evaluated in parallel.
pub fn evaluate_beables(
    model: &FieldModel,
    state: &PhotonState,
    config: &FieldConfiguration,
    grid: &[Vector3<f64>],
) -> Result<FieldSnapshot, BeableError> {
    let grad = state.grad_s(model, config)?;
    let results: Vec<(FieldValues, f64)> =
        grid.par_iter().map(|x| evaluate_with_gradient(model, config, &grad, x)).collect();
    let max_imaginary = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(FieldSnapshot {
        time: config.time,
        points: grid.to_vec(),
        values: results.into_iter().map(|r| r.0).collect(),
        max_imaginary,
    })
}

/// Vector potential alone; defined even on nodes.
pub fn vector_potential(model: &FieldModel, config: &FieldConfiguration, x: &Vector3<f64>) -> Vector3<f64> {
    config.vector_potential(model, x).map(|z| z.re)
}

/// `n³` cell-centred points filling the box.
pub fn box_grid(model: &FieldModel, n: usize) -> Vec<Vector3<f64>> {
    let l = model.geometry.length();
    let step = l / n as f64;
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(Vector3::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step, (k as f64 + 0.5) * step));
            }
        }
    }
    out
}

/// `n × n` slice at height `z`.
pub fn slice_grid(model: &FieldModel, n: usize, z: f64) -> Vec<Vector3<f64>> {
    let l = model.geometry.length();
    let step = l / n as f64;
    (0..n).flat_map(|i| (0..n).map(move |j| Vector3::new(i as f64 * step, j as f64 * step, z))).collect()
}

/// Shared polarization, frequency and live beams of a region.
struct LiveBeams<'a> {
    eps: Vector3<f64>,
    omega: f64,
    beams: Vec<&'a crate::optics::BeamConstants>,
}

fn live_beams(constants: &RegionConstants) -> Result<LiveBeams<'_>, BeableError> {
    let beams: Vec<_> = constants.beams.iter().filter(|b| !b.is_extinct()).collect();
    let first = beams.first().ok_or(BeableError::NoLiveBeam)?;
    let eps = first.mode.polarization();
    if beams.iter().any(|b| (b.mode.polarization() - eps).norm() > 1e-12) {
        return Err(BeableError::MixedPolarization);
    }
    let omega = first.omega.expect("live beam has a frequency");
    Ok(LiveBeams { eps, omega, beams })
}

/// Closed-form beables for on-shell region constants. With `Θ_b = k_b·x - ωt - φ_b`,
/// `S = Σ a_b sin Θ_b` and background sums `u`, `v`:
/// `A = (2/√V) ε Σ a_b cos Θ_b + u/√V`, `E = -(2ω/c√V) ε S`,
/// `B = -(2/√V) Σ (k_b×ε) a_b sin Θ_b + v/√V`,
/// `I = (4ω/V)[Σ a_b² k_b sin²Θ_b + Σ_{b<b'} a_b a_b' (k_b + k_b') sin Θ_b sin Θ_b'] - (2ω/V) S ε×v`.
pub fn closed_form_beables(
    model: &FieldModel,
    constants: &RegionConstants,
    background: &FieldConfiguration,
    x: &Vector3<f64>,
    t: f64,
) -> Result<FieldValues, BeableError> {
    let live = live_beams(constants)?;
    let sv = model.volume().sqrt();
    let (eps, omega, c) = (live.eps, live.omega, model.physics.c);

    // background sums over every mode not carried by a live beam
    let mut u = Vector3::zeros();
    let mut v = Vector3::zeros();
    for (m, q) in background.iter() {
        if live.beams.iter().any(|b| b.mode == *m) {
            continue;
        }
        let k = model.wave_vector(m);
        let z = *q * Complex64::from_polar(1.0, k.dot(x));
        let e = m.polarization();
        u += e * (2.0 * z.re);
        v += k.cross(&e) * (-2.0 * z.im);
    }

    let data: Vec<(Vector3<f64>, f64, f64, f64)> = live
        .beams
        .iter()
        .map(|b| {
            let k = model.wave_vector(&b.mode);
            let theta = k.dot(x) - omega * t - b.phase;
            (k, b.amplitude, theta.sin(), theta.cos())
        })
        .collect();

    let s: f64 = data.iter().map(|(_, a, s, _)| a * s).sum();
    let a = eps * (2.0 / sv) * data.iter().map(|(_, a, _, co)| a * co).sum::<f64>() + u / sv;
    let e = eps * (-2.0 * omega * s / (c * sv));
    let b = data.iter().fold(Vector3::zeros(), |acc, (k, a, s, _)| acc - k.cross(&eps) * (2.0 * a * s / sv)) + v / sv;
    let mut i = Vector3::zeros();
    for (n, (k, a, s, _)) in data.iter().enumerate() {
        i += k * (a * a * s * s);
        for (k2, a2, s2, _) in &data[n + 1..] {
            i += (k + k2) * (a * a2 * s * s2);
        }
    }
    let i = i * (4.0 * omega / model.volume()) - eps.cross(&v) * (2.0 * omega * s / model.volume());
    Ok(FieldValues { a, e, b, i })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalDefects {
    /// Largest `|∂A/∂t + cE|` from central differences in time.
    pub time: f64,
    /// Largest `|∇×A - B|` from central differences in space.
    pub curl: f64,
}

/// Check `E = -(1/c)∂A/∂t` and `B = ∇×A` at time `t` on `grid`, with
/// `config_at` giving the configuration at any time.
pub fn check_classical_relations<F>(
    model: &FieldModel,
    state: &PhotonState,
    config_at: F,
    t: f64,
    grid: &[Vector3<f64>],
    dt: f64,
    dx: f64,
) -> Result<ClassicalDefects, BeableError>
where
    F: Fn(f64) -> FieldConfiguration,
{
    if !(dt > 0.0) {
        return Err(BeableError::BadStep(dt));
    }
    if !(dx > 0.0) {
        return Err(BeableError::BadStep(dx));
    }
    let (before, now, after) = (config_at(t - dt), config_at(t), config_at(t + dt));
    let snap = evaluate_beables(model, state, &now, grid)?;
    let c = model.physics.c;
    let mut defects = ClassicalDefects { time: 0.0, curl: 0.0 };
    for (x, vals) in grid.iter().zip(&snap.values) {
        let dadt = (vector_potential(model, &after, x) - vector_potential(model, &before, x)) / (2.0 * dt);
        defects.time = defects.time.max((dadt + vals.e * c).norm());

        let mut jac = [[0.0; 3]; 3];
        for (j, row) in jac.iter_mut().enumerate() {
            let mut h = Vector3::zeros();
            h[j] = dx;
            let d = (vector_potential(model, &now, &(x + h)) - vector_potential(model, &now, &(x - h))) / (2.0 * dx);
            row.copy_from_slice(d.as_slice());
        }
        // jac[j][i] = ∂A_i/∂x_j
        let curl = Vector3::new(jac[1][2] - jac[2][1], jac[2][0] - jac[0][2], jac[0][1] - jac[1][0]);
        defects.curl = defects.curl.max((curl - vals.b).norm());
    }
    Ok(defects)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamTotals {
    /// `G_b = (2ω a_b²/c²) k_b` for every live beam.
    pub per_beam: Vec<(String, Vector3<f64>)>,
    pub momentum: Vector3<f64>,
    /// `Σ_b |G_b|`.
    pub momentum_magnitude_sum: f64,
    /// `ħcκ0 + Σ ħcκ/2`.
    pub energy: f64,
}

pub fn beam_totals(model: &FieldModel, state: &PhotonState, constants: &RegionConstants) -> Result<BeamTotals, BeableError> {
    let live = live_beams(constants)?;
    let c2 = model.physics.c.powi(2);
    let per_beam: Vec<(String, Vector3<f64>)> = live
        .beams
        .iter()
        .map(|b| (b.label.clone(), model.wave_vector(&b.mode) * (2.0 * live.omega * b.amplitude * b.amplitude / c2)))
        .collect();
    let momentum = per_beam.iter().fold(Vector3::zeros(), |acc, (_, g)| acc + g);
    let momentum_magnitude_sum = per_beam.iter().map(|(_, g)| g.norm()).sum();
    Ok(BeamTotals { per_beam, momentum, momentum_magnitude_sum, energy: state.total_energy(model) })
}

/// `∫ I/c² dV` by the midpoint rule on an `n³` grid.
pub fn box_momentum(
    model: &FieldModel,
    state: &PhotonState,
    config: &FieldConfiguration,
    n: usize,
) -> Result<Vector3<f64>, BeableError> {
    let snap = evaluate_beables(model, state, config, &box_grid(model, n))?;
    let cell = model.volume() / (n * n * n) as f64;
    let sum = snap.values.iter().fold(Vector3::zeros(), |acc, v| acc + v.i);
    Ok(sum * (cell / model.physics.c.powi(2)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleAverage {
    pub period: f64,
    pub total: Vector3<f64>,
    /// Average of each beam's own `c E_b × B_b`.
    pub per_beam: Vec<(String, Vector3<f64>)>,
}

/// Time average of the intensity over one period `2π/ω` with `samples`
/// equally spaced instants. The total uses the full mode sum on the analytic
/// solution; extinguished beams contribute zero to the per-beam list.
pub fn cycle_average_intensity(
    model: &FieldModel,
    state: &PhotonState,
    constants: &RegionConstants,
    background: &FieldConfiguration,
    x: &Vector3<f64>,
    samples: usize,
) -> Result<CycleAverage, BeableError> {
    let live = live_beams(constants)?;
    let period = 2.0 * PI / live.omega;
    let n = samples.max(1);
    let mut total = Vector3::zeros();
    let empty = FieldConfiguration::zeros(model.modes(), 0.0);
    let mut per_beam: Vec<(String, Vector3<f64>)> =
        constants.beams.iter().map(|b| (b.label.clone(), Vector3::zeros())).collect();
    for s in 0..n {
        let t = period * s as f64 / n as f64;
        let cfg = analytic_solution(constants, background, t);
        total += evaluate_at(model, state, &cfg, x)?.0.i;
        for (slot, b) in per_beam.iter_mut().zip(&constants.beams) {
            if b.is_extinct() {
                continue;
            }
            let single = RegionConstants { region: constants.region, beams: vec![b.clone()] };
            slot.1 += closed_form_beables(model, &single, &empty, x, t)?.i;
        }
    }
    let scale = 1.0 / n as f64;
    Ok(CycleAverage { period, total: total * scale, per_beam: per_beam.into_iter().map(|(l, v)| (l, v * scale)).collect() })
}

/// Closed-form cycle average: `(2ω a_b²/V) k_b` per beam plus the fringe
/// `(2ω/V) a_b a_b' (k_b + k_b') cos((k_b - k_b')·x - (φ_b - φ_b'))`.
pub fn cycle_average_closed_form(
    model: &FieldModel,
    constants: &RegionConstants,
    x: &Vector3<f64>,
) -> Result<CycleAverage, BeableError> {
    let live = live_beams(constants)?;
    let v = model.volume();
    let per_beam: Vec<(String, Vector3<f64>)> = constants
        .beams
        .iter()
        .map(|b| {
            let g = if b.is_extinct() {
                Vector3::zeros()
            } else {
                model.wave_vector(&b.mode) * (2.0 * live.omega * b.amplitude * b.amplitude / v)
            };
            (b.label.clone(), g)
        })
        .collect();
    let mut total = per_beam.iter().fold(Vector3::zeros(), |acc, (_, g)| acc + g);
    for (n, b) in live.beams.iter().enumerate() {
        for b2 in &live.beams[n + 1..] {
            let (k, k2) = (model.wave_vector(&b.mode), model.wave_vector(&b2.mode));
            let fringe = ((k - k2).dot(x) - (b.phase - b2.phase)).cos();
            total += (k + k2) * (2.0 * live.omega * b.amplitude * b2.amplitude * fringe / v);
        }
    }
    Ok(CycleAverage { period: 2.0 * PI / live.omega, total, per_beam })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntensityDefinition {
    /// `c(E×B - B×E)/2` expanded in ladder operators, zero-point terms included.
    Symmetrized,
    /// Quantum-optics form `(ħc²/V) Σ k̂ √(κκ') a†_k a_k' e^{i(k'-k)·x}`, Hermitian part.
    NormalOrdered,
}

/// Fock-space matrix elements `⟨a a'⟩, ⟨a a'†⟩, ⟨a† a'⟩, ⟨a† a'†⟩` over the full lattice.
pub struct LadderMoments {
    modes: Vec<ModeIndex>,
    aa: Vec<Complex64>,
    a_ad: Vec<Complex64>,
    ad_a: Vec<Complex64>,
    ad_ad: Vec<Complex64>,
}

impl LadderMoments {
    pub fn new(model: &FieldModel, fock: &FockState) -> Self {
        let modes: Vec<ModeIndex> = model.modes().iter().flat_map(|m| [*m, m.partner()]).collect();
        let lowered: Vec<FockState> = modes.iter().map(|m| fock.annihilate(m)).collect();
        let raised: Vec<FockState> = modes.iter().map(|m| fock.create(m)).collect();
        let n = modes.len();
        let (mut aa, mut a_ad, mut ad_a, mut ad_ad) =
            (vec![Complex64::default(); n * n], vec![Complex64::default(); n * n], vec![Complex64::default(); n * n], vec![Complex64::default(); n * n]);
        for i in 0..n {
            for j in 0..n {
                // ⟨a_i X_j⟩ = ⟨a†_i Φ | X_j Φ⟩ and ⟨a†_i X_j⟩ = ⟨a_i Φ | X_j Φ⟩
                aa[i * n + j] = raised[i].inner(&lowered[j]);
                a_ad[i * n + j] = raised[i].inner(&raised[j]);
                ad_a[i * n + j] = lowered[i].inner(&lowered[j]);
                ad_ad[i * n + j] = lowered[i].inner(&raised[j]);
            }
        }
        LadderMoments { modes, aa, a_ad, ad_a, ad_ad }
    }
}

/// `⟨Φ|Î(x)|Φ⟩` for the chosen operator.
pub fn intensity_operator_expectation(
    model: &FieldModel,
    state: &PhotonState,
    x: &Vector3<f64>,
    definition: IntensityDefinition,
) -> Vector3<f64> {
    let moments = LadderMoments::new(model, &FockState::from_photon_state(state));
    intensity_from_moments(model, &moments, x, definition)
}

pub fn intensity_from_moments(
    model: &FieldModel,
    moments: &LadderMoments,
    x: &Vector3<f64>,
    definition: IntensityDefinition,
) -> Vector3<f64> {
    let n = moments.modes.len();
    let hc2_v = model.physics.hbar * model.physics.c.powi(2) / model.volume();
    let ks: Vec<Vector3<f64>> = moments.modes.iter().map(|m| model.wave_vector(m)).collect();
    let kappas: Vec<f64> = ks.iter().map(|k| k.norm()).collect();
    let eps: Vec<Vector3<f64>> = moments.modes.iter().map(|m| m.polarization()).collect();
    let mut out = Vector3::<Complex64>::zeros();
    for i in 0..n {
        for j in 0..n {
            let idx = i * n + j;
            match definition {
                IntensityDefinition::Symmetrized => {
                    let w = eps[i].cross(&ks[j].cross(&eps[j])) * (kappas[i] / kappas[j]).sqrt()
                        - ks[i].cross(&eps[i]).cross(&eps[j]) * (kappas[j] / kappas[i]).sqrt();
                    let plus = (ks[i] + ks[j]).dot(x);
                    let minus = (ks[i] - ks[j]).dot(x);
                    let bracket = moments.aa[idx] * Complex64::from_polar(1.0, plus)
                        - moments.a_ad[idx] * Complex64::from_polar(1.0, minus)
                        - moments.ad_a[idx] * Complex64::from_polar(1.0, -minus)
                        + moments.ad_ad[idx] * Complex64::from_polar(1.0, -plus);
                    if bracket != Complex64::default() {
                        out += w.map(|v| bracket * (-hc2_v / 4.0) * v);
                    }
                }
                IntensityDefinition::NormalOrdered => {
                    let m = moments.ad_a[idx];
                    if m == Complex64::default() {
                        continue;
                    }
                    let dir = (ks[i] / kappas[i] + ks[j] / kappas[j]) * 0.5;
                    let z = m * Complex64::from_polar(1.0, (ks[j] - ks[i]).dot(x)) * (hc2_v * (kappas[i] * kappas[j]).sqrt());
                    out += dir.map(|v| z * v);
                }
            }
        }
    }
    out.map(|z| z.re)
}

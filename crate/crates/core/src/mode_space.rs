//! Normal-mode lattice of the periodic quantization box.
//!
//! A mode is a lattice wave vector `k = 2π n / L` with a transverse polarization
//! label. The vector potential is real, so `q_{-k} = q*_k` with the polarization
//! convention `ε_{-kμ} = ε_{kμ}`; only the lexicographically positive member of
//! each `±n` pair is stored.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, Uniform};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("mode lattice is empty: cutoff must be at least 1")]
    EmptyLattice,
    #[error("box side length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("lattice vector n = (0, 0, 0) has no transverse polarization")]
    ZeroWaveVector,
    #[error("polarization label must be 1 or 2, got {0}")]
    BadPolarization(u8),
    #[error("mode {0} lies outside the lattice cutoff {1}")]
    OutsideCutoff(ModeIndex, u32),
    #[error("reality pairing violated for mode {mode}: defect {defect:e}")]
    RealityPairing { mode: ModeIndex, defect: f64 },
}

/// Reduced Planck constant and speed of light (Heaviside-Lorentz units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    pub hbar: f64,
    pub c: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics { hbar: 1.0, c: 1.0 }
    }
}

impl Physics {
    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }
}

/// Periodic box of side `length`; background modes kept up to `|n|∞ <= cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGeometry {
    length: f64,
    cutoff: u32,
}

impl BoxGeometry {
    pub fn new(length: f64, cutoff: u32) -> Result<Self, ModeError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(ModeError::NonPositiveLength(length));
        }
        Ok(BoxGeometry { length, cutoff })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }
}

/// Lattice wave vector `n` plus polarization label `mu ∈ {1, 2}`.
///
/// Ordering is lexicographic on `(n, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    n: [i32; 3],
    mu: u8,
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n=({},{},{}) mu={}", self.n[0], self.n[1], self.n[2], self.mu)
    }
}

impl ModeIndex {
    pub fn new(n: [i32; 3], mu: u8) -> Result<Self, ModeError> {
        if n == [0, 0, 0] {
            return Err(ModeError::ZeroWaveVector);
        }
        if mu != 1 && mu != 2 {
            return Err(ModeError::BadPolarization(mu));
        }
        Ok(ModeIndex { n, mu })
    }

    pub fn n(&self) -> [i32; 3] {
        self.n
    }

    pub fn mu(&self) -> u8 {
        self.mu
    }

    /// First nonzero component of `n` is positive.
    pub fn is_canonical(&self) -> bool {
        self.n.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
    }

    /// The `-k` partner with the same polarization label.
    pub fn partner(&self) -> ModeIndex {
        ModeIndex { n: [-self.n[0], -self.n[1], -self.n[2]], mu: self.mu }
    }

    pub fn canonical(&self) -> ModeIndex {
        if self.is_canonical() {
            *self
        } else {
            self.partner()
        }
    }

    pub fn max_abs_component(&self) -> u32 {
        self.n.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn wave_vector(&self, length: f64) -> Vector3<f64> {
        let s = 2.0 * PI / length;
        Vector3::new(self.n[0] as f64 * s, self.n[1] as f64 * s, self.n[2] as f64 * s)
    }

    pub fn kappa(&self, length: f64) -> f64 {
        self.wave_vector(length).norm()
    }

    /// Unit polarization vector.
    ///
    /// For the canonical member: `ε_1 = normalize(k × ẑ)` (x̂ when `k ∥ ẑ`),
    /// `ε_2 = k̂ × ε_1`. The partner shares the vectors of its canonical mode.
    pub fn polarization(&self) -> Vector3<f64> {
        let c = self.canonical();
        let k = Vector3::new(c.n[0] as f64, c.n[1] as f64, c.n[2] as f64);
        let khat = k.normalize();
        let cross = khat.cross(&Vector3::z());
        let e1 = if cross.norm() < 1e-12 { Vector3::x() } else { cross.normalize() };
        match c.mu {
            1 => e1,
            _ => khat.cross(&e1),
        }
    }
}

/// Ordered set of canonical modes within the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    modes: Vec<ModeIndex>,
}

impl ModeSet {
    pub fn iter(&self) -> impl Iterator<Item = &ModeIndex> {
        self.modes.iter()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn contains(&self, mode: &ModeIndex) -> bool {
        self.modes.binary_search(mode).is_ok()
    }

    pub fn as_slice(&self) -> &[ModeIndex] {
        &self.modes
    }
}

/// All canonical `(n, mu)` entries with `1 <= |n|∞ <= cutoff`, in ascending order.
pub fn build_mode_set(geometry: &BoxGeometry) -> Result<ModeSet, ModeError> {
    let cut = geometry.cutoff() as i32;
    if cut == 0 {
        return Err(ModeError::EmptyLattice);
    }
    let mut modes = Vec::new();
    for x in -cut..=cut {
        for y in -cut..=cut {
            for z in -cut..=cut {
                if [x, y, z] == [0, 0, 0] {
                    continue;
                }
                for mu in [1, 2] {
                    let m = ModeIndex { n: [x, y, z], mu };
                    if m.is_canonical() {
                        modes.push(m);
                    }
                }
            }
        }
    }
    modes.sort();
    Ok(ModeSet { modes })
}

/// Geometry, unit system and lattice shared by every evaluation.
#[derive(Debug, Clone)]
pub struct FieldModel {
    pub geometry: BoxGeometry,
    pub physics: Physics,
    modes: ModeSet,
    /// Guidance is undefined when the one-photon overlap falls below this.
    pub node_tolerance: f64,
}

impl FieldModel {
    pub const DEFAULT_NODE_TOLERANCE: f64 = 1e-12;

    pub fn new(geometry: BoxGeometry, physics: Physics) -> Result<Self, ModeError> {
        let modes = build_mode_set(&geometry)?;
        Ok(FieldModel { geometry, physics, modes, node_tolerance: Self::DEFAULT_NODE_TOLERANCE })
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn volume(&self) -> f64 {
        self.geometry.volume()
    }

    pub fn wave_vector(&self, mode: &ModeIndex) -> Vector3<f64> {
        mode.wave_vector(self.geometry.length())
    }

    pub fn kappa(&self, mode: &ModeIndex) -> f64 {
        mode.kappa(self.geometry.length())
    }

    pub fn ensure_in_lattice(&self, mode: &ModeIndex) -> Result<(), ModeError> {
        if self.modes.contains(&mode.canonical()) {
            Ok(())
        } else {
            Err(ModeError::OutsideCutoff(*mode, self.geometry.cutoff()))
        }
    }

    /// Zero-point energy `Σ ħcκ/2` over every lattice site (both signs of `k`)
    /// and both polarizations. Depends on the cutoff.
    pub fn zero_point_energy(&self) -> f64 {
        // each canonical entry stands for itself and its partner
        self.modes.iter().map(|m| self.physics.hbar_c() * self.kappa(m)).sum()
    }
}

/// Complex normal-mode coordinates `q_{kμ}` for every canonical mode, at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfiguration {
    coords: BTreeMap<ModeIndex, Complex64>,
    pub time: f64,
}

impl FieldConfiguration {
    /// All coordinates zero.
    pub fn zeros(modes: &ModeSet, time: f64) -> Self {
        FieldConfiguration {
            coords: modes.iter().map(|m| (*m, Complex64::new(0.0, 0.0))).collect(),
            time,
        }
    }

    pub fn from_coords(coords: BTreeMap<ModeIndex, Complex64>, time: f64) -> Self {
        let coords = coords
            .into_iter()
            .map(|(m, q)| if m.is_canonical() { (m, q) } else { (m.partner(), q.conj()) })
            .collect();
        FieldConfiguration { coords, time }
    }

    /// Coordinate of any mode; non-canonical modes return the conjugate of
    /// their partner.
    pub fn get(&self, mode: &ModeIndex) -> Option<Complex64> {
        if mode.is_canonical() {
            self.coords.get(mode).copied()
        } else {
            self.coords.get(&mode.partner()).map(|q| q.conj())
        }
    }

    /// Store `q` for `mode`; a non-canonical mode stores `q*` on its partner.
    pub fn set(&mut self, mode: &ModeIndex, q: Complex64) {
        if mode.is_canonical() {
            self.coords.insert(*mode, q);
        } else {
            self.coords.insert(mode.partner(), q.conj());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeIndex, &Complex64)> {
        self.coords.iter()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Every stored canonical pair together with its derived partner,
    /// `(mode, q)` for both signs of `k`.
    pub fn full_lattice(&self) -> impl Iterator<Item = (ModeIndex, Complex64)> + '_ {
        self.coords.iter().flat_map(|(m, q)| [(*m, *q), (m.partner(), q.conj())])
    }

    /// Largest `|ε_{-k} q_{-k} - ε_k q*_k|` over the stored pairs.
    pub fn reality_defect(&self) -> f64 {
        self.coords
            .iter()
            .map(|(m, q)| {
                let partner = m.partner();
                let q_partner = self.get(&partner).unwrap_or_default();
                let lhs = partner.polarization().map(|e| q_partner * e);
                let rhs = m.polarization().map(|e| q.conj() * e);
                (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn check_reality(&self, tol: f64) -> Result<(), ModeError> {
        for (m, q) in &self.coords {
            let partner = m.partner();
            let qp = self.get(&partner).unwrap_or_default();
            let defect = (partner.polarization().map(|e| qp * e) - m.polarization().map(|e| q.conj() * e))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > tol {
                return Err(ModeError::RealityPairing { mode: *m, defect });
            }
        }
        Ok(())
    }

    /// `A(x) = V^{-1/2} Σ_{kμ} ε q e^{ik·x}` over the full lattice, kept complex
    /// so the imaginary residue can be inspected.
    pub fn vector_potential(&self, model: &FieldModel, x: &Vector3<f64>) -> Vector3<Complex64> {
        let norm = model.volume().sqrt().recip();
        let mut a = Vector3::<Complex64>::zeros();
        for (m, q) in self.full_lattice() {
            let phase = Complex64::from_polar(1.0, model.wave_vector(&m).dot(x));
            let amp = q * phase * norm;
            a += m.polarization().map(|e| amp * e);
        }
        a
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigurationRecord {
    time: f64,
    modes: Vec<([i32; 3], u8, f64, f64)>,
}

impl Serialize for FieldConfiguration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConfigurationRecord {
            time: self.time,
            modes: self.coords.iter().map(|(m, q)| (m.n, m.mu, q.re, q.im)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldConfiguration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = ConfigurationRecord::deserialize(d)?;
        let mut coords = BTreeMap::new();
        for (n, mu, re, im) in rec.modes {
            let m = ModeIndex::new(n, mu).map_err(serde::de::Error::custom)?;
            coords.insert(m, Complex64::new(re, im));
        }
        Ok(FieldConfiguration::from_coords(coords, rec.time))
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw every canonical coordinate from the ground-state density
/// `∝ exp(-κ |q|² / ħc)`: independent quadratures with variance `ħc / 2κ`.
pub fn sample_ground_configuration<R: Rng + ?Sized>(model: &FieldModel, rng: &mut R) -> FieldConfiguration {
    let coords = model
        .modes()
        .iter()
        .map(|m| {
            let sigma = (model.physics.hbar_c() / (2.0 * model.kappa(m))).sqrt();
            let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
            (*m, Complex64::new(normal.sample(rng), normal.sample(rng)))
        })
        .collect();
    FieldConfiguration { coords, time: 0.0 }
}

/// Amplitude and phase of the excited coordinate, `q = q0 e^{-iθ0}`.
///
/// `q0` has density `∝ q0³ exp(-κ0 q0² / ħc)`, so `q0²` is Gamma(2, ħc/κ0);
/// `θ0` is uniform on `[0, 2π)`.
pub fn sample_photon_mode<R: Rng + ?Sized>(kappa0: f64, physics: &Physics, rng: &mut R) -> (f64, f64) {
    assert!(kappa0 > 0.0, "kappa0 must be positive");
    let gamma = Gamma::new(2.0, physics.hbar_c() / kappa0).expect("valid gamma parameters");
    let q0 = gamma.sample(rng).sqrt();
    let theta0 = Uniform::new(0.0, 2.0 * PI).expect("valid range").sample(rng);
    (q0, theta0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(cutoff: u32) -> FieldModel {
        FieldModel::new(BoxGeometry::new(2.0 * PI, cutoff).unwrap(), Physics::default()).unwrap()
    }

    #[test]
    fn lattice_counts_follow_enumeration() {
        // (2c+1)^3 - 1 sites, halved by pairing, doubled by polarization
        for (cutoff, expected) in [(1u32, 26usize), (2, 124)] {
            let g = BoxGeometry::new(1.0, cutoff).unwrap();
            let set = build_mode_set(&g).unwrap();
            let sites = (2 * cutoff as usize + 1).pow(3) - 1;
            assert_eq!(set.len(), expected);
            assert_eq!(set.len(), sites / 2 * 2);
        }
    }

    #[test]
    fn zero_cutoff_is_rejected() {
        let g = BoxGeometry::new(1.0, 0).unwrap();
        assert_eq!(build_mode_set(&g), Err(ModeError::EmptyLattice));
    }

    #[test]
    fn excited_x_mode_is_canonical_and_present() {
        let set = build_mode_set(&BoxGeometry::new(1.0, 1).unwrap()).unwrap();
        let m = ModeIndex::new([1, 0, 0], 2).unwrap();
        assert!(m.is_canonical());
        assert!(set.contains(&m));
        assert!(!m.partner().is_canonical());
    }

    #[test]
    fn mode_index_rejects_degenerate_input() {
        assert_eq!(ModeIndex::new([0, 0, 0], 1), Err(ModeError::ZeroWaveVector));
        assert_eq!(ModeIndex::new([1, 0, 0], 3), Err(ModeError::BadPolarization(3)));
        assert!(BoxGeometry::new(-1.0, 1).is_err());
    }

    #[test]
    fn polarization_basis_is_orthonormal_and_transverse() {
        for m in model(2).modes().iter() {
            let e = m.polarization();
            let other = ModeIndex::new(m.n(), 3 - m.mu()).unwrap().polarization();
            let k = m.wave_vector(1.0);
            assert!((e.norm() - 1.0).abs() < 1e-14);
            assert!(e.dot(&other).abs() < 1e-14);
            assert!(e.dot(&k).abs() < 1e-12);
            assert_eq!(m.partner().polarization(), e);
        }
    }

    #[test]
    fn in_plane_modes_share_second_polarization() {
        let x = ModeIndex::new([1, 0, 0], 2).unwrap().polarization();
        let y = ModeIndex::new([0, 1, 0], 2).unwrap().polarization();
        assert!((x - y).norm() < 1e-15);
        assert!((x + Vector3::z()).norm() < 1e-15);
    }

    #[test]
    fn ground_sampling_is_deterministic_per_seed() {
        let m = model(1);
        let a = sample_ground_configuration(&m, &mut seeded_rng(7));
        let b = sample_ground_configuration(&m, &mut seeded_rng(7));
        let c = sample_ground_configuration(&m, &mut seeded_rng(8));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sampled_configuration_reconstructs_real_potential() {
        let m = model(1);
        let cfg = sample_ground_configuration(&m, &mut seeded_rng(3));
        assert!(cfg.check_reality(1e-15).is_ok());
        let mut rng = seeded_rng(4);
        for _ in 0..20 {
            let x = Vector3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()) * m.geometry.length();
            let a = cfg.vector_potential(&m, &x);
            assert!(a.iter().all(|z| z.im.abs() < 1e-12));
        }
    }

    #[test]
    fn partner_accessors_conjugate() {
        let m = model(1);
        let mut cfg = FieldConfiguration::zeros(m.modes(), 0.0);
        let mode = ModeIndex::new([0, 1, 0], 1).unwrap();
        cfg.set(&mode.partner(), Complex64::new(0.3, -0.4));
        assert_eq!(cfg.get(&mode), Some(Complex64::new(0.3, 0.4)));
        assert_eq!(cfg.get(&mode.partner()), Some(Complex64::new(0.3, -0.4)));
        // asserting the pairing twice changes nothing
        assert_eq!(cfg.reality_defect(), 0.0);
        assert_eq!(cfg.reality_defect(), 0.0);
    }

    #[test]
    fn json_round_trip_keeps_coordinates() {
        let m = model(1);
        let cfg = sample_ground_configuration(&m, &mut seeded_rng(11));
        let text = serde_json::to_string(&cfg).unwrap();
        let back: FieldConfiguration = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn zero_point_energy_counts_both_signs_and_polarizations() {
        let m = model(1);
        // 26 sites x 2 polarizations x κ/2 with κ = |n| for L = 2π
        let brute: f64 = (-1i32..=1)
            .flat_map(|x| (-1i32..=1).flat_map(move |y| (-1i32..=1).map(move |z| [x, y, z])))
            .filter(|n| *n != [0, 0, 0])
            .map(|n| 2.0 * 0.5 * ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64).sqrt())
            .sum();
        assert!((m.zero_point_energy() - brute).abs() < 1e-12);
    }
}

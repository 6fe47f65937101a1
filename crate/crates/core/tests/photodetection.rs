use std::f64::consts::PI;

use causal_mzi::fock::FockState;
use causal_mzi::optics::MziLayout;
use causal_mzi::photodetection::{
    absorption_probability, detect, dipole_matrix_factor, interaction_matrix_element, post_absorption_state,
    transition_amplitude, ChannelGrid, DetectorAtom, DetectorSite, ElectronChannel,
};
use causal_mzi::mode_space::{sample_ground_configuration, seeded_rng};
use causal_mzi::wavefunctional::{PhotonState, Region};
use causal_mzi::{BoxGeometry, Complex64, FieldModel, ModeIndex, Physics, Vector3};
use proptest::prelude::*;

fn setup() -> (FieldModel, MziLayout) {
    let m = FieldModel::new(BoxGeometry::new(2.0 * PI, 1).unwrap(), Physics::default()).unwrap();
    (m, MziLayout::new(ModeIndex::new([1, 0, 0], 2).unwrap()).unwrap())
}

fn j1(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        x / 3.0 - x.powi(3) / 30.0
    } else {
        x.sin() / (x * x) - x.cos() / x
    }
}

/// `⟨k| ε·p |1s⟩` with `p = -iħ∇` and box-normalized plane waves, from the
/// radial integral `(4πħ/a√V)(ε·k̂) ∫ j1(kr) ψ(r) r² dr` done by Simpson.
fn dipole_oracle(m: &FieldModel, a: f64, k: &Vector3<f64>, eps: &Vector3<f64>) -> f64 {
    let kn = k.norm();
    let (n, r_max) = (1_000_000, 40.0 * a);
    let h = r_max / n as f64;
    let f = |r: f64| j1(kn * r) * (-r / a).exp() / (PI * a.powi(3)).sqrt() * r * r;
    let mut acc = f(0.0) + f(r_max);
    for j in 1..n {
        acc += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    4.0 * PI * m.physics.hbar / (a * m.volume().sqrt()) * eps.dot(k) / kn * acc * h / 3.0
}

/// `⟨0| Σ_j a_j/√κ_j |Φ⟩` from the Fock-space ladder operators.
fn field_oracle(m: &FieldModel, st: &PhotonState) -> Complex64 {
    let fock = FockState::from_photon_state(st);
    m.modes().iter().map(|mode| FockState::vacuum().inner(&fock.annihilate(mode)) / m.kappa(mode).sqrt()).sum()
}

#[test]
fn probability_follows_one_minus_sin_phi() {
    let (m, layout) = setup();
    let atom = DetectorAtom::hydrogen(DetectorSite::C1);
    let grid = ChannelGrid::around_shell(&m, &atom, 1.0, 0.3, 400, 4, 4).unwrap();
    let base = absorption_probability(&m, &atom, &grid, &layout.state(&m, 0.0, Region::I).unwrap(), 50.0).unwrap().total;
    for phi in [0.4, 1.0, PI / 2.0, 2.5, 4.0, 5.5] {
        let p = absorption_probability(&m, &atom, &grid, &layout.state(&m, phi, Region::I).unwrap(), 50.0).unwrap().total;
        assert!((p - base * (1.0 - phi.sin())).abs() < 1e-12 * base);
    }
}

#[test]
fn angular_dependence_is_cos_squared() {
    let (m, layout) = setup();
    let atom = DetectorAtom::hydrogen(DetectorSite::C1);
    let st = layout.state(&m, 0.2, Region::I).unwrap();
    let eps = layout.input.polarization();
    let k = atom.shell_wave_number(&m.physics, 1.0).unwrap();
    let along = transition_amplitude(&m, &atom, &ElectronChannel::new(eps * k), &st, 30.0).unwrap().norm_sqr();
    let perp = Vector3::new(0.0, 1.0, 0.0);
    for theta in [0.2, 0.7, 1.2, PI / 2.0, 2.6] {
        let dir = eps * theta.cos() + perp * theta.sin();
        let p = transition_amplitude(&m, &atom, &ElectronChannel::new(dir * k), &st, 30.0).unwrap().norm_sqr();
        assert!((p - along * theta.cos().powi(2)).abs() < 1e-12 * along);
    }
}

#[test]
fn short_time_growth_is_quadratic() {
    let (m, layout) = setup();
    let atom = DetectorAtom::hydrogen(DetectorSite::C1);
    let st = layout.state(&m, 1.0, Region::I).unwrap();
    let ch = ElectronChannel::new(layout.input.polarization() * 1.1);
    let h = interaction_matrix_element(&m, &atom, &ch, &st).unwrap();
    for t in [1e-4, 1e-3] {
        let p = transition_amplitude(&m, &atom, &ch, &st, t).unwrap().norm_sqr();
        assert!((p / (t * t) - h.norm_sqr()).abs() < 1e-6 * h.norm_sqr());
    }
}

#[test]
fn dipole_factor_decays_as_inverse_cube() {
    let (m, _) = setup();
    let atom = DetectorAtom::hydrogen(DetectorSite::C1);
    let eps = Vector3::new(0.0, 0.0, 1.0);
    let d = |k: f64| dipole_matrix_factor(&m, &atom, &ElectronChannel::new(eps * k), &eps);
    assert!((d(2e3) / d(1e3) - 0.125).abs() < 1e-5);
}

#[test]
fn absorption_leaves_the_field_in_its_ground_state() {
    let (m, layout) = setup();
    let atom = DetectorAtom::hydrogen(DetectorSite::C1);
    let st = layout.state(&m, 0.3, Region::I).unwrap();
    let grid = ChannelGrid::around_shell(&m, &atom, 1.0, 0.3, 200, 4, 4).unwrap();
    let result = detect(&m, &atom, &grid, &st, 20.0).unwrap();
    let post = &result.post;
    assert_eq!(FockState::vacuum().inner(&post.field), Complex64::new(1.0, 0.0));
    assert_eq!(FockState::from_photon_state(&st).inner(&post.field), Complex64::default());
    assert_eq!(post.field.max_photon_number(), 0);
    let cfg = sample_ground_configuration(&m, &mut seeded_rng(4));
    assert!(post.field_state.grad_s(&m, &cfg).unwrap().is_empty());
    assert!(post_absorption_state(&PhotonState::vacuum(), post.electron).is_err());
}

#[test]
fn energy_bookkeeping_drops_the_zero_point_sum() {
    let (m, layout) = setup();
    let atom = DetectorAtom::hydrogen(DetectorSite::D1);
    let st = layout.state(&m, 0.3, Region::I).unwrap();
    let ch = ElectronChannel::new(Vector3::new(0.3, -0.8, 0.6));
    let e_final = PhotonState::vacuum().total_energy(&m) + ch.kinetic_energy(&atom, &m.physics);
    let e_initial = st.total_energy(&m) - atom.ionization_energy;
    assert!((e_final - e_initial - ch.energy_mismatch(&atom, &m.physics, 1.0)).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn factorized_element_matches_direct_evaluation(
        phi in 0.0..(2.0 * PI),
        k in prop::array::uniform3(-2.0..2.0f64),
        mass in 0.5..2.0f64,
        charge in 1.0..5.0f64,
    ) {
        let (m, layout) = setup();
        let kv = Vector3::from(k);
        prop_assume!(kv.norm() > 0.05);
        let atom = DetectorAtom::new(mass, charge, 0.3, DetectorSite::C1).unwrap();
        let st = layout.state(&m, phi, Region::I).unwrap();
        let ch = ElectronChannel::new(kv);
        let h = interaction_matrix_element(&m, &atom, &ch, &st).unwrap();
        let a = atom.bohr_radius(&m.physics);
        let eps = layout.input.polarization();
        let pref = -(charge / mass) * (1.0 / (2.0 * m.volume())).sqrt();
        let direct = field_oracle(&m, &st) * pref * dipole_oracle(&m, a, &kv, &eps);
        prop_assert!((h - direct).norm() <= 1e-10 * h.norm().max(1e-12), "{h} vs {direct}");
    }
}

use std::f64::consts::PI;

use causal_mzi::dynamics::analytic_solution;
use causal_mzi::mode_space::{sample_ground_configuration, seeded_rng};
use causal_mzi::optics::{match_constants, MziLayout};
use causal_mzi::wavefunctional::{Beam, PhotonState, Region, WaveError};
use causal_mzi::{BoxGeometry, Complex64, FieldConfiguration, FieldModel, ModeIndex, Physics};
use proptest::prelude::*;

fn model() -> FieldModel {
    FieldModel::new(BoxGeometry::new(2.0 * PI, 1).unwrap(), Physics::default()).unwrap()
}

fn unit_modes() -> Vec<ModeIndex> {
    let mut out = Vec::new();
    for n in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
        for mu in [1, 2] {
            out.push(ModeIndex::new(n, mu).unwrap());
        }
    }
    out
}

/// Normalized superposition over the six `κ = 1` modes.
fn random_state(m: &FieldModel, raw: &[(f64, f64)]) -> PhotonState {
    let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    let beams = unit_modes()
        .into_iter()
        .zip(raw)
        .enumerate()
        .map(|(i, (mode, (a, b)))| Beam { label: format!("b{i}"), mode, amplitude: Complex64::new(*a, *b) / norm })
        .collect();
    PhotonState::new(m, beams, 1.0, Region::Custom).unwrap()
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// `-(ħ²c²/4) ∇²R / R` with `R = |H| exp(-Σ κ|q|²/ħc)` by central differences
/// over the real and imaginary parts of every canonical coordinate.
fn quantum_potential_oracle(m: &FieldModel, st: &PhotonState, cfg: &FieldConfiguration) -> f64 {
    let hc = m.physics.hbar_c();
    let r = |c: &FieldConfiguration| {
        let gauss: f64 = c.iter().map(|(mode, q)| m.kappa(mode) * q.norm_sqr()).sum();
        st.overlap(c).unwrap().norm() * (-gauss / hc).exp()
    };
    let h = 1e-3;
    let r0 = r(cfg);
    let mut lap = 0.0;
    for (mode, q) in cfg.iter() {
        for d in [Complex64::new(h, 0.0), Complex64::new(0.0, h)] {
            let mut p = cfg.clone();
            p.set(mode, q + d);
            let mut n = cfg.clone();
            n.set(mode, q - d);
            lap += (r(&p) - 2.0 * r0 + r(&n)) / (h * h);
        }
    }
    -hc * hc / 4.0 * lap / r0
}

#[test]
fn input_gradient_is_i_hbar_over_two_q() {
    let m = model();
    let mode = ModeIndex::new([1, 0, 0], 2).unwrap();
    let st = PhotonState::input(&m, "in", mode).unwrap();
    let mut cfg = sample_ground_configuration(&m, &mut seeded_rng(1));
    let q = Complex64::new(0.4, -0.9);
    cfg.set(&mode, q);
    let g = st.grad_s(&m, &cfg).unwrap();
    assert!((g.get(&mode) - Complex64::new(0.0, 0.5) / q).norm() < 1e-15);
    assert_eq!(g.get(&ModeIndex::new([0, 1, 0], 2).unwrap()), Complex64::default());
}

#[test]
fn node_is_reported() {
    let m = model();
    let st = PhotonState::input(&m, "in", ModeIndex::new([1, 0, 0], 2).unwrap()).unwrap();
    let cfg = FieldConfiguration::zeros(m.modes(), 0.0);
    assert!(matches!(st.grad_s(&m, &cfg), Err(WaveError::Node(_))));
    assert!(matches!(st.quantum_potential(&m, &cfg), Err(WaveError::Node(_))));
}

#[test]
fn unnormalized_state_is_rejected() {
    let m = model();
    let beams = vec![Beam { label: "a".into(), mode: ModeIndex::new([1, 0, 0], 1).unwrap(), amplitude: Complex64::new(0.5, 0.0) }];
    assert!(matches!(PhotonState::new(&m, beams, 1.0, Region::Custom), Err(WaveError::Normalization(_))));
}

#[test]
fn quantum_potential_is_constant_on_analytic_solutions() {
    let m = model();
    let layout = MziLayout::new(ModeIndex::new([1, 0, 0], 2).unwrap()).unwrap();
    let bg = sample_ground_configuration(&m, &mut seeded_rng(3));
    let phi = 2.3;
    let k = match_constants(&layout, &m.physics, 0.8, 1.0, phi).unwrap();
    for region in [Region::Input, Region::I, Region::II] {
        let st = layout.state(&m, phi, region).unwrap();
        let rc = k.region(region).unwrap();
        let q0 = st.quantum_potential(&m, &analytic_solution(rc, &bg, 0.0)).unwrap();
        for t in [0.3, 1.7, 9.1, 40.0] {
            let q = st.quantum_potential(&m, &analytic_solution(rc, &bg, t)).unwrap();
            assert!((q - q0).abs() < 1e-10 * q0.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6)) {
        prop_assume!(raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 0.1);
        let m = model();
        let st = random_state(&m, &raw);
        let cfg = sample_ground_configuration(&m, &mut seeded_rng(seed));
        prop_assume!(st.overlap(&cfg).unwrap().norm() > 0.05);
        let grad = st.grad_s(&m, &cfg).unwrap();
        let s = |c: &FieldConfiguration| st.phase_function(&m, c).unwrap().s;
        let h = 1e-6;
        for mode in unit_modes() {
            let q = cfg.get(&mode).unwrap();
            let mut diff = [0.0; 2];
            for (slot, d) in diff.iter_mut().zip([Complex64::new(h, 0.0), Complex64::new(0.0, h)]) {
                let mut p = cfg.clone();
                p.set(&mode, q + d);
                let mut n = cfg.clone();
                n.set(&mode, q - d);
                *slot = wrap(s(&p) - s(&n)) / (2.0 * h);
            }
            // Wirtinger derivative (∂_f - i∂_g)/2
            let fd = Complex64::new(diff[0], -diff[1]) / 2.0;
            let g = grad.get(&mode);
            prop_assert!((fd - g).norm() <= 1e-6 * g.norm().max(1e-3), "{fd} vs {g}");
        }
    }

    #[test]
    fn quantum_potential_matches_laplacian_oracle(seed in any::<u64>(), raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6)) {
        prop_assume!(raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 0.1);
        let m = model();
        let st = random_state(&m, &raw);
        let cfg = sample_ground_configuration(&m, &mut seeded_rng(seed));
        prop_assume!(st.overlap(&cfg).unwrap().norm() > 0.1);
        let q = st.quantum_potential(&m, &cfg).unwrap();
        let oracle = quantum_potential_oracle(&m, &st, &cfg);
        let scale = PhotonState::classical_potential(&m, &cfg) + st.total_energy(&m);
        prop_assert!((q - oracle).abs() < 1e-5 * scale, "{q} vs {oracle}");
    }

    #[test]
    fn hamilton_jacobi_split_sums_to_total_energy(seed in any::<u64>(), raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6)) {
        prop_assume!(raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 0.1);
        let m = model();
        let st = random_state(&m, &raw);
        let cfg = sample_ground_configuration(&m, &mut seeded_rng(seed));
        prop_assume!(st.overlap(&cfg).unwrap().norm() > 1e-3);
        let e = st.hamilton_jacobi_energy(&m, &cfg).unwrap();
        prop_assert!((e - st.total_energy(&m)).abs() < 1e-10 * st.total_energy(&m));
    }

    #[test]
    fn node_hits_vanish_with_tolerance(seed in any::<u64>()) {
        let m = model();
        let st = PhotonState::input(&m, "in", ModeIndex::new([1, 0, 0], 2).unwrap()).unwrap();
        let mut rng = seeded_rng(seed);
        let mut hits = [0usize; 3];
        for _ in 0..2000 {
            let h = st.overlap(&sample_ground_configuration(&m, &mut rng)).unwrap().norm();
            for (slot, tol) in hits.iter_mut().zip([1e-1, 1e-2, 1e-12]) {
                if h < tol {
                    *slot += 1;
                }
            }
        }
        prop_assert!(hits[0] >= hits[1] && hits[1] >= hits[2]);
        prop_assert_eq!(hits[2], 0);
    }
}

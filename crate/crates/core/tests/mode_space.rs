use std::f64::consts::PI;

use causal_mzi::mode_space::{build_mode_set, sample_ground_configuration, seeded_rng};
use causal_mzi::{BoxGeometry, FieldConfiguration, FieldModel, ModeIndex, Physics, Vector3};
use proptest::prelude::*;

fn model(cutoff: u32) -> FieldModel {
    FieldModel::new(BoxGeometry::new(2.0 * PI, cutoff).unwrap(), Physics::default()).unwrap()
}

#[test]
fn canonical_counts() {
    assert_eq!(build_mode_set(&BoxGeometry::new(1.0, 1).unwrap()).unwrap().len(), 26);
    assert_eq!(build_mode_set(&BoxGeometry::new(1.0, 2).unwrap()).unwrap().len(), 124);
}

#[test]
fn zero_point_sum_over_canonical_modes() {
    let m = model(1);
    // 3 axis directions, 6 face diagonals, 4 body diagonals, two polarizations each
    let want = 2.0 * (3.0 + 6.0 * 2f64.sqrt() + 4.0 * 3f64.sqrt());
    assert!((m.zero_point_energy() - want).abs() < 1e-12);
}

#[test]
fn in_plane_second_polarization_points_down() {
    let e = ModeIndex::new([1, 0, 0], 2).unwrap().polarization();
    assert!((e - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
    let e = ModeIndex::new([0, 1, 0], 2).unwrap().polarization();
    assert!((e - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn configuration_json_round_trip() {
    let m = model(1);
    let cfg = sample_ground_configuration(&m, &mut seeded_rng(11));
    let text = serde_json::to_string(&cfg).unwrap();
    let back: FieldConfiguration = serde_json::from_str(&text).unwrap();
    assert_eq!(cfg, back);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vector_potential_is_real(seed in any::<u64>(), x in 0.0..6.3f64, y in 0.0..6.3f64, z in 0.0..6.3f64) {
        let m = model(1);
        let cfg = sample_ground_configuration(&m, &mut seeded_rng(seed));
        let a = cfg.vector_potential(&m, &Vector3::new(x, y, z));
        prop_assert!(a.iter().all(|c| c.im.abs() < 1e-12));
    }

    #[test]
    fn partner_pairing_is_conjugation(seed in any::<u64>()) {
        let m = model(1);
        let cfg = sample_ground_configuration(&m, &mut seeded_rng(seed));
        for mode in m.modes().iter() {
            let p = mode.partner();
            prop_assert_eq!(cfg.get(&p).unwrap(), cfg.get(mode).unwrap().conj());
            prop_assert_eq!(p.partner(), *mode);
            prop_assert_eq!(p.canonical(), *mode);
            prop_assert_eq!(p.polarization(), mode.polarization());
        }
        prop_assert_eq!(cfg.reality_defect(), 0.0);
    }

    #[test]
    fn polarization_is_orthonormal(n in prop::array::uniform3(-3i32..=3), mu in 1u8..=2) {
        prop_assume!(n != [0, 0, 0]);
        let mode = ModeIndex::new(n, mu).unwrap();
        let other = ModeIndex::new(n, 3 - mu).unwrap();
        let k = mode.wave_vector(1.0);
        prop_assert!((mode.polarization().norm() - 1.0).abs() < 1e-14);
        prop_assert!(mode.polarization().dot(&k).abs() < 1e-12);
        prop_assert!(mode.polarization().dot(&other.polarization()).abs() < 1e-14);
    }
}

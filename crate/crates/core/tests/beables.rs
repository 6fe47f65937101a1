use std::f64::consts::PI;

use causal_mzi::beables::{
    beam_totals, box_grid, closed_form_beables, cycle_average_intensity, evaluate_beables, intensity_operator_expectation,
    IntensityDefinition,
};
use causal_mzi::dynamics::analytic_solution;
use causal_mzi::mode_space::{sample_ground_configuration, seeded_rng};
use causal_mzi::optics::{match_constants, MziLayout};
use causal_mzi::wavefunctional::{PhotonState, Region};
use causal_mzi::{BoxGeometry, FieldConfiguration, FieldModel, ModeIndex, Physics, Vector3};
use proptest::prelude::*;

fn setup() -> (FieldModel, MziLayout) {
    let m = FieldModel::new(BoxGeometry::new(2.0 * PI, 1).unwrap(), Physics::default()).unwrap();
    (m, MziLayout::new(ModeIndex::new([1, 0, 0], 2).unwrap()).unwrap())
}

#[test]
fn vacuum_has_no_electric_field() {
    let (m, _) = setup();
    let cfg = sample_ground_configuration(&m, &mut seeded_rng(1));
    let snap = evaluate_beables(&m, &PhotonState::vacuum(), &cfg, &box_grid(&m, 3)).unwrap();
    assert!(snap.values.iter().all(|v| v.e.norm() == 0.0 && v.i.norm() == 0.0));
    assert!(snap.values.iter().any(|v| v.a.norm() > 0.0));
}

#[test]
fn momentum_magnitudes_agree_across_regions() {
    let (m, layout) = setup();
    let k = match_constants(&layout, &m.physics, 1.4, 0.3, 2.0).unwrap();
    for region in [Region::Input, Region::I, Region::II] {
        let st = layout.state(&m, 2.0, region).unwrap();
        let t = beam_totals(&m, &st, k.region(region).unwrap()).unwrap();
        assert!((t.momentum_magnitude_sum - 1.0).abs() < 1e-14);
    }
    // vector sum in region I: two perpendicular halves
    let st = layout.state(&m, 2.0, Region::I).unwrap();
    let t = beam_totals(&m, &st, &k.region_i).unwrap();
    assert!((t.momentum.norm() - 0.5f64.sqrt()).abs() < 1e-14);
}

#[test]
fn zero_point_intensity_cancels() {
    let (m, layout) = setup();
    let bg = sample_ground_configuration(&m, &mut seeded_rng(5));
    let empty = FieldConfiguration::zeros(m.modes(), 0.0);
    let phi = 0.7;
    let k = match_constants(&layout, &m.physics, 1.1, 0.6, phi).unwrap();
    let st = layout.state(&m, phi, Region::II).unwrap();
    let mut box_sum = Vector3::zeros();
    for x in box_grid(&m, 8) {
        let with = cycle_average_intensity(&m, &st, &k.region_ii, &bg, &x, 16).unwrap().total;
        let without = cycle_average_intensity(&m, &st, &k.region_ii, &empty, &x, 16).unwrap().total;
        box_sum += with - without;
        assert!((with - without).norm() < 1e-15);
    }
    assert!(box_sum.norm() < 1e-13);
    // the instantaneous cross term also integrates to zero over the box
    let t = 0.4;
    let cfg_with = analytic_solution(&k.region_ii, &bg, t);
    let cfg_without = analytic_solution(&k.region_ii, &empty, t);
    let grid = box_grid(&m, 12);
    let a = evaluate_beables(&m, &st, &cfg_with, &grid).unwrap();
    let b = evaluate_beables(&m, &st, &cfg_without, &grid).unwrap();
    let diff = a.values.iter().zip(&b.values).fold(Vector3::zeros(), |acc, (u, v)| acc + u.i - v.i);
    assert!(diff.norm() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn beables_are_real_and_match_closed_forms(seed in any::<u64>(), phi in 0.0..(2.0 * PI), t in 0.0..20.0f64) {
        let (m, layout) = setup();
        let mut rng = seeded_rng(seed);
        let bg = sample_ground_configuration(&m, &mut rng);
        let k = match_constants(&layout, &m.physics, 1.0, 0.5, phi).unwrap();
        let grid = box_grid(&m, 4);
        for region in [Region::Input, Region::I, Region::II] {
            let st = layout.state(&m, phi, region).unwrap();
            let rc = k.region(region).unwrap();
            let snap = evaluate_beables(&m, &st, &analytic_solution(rc, &bg, t), &grid).unwrap();
            prop_assert!(snap.max_imaginary < 1e-12);
            for (x, v) in grid.iter().zip(&snap.values) {
                let c = closed_form_beables(&m, rc, &bg, x, t).unwrap();
                prop_assert!((v.a - c.a).norm() < 1e-12);
                prop_assert!((v.e - c.e).norm() < 1e-12);
                prop_assert!((v.b - c.b).norm() < 1e-12);
                prop_assert!((v.i - c.i).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn intensity_operators_agree(phi in 0.0..(2.0 * PI), x in 0.0..6.3f64, y in 0.0..6.3f64, z in 0.0..6.3f64) {
        let (m, layout) = setup();
        let p = Vector3::new(x, y, z);
        for region in [Region::I, Region::II] {
            let st = layout.state(&m, phi, region).unwrap();
            let a = intensity_operator_expectation(&m, &st, &p, IntensityDefinition::Symmetrized);
            let b = intensity_operator_expectation(&m, &st, &p, IntensityDefinition::NormalOrdered);
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}

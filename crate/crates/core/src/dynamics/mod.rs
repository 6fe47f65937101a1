//! Guidance flow of the mode coordinates: numerical integration, analytic
//! on-shell solutions and the second-order wave equation.

mod analytic;
mod guidance;
pub mod rk45;
mod wave_equation;

pub use analytic::{analytic_solution, analytic_trajectory, initial_configuration, on_shell_solution};
pub use guidance::{
    guidance_frequency, guidance_period, guidance_rhs, integrate, integrate_at, uniform_times, Controls, Diagnostics,
    Trajectory, OFF_SHELL_TOLERANCE,
};
pub use wave_equation::{region_i_wave_rhs, region_ii_wave_rhs, wave_equation_residual, WaveResidual};

use thiserror::Error;

use crate::wavefunctional::WaveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("trajectory reached a node at t = {t} (|overlap| = {overlap:e})")]
    Node { t: f64, overlap: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step limit reached at t = {0}")]
    StepLimit(f64),
    #[error("invalid time grid: {0}")]
    BadTimeGrid(String),
    #[error("need at least 5 samples for the five-point stencil, got {0}")]
    InsufficientPoints(usize),
    #[error(transparent)]
    Wave(#[from] WaveError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_space::{sample_ground_configuration, seeded_rng, BoxGeometry, FieldModel, ModeIndex, Physics};
    use crate::optics::{match_constants, MziLayout};
    use crate::wavefunctional::Region;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn setup() -> (FieldModel, MziLayout) {
        let m = FieldModel::new(BoxGeometry::new(2.0 * PI, 1).unwrap(), Physics::default()).unwrap();
        (m, MziLayout::new(ModeIndex::new([1, 0, 0], 2).unwrap()).unwrap())
    }

    #[test]
    fn input_rhs_at_unit_coordinate() {
        let (m, layout) = setup();
        let st = layout.state(&m, 0.0, Region::Input).unwrap();
        let mut cfg = sample_ground_configuration(&m, &mut seeded_rng(2));
        cfg.set(&layout.input, Complex64::new(1.0, 0.0));
        let rhs = guidance_rhs(&m, &st, &cfg).unwrap();
        assert!((rhs[&layout.input] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!(rhs.iter().filter(|(k, _)| **k != layout.input).all(|(_, v)| v.norm() == 0.0));
    }

    #[test]
    fn region_ii_integration_matches_analytic() {
        let (m, layout) = setup();
        let phi = 1.1;
        let st = layout.state(&m, phi, Region::II).unwrap();
        let k = match_constants(&layout, &m.physics, 0.8, 0.4, phi).unwrap();
        let bg = sample_ground_configuration(&m, &mut seeded_rng(3));
        let cfg0 = initial_configuration(&k.region_ii, &bg);
        let t_end = 3.0 * 2.0 * PI / k.omega0;
        let num = integrate(&m, &st, &cfg0, t_end, 31, &Controls::default()).unwrap();
        let ana = analytic_trajectory(&m, &st, &k.region_ii, &bg, &num.times).unwrap();
        assert!(!num.off_shell);
        assert!(num.max_relative_deviation(&ana, &[layout.c(), layout.d()]) < 1e-8);
    }

    #[test]
    fn off_shell_data_is_flagged() {
        let (m, layout) = setup();
        let st = layout.state(&m, 0.3, Region::I).unwrap();
        let mut cfg = sample_ground_configuration(&m, &mut seeded_rng(4));
        cfg.set(&layout.alpha(), Complex64::new(0.5, 0.1));
        cfg.set(&layout.beta(), Complex64::new(0.2, -0.7));
        let tr = integrate(&m, &st, &cfg, 5.0, 11, &Controls::default()).unwrap();
        assert!(tr.off_shell);
    }

    #[test]
    fn node_start_is_an_error() {
        let (m, layout) = setup();
        let st = layout.state(&m, 0.3, Region::I).unwrap();
        let cfg = crate::mode_space::FieldConfiguration::zeros(m.modes(), 0.0);
        assert!(matches!(integrate(&m, &st, &cfg, 1.0, 3, &Controls::default()), Err(DynamicsError::Node { .. })));
    }

    #[test]
    fn closed_form_wave_rhs_matches_generic_gradient() {
        let (m, layout) = setup();
        let mut rng = seeded_rng(8);
        for phi in [0.3, 1.7, 2.9] {
            let cfg = sample_ground_configuration(&m, &mut rng);
            let st = layout.state(&m, phi, Region::I).unwrap();
            let dq = st.quantum_potential_gradient(&m, &cfg).unwrap();
            let (a, b) = (cfg.get(&layout.alpha()).unwrap(), cfg.get(&layout.beta()).unwrap());
            let (ra, rb) = region_i_wave_rhs(1.0, a, b, phi);
            // (1/c²) q'' = -conj(∂Q/∂q + κ² q*)
            let want_a = -(dq[&layout.alpha()] + a.conj()).conj();
            let want_b = -(dq[&layout.beta()] + b.conj()).conj();
            assert!((ra - want_a).norm() < 1e-10 * want_a.norm().max(1.0));
            assert!((rb - want_b).norm() < 1e-10 * want_b.norm().max(1.0));

            let st = layout.state(&m, phi, Region::II).unwrap();
            let dq = st.quantum_potential_gradient(&m, &cfg).unwrap();
            let (c, d) = (cfg.get(&layout.c()).unwrap(), cfg.get(&layout.d()).unwrap());
            let (rc, rd) = region_ii_wave_rhs(1.0, c, d, phi);
            let want_c = -(dq[&layout.c()] + c.conj()).conj();
            let want_d = -(dq[&layout.d()] + d.conj()).conj();
            assert!((rc - want_c).norm() < 1e-10 * want_c.norm().max(1.0));
            assert!((rd - want_d).norm() < 1e-10 * want_d.norm().max(1.0));
        }
    }
}

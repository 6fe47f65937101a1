use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::expr::Expr;

/// Phase picked up on reflection and on transmission at a splitter, in
/// radians. Only `r = π/2, t = 0` is implemented.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterConvention {
    pub reflection: Expr,
    pub transmission: Expr,
}

impl Default for SplitterConvention {
    fn default() -> Self {
        SplitterConvention { reflection: Expr::Div(Expr::Pi.into(), Expr::Num(2.0).into()), transmission: Expr::Num(0.0) }
    }
}

impl SplitterConvention {
    pub fn phases(&self, phi: f64) -> (f64, f64) {
        (self.reflection.eval(phi), self.transmission.eval(phi))
    }

    /// A lossless symmetric splitter needs `cos(r - t) = 0`.
    pub fn is_unitary(&self, phi: f64) -> bool {
        let (r, t) = self.phases(phi);
        (r - t).cos().abs() < 1e-12
    }

    pub fn is_standard(&self, phi: f64) -> bool {
        let (r, t) = self.phases(phi);
        let two_pi = 2.0 * std::f64::consts::PI;
        let wrap = |x: f64| {
            let y = x.rem_euclid(two_pi);
            y.min(two_pi - y)
        };
        wrap(r - std::f64::consts::FRAC_PI_2) < 1e-12 && wrap(t) < 1e-12
    }

    pub fn reflection_factor() -> Complex64 {
        Complex64::new(0.0, FRAC_1_SQRT_2)
    }

    pub fn transmission_factor() -> Complex64 {
        Complex64::new(FRAC_1_SQRT_2, 0.0)
    }
}

/// Element acting on named beams. Every reflection (splitter or mirror)
/// turns the wave vector by 90° in the plane, swapping its x and y components.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    BeamSplitter {
        /// First input, optionally a second one entering from the other port.
        inputs: (String, Option<String>),
        reflected: String,
        transmitted: String,
        convention: SplitterConvention,
    },
    Mirror {
        beam: String,
    },
    PhaseShifter {
        beam: String,
        phase: Expr,
    },
}

impl OpticalElement {
    pub fn mirror_factor() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            OpticalElement::BeamSplitter { .. } => "BS",
            OpticalElement::Mirror { .. } => "MIRROR",
            OpticalElement::PhaseShifter { .. } => "PHASE",
        }
    }
}

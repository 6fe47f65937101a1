use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::circuit::CircuitDescription;
use super::element::{OpticalElement, SplitterConvention};
use super::OpticsError;
use crate::mode_space::{FieldModel, ModeIndex};
use crate::wavefunctional::{Beam, PhotonState, Region};

/// 90° in-plane turn: swap the x and y lattice components.
fn turn(beam: &str, mode: &ModeIndex) -> Result<ModeIndex, OpticsError> {
    let n = mode.n();
    let out = ModeIndex::new([n[1], n[0], n[2]], mode.mu()).expect("turn keeps n nonzero");
    if !out.is_canonical() {
        return Err(OpticsError::NonCanonicalRoute { beam: beam.to_string(), mode: out });
    }
    Ok(out)
}

/// Apply one element. The result is tagged [`Region::Custom`].
pub fn apply_element(
    model: &FieldModel,
    state: &PhotonState,
    element: &OpticalElement,
    phi: f64,
) -> Result<PhotonState, OpticsError> {
    let mut beams: Vec<Beam> = state.beams().to_vec();
    route(&mut beams, element, phi)?;
    Ok(PhotonState::new(model, beams, state.kappa0(), Region::Custom)?)
}

/// Element action on bare beams. Between two mirrors the arms may briefly
/// share a mode, so no state validation happens here.
fn route(beams: &mut Vec<Beam>, element: &OpticalElement, phi: f64) -> Result<(), OpticsError> {
    let find = |beams: &[Beam], label: &str| beams.iter().position(|b| b.label == label);
    match element {
        OpticalElement::Mirror { beam } => {
            let i = find(&beams, beam).ok_or_else(|| OpticsError::Routing(beam.clone()))?;
            beams[i].amplitude *= OpticalElement::mirror_factor();
            beams[i].mode = turn(beam, &beams[i].mode)?;
        }
        OpticalElement::PhaseShifter { beam, phase } => {
            let i = find(&beams, beam).ok_or_else(|| OpticsError::Routing(beam.clone()))?;
            beams[i].amplitude *= Complex64::from_polar(1.0, phase.eval(phi));
        }
        OpticalElement::BeamSplitter { inputs, reflected, transmitted, .. } => {
            let first = find(&beams, &inputs.0).map(|i| beams.remove(i));
            let second = inputs.1.as_ref().and_then(|l| find(&beams, l)).map(|i| beams.remove(i));
            let base = match (&first, &second) {
                (Some(b), _) => b.mode,
                (None, Some(b)) => turn(&b.label, &b.mode)?,
                (None, None) => return Err(OpticsError::Routing(inputs.0.clone())),
            };
            let crossed = turn(reflected, &base)?;
            if let Some(b) = &second {
                if b.mode != crossed {
                    return Err(OpticsError::Routing(b.label.clone()));
                }
            }
            let a1 = first.map(|b| b.amplitude).unwrap_or_default();
            let a2 = second.map(|b| b.amplitude).unwrap_or_default();
            let (r, t) = (SplitterConvention::reflection_factor(), SplitterConvention::transmission_factor());
            beams.push(Beam { label: reflected.clone(), mode: crossed, amplitude: r * a1 + t * a2 });
            beams.push(Beam { label: transmitted.clone(), mode: base, amplitude: t * a1 + r * a2 });
        }
    }
    Ok(())
}

/// States seen between splitters: entry `r` follows the `r`-th splitter.
#[derive(Debug, Clone)]
pub struct CircuitRun {
    pub stages: Vec<PhotonState>,
}

/// Push a photon in `input_mode` through every element in order.
pub fn run_circuit(
    model: &FieldModel,
    circuit: &CircuitDescription,
    input_mode: ModeIndex,
    phi: f64,
) -> Result<CircuitRun, OpticsError> {
    let input = PhotonState::input(model, &circuit.input, input_mode)?;
    let kappa0 = input.kappa0();
    let mut beams = input.beams().to_vec();
    let mut stages = Vec::new();
    for line in &circuit.elements {
        if matches!(line.element, OpticalElement::BeamSplitter { .. }) {
            stages.push(PhotonState::new(model, beams.clone(), kappa0, Region::Custom)?);
        }
        route(&mut beams, &line.element, phi)?;
    }
    stages.push(PhotonState::new(model, beams, kappa0, Region::Custom)?);
    let standard = circuit.is_standard();
    for (i, s) in stages.iter_mut().enumerate() {
        s.region = match (standard, i) {
            (_, 0) => Region::Input,
            (true, 1) => Region::I,
            (true, 2) => Region::II,
            _ => Region::Custom,
        };
    }
    Ok(CircuitRun { stages })
}

/// Mode assignment of the standard interferometer for a given input mode.
///
/// `α` and `d` travel along the turned direction, `β` and `c` along the input
/// direction; all share the input polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziLayout {
    pub input: ModeIndex,
    pub turned: ModeIndex,
}

impl MziLayout {
    pub fn new(input: ModeIndex) -> Result<Self, OpticsError> {
        Ok(MziLayout { input, turned: turn("alpha", &input)? })
    }

    pub fn alpha(&self) -> ModeIndex {
        self.turned
    }

    pub fn beta(&self) -> ModeIndex {
        self.input
    }

    pub fn c(&self) -> ModeIndex {
        self.input
    }

    pub fn d(&self) -> ModeIndex {
        self.turned
    }

    /// Closed-form amplitudes of the standard circuit.
    pub fn beams(&self, phi: f64, region: Region) -> Vec<Beam> {
        let e = Complex64::from_polar(1.0, phi);
        let i = Complex64::i();
        let beam = |label: &str, mode, amplitude| Beam { label: label.to_string(), mode, amplitude };
        match region {
            Region::Input => vec![beam("in", self.input, Complex64::new(1.0, 0.0))],
            Region::I => vec![beam("alpha", self.alpha(), i * FRAC_1_SQRT_2), beam("beta", self.beta(), -e * FRAC_1_SQRT_2)],
            Region::II => vec![beam("c", self.c(), -(1.0 + e) / 2.0), beam("d", self.d(), i * (1.0 - e) / 2.0)],
            Region::Custom | Region::Vacuum => Vec::new(),
        }
    }

    pub fn state(&self, model: &FieldModel, phi: f64, region: Region) -> Result<PhotonState, OpticsError> {
        if region == Region::Vacuum {
            return Ok(PhotonState::vacuum());
        }
        Ok(PhotonState::new(model, self.beams(phi, region), model.kappa(&self.input), region)?)
    }
}

/// State in `region`. The standard circuit uses the closed-form amplitudes;
/// any other circuit is pushed through element by element, with region `I`
/// and `II` meaning after one and two splitters.
pub fn region_state(
    model: &FieldModel,
    circuit: &CircuitDescription,
    input_mode: ModeIndex,
    phi: f64,
    region: Region,
) -> Result<PhotonState, OpticsError> {
    if circuit.is_standard() {
        return MziLayout::new(input_mode)?.state(model, phi, region);
    }
    let run = run_circuit(model, circuit, input_mode, phi)?;
    let idx = match region {
        Region::Input => 0,
        Region::I => 1,
        Region::II => 2,
        Region::Custom => run.stages.len() - 1,
        Region::Vacuum => return Ok(PhotonState::vacuum()),
    };
    run.stages.get(idx).cloned().ok_or_else(|| OpticsError::Routing(format!("circuit has no stage {idx}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_space::{BoxGeometry, Physics};
    use crate::optics::parse_circuit;
    use std::f64::consts::PI;

    fn model() -> FieldModel {
        FieldModel::new(BoxGeometry::new(2.0 * PI, 1).unwrap(), Physics::default()).unwrap()
    }

    fn x_mode() -> ModeIndex {
        ModeIndex::new([1, 0, 0], 2).unwrap()
    }

    #[test]
    fn mirror_multiplies_by_i_and_turns() {
        let m = model();
        let s = PhotonState::input(&m, "in", x_mode()).unwrap();
        let out = apply_element(&m, &s, &OpticalElement::Mirror { beam: "in".into() }, 0.0).unwrap();
        assert_eq!(out.beams()[0].amplitude, Complex64::new(0.0, 1.0));
        assert_eq!(out.beams()[0].mode.n(), [0, 1, 0]);
    }

    #[test]
    fn single_input_splitter() {
        let m = model();
        let s = PhotonState::input(&m, "in", x_mode()).unwrap();
        let c = parse_circuit("INPUT in\nBS in -> r,t\n").unwrap();
        let out = apply_element(&m, &s, &c.elements[0].element, 0.0).unwrap();
        assert!((out.beam("r").unwrap().amplitude - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-16);
        assert!((out.beam("t").unwrap().amplitude - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn element_chain_matches_closed_form() {
        let m = model();
        let circuit = CircuitDescription::standard();
        let layout = MziLayout::new(x_mode()).unwrap();
        for k in 0..13 {
            let phi = k as f64 * PI / 6.0;
            let run = run_circuit(&m, &circuit, x_mode(), phi).unwrap();
            for (stage, region) in run.stages.iter().zip([Region::Input, Region::I, Region::II]) {
                assert_eq!(stage.region, region);
                for b in layout.beams(phi, region) {
                    let got = stage.beam(&b.label).unwrap();
                    assert_eq!(got.mode, b.mode);
                    assert!((got.amplitude - b.amplitude).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn extinction_at_zero_and_pi() {
        let layout = MziLayout::new(x_mode()).unwrap();
        let zero = layout.beams(0.0, Region::II);
        assert_eq!(zero[0].amplitude, Complex64::new(-1.0, 0.0));
        assert_eq!(zero[1].amplitude.norm(), 0.0);
        let pi = layout.beams(PI, Region::II);
        assert!(pi[0].amplitude.norm() < 1e-16);
        assert!((pi[1].amplitude - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn nonstandard_circuit_goes_element_by_element() {
        let m = model();
        let text = "INPUT in\nBS in -> beta,alpha\nMIRROR alpha\nMIRROR beta\nBS alpha,beta -> c,d\n";
        let c = parse_circuit(text).unwrap();
        let s = region_state(&m, &c, x_mode(), 0.4, Region::II).unwrap();
        let std = MziLayout::new(x_mode()).unwrap().state(&m, 0.0, Region::II).unwrap();
        for b in std.beams() {
            assert!((s.beam(&b.label).unwrap().amplitude - b.amplitude).norm() < 1e-14);
        }
    }

    #[test]
    fn missing_beam_is_a_routing_error() {
        let m = model();
        let s = PhotonState::input(&m, "in", x_mode()).unwrap();
        let err = apply_element(&m, &s, &OpticalElement::Mirror { beam: "zz".into() }, 0.0).unwrap_err();
        assert_eq!(err, OpticsError::Routing("zz".into()));
    }
}

//! Interferometer elements, the circuit description language, region states
//! and the analytic integration constants.

mod circuit;
mod constants;
mod element;
mod expr;
mod pipeline;

pub use circuit::{parse_circuit, CircuitDescription, Detector, ElementLine, Placement, STANDARD_MZI};
pub use constants::{match_constants, trace_constants, BeamConstants, ConstantSet, RegionConstants, EXTINCTION_TOLERANCE};
pub use element::{OpticalElement, SplitterConvention};
pub use expr::Expr;
pub use pipeline::{apply_element, region_state, run_circuit, CircuitRun, MziLayout};

use thiserror::Error;

use crate::mode_space::ModeIndex;
use crate::wavefunctional::WaveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line} (`{element}`): {message}")]
    Validation { line: usize, element: String, message: String },
    #[error("beam `{0}` is not present in the state")]
    Routing(String),
    #[error("routing moves beam `{beam}` onto non-canonical mode {mode}")]
    NonCanonicalRoute { beam: String, mode: ModeIndex },
    #[error("amplitude q0 must be positive, got {0}")]
    NonPositiveAmplitude(f64),
    #[error(transparent)]
    Wave(#[from] WaveError),
}

//! Causal (field-beable) model of a single photon in a delayed-choice
//! Mach-Zehnder interferometer.
//!
//! The vector potential is expanded in normal modes of a periodic box. A
//! single-photon wave functional guides the complex mode coordinates through
//! a first-order equation of motion; electromagnetic beables (A, E, B and the
//! intensity) follow from the coordinates and the phase of the wave functional.
//!
//! Modules:
//! * [`mode_space`]: box lattice, polarization basis, field configurations, sampling
//! * [`wavefunctional`]: one-photon states, phase function, quantum potential
//! * [`optics`]: beam splitters, mirrors, phase shifters, circuit DSL, region constants
//! * [`dynamics`]: guidance equation, adaptive integrator, analytic solutions
//! * [`beables`]: field evaluation, classical relations, totals, intensity operators
//! * [`photodetection`]: first-order photoionization amplitude for which-path detection
//! * [`fock`]: sparse Fock-space vectors with ladder operators
//! * [`export`]: CSV and JSON writers for trajectories, snapshots and reports

pub mod beables;
pub mod dynamics;
pub mod export;
pub mod fock;
pub mod mode_space;
pub mod optics;
pub mod photodetection;
pub mod wavefunctional;

pub use mode_space::{BoxGeometry, FieldConfiguration, FieldModel, ModeIndex, ModeSet, Physics};
pub use wavefunctional::PhotonState;

pub use nalgebra::Vector3;
pub use num_complex::Complex64;

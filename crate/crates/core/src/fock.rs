//! Sparse Fock-space vectors over the full lattice (both signs of `k`).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::mode_space::ModeIndex;
use crate::wavefunctional::PhotonState;

/// Occupation numbers, zero entries omitted.
pub type Occupation = BTreeMap<ModeIndex, u32>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockState {
    terms: BTreeMap<Occupation, Complex64>,
}

impl FockState {
    pub fn zero() -> Self {
        FockState::default()
    }

    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation::new(), Complex64::new(1.0, 0.0));
        FockState { terms }
    }

    /// `Σ_j c_j a†_j |0⟩`.
    pub fn from_photon_state(state: &PhotonState) -> Self {
        if state.is_vacuum() {
            return FockState::vacuum();
        }
        let mut out = FockState::zero();
        for b in state.beams() {
            let mut occ = Occupation::new();
            occ.insert(b.mode, 1);
            out.add_term(occ, b.amplitude);
        }
        out
    }

    fn add_term(&mut self, occ: Occupation, amp: Complex64) {
        let entry = self.terms.entry(occ).or_default();
        *entry += amp;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn annihilate(&self, mode: &ModeIndex) -> FockState {
        let mut out = FockState::zero();
        for (occ, amp) in &self.terms {
            let n = occ.get(mode).copied().unwrap_or(0);
            if n == 0 {
                continue;
            }
            let mut next = occ.clone();
            if n == 1 {
                next.remove(mode);
            } else {
                next.insert(*mode, n - 1);
            }
            out.add_term(next, amp * (n as f64).sqrt());
        }
        out
    }

    pub fn create(&self, mode: &ModeIndex) -> FockState {
        let mut out = FockState::zero();
        for (occ, amp) in &self.terms {
            let n = occ.get(mode).copied().unwrap_or(0);
            let mut next = occ.clone();
            next.insert(*mode, n + 1);
            out.add_term(next, amp * ((n + 1) as f64).sqrt());
        }
        out
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.terms
            .iter()
            .filter_map(|(occ, a)| other.terms.get(occ).map(|b| a.conj() * b))
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest total photon number carried by a nonzero term.
    pub fn max_photon_number(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(occ, _)| occ.values().sum())
            .max()
            .unwrap_or(0)
    }
}

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::lattice::{BasisState, Direction};

/// Sparse walk state. Amplitudes are stored with the accumulated power of the
/// formal step phase `z` kept apart in `global_phase_exponent`, so they are
/// exactly the coefficients `a` of `z^m sum a |nu, j'>`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WalkState {
    amplitudes: BTreeMap<BasisState, Complex64>,
    pub global_phase_exponent: i64,
}

impl WalkState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(state: BasisState) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(state, Complex64::new(1.0, 0.0));
        Self {
            amplitudes,
            global_phase_exponent: 0,
        }
    }

    pub fn from_amplitudes(amplitudes: impl IntoIterator<Item = (BasisState, Complex64)>) -> Self {
        let mut s = Self::new();
        for (b, a) in amplitudes {
            s.add(b, a);
        }
        s
    }

    /// Accumulates `a` onto the amplitude of `b`, creating the entry if absent.
    pub fn add(&mut self, b: BasisState, a: Complex64) {
        *self.amplitudes.entry(b).or_default() += a;
    }

    pub fn amplitude(&self, b: BasisState) -> Complex64 {
        self.amplitudes.get(&b).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisState, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Number of stored (reachable) basis states, including accidental zeros.
    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    /// Number of amplitudes that are not exactly zero.
    pub fn nonzero_count(&self) -> usize {
        self.amplitudes
            .values()
            .filter(|a| **a != Complex64::default())
            .count()
    }

    /// Sum of `|a_+|^2 + |a_-|^2` per vertex.
    pub fn site_probabilities(&self) -> BTreeMap<i64, f64> {
        let mut p = BTreeMap::new();
        for (b, a) in &self.amplitudes {
            *p.entry(b.j).or_insert(0.0) += a.norm_sqr();
        }
        p
    }

    /// Largest per-entry difference between two states.
    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        self.amplitudes
            .keys()
            .chain(other.amplitudes.keys())
            .map(|b| (self.amplitude(*b) - other.amplitude(*b)).norm())
            .fold(0.0, f64::max)
    }

    pub fn component(&self, nu: Direction) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .filter(move |(b, _)| b.sigma == nu)
            .map(|(b, a)| (b.j, *a))
    }
}

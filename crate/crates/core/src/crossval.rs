//! Agreement between unitary evolution, the Green's function and the path sum.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::evolution::evolve_trajectory;
use crate::greens::amplitude_via_greens;
use crate::lattice::{BasisState, Direction, Lattice};
use crate::paths::{enumerate_all_paths, path_amplitude};
use crate::state::WalkState;

/// Largest pairwise difference seen, with the transition where it occurred.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Worst {
    pub residual: f64,
    pub sigma: Option<Direction>,
    pub nu: Option<Direction>,
    pub j_prime: i64,
    pub m: usize,
}

impl Worst {
    fn update(&mut self, residual: f64, sigma: Direction, nu: Direction, j_prime: i64, m: usize) {
        if residual > self.residual || self.sigma.is_none() {
            *self = Self {
                residual,
                sigma: Some(sigma),
                nu: Some(nu),
                j_prime,
                m,
            };
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub evolve_greens: Worst,
    pub evolve_paths: Worst,
    pub greens_paths: Worst,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.evolve_greens
            .residual
            .max(self.evolve_paths.residual)
            .max(self.greens_paths.residual)
    }

    /// The pair with the largest residual.
    pub fn worst(&self) -> (&'static str, Worst) {
        [
            ("evolve-greens", self.evolve_greens),
            ("evolve-paths", self.evolve_paths),
            ("greens-paths", self.greens_paths),
        ]
        .into_iter()
        .fold(("evolve-greens", self.evolve_greens), |acc, x| {
            if x.1.residual > acc.1.residual {
                x
            } else {
                acc
            }
        })
    }

    pub fn merge(&mut self, other: &Residuals) {
        for (mine, theirs) in [
            (&mut self.evolve_greens, other.evolve_greens),
            (&mut self.evolve_paths, other.evolve_paths),
            (&mut self.greens_paths, other.greens_paths),
        ] {
            if theirs.sigma.is_some() && (mine.sigma.is_none() || theirs.residual > mine.residual) {
                *mine = theirs;
            }
        }
    }
}

/// Compares the three routes for every reachable `(nu, j')`, both initial
/// directions at vertex `j`, and `m = 0 ..= m_max`.
pub fn three_routes(lat: &Lattice, j: i64, m_max: usize) -> Result<Residuals> {
    let mut out = Residuals::default();
    for sigma in Direction::BOTH {
        let initial = BasisState::new(sigma, j);
        let traj = evolve_trajectory(&WalkState::basis(initial), lat, m_max)?;
        for (m, ev) in traj.iter().enumerate() {
            let mut by_paths = WalkState::new();
            for p in enumerate_all_paths(sigma, j, m)? {
                by_paths.add(p.end, path_amplitude(&p, lat));
            }
            let mi = m as i64;
            for dj in (-mi..=mi).step_by(2) {
                for nu in Direction::BOTH {
                    let target = BasisState::new(nu, j + dj);
                    let e: Complex64 = ev.amplitude(target);
                    let g = amplitude_via_greens(sigma, j, nu, j + dj, m, lat)?;
                    let p = by_paths.amplitude(target);
                    out.evolve_greens
                        .update((e - g).norm(), sigma, nu, j + dj, m);
                    out.evolve_paths
                        .update((e - p).norm(), sigma, nu, j + dj, m);
                    out.greens_paths
                        .update((g - p).norm(), sigma, nu, j + dj, m);
                }
            }
        }
    }
    Ok(out)
}

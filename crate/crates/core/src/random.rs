//! Seeded random unitary lattices.
//!
//! Generation draws from `rand_chacha::ChaCha8Rng` seeded with
//! `seed_from_u64`, in a fixed order: per vertex `t` uniform in
//! `[0.05, 0.95]`, then `phi_t+`, `phi_t-`, `phi_r+` uniform in `[0, 2 pi)`,
//! then a fair coin picking the `+pi` or `-pi` branch for `phi_r-`. The
//! default vertex is drawn first, then vertices `left..=right` in order.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::{Lattice, VertexAmplitudes};

/// Unitary vertex with `t` in `[0.05, 0.95]` and random phases.
pub fn random_vertex<R: Rng + ?Sized>(rng: &mut R) -> VertexAmplitudes {
    let t: f64 = rng.gen_range(0.05..=0.95);
    let r = (1.0 - t * t).sqrt();
    let pt_p = rng.gen_range(0.0..2.0 * PI);
    let pt_m = rng.gen_range(0.0..2.0 * PI);
    let pr_p = rng.gen_range(0.0..2.0 * PI);
    let branch = if rng.gen_bool(0.5) { PI } else { -PI };
    let pr_m = (pt_p + pt_m + branch - pr_p).rem_euclid(2.0 * PI);
    VertexAmplitudes::from_polar(t, r, [pt_p, pt_m, pr_p, pr_m])
}

/// Vertex-dependent lattice with independent random vertices on `left..=right`.
pub fn random_lattice<R: Rng + ?Sized>(rng: &mut R, left: i64, right: i64) -> Lattice {
    let default = random_vertex(rng);
    let overrides: BTreeMap<i64, VertexAmplitudes> =
        (left..=right).map(|k| (k, random_vertex(rng))).collect();
    Lattice::new(default, overrides, None).expect("random vertices are unitary")
}

/// Homogeneous lattice built from one random vertex.
pub fn random_homogeneous<R: Rng + ?Sized>(rng: &mut R) -> Lattice {
    Lattice::homogeneous(random_vertex(rng)).expect("random vertices are unitary")
}

/// The `index`-th lattice of a seeded family, covering `left..=right`.
pub fn seeded_lattice(seed: u64, index: u64, left: i64, right: i64) -> Lattice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index);
    random_lattice(&mut rng, left, right)
}

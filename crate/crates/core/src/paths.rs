//! Explicit sum over scattering trajectories.
//!
//! Every step either transmits or reflects at the current vertex, so there
//! are `2^m` paths of length `m`. Grouping paths by their multiset of
//! scattering factors realizes the path operator: on a homogeneous lattice
//! all paths with the same number of direction changes carry the same
//! amplitude.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BasisState, Direction, Lattice, ScatterEvent};

/// Longest path length [`enumerate_paths`] accepts.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PathStep {
    pub vertex: i64,
    pub event: ScatterEvent,
    /// Incoming direction at `vertex`.
    pub dir: Direction,
}

impl PathStep {
    fn next_state(self) -> BasisState {
        let s = self.dir.sign();
        match self.event {
            ScatterEvent::Transmit => BasisState::new(self.dir, self.vertex + s),
            ScatterEvent::Reflect => BasisState::new(-self.dir, self.vertex - s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRecord {
    pub steps: Vec<PathStep>,
    pub start: BasisState,
    pub end: BasisState,
    pub n_changes: usize,
}

impl PathRecord {
    fn from_steps(start: BasisState, steps: Vec<PathStep>) -> Self {
        let end = steps.last().map(|s| s.next_state()).unwrap_or(start);
        let n_changes = steps
            .iter()
            .filter(|s| s.event == ScatterEvent::Reflect)
            .count();
        Self {
            steps,
            start,
            end,
            n_changes,
        }
    }

    pub fn m(&self) -> usize {
        self.steps.len()
    }

    /// Per-vertex multiset of scattering factors.
    pub fn monomial(&self) -> BTreeMap<PathStep, usize> {
        let mut out = BTreeMap::new();
        for s in &self.steps {
            *out.entry(*s).or_insert(0) += 1;
        }
        out
    }

    /// Site-independent factor counts.
    pub fn factor_counts(&self) -> FactorCounts {
        let mut c = FactorCounts::default();
        for s in &self.steps {
            let slot = match (s.event, s.dir) {
                (ScatterEvent::Transmit, Direction::Plus) => &mut c.t_plus,
                (ScatterEvent::Transmit, Direction::Minus) => &mut c.t_minus,
                (ScatterEvent::Reflect, Direction::Plus) => &mut c.r_plus,
                (ScatterEvent::Reflect, Direction::Minus) => &mut c.r_minus,
            };
            *slot += 1;
        }
        c
    }

    /// Replays the steps from `start` and checks they chain and end at `end`.
    pub fn is_consistent(&self) -> bool {
        let mut state = self.start;
        for s in &self.steps {
            if s.vertex != state.j || s.dir != state.sigma {
                return false;
            }
            state = s.next_state();
        }
        state == self.end
    }
}

/// Exponents of `t^(+) t^(-) r^(+) r^(-)` in a path amplitude.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FactorCounts {
    pub t_plus: usize,
    pub t_minus: usize,
    pub r_plus: usize,
    pub r_minus: usize,
}

impl FactorCounts {
    pub fn reflections(&self) -> usize {
        self.r_plus + self.r_minus
    }
}

fn can_reach(state: BasisState, target: BasisState, left: usize) -> bool {
    let dist = (target.j - state.j).unsigned_abs() as usize;
    dist <= left && (left - dist).is_multiple_of(2)
}

fn dfs(
    state: BasisState,
    target: Option<BasisState>,
    left: usize,
    steps: &mut Vec<PathStep>,
    start: BasisState,
    out: &mut Vec<PathRecord>,
) {
    if left == 0 {
        if target.is_none_or(|t| t == state) {
            out.push(PathRecord::from_steps(start, steps.clone()));
        }
        return;
    }
    for event in [ScatterEvent::Transmit, ScatterEvent::Reflect] {
        let step = PathStep {
            vertex: state.j,
            event,
            dir: state.sigma,
        };
        let next = step.next_state();
        if target.is_some_and(|t| !can_reach(next, t, left - 1)) {
            continue;
        }
        steps.push(step);
        dfs(next, target, left - 1, steps, start, out);
        steps.pop();
    }
}

fn enumerate(start: BasisState, target: Option<BasisState>, m: usize) -> Result<Vec<PathRecord>> {
    if m > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            m,
            limit: ENUMERATION_LIMIT,
        });
    }
    if m == 0 {
        let mut out = Vec::new();
        if target.is_none_or(|t| t == start) {
            out.push(PathRecord::from_steps(start, Vec::new()));
        }
        return Ok(out);
    }
    // split on the first step, transmit branch first to keep a fixed order
    let branches: Vec<Vec<PathRecord>> = [ScatterEvent::Transmit, ScatterEvent::Reflect]
        .into_par_iter()
        .map(|event| {
            let step = PathStep {
                vertex: start.j,
                event,
                dir: start.sigma,
            };
            let next = step.next_state();
            let mut out = Vec::new();
            if target.is_none_or(|t| can_reach(next, t, m - 1)) {
                let mut steps = vec![step];
                dfs(next, target, m - 1, &mut steps, start, &mut out);
            }
            out
        })
        .collect();
    Ok(branches.into_iter().flatten().collect())
}

/// All `m`-step paths from `(sigma, j)` ending at `(nu, j_prime)`.
pub fn enumerate_paths(
    sigma: Direction,
    j: i64,
    nu: Direction,
    j_prime: i64,
    m: usize,
) -> Result<Vec<PathRecord>> {
    enumerate(
        BasisState::new(sigma, j),
        Some(BasisState::new(nu, j_prime)),
        m,
    )
}

/// All `2^m` paths from `(sigma, j)`.
pub fn enumerate_all_paths(sigma: Direction, j: i64, m: usize) -> Result<Vec<PathRecord>> {
    enumerate(BasisState::new(sigma, j), None, m)
}

/// Product of the scattering amplitudes met along the path.
pub fn path_amplitude(p: &PathRecord, lat: &Lattice) -> Complex64 {
    p.steps.iter().fold(Complex64::new(1.0, 0.0), |acc, s| {
        acc * lat.vertex(s.vertex).amplitude(s.event, s.dir)
    })
}

/// Sum of [`path_amplitude`] over all paths to `(nu, j_prime)`.
pub fn amplitude_via_paths(
    sigma: Direction,
    j: i64,
    nu: Direction,
    j_prime: i64,
    m: usize,
    lat: &Lattice,
) -> Result<Complex64> {
    Ok(enumerate_paths(sigma, j, nu, j_prime, m)?
        .iter()
        .map(|p| path_amplitude(p, lat))
        .sum())
}

/// Exact binomial coefficient, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from((n - i) as u64) / BigUint::from((i + 1) as u64);
    }
    acc
}

/// Steps to the right and to the left, `(d+, d-)`, or `None` when
/// `delta_j` cannot be reached in `m` steps.
pub fn displacement_split(delta_j: i64, m: usize) -> Option<(i64, i64)> {
    let m = m as i64;
    if delta_j.abs() > m || (m - delta_j).rem_euclid(2) != 0 {
        return None;
    }
    Some(((m + delta_j) / 2, (m - delta_j) / 2))
}

/// Number of `m`-step paths from `(sigma, j)` to `(nu, j_prime)`:
/// `C(m - 1, d^(sigma) - delta_{sigma nu})`, with `d^(sigma)` the number of
/// steps taken in direction `sigma`.
pub fn count_paths(sigma: Direction, j: i64, nu: Direction, j_prime: i64, m: usize) -> BigUint {
    let Some((d_plus, d_minus)) = displacement_split(j_prime - j, m) else {
        return BigUint::zero();
    };
    if m == 0 {
        return if sigma == nu {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let d_sigma = if sigma == Direction::Plus {
        d_plus
    } else {
        d_minus
    };
    let delta = i64::from(sigma == nu);
    binomial(m as i64 - 1, d_sigma - delta)
}

/// Paths to vertex `j_prime` in either direction, `C(m, d^(+))`.
pub fn count_paths_coined(j: i64, j_prime: i64, m: usize) -> BigUint {
    match displacement_split(j_prime - j, m) {
        Some((d_plus, _)) => binomial(m as i64, d_plus),
        None => BigUint::zero(),
    }
}

/// Paths sharing one multiset of scattering factors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathGroup {
    pub factors: FactorCounts,
    pub n_changes: usize,
    /// Class index `n` with `n_changes = 2n + 1 + delta_{sigma nu}`.
    pub n: i64,
    pub multiplicity: usize,
    /// Indices into the grouped slice.
    pub members: Vec<usize>,
}

fn check_shared_endpoints(paths: &[PathRecord]) -> Result<()> {
    if let Some(first) = paths.first() {
        if paths
            .iter()
            .any(|p| p.start != first.start || p.end != first.end || p.m() != first.m())
        {
            return Err(Error::MixedEndpoints);
        }
    }
    Ok(())
}

fn class_index(start: BasisState, end: BasisState, n_changes: usize) -> i64 {
    let delta = i64::from(start.sigma == end.sigma);
    (n_changes as i64 - 1 - delta).div_euclid(2)
}

/// Groups paths by their site-independent factor counts, ordered by `n`.
pub fn group_by_monomial(paths: &[PathRecord]) -> Result<Vec<PathGroup>> {
    check_shared_endpoints(paths)?;
    let mut groups: BTreeMap<(usize, FactorCounts), Vec<usize>> = BTreeMap::new();
    for (i, p) in paths.iter().enumerate() {
        groups
            .entry((p.n_changes, p.factor_counts()))
            .or_default()
            .push(i);
    }
    Ok(groups
        .into_iter()
        .map(|((n_changes, factors), members)| {
            let p = &paths[members[0]];
            PathGroup {
                factors,
                n_changes,
                n: class_index(p.start, p.end, n_changes),
                multiplicity: members.len(),
                members,
            }
        })
        .collect())
}

/// Per-vertex monomial with the indices of the paths sharing it.
pub type VertexGroup = (BTreeMap<PathStep, usize>, Vec<usize>);

/// Groups paths by their full per-vertex monomial.
pub fn group_by_vertex_monomial(paths: &[PathRecord]) -> Result<Vec<VertexGroup>> {
    check_shared_endpoints(paths)?;
    let mut groups: BTreeMap<Vec<(PathStep, usize)>, Vec<usize>> = BTreeMap::new();
    for (i, p) in paths.iter().enumerate() {
        groups
            .entry(p.monomial().into_iter().collect())
            .or_default()
            .push(i);
    }
    Ok(groups
        .into_iter()
        .map(|(k, v)| (k.into_iter().collect(), v))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interference {
    Constructive,
    Destructive,
}

/// Verdict for two group contributions: destructive when they point in
/// opposite half-planes.
pub fn pair_interference(a: Complex64, b: Complex64) -> Interference {
    if (a * b.conj()).re < 0.0 {
        Interference::Destructive
    } else {
        Interference::Constructive
    }
}

/// Destructive if any pair of group contributions interferes destructively.
pub fn overall_interference(contributions: &[Complex64]) -> Interference {
    for (i, a) in contributions.iter().enumerate() {
        for b in &contributions[i + 1..] {
            if pair_interference(*a, *b) == Interference::Destructive {
                return Interference::Destructive;
            }
        }
    }
    Interference::Constructive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve;
    use crate::lattice::{make_ballistic_lattice, make_unbiased_lattice};
    use crate::random::random_lattice;
    use crate::state::WalkState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: Direction = Direction::Plus;
    const M: Direction = Direction::Minus;

    #[test]
    fn single_path_back_two_sites() {
        let paths = enumerate_paths(P, 0, M, -2, 2).unwrap();
        assert_eq!(paths.len(), 1);
        let p = &paths[0];
        assert_eq!(
            p.steps[0],
            PathStep {
                vertex: 0,
                event: ScatterEvent::Reflect,
                dir: P
            }
        );
        assert_eq!(
            p.steps[1],
            PathStep {
                vertex: -1,
                event: ScatterEvent::Transmit,
                dir: M
            }
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lat = random_lattice(&mut rng, -4, 4);
        let expected = lat.vertex(0).r_plus * lat.vertex(-1).t_minus;
        assert!((path_amplitude(p, &lat) - expected).norm() < 1e-15);
    }

    #[test]
    fn five_step_examples() {
        let near = enumerate_paths(P, 0, P, 1, 5).unwrap();
        assert_eq!(near.len(), 6);
        let far = enumerate_paths(P, 0, P, 3, 5).unwrap();
        assert_eq!(far.len(), 4);
        assert!(far.iter().all(|p| p.n_changes == 2));
        assert!(near.iter().chain(&far).all(PathRecord::is_consistent));
    }

    #[test]
    fn union_has_two_to_the_m_paths() {
        for m in 0..=12 {
            let all = enumerate_all_paths(M, 3, m).unwrap();
            assert_eq!(all.len(), 1 << m);
            assert!(all.iter().all(PathRecord::is_consistent));
        }
    }

    #[test]
    fn guard_rejects_long_enumeration() {
        assert_eq!(
            enumerate_paths(P, 0, P, 1, 21),
            Err(Error::EnumerationTooLarge {
                m: 21,
                limit: ENUMERATION_LIMIT
            })
        );
    }

    #[test]
    fn ballistic_path_has_unit_amplitude() {
        let p = &enumerate_paths(P, 0, P, 7, 7).unwrap()[0];
        assert_eq!(
            path_amplitude(p, &make_ballistic_lattice()),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn path_sum_matches_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..3 {
            let lat = random_lattice(&mut rng, -16, 16);
            for m in [1, 6, 11, 14] {
                for sigma in Direction::BOTH {
                    let ev = evolve(&WalkState::basis(BasisState::new(sigma, 0)), &lat, m).unwrap();
                    let mut paths = WalkState::new();
                    for p in enumerate_all_paths(sigma, 0, m).unwrap() {
                        paths.add(p.end, path_amplitude(&p, &lat));
                    }
                    assert!(ev.max_abs_diff(&paths) < 1e-10, "m = {m}");
                }
            }
        }
    }

    #[test]
    fn counts_match_enumeration() {
        for m in 0..=14usize {
            for sigma in Direction::BOTH {
                let mut by_target: BTreeMap<BasisState, usize> = BTreeMap::new();
                for p in enumerate_all_paths(sigma, 2, m).unwrap() {
                    *by_target.entry(p.end).or_insert(0) += 1;
                }
                let mi = m as i64;
                let mut total = BigUint::zero();
                for jp in 2 - mi - 1..=2 + mi + 1 {
                    for nu in Direction::BOTH {
                        let c = count_paths(sigma, 2, nu, jp, m);
                        let e = by_target
                            .get(&BasisState::new(nu, jp))
                            .copied()
                            .unwrap_or(0);
                        assert_eq!(c, BigUint::from(e), "m {m} sigma {sigma} nu {nu} j' {jp}");
                        total += c;
                    }
                }
                assert_eq!(total, BigUint::one() << m);
            }
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_paths(P, 0, P, 1, 5), BigUint::from(6u32));
        assert_eq!(count_paths(P, 0, P, 3, 5), BigUint::from(4u32));
        assert_eq!(count_paths_coined(0, 0, 2), BigUint::from(2u32));
        assert_eq!(count_paths_coined(0, 1, 5), BigUint::from(10u32));
        assert_eq!(count_paths_coined(4, 13, 9), BigUint::one());
        assert_eq!(count_paths(P, 0, P, 2, 5), BigUint::zero());
    }

    #[test]
    fn coined_count_is_sum_over_directions() {
        for m in 0..=64usize {
            let mi = m as i64;
            for dj in -mi..=mi {
                for sigma in Direction::BOTH {
                    let sum = count_paths(sigma, 0, P, dj, m) + count_paths(sigma, 0, M, dj, m);
                    assert_eq!(sum, count_paths_coined(0, dj, m), "m {m} dj {dj}");
                }
            }
        }
    }

    #[test]
    fn grouping_five_step_examples() {
        let near = enumerate_paths(P, 0, P, 1, 5).unwrap();
        let groups = group_by_monomial(&near).unwrap();
        let summary: Vec<(i64, usize)> = groups.iter().map(|g| (g.n, g.multiplicity)).collect();
        assert_eq!(summary, vec![(0, 3), (1, 3)]);

        let lat = make_unbiased_lattice();
        let contributions: Vec<Complex64> = groups
            .iter()
            .map(|g| {
                g.members
                    .iter()
                    .map(|&i| path_amplitude(&near[i], &lat))
                    .sum()
            })
            .collect();
        assert_eq!(
            overall_interference(&contributions),
            Interference::Destructive
        );

        let far = enumerate_paths(P, 0, P, 3, 5).unwrap();
        let groups = group_by_monomial(&far).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!((groups[0].n, groups[0].multiplicity), (0, 4));
    }

    #[test]
    fn all_transmission_class_is_minus_one() {
        let paths = enumerate_paths(M, 0, M, -4, 4).unwrap();
        let groups = group_by_monomial(&paths).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!((groups[0].n, groups[0].n_changes), (-1, 0));
    }

    #[test]
    fn mixed_endpoints_rejected() {
        let mut paths = enumerate_paths(P, 0, P, 1, 3).unwrap();
        paths.extend(enumerate_paths(P, 0, M, 1, 3).unwrap());
        assert_eq!(group_by_monomial(&paths), Err(Error::MixedEndpoints));
    }

    #[test]
    fn per_vertex_groups_refine_factor_groups() {
        let paths = enumerate_paths(P, 0, M, 0, 8).unwrap();
        let coarse = group_by_monomial(&paths).unwrap();
        let fine = group_by_vertex_monomial(&paths).unwrap();
        assert!(fine.len() >= coarse.len());
        assert_eq!(
            fine.iter().map(|(_, v)| v.len()).sum::<usize>(),
            paths.len()
        );
    }
}

//! Position distributions, dispersion and the classical reference walk.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::closedform::{amplitude_homogeneous, HomogeneousParams};
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::greens::evolve_via_greens;
use crate::lattice::{BasisState, Direction, Lattice};
use crate::paths::binomial;
use crate::state::WalkState;

/// How amplitudes are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Evolve,
    Greens,
    ClosedForm,
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "evolve" => Ok(Route::Evolve),
            "greens" => Ok(Route::Greens),
            "closed-form" | "closedform" => Ok(Route::ClosedForm),
            other => Err(format!(
                "unknown route '{other}' (evolve, greens, closed-form)"
            )),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Evolve => "evolve",
            Route::Greens => "greens",
            Route::ClosedForm => "closed-form",
        })
    }
}

/// Site probabilities `p_j' = |a_{+,j'}|^2 + |a_{-,j'}|^2` after `m` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub m: usize,
    pub origin: i64,
    pub probs: BTreeMap<i64, f64>,
    /// Amplitudes behind `probs`, absent for the classical walk.
    pub state: Option<WalkState>,
}

impl Distribution {
    fn from_state(state: WalkState, origin: i64, m: usize) -> Self {
        Self {
            m,
            origin,
            probs: state.site_probabilities(),
            state: Some(state),
        }
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Probability at `j'`, zero off the stored support.
    pub fn p(&self, j_prime: i64) -> f64 {
        self.probs.get(&j_prime).copied().unwrap_or(0.0)
    }

    /// Sites `j - m ..= j + m` with the parity of `j + m`.
    pub fn allowed_sites(&self) -> impl Iterator<Item = i64> + '_ {
        let m = self.m as i64;
        (-m..=m).step_by(2).map(move |d| self.origin + d)
    }
}

fn closed_form_state(initial: BasisState, p: &HomogeneousParams, m: usize) -> WalkState {
    let mi = m as i64;
    let targets: Vec<(Direction, i64)> = (-mi..=mi)
        .step_by(2)
        .flat_map(|dj| Direction::BOTH.map(|nu| (nu, dj)))
        .collect();
    let amps: Vec<(BasisState, Complex64)> = targets
        .par_iter()
        .map(|&(nu, dj)| {
            let a = amplitude_homogeneous(initial.sigma, nu, dj, m, p);
            (BasisState::new(nu, initial.j + dj), a)
        })
        .collect();
    let mut s = WalkState::from_amplitudes(amps);
    s.global_phase_exponent = mi;
    s
}

/// Distribution after `m` steps from `initial` by the chosen route.
pub fn distribution(
    initial: BasisState,
    lat: &Lattice,
    m: usize,
    route: Route,
) -> Result<Distribution> {
    let state = match route {
        Route::Evolve => evolve(&WalkState::basis(initial), lat, m)?,
        Route::Greens => evolve_via_greens(initial, lat, m)?,
        Route::ClosedForm => {
            let v = lat.homogeneous_vertex().ok_or_else(|| {
                Error::RouteUnavailable(
                    "the closed form needs a homogeneous lattice without walls".into(),
                )
            })?;
            closed_form_state(initial, &HomogeneousParams::from_vertex(&v), m)
        }
    };
    Ok(Distribution::from_state(state, initial.j, m))
}

/// `sqrt( sum (j' - j)^2 p - (sum (j' - j) p)^2 )`.
pub fn std_dev(d: &Distribution) -> f64 {
    let (mut first, mut second) = (0.0, 0.0);
    for (&jp, &p) in &d.probs {
        let x = (jp - d.origin) as f64;
        first += x * p;
        second += x * x * p;
    }
    (second - first * first).max(0.0).sqrt()
}

/// Exact binomial probabilities of the unbiased classical walk, by displacement.
pub fn classical_exact(m: usize) -> BTreeMap<i64, BigRational> {
    let denom = BigInt::from(1) << m;
    (0..=m as i64)
        .map(|k| {
            let p = BigRational::new(BigInt::from(binomial(m as i64, k)), denom.clone());
            (2 * k - m as i64, p)
        })
        .collect()
}

/// Unbiased classical random walk after `m` steps from the origin.
pub fn classical_reference(m: usize) -> Distribution {
    let probs = classical_exact(m)
        .into_iter()
        .map(|(d, p)| (d, p.to_f64().unwrap_or(0.0)))
        .collect();
    Distribution {
        m,
        origin: 0,
        probs,
        state: None,
    }
}

/// Standard deviation of the classical walk from exact moments.
pub fn classical_std_dev(m: usize) -> f64 {
    let probs = classical_exact(m);
    let mut first = BigRational::zero();
    let mut second = BigRational::zero();
    for (d, p) in &probs {
        let x = BigRational::from_integer(BigInt::from(*d));
        first += &x * p;
        second += &x * &x * p;
    }
    let var = second - &first * &first;
    var.to_f64().unwrap_or(f64::NAN).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub delta_q: f64,
    pub delta_c: f64,
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    // a constant series is fitted exactly
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub fit: Option<LinearFit>,
}

/// Quantum and classical spread for each `m`, with a linear fit of the
/// quantum one. Rows are sorted by `m`.
pub fn dispersion_sweep(lat: &Lattice, initial: BasisState, m_values: &[usize]) -> Result<Sweep> {
    let mut rows: Vec<SweepRow> = m_values
        .par_iter()
        .map(|&m| {
            let d = distribution(initial, lat, m, Route::Evolve)?;
            Ok(SweepRow {
                m,
                delta_q: std_dev(&d),
                delta_c: classical_std_dev(m),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.m);
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.delta_q)).collect();
    Ok(Sweep {
        fit: linear_fit(&points),
        rows,
    })
}

/// Sign changes of the discrete derivative of `p` in the central third of
/// the support (`|j' - j| <= m/3`) and in the two outer thirds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OscillationCounts {
    pub inner: usize,
    pub outer: usize,
}

fn sign_changes(values: &[f64]) -> usize {
    let diffs: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .collect();
    diffs
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count()
}

/// Parity-forbidden sites are skipped.
pub fn oscillation_counts(d: &Distribution) -> OscillationCounts {
    let m = d.m as f64;
    let sites: Vec<(i64, f64)> = d.allowed_sites().map(|j| (j - d.origin, d.p(j))).collect();
    let zone = |lo: f64, hi: f64| -> Vec<f64> {
        sites
            .iter()
            .filter(|(x, _)| (*x as f64) >= lo && (*x as f64) <= hi)
            .map(|(_, p)| *p)
            .collect()
    };
    let third = m / 3.0;
    let eps = 1e-9;
    OscillationCounts {
        inner: sign_changes(&zone(-third, third)),
        outer: sign_changes(&zone(-m, -third - eps)) + sign_changes(&zone(third + eps, m)),
    }
}

/// Largest probability left and right of the origin, `(minus side, plus side)`.
pub fn side_maxima(d: &Distribution) -> (f64, f64) {
    let mut left = 0.0f64;
    let mut right = 0.0f64;
    for (&jp, &p) in &d.probs {
        match jp.cmp(&d.origin) {
            std::cmp::Ordering::Less => left = left.max(p),
            std::cmp::Ordering::Greater => right = right.max(p),
            std::cmp::Ordering::Equal => {}
        }
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_ballistic_lattice, make_unbiased_lattice};
    use crate::random::random_lattice;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_steps_is_point_mass() {
        let d = distribution(
            BasisState::plus(4),
            &make_unbiased_lattice(),
            0,
            Route::Evolve,
        )
        .unwrap();
        assert_eq!(d.probs.len(), 1);
        assert_eq!(d.p(4), 1.0);
        assert_eq!(std_dev(&d), 0.0);
    }

    #[test]
    fn ballistic_transport_is_point_mass() {
        let d = distribution(
            BasisState::plus(0),
            &make_ballistic_lattice(),
            50,
            Route::Evolve,
        )
        .unwrap();
        assert_eq!(d.p(50), 1.0);
        assert_eq!(std_dev(&d), 0.0);
        let sweep = dispersion_sweep(
            &make_ballistic_lattice(),
            BasisState::plus(0),
            &[10, 20, 30],
        )
        .unwrap();
        assert!(sweep.rows.iter().all(|r| r.delta_q == 0.0));
    }

    #[test]
    fn classical_reference_is_binomial() {
        let d = classical_reference(2);
        assert_eq!(d.probs, BTreeMap::from([(-2, 0.25), (0, 0.5), (2, 0.25)]));
        for m in [1, 7, 64, 200] {
            let total: BigRational = classical_exact(m).values().sum();
            assert_eq!(total, BigRational::from_integer(1.into()));
            assert!((classical_std_dev(m) - (m as f64).sqrt()).abs() < 1e-12);
            assert!((std_dev(&classical_reference(m)) - (m as f64).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn routes_agree() {
        let lat = make_unbiased_lattice();
        for m in [1, 6, 25] {
            let a = distribution(BasisState::minus(0), &lat, m, Route::Evolve).unwrap();
            for route in [Route::Greens, Route::ClosedForm] {
                let b = distribution(BasisState::minus(0), &lat, m, route).unwrap();
                for j in a.allowed_sites() {
                    assert!((a.p(j) - b.p(j)).abs() < 1e-9, "{route} m {m} j {j}");
                }
            }
        }
    }

    #[test]
    fn closed_form_needs_homogeneous_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lat = random_lattice(&mut rng, -3, 3);
        assert!(matches!(
            distribution(BasisState::plus(0), &lat, 4, Route::ClosedForm),
            Err(Error::RouteUnavailable(_))
        ));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|x| (x as f64, 2.5 * x as f64 - 1.0)).collect();
        let fit = linear_fit(&pts).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&pts[..1]).is_none());
    }

    #[test]
    fn unbiased_walk_spreads_linearly() {
        let lat = make_unbiased_lattice();
        let ms: Vec<usize> = (2..=12).map(|k| 10 * k).collect();
        let sweep = dispersion_sweep(&lat, BasisState::plus(0), &ms).unwrap();
        assert!(sweep.fit.unwrap().r_squared > 0.999);
        let ratios: Vec<f64> = sweep.rows.iter().map(|r| r.delta_q / r.delta_c).collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sign_change_counting() {
        assert_eq!(sign_changes(&[0.0, 1.0, 0.0, 1.0, 0.0]), 3);
        assert_eq!(sign_changes(&[0.0, 1.0, 2.0, 3.0]), 0);
        assert_eq!(sign_changes(&[1.0, 1.0, 2.0]), 0);
    }
}

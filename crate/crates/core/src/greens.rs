//! Closed-form Green's function of the walk on the line.
//!
//! The line is cut at the initial edge `i` and, when different, at the final
//! edge `f`. Each piece between cuts (and the walls `J_l`, `J_r`) is reduced
//! to composed reflection and transmission series `R_k^(+/-)`, `T_k^(+/-)`:
//!
//! ```text
//! R_k^(+) = r_k^(+) + z^2 t_k^(+) t_k^(-) R_{k+1}^(+) / (1 - z^2 r_k^(-) R_{k+1}^(+))
//! T_k^(+) = z t_k^(+) T_{k+1}^(+)              / (1 - z^2 r_k^(-) R_{k+1}^(+))
//! ```
//!
//! with the mirrored relations for `(-)`. A chain starts from the bare vertex
//! amplitudes at the far end of its piece (`R = r`, `T = t`), which is also
//! how the walls enter. Multiple scattering between the pieces then gives
//! `G_{f, (sigma, i)}` as a rational function of `z`; see [`greens_function`].
//!
//! Edges are labelled by their right vertex. The initial edge `i = j` lies
//! between vertices `j - 1` and `j`. The final edge is placed by a side
//! `s` and an offset `n`:
//!
//! | side            | `s` | final edge      | `n`   |
//! |-----------------|-----|-----------------|-------|
//! | [`Side::Right`] | -1  | `j + n`         | `>= 1`|
//! | [`Side::Same`]  |  0  | `j`             | `0`   |
//! | [`Side::Left`]  | +1  | `j - n + 1`     | `>= 2`|
//!
//! For `s = +1` the final edge sits between vertices `j - n` and `j - n + 1`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{BasisState, Direction, Lattice};
use crate::series::PowerSeries;
use crate::state::WalkState;

/// Position of the final edge relative to the initial one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `s = -1`: final edge to the right.
    Right,
    /// `s = 0`: final edge is the initial edge.
    Same,
    /// `s = +1`: final edge to the left.
    Left,
}

impl Side {
    pub fn s(self) -> i64 {
        match self {
            Side::Right => -1,
            Side::Same => 0,
            Side::Left => 1,
        }
    }
}

/// Final direction selected from the numerator factor `(1 + z R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NuSelect {
    SameAsSigma,
    Opposite,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreensSpec {
    pub sigma: Direction,
    /// Right vertex `j` of the initial edge.
    pub i_edge: i64,
    pub n: i64,
    pub side: Side,
    pub nu: NuSelect,
    pub left_wall: i64,
    pub right_wall: i64,
}

fn half(x: i64) -> i64 {
    debug_assert!(x % 2 == 0, "odd index expression {x}");
    x / 2
}

impl GreensSpec {
    /// Spec for the transition `initial -> target` inside the given walls.
    pub fn for_transition(
        initial: BasisState,
        target: BasisState,
        left_wall: i64,
        right_wall: i64,
    ) -> Self {
        let ei = initial.edge();
        let ef = target.edge();
        let (side, n) = match ef.cmp(&ei) {
            std::cmp::Ordering::Equal => (Side::Same, 0),
            std::cmp::Ordering::Greater => (Side::Right, ef - ei),
            std::cmp::Ordering::Less => (Side::Left, ei - ef + 1),
        };
        let nu = if target.sigma == initial.sigma {
            NuSelect::SameAsSigma
        } else {
            NuSelect::Opposite
        };
        Self {
            sigma: initial.sigma,
            i_edge: ei,
            n,
            side,
            nu,
            left_wall,
            right_wall,
        }
    }

    pub fn initial_state(&self) -> BasisState {
        BasisState::new(self.sigma, self.i_edge + half(self.sigma.sign() - 1))
    }

    pub fn final_edge(&self) -> i64 {
        match self.side {
            Side::Right => self.i_edge + self.n,
            Side::Same => self.i_edge,
            Side::Left => self.i_edge - self.n + 1,
        }
    }

    /// State on the final edge moving in direction `nu`.
    pub fn final_state(&self, nu: Direction) -> BasisState {
        let f = self.final_edge();
        match nu {
            Direction::Plus => BasisState::plus(f),
            Direction::Minus => BasisState::minus(f - 1),
        }
    }

    /// Direction of arrival for the unreflected numerator term `1`.
    pub fn direct_direction(&self) -> Direction {
        match self.side {
            Side::Same => self.sigma,
            Side::Right => Direction::Plus,
            Side::Left => Direction::Minus,
        }
    }

    fn cuts(&self) -> Vec<i64> {
        let mut c = vec![self.i_edge];
        if self.side != Side::Same {
            c.push(self.final_edge());
        }
        c.sort_unstable();
        c
    }

    /// Piece `[lo, hi]` of the cut window containing vertex `k`.
    fn region(&self, k: i64) -> (i64, i64) {
        let cuts = self.cuts();
        let lo = cuts
            .iter()
            .rev()
            .find(|&&c| c <= k)
            .copied()
            .unwrap_or(self.left_wall);
        let hi = cuts
            .iter()
            .find(|&&c| c > k)
            .map(|c| c - 1)
            .unwrap_or(self.right_wall);
        (lo.max(self.left_wall), hi.min(self.right_wall))
    }

    /// Smallest and largest vertex index read by the closed form.
    fn referenced_span(&self) -> (i64, i64) {
        let j = self.i_edge;
        let s = self.side.s();
        let mut idx = vec![j - 1, j];
        if s != 0 {
            idx.push(j - s * self.n);
            idx.push(j - s * (self.n - 1));
        }
        (*idx.iter().min().unwrap(), *idx.iter().max().unwrap())
    }

    pub fn validate(&self) -> Result<()> {
        let ok_n = match self.side {
            Side::Same => self.n == 0,
            Side::Right => self.n >= 1,
            Side::Left => self.n >= 2,
        };
        if !ok_n {
            return Err(Error::SpecIndexError(format!(
                "offset n = {} is not allowed for side {:?}",
                self.n, self.side
            )));
        }
        if self.left_wall > self.right_wall {
            return Err(Error::SpecIndexError(format!(
                "walls [{}, {}] are reversed",
                self.left_wall, self.right_wall
            )));
        }
        let (lo, hi) = self.referenced_span();
        if lo < self.left_wall || hi > self.right_wall {
            return Err(Error::SpecIndexError(format!(
                "vertices {lo}..={hi} are needed but the walls are [{}, {}]",
                self.left_wall, self.right_wall
            )));
        }
        Ok(())
    }

    fn check_in_window(&self, k: i64) -> Result<()> {
        if k < self.left_wall || k > self.right_wall {
            Err(Error::OutOfWindow {
                index: k,
                left: self.left_wall,
                right: self.right_wall,
            })
        } else {
            Ok(())
        }
    }
}

/// R and T series along one piece, for one direction.
struct Chain {
    lo: i64,
    r: Vec<PowerSeries>,
    t: Vec<PowerSeries>,
}

impl Chain {
    /// Backward pass from the far end of `[lo, hi]` in direction `dir`.
    fn build(lat: &Lattice, dir: Direction, lo: i64, hi: i64, order: usize) -> Result<Self> {
        let len = (hi - lo + 1) as usize;
        let mut r = vec![PowerSeries::zero(order); len];
        let mut t = vec![PowerSeries::zero(order); len];
        let one = PowerSeries::one(order);
        let (terminal, step): (i64, i64) = match dir {
            Direction::Plus => (hi, -1),
            Direction::Minus => (lo, 1),
        };
        let v = lat.vertex(terminal);
        let ti = (terminal - lo) as usize;
        r[ti] = PowerSeries::constant(v.reflection(dir), order);
        t[ti] = PowerSeries::constant(v.transmission(dir), order);

        let mut prev = terminal;
        let mut k = terminal + step;
        while k >= lo && k <= hi {
            let v = lat.vertex(k);
            let (pi, ki) = ((prev - lo) as usize, (k - lo) as usize);
            let r_next = &r[pi];
            // 1 / (1 - z^2 r_k^(-dir) R_{k+dir}^(dir))
            let loop_sum = one
                .sub(&r_next.scale(v.reflection(-dir)).shift(2))
                .recip()?;
            let back = r_next
                .scale(v.transmission(dir) * v.transmission(-dir))
                .shift(2)
                .mul(&loop_sum);
            r[ki] = PowerSeries::constant(v.reflection(dir), order).add(&back);
            t[ki] = t[pi].scale(v.transmission(dir)).shift(1).mul(&loop_sum);
            prev = k;
            k += step;
        }
        Ok(Self { lo, r, t })
    }
}

/// Memoized chains for every piece of a spec's window.
struct ChainTable {
    chains: BTreeMap<(Direction, i64), Chain>,
    spec: GreensSpec,
}

impl ChainTable {
    fn build(spec: &GreensSpec, lat: &Lattice, order: usize) -> Result<Self> {
        let mut bounds = vec![spec.left_wall];
        bounds.extend(
            spec.cuts()
                .into_iter()
                .filter(|&c| c > spec.left_wall && c <= spec.right_wall),
        );
        let mut chains = BTreeMap::new();
        for (idx, &lo) in bounds.iter().enumerate() {
            let hi = bounds
                .get(idx + 1)
                .map(|c| c - 1)
                .unwrap_or(spec.right_wall);
            if lo > hi {
                continue;
            }
            for dir in Direction::BOTH {
                chains.insert((dir, lo), Chain::build(lat, dir, lo, hi, order)?);
            }
        }
        Ok(Self {
            chains,
            spec: *spec,
        })
    }

    fn chain(&self, k: i64, dir: Direction) -> Result<&Chain> {
        self.spec.check_in_window(k)?;
        let (lo, _) = self.spec.region(k);
        Ok(&self.chains[&(dir, lo)])
    }

    fn r(&self, k: i64, dir: Direction) -> Result<&PowerSeries> {
        let c = self.chain(k, dir)?;
        Ok(&c.r[(k - c.lo) as usize])
    }

    fn t(&self, k: i64, dir: Direction) -> Result<&PowerSeries> {
        let c = self.chain(k, dir)?;
        Ok(&c.t[(k - c.lo) as usize])
    }
}

/// Composed reflection `R_k^(dir)` of the piece containing `k`.
pub fn compute_r(
    k: i64,
    dir: Direction,
    spec: &GreensSpec,
    lat: &Lattice,
    order: usize,
) -> Result<PowerSeries> {
    spec.check_in_window(k)?;
    let (lo, hi) = spec.region(k);
    let chain = match dir {
        Direction::Plus => Chain::build(lat, dir, k, hi, order)?,
        Direction::Minus => Chain::build(lat, dir, lo, k, order)?,
    };
    Ok(chain.r[(k - chain.lo) as usize].clone())
}

/// Composed transmission `T_k^(dir)` from `k` through the far end of its piece.
pub fn compute_t(
    k: i64,
    dir: Direction,
    spec: &GreensSpec,
    lat: &Lattice,
    order: usize,
) -> Result<PowerSeries> {
    spec.check_in_window(k)?;
    let (lo, hi) = spec.region(k);
    let chain = match dir {
        Direction::Plus => Chain::build(lat, dir, k, hi, order)?,
        Direction::Minus => Chain::build(lat, dir, lo, k, order)?,
    };
    Ok(chain.t[(k - chain.lo) as usize].clone())
}

/// `G_{f, (sigma, i)}` truncated at `order`.
///
/// With `j = i_edge`, `n`, `s = side.s()` and `sigma = +/-1`:
///
/// ```text
///        ( z^((3+s sigma)/2) [R_{j-(1-s)/2}^(s)]^((1+s sigma)/2) T_{j-(s+1)/2}^(-s) )^|s| (1 + z R_{j-sn+(1-|s|)(sigma-1)/2}^(-s+(1-|s|)sigma))
/// G = ----------------------------------------------------------------------------------------------------------------
///     (1 - z^2 R_{j-sn}^(-s) R_{j-s(n-1)}^(s))^|s| (1 - z^2 R_{j-1}^(-) R_j^(+)) - |s| z^4 R_{j+(s-1)/2}^(s) R_{j-sn}^(-s) T_{j-(s+1)/2}^(-s) T_{j-s(n-1)}^(s)
/// ```
///
/// The `1` in the last numerator factor is the walker arriving on `f` in
/// [`GreensSpec::direct_direction`]; the `z R` term is the walker reflected
/// back onto `f`. [`NuSelect`] picks one of them or both.
pub fn greens_function(spec: &GreensSpec, lat: &Lattice, order: usize) -> Result<PowerSeries> {
    spec.validate()?;
    let tables = ChainTable::build(spec, lat, order)?;
    let r = |k: i64, d: i64| tables.r(k, Direction::from_sign(d));
    let t = |k: i64, d: i64| tables.t(k, Direction::from_sign(d));

    let c1 = Complex64::new(1.0, 0.0);
    let one = PowerSeries::one(order);
    let z = |p: usize| PowerSeries::monomial(c1, p, order);

    let j = spec.i_edge;
    let n = spec.n;
    let s = spec.side.s();
    let abs_s = s.abs();
    let sg = spec.sigma.sign();

    // first numerator factor, raised to |s|
    let lead = if abs_s == 1 {
        let mut f = z(half(3 + s * sg) as usize);
        if half(1 + s * sg) == 1 {
            f = f.mul(r(j - half(1 - s), s)?);
        }
        f.mul(t(j - half(s + 1), -s)?)
    } else {
        one.clone()
    };

    let reflected = z(1).mul(r(
        j - s * n + (1 - abs_s) * half(sg - 1),
        -s + (1 - abs_s) * sg,
    )?);
    let target = match spec.nu {
        NuSelect::SameAsSigma => Some(spec.sigma),
        NuSelect::Opposite => Some(-spec.sigma),
        NuSelect::Both => None,
    };
    let tail = match target {
        None => one.add(&reflected),
        Some(nu) if nu == spec.direct_direction() => one.clone(),
        Some(_) => reflected,
    };

    let inner = one.sub(&z(2).mul(r(j - 1, -1)?).mul(r(j, 1)?));
    let denominator = if abs_s == 1 {
        let outer = one.sub(&z(2).mul(r(j - s * n, -s)?).mul(r(j - s * (n - 1), s)?));
        let cross = z(4)
            .mul(r(j + half(s - 1), s)?)
            .mul(r(j - s * n, -s)?)
            .mul(t(j - half(s + 1), -s)?)
            .mul(t(j - s * (n - 1), s)?);
        outer.mul(&inner).sub(&cross)
    } else {
        inner
    };

    Ok(lead.mul(&tail).mul(&denominator.recip()?))
}

/// Recursion walls for `m`-step amplitudes from `initial` to `target`: the
/// vertices reachable with the fixed numbers of right and left steps, widened
/// to cover every vertex the closed form reads and clipped to the lattice
/// window.
pub fn walls_for(initial: BasisState, target: BasisState, m: usize, lat: &Lattice) -> (i64, i64) {
    let dj = target.j - initial.j;
    let m = m as i64;
    let d_plus = (m + dj).div_euclid(2);
    let d_minus = (m - dj).div_euclid(2);
    let probe = GreensSpec::for_transition(initial, target, 0, 0);
    let (lo, hi) = probe.referenced_span();
    let mut left = (initial.j - d_minus).min(lo);
    let mut right = (initial.j + d_plus).max(hi);
    if let Some(w) = lat.window() {
        left = left.max(w.left);
        right = right.min(w.right);
    }
    (left, right)
}

/// Exact `m`-step amplitude `a_{nu, j'}` from `(sigma, j)`, extracted as the
/// `z^m` coefficient of the Green's function.
pub fn amplitude_via_greens(
    sigma: Direction,
    j: i64,
    nu: Direction,
    j_prime: i64,
    m: usize,
    lat: &Lattice,
) -> Result<Complex64> {
    let initial = BasisState::new(sigma, j);
    let target = BasisState::new(nu, j_prime);
    if !lat.contains_state(initial) {
        return Err(Error::WindowEscape { state: initial });
    }
    let dj = j_prime - j;
    let mi = m as i64;
    if dj.abs() > mi || (mi - dj).rem_euclid(2) != 0 || !lat.contains_state(target) {
        return Ok(Complex64::default());
    }
    let (left, right) = walls_for(initial, target, m, lat);
    let spec = GreensSpec::for_transition(initial, target, left, right);
    let g = greens_function(&spec, lat, m)?;
    g.coeff(m)
}

/// Every reachable `m`-step amplitude from `initial`, via the Green's function.
pub fn evolve_via_greens(initial: BasisState, lat: &Lattice, m: usize) -> Result<WalkState> {
    let mi = m as i64;
    let targets: Vec<BasisState> = (-mi..=mi)
        .step_by(2)
        .flat_map(|dj| Direction::BOTH.map(|nu| BasisState::new(nu, initial.j + dj)))
        .filter(|b| lat.contains_state(*b))
        .collect();
    let amps: Vec<(BasisState, Complex64)> = targets
        .par_iter()
        .map(|b| {
            amplitude_via_greens(initial.sigma, initial.j, b.sigma, b.j, m, lat).map(|a| (*b, a))
        })
        .collect::<Result<_>>()?;
    let mut state = WalkState::from_amplitudes(amps);
    state.global_phase_exponent = mi;
    Ok(state)
}

//! Directions, edge basis states, vertex scattering data and the lattice itself.
//!
//! The line carries vertices labelled by integers. Each edge holds two basis
//! states, one per propagation direction. A basis state `(sigma, j)` is the
//! state about to scatter at vertex `j`:
//!
//! - `(+, j)` lives on the edge between `j - 1` and `j`, moving right;
//! - `(-, j)` lives on the edge between `j` and `j + 1`, moving left.
//!
//! Edges are labelled by their right vertex, so `(+, j)` sits on edge `j` and
//! `(-, j)` on edge `j + 1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::ops::Neg;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used by [`validate_vertex`].
pub const UNITARITY_TOL: f64 = 1e-12;

/// `rho exp(i phi)`, exact for the quarter-turn phases `0, pi/2, pi, 3 pi/2`.
pub(crate) fn polar(rho: f64, phi: f64) -> Complex64 {
    let quarter = phi / FRAC_PI_2;
    if quarter == quarter.round() {
        match (quarter as i64).rem_euclid(4) {
            0 => return Complex64::new(rho, 0.0),
            1 => return Complex64::new(0.0, rho),
            2 => return Complex64::new(-rho, 0.0),
            _ => return Complex64::new(0.0, -rho),
        }
    }
    Complex64::from_polar(rho, phi)
}

/// Propagation direction along the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Minus,
    Plus,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Plus, Direction::Minus];

    /// `+1` for [`Direction::Plus`], `-1` for [`Direction::Minus`].
    pub fn sign(self) -> i64 {
        match self {
            Direction::Plus => 1,
            Direction::Minus => -1,
        }
    }

    /// Panics unless `sign` is `+1` or `-1`.
    pub fn from_sign(sign: i64) -> Self {
        match sign {
            1 => Direction::Plus,
            -1 => Direction::Minus,
            other => panic!("direction sign must be +1 or -1, got {other}"),
        }
    }

    pub fn flip(self) -> Self {
        -self
    }

    pub fn symbol(self) -> char {
        match self {
            Direction::Plus => '+',
            Direction::Minus => '-',
        }
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        match self {
            Direction::Plus => Direction::Minus,
            Direction::Minus => Direction::Plus,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "+" | "plus" | "+1" | "1" => Ok(Direction::Plus),
            "-" | "minus" | "-1" => Ok(Direction::Minus),
            other => Err(format!("unknown direction '{other}' (use + or -)")),
        }
    }
}

/// Edge state `|sigma, j>` about to scatter at vertex `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub sigma: Direction,
    pub j: i64,
}

impl BasisState {
    pub fn new(sigma: Direction, j: i64) -> Self {
        Self { sigma, j }
    }

    pub fn plus(j: i64) -> Self {
        Self::new(Direction::Plus, j)
    }

    pub fn minus(j: i64) -> Self {
        Self::new(Direction::Minus, j)
    }

    /// Label of the edge holding this state (its right vertex).
    pub fn edge(self) -> i64 {
        match self.sigma {
            Direction::Plus => self.j,
            Direction::Minus => self.j + 1,
        }
    }
}

// Ordered by vertex first so sparse maps iterate left to right.
impl Ord for BasisState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.j.cmp(&other.j).then(self.sigma.cmp(&other.sigma))
    }
}

impl PartialOrd for BasisState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}, {}>", self.sigma, self.j)
    }
}

/// Kind of scattering event at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScatterEvent {
    Transmit,
    Reflect,
}

/// The four scattering amplitudes of one vertex.
///
/// The superscript is the incoming direction: `t_plus` transmits a
/// right-moving state, `r_minus` reflects a left-moving one. As a map from
/// incoming `(+, -)` to outgoing `(right-moving, left-moving)` states the
/// vertex acts as the matrix `[[t_plus, r_minus], [r_plus, t_minus]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexAmplitudes {
    pub t_plus: Complex64,
    pub t_minus: Complex64,
    pub r_plus: Complex64,
    pub r_minus: Complex64,
}

impl VertexAmplitudes {
    /// Builds the amplitudes from moduli and the four phases
    /// `[phi_t_plus, phi_t_minus, phi_r_plus, phi_r_minus]`. Not validated.
    pub fn from_polar(t: f64, r: f64, phases: [f64; 4]) -> Self {
        let [pt_p, pt_m, pr_p, pr_m] = phases;
        Self {
            t_plus: polar(t, pt_p),
            t_minus: polar(t, pt_m),
            r_plus: polar(r, pr_p),
            r_minus: polar(r, pr_m),
        }
    }

    /// From the scattering matrix entries in row-major order
    /// `[t_plus, r_minus, r_plus, t_minus]`. Not validated.
    pub fn from_matrix(m: [Complex64; 4]) -> Self {
        Self {
            t_plus: m[0],
            r_minus: m[1],
            r_plus: m[2],
            t_minus: m[3],
        }
    }

    /// Row-major scattering matrix `[t_plus, r_minus, r_plus, t_minus]`.
    pub fn matrix(&self) -> [Complex64; 4] {
        [self.t_plus, self.r_minus, self.r_plus, self.t_minus]
    }

    /// `r = t = 1/sqrt(2)` with phases `phi_t = 0`, `phi_r_plus = 0`, `phi_r_minus = pi`.
    pub fn unbiased() -> Self {
        Self::from_polar(FRAC_1_SQRT_2, FRAC_1_SQRT_2, [0.0, 0.0, 0.0, PI])
    }

    /// Pure transmission, all phases zero.
    pub fn ballistic() -> Self {
        Self::from_polar(1.0, 0.0, [0.0; 4])
    }

    /// Pure reflection with `r_plus = 1`, `r_minus = -1`.
    pub fn mirror() -> Self {
        Self::from_polar(0.0, 1.0, [0.0, 0.0, 0.0, PI])
    }

    /// Formal vertex with every amplitude equal to one. Violates unitarity;
    /// only usable through [`Lattice::formal`].
    pub fn counting() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            t_plus: one,
            t_minus: one,
            r_plus: one,
            r_minus: one,
        }
    }

    pub fn transmission(&self, incoming: Direction) -> Complex64 {
        match incoming {
            Direction::Plus => self.t_plus,
            Direction::Minus => self.t_minus,
        }
    }

    pub fn reflection(&self, incoming: Direction) -> Complex64 {
        match incoming {
            Direction::Plus => self.r_plus,
            Direction::Minus => self.r_minus,
        }
    }

    pub fn amplitude(&self, event: ScatterEvent, incoming: Direction) -> Complex64 {
        match event {
            ScatterEvent::Transmit => self.transmission(incoming),
            ScatterEvent::Reflect => self.reflection(incoming),
        }
    }

    /// Transmission modulus (mean of the two directions).
    pub fn t(&self) -> f64 {
        0.5 * (self.t_plus.norm() + self.t_minus.norm())
    }

    /// Reflection modulus (mean of the two directions).
    pub fn r(&self) -> f64 {
        0.5 * (self.r_plus.norm() + self.r_minus.norm())
    }

    /// `[phi_t_plus, phi_t_minus, phi_r_plus, phi_r_minus]`, each in `[0, 2 pi)`.
    pub fn phases(&self) -> [f64; 4] {
        let wrap = |z: Complex64| z.arg().rem_euclid(2.0 * PI);
        [
            wrap(self.t_plus),
            wrap(self.t_minus),
            wrap(self.r_plus),
            wrap(self.r_minus),
        ]
    }

    /// Perfect reflector keeping this vertex's reflection phases. A vanishing
    /// reflection amplitude falls back to the mirror phases `(1, -1)`.
    pub fn as_wall(&self) -> Self {
        let unit = |z: Complex64, fallback: f64| {
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                Complex64::new(fallback, 0.0)
            }
        };
        Self {
            t_plus: Complex64::new(0.0, 0.0),
            t_minus: Complex64::new(0.0, 0.0),
            r_plus: unit(self.r_plus, 1.0),
            r_minus: unit(self.r_minus, -1.0),
        }
    }

    /// `(max |S S^dagger - I|, max modulus mismatch between +/- amplitudes)`.
    pub fn residuals(&self) -> (f64, f64) {
        let [a, b, c, d] = self.matrix();
        // S S^dagger for S = [[a, b], [c, d]]
        let m00 = a.norm_sqr() + b.norm_sqr() - 1.0;
        let m11 = c.norm_sqr() + d.norm_sqr() - 1.0;
        let m01 = a * c.conj() + b * d.conj();
        let unitarity = m00.abs().max(m11.abs()).max(m01.norm());
        let modulus = (self.t_plus.norm() - self.t_minus.norm())
            .abs()
            .max((self.r_plus.norm() - self.r_minus.norm()).abs());
        (unitarity, modulus)
    }
}

/// Checks that the vertex scatters unitarily (moduli satisfy `r^2 + t^2 = 1`
/// and the reflection phases exceed the transmission phases by `pi`).
pub fn validate_vertex(v: &VertexAmplitudes) -> Result<()> {
    let (unitarity_residual, modulus_residual) = v.residuals();
    if unitarity_residual <= UNITARITY_TOL && modulus_residual <= UNITARITY_TOL {
        Ok(())
    } else {
        Err(Error::UnitarityViolation {
            unitarity_residual,
            modulus_residual,
        })
    }
}

/// Hard-wall window `[left, right]`; the wall vertices act as perfect reflectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub left: i64,
    pub right: i64,
}

impl Window {
    pub fn new(left: i64, right: i64) -> Result<Self> {
        if left < right {
            Ok(Self { left, right })
        } else {
            Err(Error::InvalidWindow { left, right })
        }
    }

    /// Whether `state` lives on an edge strictly between the walls.
    pub fn contains_state(&self, state: BasisState) -> bool {
        let edge = state.edge();
        edge > self.left && edge <= self.right
    }
}

/// Vertex-dependent scattering data on the line.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    default: VertexAmplitudes,
    overrides: BTreeMap<i64, VertexAmplitudes>,
    window: Option<Window>,
    formal: bool,
}

impl Lattice {
    /// Validated lattice.
    pub fn new(
        default: VertexAmplitudes,
        overrides: BTreeMap<i64, VertexAmplitudes>,
        window: Option<Window>,
    ) -> Result<Self> {
        validate_vertex(&default)?;
        for v in overrides.values() {
            validate_vertex(v)?;
        }
        Ok(Self {
            default,
            overrides,
            window,
            formal: false,
        })
    }

    pub fn homogeneous(v: VertexAmplitudes) -> Result<Self> {
        Self::new(v, BTreeMap::new(), None)
    }

    /// Counting-mode lattice that skips unitarity validation. Physics routes
    /// accept it, but results are formal path sums, not probabilities.
    pub fn formal(default: VertexAmplitudes, overrides: BTreeMap<i64, VertexAmplitudes>) -> Self {
        Self {
            default,
            overrides,
            window: None,
            formal: true,
        }
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = Some(window);
        self
    }

    pub fn is_formal(&self) -> bool {
        self.formal
    }

    pub fn window(&self) -> Option<Window> {
        self.window
    }

    pub fn default_vertex(&self) -> &VertexAmplitudes {
        &self.default
    }

    pub fn overrides(&self) -> &BTreeMap<i64, VertexAmplitudes> {
        &self.overrides
    }

    /// Stored amplitudes at `k`, ignoring walls.
    pub fn stored_vertex(&self, k: i64) -> VertexAmplitudes {
        self.overrides.get(&k).copied().unwrap_or(self.default)
    }

    /// Amplitudes the walker actually sees at `k` (walls become perfect reflectors).
    pub fn vertex(&self, k: i64) -> VertexAmplitudes {
        let v = self.stored_vertex(k);
        match self.window {
            Some(w) if k == w.left || k == w.right => v.as_wall(),
            _ => v,
        }
    }

    pub fn contains_state(&self, state: BasisState) -> bool {
        self.window.is_none_or(|w| w.contains_state(state))
    }

    /// The common vertex of a lattice without overrides or walls.
    pub fn homogeneous_vertex(&self) -> Option<VertexAmplitudes> {
        if self.window.is_some() || self.overrides.values().any(|v| *v != self.default) {
            None
        } else {
            Some(self.default)
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: LatticeFile =
            serde_json::from_str(s).map_err(|e| Error::LatticeSpec(e.to_string()))?;
        file.into_lattice()
    }

    pub fn to_json_string(&self) -> String {
        let file = LatticeFile {
            default: VertexSpec::from(&self.default),
            overrides: self
                .overrides
                .iter()
                .map(|(k, v)| (k.to_string(), VertexSpec::from(v)))
                .collect(),
            window: self.window.map(|w| [w.left, w.right]),
        };
        serde_json::to_string_pretty(&file).expect("lattice serialization cannot fail")
    }
}

/// Homogeneous unbiased lattice, `r = t = 1/sqrt(2)` at every vertex, with the
/// phase convention of [`VertexAmplitudes::unbiased`].
pub fn make_unbiased_lattice() -> Lattice {
    Lattice::homogeneous(VertexAmplitudes::unbiased()).expect("unbiased vertex is unitary")
}

pub fn make_ballistic_lattice() -> Lattice {
    Lattice::homogeneous(VertexAmplitudes::ballistic()).expect("ballistic vertex is unitary")
}

pub fn make_mirror_lattice() -> Lattice {
    Lattice::homogeneous(VertexAmplitudes::mirror()).expect("mirror vertex is unitary")
}

/// On-disk lattice description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub default: VertexSpec,
    #[serde(default)]
    pub overrides: BTreeMap<String, VertexSpec>,
    #[serde(default)]
    pub window: Option<[i64; 2]>,
}

/// One vertex: either moduli plus phases `[phi_t+, phi_t-, phi_r+, phi_r-]`,
/// or the scattering matrix `[t+, r-, r+, t-]` as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexSpec {
    Polar { t: f64, r: f64, phases: [f64; 4] },
    Matrix { matrix: [[f64; 2]; 4] },
}

impl VertexSpec {
    pub fn to_amplitudes(&self) -> VertexAmplitudes {
        match self {
            VertexSpec::Polar { t, r, phases } => VertexAmplitudes::from_polar(*t, *r, *phases),
            VertexSpec::Matrix { matrix } => {
                VertexAmplitudes::from_matrix(matrix.map(|[re, im]| Complex64::new(re, im)))
            }
        }
    }
}

impl From<&VertexAmplitudes> for VertexSpec {
    fn from(v: &VertexAmplitudes) -> Self {
        VertexSpec::Matrix {
            matrix: v.matrix().map(|z| [z.re, z.im]),
        }
    }
}

impl LatticeFile {
    pub fn into_lattice(self) -> Result<Lattice> {
        let default = self.default.to_amplitudes();
        let mut overrides = BTreeMap::new();
        for (key, spec) in &self.overrides {
            let k: i64 = key.trim().parse().map_err(|_| {
                Error::LatticeSpec(format!("override key '{key}' is not an integer"))
            })?;
            overrides.insert(k, spec.to_amplitudes());
        }
        let window = match self.window {
            Some([left, right]) => Some(Window::new(left, right)?),
            None => None,
        };
        Lattice::new(default, overrides, window)
    }
}

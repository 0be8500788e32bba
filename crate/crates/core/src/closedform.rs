//! Amplitudes on homogeneous lattices in closed form.
//!
//! On a homogeneous lattice every path with `2n + 1 + delta` direction
//! changes (`delta = delta_{sigma nu}`) has the same amplitude
//!
//! ```text
//! C_n = exp(i phi) t^m (r/t)^(2n + delta + 1) (-1)^n
//! ```
//!
//! and there are `f_n = C(d^(sigma), n + delta) C(d^(-sigma) - 1, n)` of them,
//! where `d^(+/-) = (m +/- dj)/2` count the steps to the right and to the
//! left and `d^(sigma)` is the count in the initial direction. The
//! amplitude is `sum_{n = -delta}^{n_sup} f_n C_n` with
//! `n_sup = min(d^(sigma) - delta, d^(-sigma) - 1)`.
//!
//! The signed sum cancels almost completely far from the light cone, so it
//! is accumulated in exact rationals from the binary values of `t` and `r`.
//! The same holds for the unbiased hypergeometric form
//!
//! ```text
//! a = exp(i phi) 2^(-m/2) { -2^m delta_{m d^(sigma)} + [d^(sigma)]^delta 2F1(-d^(sigma) + delta, -d^(-sigma) + 1; 1 + delta; -1) }
//! ```

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{polar, Direction, VertexAmplitudes};
use crate::paths::{binomial, displacement_split};

/// Moduli and phases of a homogeneous vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomogeneousParams {
    pub t: f64,
    pub r: f64,
    /// `[phi_t+, phi_t-, phi_r+, phi_r-]`.
    pub phases: [f64; 4],
}

impl HomogeneousParams {
    pub fn from_vertex(v: &VertexAmplitudes) -> Self {
        Self {
            t: v.t(),
            r: v.r(),
            phases: v.phases(),
        }
    }

    pub fn unbiased() -> Self {
        Self::from_vertex(&VertexAmplitudes::unbiased())
    }

    pub fn to_vertex(&self) -> VertexAmplitudes {
        VertexAmplitudes::from_polar(self.t, self.r, self.phases)
    }

    fn phi_t(&self, d: Direction) -> f64 {
        match d {
            Direction::Plus => self.phases[0],
            Direction::Minus => self.phases[1],
        }
    }

    fn phi_r(&self, d: Direction) -> f64 {
        match d {
            Direction::Plus => self.phases[2],
            Direction::Minus => self.phases[3],
        }
    }
}

/// Step counts of an `m`-step transition, relative to the initial direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Split {
    pub m: i64,
    /// Steps taken in the initial direction.
    pub d_sigma: i64,
    pub d_minus_sigma: i64,
    /// `1` when the final direction equals the initial one.
    pub delta: i64,
}

impl Split {
    pub fn new(sigma: Direction, nu: Direction, delta_j: i64, m: usize) -> Option<Self> {
        let (d_plus, d_minus) = displacement_split(delta_j, m)?;
        let (d_sigma, d_minus_sigma) = match sigma {
            Direction::Plus => (d_plus, d_minus),
            Direction::Minus => (d_minus, d_plus),
        };
        Some(Self {
            m: m as i64,
            d_sigma,
            d_minus_sigma,
            delta: i64::from(sigma == nu),
        })
    }

    pub fn n_sup(&self) -> i64 {
        (self.d_sigma - self.delta).min(self.d_minus_sigma - 1)
    }

    /// Classes `n = -delta ..= n_sup`.
    pub fn classes(&self) -> std::ops::RangeInclusive<i64> {
        -self.delta..=self.n_sup()
    }

    /// Number of reflections `2n + delta + 1` in class `n`.
    pub fn reflections(&self, n: i64) -> i64 {
        2 * n + self.delta + 1
    }

    /// Number of paths `f_n` in class `n`.
    pub fn multiplicity(&self, n: i64) -> BigUint {
        if n == -1 {
            // the single all-transmission path
            return if self.delta == 1 && self.d_minus_sigma == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        binomial(self.d_sigma, n + self.delta) * binomial(self.d_minus_sigma - 1, n)
    }
}

/// Phase of each single path in class `n`, read off its factor counts.
fn class_phase(sigma: Direction, split: &Split, n: i64, p: &HomogeneousParams) -> f64 {
    let r_sigma = n + 1;
    let r_other = n + split.delta;
    let t_sigma = split.d_sigma - r_other;
    let t_other = split.d_minus_sigma - r_sigma;
    t_sigma as f64 * p.phi_t(sigma)
        + t_other as f64 * p.phi_t(-sigma)
        + r_sigma as f64 * p.phi_r(sigma)
        + r_other as f64 * p.phi_r(-sigma)
}

/// Phase `phi` with `C_n = exp(i phi) (-1)^n |C_n|`.
///
/// Every class gives the same `phi` when the vertex phases satisfy the
/// unitarity relation. That relation says nothing when `r` or `t` vanishes,
/// so `phi` is read off the one class that can then contribute.
pub fn global_phase(sigma: Direction, split: &Split, p: &HomogeneousParams) -> f64 {
    let n = if p.r == 0.0 {
        -split.delta
    } else if p.t == 0.0 && (split.m - split.delta - 1).rem_euclid(2) == 0 {
        (split.m - split.delta - 1) / 2
    } else {
        split.classes().next().unwrap_or(0)
    };
    class_phase(sigma, split, n, p) - n as f64 * std::f64::consts::PI
}

/// One class of equivalent paths.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassTerm {
    pub n: i64,
    pub multiplicity: BigUint,
    /// Common amplitude `C_n` of each path in the class.
    pub amplitude: Complex64,
}

/// All classes with nonzero multiplicity.
pub fn class_terms(
    sigma: Direction,
    nu: Direction,
    delta_j: i64,
    m: usize,
    p: &HomogeneousParams,
) -> Vec<ClassTerm> {
    let Some(split) = Split::new(sigma, nu, delta_j, m) else {
        return Vec::new();
    };
    let phase = polar(1.0, global_phase(sigma, &split, p));
    split
        .classes()
        .filter_map(|n| {
            let f = split.multiplicity(n);
            if f.is_zero() {
                return None;
            }
            let e = split.reflections(n);
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let modulus = p.t.powi((split.m - e) as i32) * p.r.powi(e as i32);
            Some(ClassTerm {
                n,
                multiplicity: f,
                amplitude: phase * sign * modulus,
            })
        })
        .collect()
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite amplitude modulus")
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `sum_n f_n (-1)^n t^(m - e_n) r^(e_n)` in exact arithmetic.
fn signed_class_sum(split: &Split, t: f64, r: f64) -> BigRational {
    let (t, r) = (exact(t), exact(r));
    let mut acc = BigRational::zero();
    for n in split.classes() {
        let f = split.multiplicity(n);
        if f.is_zero() {
            continue;
        }
        let e = split.reflections(n);
        let term = BigRational::from_integer(BigInt::from(f))
            * num_traits::pow(t.clone(), (split.m - e) as usize)
            * num_traits::pow(r.clone(), e as usize);
        if n.rem_euclid(2) == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Amplitude `a_{nu, j + delta_j}` after `m` steps from `(sigma, j)` on the
/// homogeneous lattice described by `p`.
pub fn amplitude_homogeneous(
    sigma: Direction,
    nu: Direction,
    delta_j: i64,
    m: usize,
    p: &HomogeneousParams,
) -> Complex64 {
    let Some(split) = Split::new(sigma, nu, delta_j, m) else {
        return Complex64::default();
    };
    if m == 0 {
        return Complex64::new(split.delta as f64, 0.0);
    }
    let modulus = to_f64(&signed_class_sum(&split, p.t, p.r));
    polar(1.0, global_phase(sigma, &split, p)) * modulus
}

fn pochhammer_ratio_terms(a: i64, b: i64, c: i64) -> Result<usize> {
    if c <= 0 {
        return Err(Error::InvalidC(c));
    }
    match (a <= 0, b <= 0) {
        (true, true) => Ok((-a).min(-b) as usize),
        (true, false) => Ok((-a) as usize),
        (false, true) => Ok((-b) as usize),
        (false, false) => Err(Error::NonTerminating { a, b }),
    }
}

/// Terminating `2F1(a, b; c; x)` in exact rational arithmetic.
pub fn hyp2f1_exact(a: i64, b: i64, c: i64, x: &BigRational) -> Result<BigRational> {
    let k_max = pochhammer_ratio_terms(a, b, c)?;
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 0..k_max as i64 {
        let num = BigInt::from(a + k) * BigInt::from(b + k);
        let den = BigInt::from(c + k) * BigInt::from(k + 1);
        term = term * BigRational::new(num, den) * x;
        sum += &term;
    }
    Ok(sum)
}

/// Terminating `2F1(a, b; c; x)`, summed exactly and rounded once.
pub fn hyp2f1_terminating(a: i64, b: i64, c: i64, x: f64) -> Result<f64> {
    let x = BigRational::from_float(x).ok_or(Error::NonTerminating { a, b })?;
    Ok(to_f64(&hyp2f1_exact(a, b, c, &x)?))
}

/// The braced factor of the unbiased closed form, exactly.
pub fn unbiased_brace(split: &Split) -> Result<BigRational> {
    let Split {
        m,
        d_sigma,
        d_minus_sigma,
        delta,
    } = *split;
    let x = -BigRational::one();
    let f = hyp2f1_exact(-d_sigma + delta, -d_minus_sigma + 1, 1 + delta, &x)?;
    let mut brace = if delta == 1 {
        f * BigInt::from(d_sigma)
    } else {
        f
    };
    if m == d_sigma {
        brace -= BigRational::from_integer(BigInt::one() << m as usize);
    }
    Ok(brace)
}

/// Amplitude on the unbiased lattice from the hypergeometric form.
pub fn amplitude_unbiased(sigma: Direction, nu: Direction, delta_j: i64, m: usize) -> Complex64 {
    let Some(split) = Split::new(sigma, nu, delta_j, m) else {
        return Complex64::default();
    };
    if m == 0 {
        return Complex64::new(split.delta as f64, 0.0);
    }
    let brace = unbiased_brace(&split).expect("parameters terminate for m >= 1");
    let sign = if brace.is_negative() { -1.0 } else { 1.0 };
    // 2^(-m/2) |brace| keeps the magnitude in range for large m
    let log2 = to_f64(&brace.abs()).log2() - m as f64 / 2.0;
    let modulus = if brace.is_zero() {
        0.0
    } else {
        sign * log2.exp2()
    };
    let phase = global_phase(sigma, &split, &HomogeneousParams::unbiased());
    polar(1.0, phase) * modulus
}

//! Truncated power series in the formal step variable `z`.
//!
//! Every step of the walk carries one factor of `z`, so the coefficient of
//! `z^m` in a generating function is the exact `m`-step amplitude. Taking
//! `(1/m!) d^m/dz^m` at `z = 0` reduces to [`ps_coeff`].
//!
//! Binary operations truncate at the smaller of the two operand orders.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    // coeffs[k] multiplies z^k; len == order + 1
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Complex64::default(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c z^power`, or zero when `power > order`.
    pub fn monomial(c: Complex64, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// Panics on an empty coefficient vector.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a power series needs at least one coefficient"
        );
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Result<Complex64> {
        self.coeffs.get(m).copied().ok_or(Error::OrderExceeded {
            requested: m,
            order: self.order(),
        })
    }

    pub fn truncated(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self::from_coeffs(self.coeffs[..=order].to_vec())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `z^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.order());
        for (i, a) in self.coeffs.iter().enumerate() {
            if i + k > self.order() {
                break;
            }
            out.coeffs[i + k] = *a;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_coeffs(
            (0..=order)
                .map(|k| self.coeffs[k] + other.coeffs[k])
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_coeffs(
            (0..=order)
                .map(|k| self.coeffs[k] - other.coeffs[k])
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![Complex64::default(); order + 1];
        let zero = Complex64::default();
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            // the recurrences produce series with many structural zeros
            if *a == zero {
                continue;
            }
            for (k, b) in other.coeffs[..=order - i].iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    /// Multiplicative inverse by forward substitution.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == Complex64::default() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = a0.inv();
        let order = self.order();
        let mut out = vec![Complex64::default(); order + 1];
        out[0] = inv0;
        for k in 1..=order {
            let mut acc = Complex64::default();
            for i in 1..=k {
                let a = self.coeffs[i];
                if a != Complex64::default() {
                    acc += a * out[k - i];
                }
            }
            out[k] = -acc * inv0;
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn ps_add(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    a.add(b)
}

pub fn ps_mul(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    a.mul(b)
}

pub fn ps_recip(a: &PowerSeries) -> Result<PowerSeries> {
    a.recip()
}

/// Coefficient of `z^m`.
pub fn ps_coeff(a: &PowerSeries, m: usize) -> Result<Complex64> {
    a.coeff(m)
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        PowerSeries::add(self, rhs)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        PowerSeries::sub(self, rhs)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        PowerSeries::mul(self, rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

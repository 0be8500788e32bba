use thiserror::Error;

use crate::lattice::BasisState;

/// Errors raised by the walk library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "vertex is not unitary: |S S^dagger - I| = {unitarity_residual:.3e}, \
         modulus mismatch = {modulus_residual:.3e}"
    )]
    UnitarityViolation {
        unitarity_residual: f64,
        modulus_residual: f64,
    },

    #[error(
        "invalid window [{left}, {right}]: left wall must lie strictly left of the right wall"
    )]
    InvalidWindow { left: i64, right: i64 },

    #[error("power series has a zero constant term and cannot be inverted")]
    ZeroConstantTerm,

    #[error("coefficient z^{requested} requested from a series truncated at order {order}")]
    OrderExceeded { requested: usize, order: usize },

    #[error("state {state} lies outside the lattice window")]
    WindowEscape { state: BasisState },

    #[error("vertex {index} lies outside the recursion window [{left}, {right}]")]
    OutOfWindow { index: i64, left: i64, right: i64 },

    #[error("invalid Green's function specification: {0}")]
    SpecIndexError(String),

    #[error("path enumeration for m = {m} exceeds the limit of {limit} steps")]
    EnumerationTooLarge { m: usize, limit: usize },

    #[error("paths passed to grouping do not share start, end and length")]
    MixedEndpoints,

    #[error("hypergeometric lower parameter c = {0} must be a positive integer")]
    InvalidC(i64),

    #[error("hypergeometric series does not terminate: a = {a}, b = {b}")]
    NonTerminating { a: i64, b: i64 },

    #[error("route unavailable: {0}")]
    RouteUnavailable(String),

    #[error("lattice specification error: {0}")]
    LatticeSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

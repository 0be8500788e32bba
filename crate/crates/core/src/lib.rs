//! Scattering quantum walks on the one-dimensional lattice.
//!
//! The walker lives on directed edges and scatters at vertices with
//! position-dependent transmission and reflection amplitudes. Amplitudes can
//! be obtained three ways: direct unitary evolution ([`evolution`]), the
//! sum-over-paths Green's function ([`greens`]) and, on homogeneous lattices,
//! closed combinatorial forms ([`closedform`]).

pub mod closedform;
pub mod crossval;
pub mod error;
pub mod evolution;
pub mod greens;
pub mod lattice;
pub mod paths;
pub mod random;
pub mod series;
pub mod state;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{BasisState, Direction, Lattice, ScatterEvent, VertexAmplitudes, Window};
pub use series::PowerSeries;
pub use state::WalkState;

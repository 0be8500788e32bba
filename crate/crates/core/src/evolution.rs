//! Direct unitary evolution, the reference every other route is checked against.
//!
//! One step scatters each basis state at its vertex:
//!
//! ```text
//! U  |s, j> = z ( t_j^(s) |s, j+s> + r_j^(s) |-s, j-s> )
//! U+ |s, j> = z* ( conj(t_{j-s}^(s)) |s, j-s> + conj(r_{j-s}^(-s)) |-s, j-s> )
//! ```
//!
//! The step phase `z` is kept formal: amplitudes are stored with `z = 1` and
//! the power of `z` is tracked in [`WalkState::global_phase_exponent`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{BasisState, Lattice};
use crate::state::WalkState;

fn check_window(state: &WalkState, lat: &Lattice) -> Result<()> {
    if let Some((b, _)) = state.iter().find(|(b, _)| !lat.contains_state(**b)) {
        return Err(Error::WindowEscape { state: *b });
    }
    Ok(())
}

/// One forward step.
pub fn apply_u(state: &WalkState, lat: &Lattice) -> Result<WalkState> {
    check_window(state, lat)?;
    let zero = Complex64::default();
    let mut out = WalkState::new();
    for (b, a) in state.iter() {
        let v = lat.vertex(b.j);
        let s = b.sigma;
        let t = v.transmission(s);
        let r = v.reflection(s);
        // structural zeros (walls, ballistic or mirror vertices) create no entry
        if t != zero {
            out.add(BasisState::new(s, b.j + s.sign()), t * a);
        }
        if r != zero {
            out.add(BasisState::new(-s, b.j - s.sign()), r * a);
        }
    }
    out.global_phase_exponent = state.global_phase_exponent + 1;
    Ok(out)
}

/// One backward step, the adjoint of [`apply_u`].
pub fn apply_u_dagger(state: &WalkState, lat: &Lattice) -> Result<WalkState> {
    check_window(state, lat)?;
    let zero = Complex64::default();
    let mut out = WalkState::new();
    for (b, a) in state.iter() {
        let s = b.sigma;
        let k = b.j - s.sign();
        let v = lat.vertex(k);
        let t = v.transmission(s).conj();
        let r = v.reflection(-s).conj();
        if t != zero {
            out.add(BasisState::new(s, k), t * a);
        }
        if r != zero {
            out.add(BasisState::new(-s, k), r * a);
        }
    }
    out.global_phase_exponent = state.global_phase_exponent - 1;
    Ok(out)
}

/// `U^m` applied to `initial`.
pub fn evolve(initial: &WalkState, lat: &Lattice, m: usize) -> Result<WalkState> {
    let mut state = initial.clone();
    check_window(&state, lat)?;
    for _ in 0..m {
        state = apply_u(&state, lat)?;
    }
    Ok(state)
}

/// States after `0, 1, ..., m_max` steps.
pub fn evolve_trajectory(
    initial: &WalkState,
    lat: &Lattice,
    m_max: usize,
) -> Result<Vec<WalkState>> {
    let mut out = Vec::with_capacity(m_max + 1);
    let mut state = initial.clone();
    check_window(&state, lat)?;
    out.push(state.clone());
    for _ in 0..m_max {
        state = apply_u(&state, lat)?;
        out.push(state.clone());
    }
    Ok(out)
}

//! Dense statevector simulation with the gate set copula-QAOA needs.
//!
//! Qubit `i` is bit `i` of the amplitude index (little-endian). Bitstrings
//! are rendered qubit 0 first. Global phase is not tracked.

mod sample;
mod state;

pub use sample::{distribution, distribution_map, sample, SampleSet};
pub use state::{init_product_state, Gate2, StateVector, DEFAULT_MAX_QUBITS};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Scalar;

/// 2×2 complex matrix, row-major.
pub type Gate1<T> = [[Complex<T>; 2]; 2];

/// `exp(−i·angle·Y/2)`.
pub fn ry_matrix<T: Scalar>(angle: T) -> Gate1<T> {
    let half = angle / T::lit(2.0);
    let (s, c) = half.sin_cos();
    let re = |x: T| Complex::new(x, T::zero());
    [[re(c), re(-s)], [re(s), re(c)]]
}

/// `exp(−i·angle·Z/2)`.
pub fn rz_matrix<T: Scalar>(angle: T) -> Gate1<T> {
    let half = angle / T::lit(2.0);
    let z = Complex::new(T::zero(), T::zero());
    [[Complex::from_polar(T::one(), -half), z], [z, Complex::from_polar(T::one(), half)]]
}

pub(crate) fn check_qubit(n: usize, q: usize) -> Result<()> {
    if q >= n {
        return Err(Error::invalid(format!("qubit {q} out of range for {n} qubits")));
    }
    Ok(())
}

pub fn apply_ry<T: Scalar>(state: &mut StateVector<T>, qubit: usize, angle: T) -> Result<()> {
    state.apply_single(qubit, &ry_matrix(angle))
}

pub fn apply_rz<T: Scalar>(state: &mut StateVector<T>, qubit: usize, angle: T) -> Result<()> {
    state.apply_single(qubit, &rz_matrix(angle))
}

/// RY on `target` restricted to the subspace where `control` reads
/// `control_value`.
pub fn apply_controlled_ry<T: Scalar>(
    state: &mut StateVector<T>,
    control: usize,
    target: usize,
    angle: T,
    control_value: bool,
) -> Result<()> {
    state.apply_controlled(control, control_value, target, &ry_matrix(angle))
}

/// `exp(−i·angle·Z)` on one qubit: bit 0 picks up `e^{−i·angle}`, bit 1
/// `e^{+i·angle}`.
pub fn apply_phase_z<T: Scalar>(state: &mut StateVector<T>, qubit: usize, angle: T) -> Result<()> {
    state.apply_single(qubit, &rz_matrix(T::lit(2.0) * angle))
}

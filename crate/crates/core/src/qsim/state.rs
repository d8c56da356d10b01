use num_complex::Complex;

use super::{check_qubit, Gate1};
use crate::error::{Error, Result};
use crate::Scalar;

pub const DEFAULT_MAX_QUBITS: usize = 22;

/// 4×4 complex matrix on a qubit pair `(a, b)`; local index is
/// `bit_a + 2·bit_b`.
pub type Gate2<T> = [[Complex<T>; 4]; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

/// Insert a zero bit at position `pos` of `k`.
#[inline]
fn insert_zero(k: usize, pos: usize) -> usize {
    let low = k & ((1 << pos) - 1);
    ((k >> pos) << (pos + 1)) | low
}

impl<T: Scalar> StateVector<T> {
    /// `|0…0⟩` on `n` qubits, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_cap(n, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_with_cap(n: usize, max_qubits: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("state needs at least one qubit"));
        }
        if n > max_qubits {
            return Err(Error::Resource(format!(
                "{n} qubits exceeds the statevector cap of {max_qubits}"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// Wrap raw amplitudes; length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {} is not 2^n", amps.len())));
        }
        Ok(Self {
            n: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_single(&mut self, qubit: usize, m: &Gate1<T>) -> Result<()> {
        check_qubit(self.n, qubit)?;
        let stride = 1 << qubit;
        for k in 0..self.amps.len() / 2 {
            let i0 = insert_zero(k, qubit);
            let i1 = i0 | stride;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// Apply `m` to `target` where `control` reads `control_value`.
    pub fn apply_controlled(&mut self, control: usize, control_value: bool, target: usize, m: &Gate1<T>) -> Result<()> {
        check_qubit(self.n, control)?;
        check_qubit(self.n, target)?;
        if control == target {
            return Err(Error::invalid(format!("control and target are both qubit {control}")));
        }
        let (lo, hi) = (control.min(target), control.max(target));
        let cmask = if control_value { 1 << control } else { 0 };
        let tmask = 1 << target;
        for k in 0..self.amps.len() / 4 {
            let i0 = insert_zero(insert_zero(k, lo), hi) | cmask;
            let i1 = i0 | tmask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// Apply a two-qubit matrix on `(a, b)`.
    pub fn apply_two(&mut self, a: usize, b: usize, m: &Gate2<T>) -> Result<()> {
        check_qubit(self.n, a)?;
        check_qubit(self.n, b)?;
        if a == b {
            return Err(Error::invalid(format!("two-qubit gate on repeated qubit {a}")));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (ma, mb) = (1 << a, 1 << b);
        for k in 0..self.amps.len() / 4 {
            let base = insert_zero(insert_zero(k, lo), hi);
            let idx = [base, base | ma, base | mb, base | ma | mb];
            let v = idx.map(|i| self.amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amps[i] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
        Ok(())
    }

    /// Multiply amplitude `x` by `diag[x]`.
    pub fn multiply_diagonal(&mut self, diag: &[Complex<T>]) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::invalid(format!(
                "diagonal has {} entries for {} amplitudes",
                diag.len(),
                self.amps.len()
            )));
        }
        for (a, d) in self.amps.iter_mut().zip(diag) {
            *a *= *d;
        }
        Ok(())
    }

    /// Multiply amplitude `x` by `exp(−i·angle·energy[x])`.
    pub fn apply_diagonal_phase(&mut self, energies: &[T], angle: T) -> Result<()> {
        if energies.len() != self.amps.len() {
            return Err(Error::invalid(format!(
                "diagonal has {} entries for {} amplitudes",
                energies.len(),
                self.amps.len()
            )));
        }
        for (a, &e) in self.amps.iter_mut().zip(energies) {
            *a *= Complex::from_polar(T::one(), -angle * e);
        }
        Ok(())
    }
}

/// Product state with qubit `i` in `√(1−p_i)|0⟩ + √p_i|1⟩`.
pub fn init_product_state<T: Scalar>(probs: &[T]) -> Result<StateVector<T>> {
    let mut state = StateVector::zero(probs.len())?;
    for (i, &p) in probs.iter().enumerate() {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::invalid(format!("probability {p} for qubit {i} outside [0, 1]")));
        }
    }
    let mut len = 1;
    for &p in probs {
        let (a0, a1) = ((T::one() - p).sqrt(), p.sqrt());
        let (lower, upper) = state.amps.split_at_mut(len);
        for (hi, lo) in upper[..len].iter_mut().zip(lower.iter_mut()) {
            *hi = *lo * a1;
            *lo *= a0;
        }
        len *= 2;
    }
    Ok(state)
}

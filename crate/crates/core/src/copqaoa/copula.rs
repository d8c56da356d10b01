use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{apply_controlled_ry, apply_ry, StateVector};
use crate::Scalar;

/// Per-qubit marginals plus the copula correlation parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec<T>", into = "RawSpec<T>", bound = "T: Scalar")]
pub struct CopulaSpec<T> {
    probs: Vec<T>,
    theta: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawSpec<T> {
    probs: Vec<T>,
    theta: T,
}

impl<T: Scalar> TryFrom<RawSpec<T>> for CopulaSpec<T> {
    type Error = Error;
    fn try_from(raw: RawSpec<T>) -> Result<Self> {
        Self::with_theta(raw.probs, raw.theta)
    }
}

impl<T: Scalar> From<CopulaSpec<T>> for RawSpec<T> {
    fn from(spec: CopulaSpec<T>) -> Self {
        Self {
            probs: spec.probs,
            theta: spec.theta,
        }
    }
}

impl<T: Scalar> CopulaSpec<T> {
    pub const DEFAULT_THETA: f64 = -1.0;

    pub fn new(probs: Vec<T>) -> Result<Self> {
        Self::with_theta(probs, T::lit(Self::DEFAULT_THETA))
    }

    pub fn with_theta(probs: Vec<T>, theta: T) -> Result<Self> {
        check_theta(theta)?;
        for (i, &p) in probs.iter().enumerate() {
            check_prob(p).map_err(|_| Error::invalid(format!("marginal {p} for qubit {i} outside [0, 1]")))?;
        }
        Ok(Self { probs, theta })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn check_prob<T: Scalar>(p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("probability {p} outside [0, 1]")))
    }
}

fn check_theta<T: Scalar>(theta: T) -> Result<()> {
    if theta >= -T::one() && theta <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("copula parameter {theta} outside [-1, 1]")))
    }
}

/// Joint pmf `(q00, q01, q10, q11)` of two bits with marginals `p1`, `p2`,
/// where `q01` means first bit 0, second bit 1.
pub fn copula_pmf<T: Scalar>(p1: T, p2: T, theta: T) -> Result<[T; 4]> {
    check_prob(p1)?;
    check_prob(p2)?;
    check_theta(theta)?;
    Ok(copula_pmf_unchecked(p1, p2, theta))
}

pub(crate) fn copula_pmf_unchecked<T: Scalar>(p1: T, p2: T, theta: T) -> [T; 4] {
    let one = T::one();
    let x = theta * p1 * p2 * (one - p1) * (one - p2);
    [
        (one - p1) * (one - p2) + x,
        (one - p1) * p2 - x,
        p1 * (one - p2) - x,
        p1 * p2 + x,
    ]
}

/// `(p_{j|i}, p_{j|ī})`: probability that bit `j` is 1 given bit `i` is 1,
/// resp. 0. A zero-probability condition falls back to `pj`.
pub fn copula_conditionals<T: Scalar>(pi: T, pj: T, theta: T) -> (T, T) {
    let one = T::one();
    if theta == -one {
        return (
            pj * (one - (one - pi) * (one - pj)),
            pj * (one + pi * (one - pj)),
        );
    }
    let [_, q01, _, q11] = copula_pmf_unchecked(pi, pj, theta);
    let given_one = if pi > T::zero() { q11 / pi } else { pj };
    let given_zero = if pi < one { q01 / (one - pi) } else { pj };
    (given_one, given_zero)
}

/// `2·asin(√p)` with `p` clamped into `[0, 1]`.
pub fn ry_angle<T: Scalar>(p: T) -> T {
    T::lit(2.0) * p.max(T::zero()).min(T::one()).sqrt().asin()
}

/// The three rotation angles of `R_cop`: marginal on `i`, then `j` given
/// `i = 1`, then `j` given `i = 0`.
pub fn rcop_angles<T: Scalar>(pi: T, pj: T, theta: T) -> [T; 3] {
    let (given_one, given_zero) = copula_conditionals(pi, pj, theta);
    [ry_angle(pi), ry_angle(given_one), ry_angle(given_zero)]
}

/// Apply `R_cop(pᵢ, pⱼ)` at `θ = −1`.
pub fn apply_rcop<T: Scalar>(state: &mut StateVector<T>, qi: usize, qj: usize, pi: T, pj: T) -> Result<()> {
    apply_rcop_theta(state, qi, qj, pi, pj, T::lit(-1.0))
}

pub fn apply_rcop_theta<T: Scalar>(state: &mut StateVector<T>, qi: usize, qj: usize, pi: T, pj: T, theta: T) -> Result<()> {
    check_prob(pi)?;
    check_prob(pj)?;
    check_theta(theta)?;
    let [a, b, c] = rcop_angles(pi, pj, theta);
    if qi == qj {
        return Err(Error::invalid(format!("copula pair repeats qubit {qi}")));
    }
    apply_ry(state, qi, a)?;
    apply_controlled_ry(state, qi, qj, b, true)?;
    apply_controlled_ry(state, qi, qj, c, false)
}

/// Inverse of [`apply_rcop_theta`].
pub fn apply_rcop_dagger<T: Scalar>(state: &mut StateVector<T>, qi: usize, qj: usize, pi: T, pj: T, theta: T) -> Result<()> {
    check_prob(pi)?;
    check_prob(pj)?;
    check_theta(theta)?;
    let [a, b, c] = rcop_angles(pi, pj, theta);
    if qi == qj {
        return Err(Error::invalid(format!("copula pair repeats qubit {qi}")));
    }
    apply_controlled_ry(state, qi, qj, -c, false)?;
    apply_controlled_ry(state, qi, qj, -b, true)?;
    apply_ry(state, qi, -a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn half_half_anti_correlated() {
        let q = copula_pmf(0.5f64, 0.5, -1.0).unwrap();
        let expect = [3.0 / 16.0, 5.0 / 16.0, 5.0 / 16.0, 3.0 / 16.0];
        for (a, b) in q.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn independence_and_degenerate_marginal() {
        let q = copula_pmf(0.3f64, 0.8, 0.0).unwrap();
        assert!((q[3] - 0.24).abs() < 1e-15);
        assert!((q[0] - 0.14).abs() < 1e-15);
        let q = copula_pmf(0.0f64, 0.35, -1.0).unwrap();
        assert_eq!(q, [0.65, 0.35, 0.0, 0.0]);
    }

    #[test]
    fn pmf_rejects_out_of_range() {
        assert!(copula_pmf(1.2f64, 0.5, 0.0).is_err());
        assert!(copula_pmf(0.2f64, -0.1, 0.0).is_err());
        assert!(copula_pmf(0.2f64, 0.5, -1.5).is_err());
        assert!(CopulaSpec::new(vec![0.5f64, f64::NAN]).is_err());
    }

    #[test]
    fn conditionals_agree_with_pmf() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let (pi, pj) = (rng.gen::<f64>(), rng.gen::<f64>());
            let q = copula_pmf(pi, pj, -1.0).unwrap();
            let (g1, g0) = copula_conditionals(pi, pj, -1.0);
            assert!((g1 - q[3] / pi).abs() < 1e-12);
            assert!((g0 - q[1] / (1.0 - pi)).abs() < 1e-12);
            let (h1, h0) = copula_conditionals(pi, pj, -1.0 + 1e-300);
            assert!((h1 - g1).abs() < 1e-12 && (h0 - g0).abs() < 1e-12);
        }
        assert_eq!(copula_conditionals(0.0f64, 0.4, 0.5), (0.4, 0.4));
        assert_eq!(copula_conditionals(1.0f64, 0.4, 0.5), (0.4, 0.4));
    }

    #[test]
    fn rcop_prepares_pmf() {
        let mut s = StateVector::<f64>::zero(2).unwrap();
        apply_rcop(&mut s, 0, 1, 0.5, 0.5).unwrap();
        let p = s.probabilities();
        // local index is bit_i + 2·bit_j, pmf order is (x_i x_j) = 00, 01, 10, 11
        let expect = [3.0 / 16.0, 5.0 / 16.0, 5.0 / 16.0, 3.0 / 16.0];
        for (got, want) in [p[0], p[2], p[1], p[3]].iter().zip(expect) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rcop_zero_is_identity_and_dagger_inverts() {
        let mut s = StateVector::<f64>::zero(3).unwrap();
        apply_rcop(&mut s, 2, 0, 0.0, 0.0).unwrap();
        assert_eq!(s, StateVector::zero(3).unwrap());
        let mut s = crate::qsim::init_product_state(&[0.2f64, 0.6, 0.9]).unwrap();
        let before = s.clone();
        apply_rcop_theta(&mut s, 1, 2, 0.3, 0.7, 0.4).unwrap();
        apply_rcop_dagger(&mut s, 1, 2, 0.3, 0.7, 0.4).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!(apply_rcop(&mut s, 1, 1, 0.3, 0.2).is_err());
    }
}

use super::{Commitment, Dispatch, MarginalParam, UcInstance};
use crate::error::{Error, Result};
use crate::Scalar;

const POWER_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

/// `Σ A_i y_i + B_i p_i + C_i p_i²`.
pub fn uc_cost<T: Scalar>(uc: &UcInstance<T>, commitment: &Commitment, dispatch: &Dispatch<T>) -> Result<T> {
    check_shapes(uc, commitment, dispatch)?;
    let mut total = T::zero();
    for ((unit, &on), &p) in uc.units().iter().zip(commitment.bits()).zip(&dispatch.powers) {
        if on {
            if p < unit.p_min || p > unit.p_max {
                return Err(Error::invalid(format!(
                    "committed unit output {p} outside [{}, {}]",
                    unit.p_min, unit.p_max
                )));
            }
            total += unit.running_cost(p);
        } else if p != T::zero() {
            return Err(Error::invalid(format!("uncommitted unit has output {p}")));
        }
    }
    Ok(total)
}

fn check_shapes<T: Scalar>(uc: &UcInstance<T>, commitment: &Commitment, dispatch: &Dispatch<T>) -> Result<()> {
    if commitment.len() != uc.len() || dispatch.powers.len() != uc.len() {
        return Err(Error::invalid(format!(
            "expected {} units, got commitment of {} and dispatch of {}",
            uc.len(),
            commitment.len(),
            dispatch.powers.len()
        )));
    }
    Ok(())
}

fn committed_totals<T: Scalar>(uc: &UcInstance<T>, commitment: &Commitment) -> (T, T) {
    uc.units()
        .iter()
        .zip(commitment.bits())
        .filter(|(_, &on)| on)
        .fold((T::zero(), T::zero()), |(lo, hi), (u, _)| (lo + u.p_min, hi + u.p_max))
}

/// Minimum-cost dispatch of a fixed commitment with `Σ p_i = L`.
///
/// Bisects on the common marginal cost `λ`; each committed unit runs at
/// `clamp((λ − B)/(2C), p_min, p_max)`. The small residual left by
/// bisection is absorbed by an interior unit so the demand is met to
/// `1e-9`.
pub fn exact_dispatch<T: Scalar>(uc: &UcInstance<T>, commitment: &Commitment) -> Result<(Dispatch<T>, MarginalParam<T>)> {
    if commitment.len() != uc.len() {
        return Err(Error::invalid(format!(
            "commitment has {} bits for {} units",
            commitment.len(),
            uc.len()
        )));
    }
    let load = uc.load();
    let (min_gen, max_gen) = committed_totals(uc, commitment);
    if max_gen < load {
        return Err(Error::DemandInfeasible {
            capacity: max_gen.to_f64_lossy(),
            load: load.to_f64_lossy(),
        });
    }
    if min_gen > load {
        return Err(Error::MinGenerationExceedsLoad {
            min_generation: min_gen.to_f64_lossy(),
            load: load.to_f64_lossy(),
        });
    }
    let on: Vec<usize> = (0..uc.len()).filter(|&i| commitment.bits()[i]).collect();
    let units = uc.units();
    let supply = |lambda: T| on.iter().map(|&i| units[i].dispatch_at_marginal(lambda)).sum::<T>();

    let mut lo = on.iter().map(|&i| units[i].marginal_cost(units[i].p_min)).fold(T::infinity(), T::min);
    let mut hi = on
        .iter()
        .map(|&i| units[i].marginal_cost(units[i].p_max))
        .fold(T::neg_infinity(), T::max);
    let tol = T::lit(POWER_TOL);
    let mut lambda = (lo + hi) / T::lit(2.0);
    for _ in 0..MAX_BISECTIONS {
        lambda = (lo + hi) / T::lit(2.0);
        let s = supply(lambda);
        if (s - load).abs() <= tol / T::lit(16.0) || lambda <= lo || lambda >= hi {
            break;
        }
        if s < load {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }
    let mut powers = vec![T::zero(); uc.len()];
    for &i in &on {
        powers[i] = units[i].dispatch_at_marginal(lambda);
    }
    // Absorb the residual in units that still have headroom.
    let mut residual = load - powers.iter().copied().sum::<T>();
    for &i in &on {
        if residual == T::zero() {
            break;
        }
        let u = &units[i];
        let target = (powers[i] + residual).max(u.p_min).min(u.p_max);
        residual -= target - powers[i];
        powers[i] = target;
    }
    Ok((Dispatch { powers }, MarginalParam { value: lambda }))
}

/// Minimum-cost dispatch under the demand rule `Σ p_i ≥ L`.
///
/// Identical to [`exact_dispatch`] unless the committed minimum
/// generation already exceeds the load, in which case every committed unit
/// sits at `p_min` and the demand multiplier is zero.
pub fn economic_dispatch<T: Scalar>(uc: &UcInstance<T>, commitment: &Commitment) -> Result<(Dispatch<T>, MarginalParam<T>)> {
    match exact_dispatch(uc, commitment) {
        Err(Error::MinGenerationExceedsLoad { .. }) => {
            let powers = uc
                .units()
                .iter()
                .zip(commitment.bits())
                .map(|(u, &on)| if on { u.p_min } else { T::zero() })
                .collect();
            Ok((Dispatch { powers }, MarginalParam { value: T::zero() }))
        }
        other => other,
    }
}

/// Checks the marginal-cost conditions for every committed unit: either
/// `|∂C/∂p − D| ≤ tol`, or it sits at `p_min` with `∂C/∂p > D − tol`, or at
/// `p_max` with `∂C/∂p < D + tol`. Also rejects dispatches that violate the
/// commitment's output limits.
pub fn verify_kkt<T: Scalar>(uc: &UcInstance<T>, commitment: &Commitment, dispatch: &Dispatch<T>, d: T, tol: T) -> bool {
    if check_shapes(uc, commitment, dispatch).is_err() {
        return false;
    }
    uc.units()
        .iter()
        .zip(commitment.bits())
        .zip(&dispatch.powers)
        .all(|((u, &on), &p)| {
            if !on {
                return p == T::zero();
            }
            if p < u.p_min - tol || p > u.p_max + tol {
                return false;
            }
            let m = u.marginal_cost(p);
            (m - d).abs() <= tol
                || (m > d - tol && (p - u.p_min).abs() <= tol)
                || (m < d + tol && (p - u.p_max).abs() <= tol)
        })
}

/// Lagrange multipliers reconstructed from a dispatch and `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KktMultipliers<T> {
    pub lambda: T,
    /// Lower-limit multipliers `ξ_i ≥ 0`.
    pub lower: Vec<T>,
    /// Upper-limit multipliers `η_i ≥ 0`.
    pub upper: Vec<T>,
}

/// Stationarity gives `∂C/∂p_i − λ − ξ_i + η_i = 0`; split the residual into
/// `ξ_i` (positive part) and `η_i` (negative part). Uncommitted units get zeros.
pub fn kkt_multipliers<T: Scalar>(uc: &UcInstance<T>, commitment: &Commitment, dispatch: &Dispatch<T>, lambda: T) -> KktMultipliers<T> {
    let mut lower = vec![T::zero(); uc.len()];
    let mut upper = vec![T::zero(); uc.len()];
    for (i, (u, &on)) in uc.units().iter().zip(commitment.bits()).enumerate() {
        if on {
            let r = u.marginal_cost(dispatch.powers[i]) - lambda;
            lower[i] = r.max(T::zero());
            upper[i] = (-r).max(T::zero());
        }
    }
    KktMultipliers { lambda, lower, upper }
}

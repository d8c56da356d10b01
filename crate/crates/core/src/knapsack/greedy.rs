use super::{KnapsackInstance, Selection, SolveResult};
use crate::error::{Error, Result};
use crate::Scalar;

/// Lower clamp for the logistic offset `C = Σw/c − 1`.
pub const C_FLOOR: f64 = 1e-9;

/// How lazy greedy walked the ratio order.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    /// Items in non-increasing ratio order.
    pub order: Vec<usize>,
    /// Number of leading items of `order` that were taken.
    pub taken: usize,
}

impl GreedyTrace {
    /// Position in `order` of the first rejected item, if any.
    pub fn rejected(&self) -> Option<usize> {
        (self.taken < self.order.len()).then_some(self.taken)
    }

    /// Threshold ratio separating taken from untaken items.
    ///
    /// Midpoint between the last taken and first rejected ratios, so that
    /// the `k → ∞` logistic reproduces the greedy bits exactly. With no
    /// taken item it sits one unit above the rejected ratio; with no
    /// rejected item it is the minimum ratio.
    pub fn stopping_ratio<T: Scalar>(&self, inst: &KnapsackInstance<T>) -> T {
        let ratio = |pos: usize| inst.items()[self.order[pos]].ratio();
        match self.rejected() {
            None => ratio(self.order.len() - 1),
            Some(0) => ratio(0) + T::one(),
            Some(pos) => (ratio(pos - 1) + ratio(pos)) / T::lit(2.0),
        }
    }
}

pub fn lazy_greedy_trace<T: Scalar>(inst: &KnapsackInstance<T>) -> GreedyTrace {
    let order = inst.ratio_order();
    let mut load = T::zero();
    let mut taken = 0;
    for &i in &order {
        let w = inst.items()[i].weight;
        if load + w > inst.capacity() {
            break;
        }
        load += w;
        taken += 1;
    }
    GreedyTrace { order, taken }
}

/// Take items by non-increasing ratio and stop at the first one that does
/// not fit.
pub fn lazy_greedy<T: Scalar>(inst: &KnapsackInstance<T>) -> SolveResult<T> {
    let trace = lazy_greedy_trace(inst);
    let mut bits = vec![false; inst.len()];
    for &i in &trace.order[..trace.taken] {
        bits[i] = true;
    }
    let eval = inst.evaluate_unchecked(&bits);
    // Dantzig bound: fill the residual capacity with a fraction of the break item.
    let bound = match trace.rejected() {
        None => eval.value,
        Some(pos) => eval.value + (inst.capacity() - eval.weight) * inst.items()[trace.order[pos]].ratio(),
    };
    let proven = bound <= eval.value;
    inst.result_for(Selection::new(bits), proven, bound)
}

/// Warm-start probabilities `p_i = 1 / (1 + C·exp(−k (r_i − r*)))` with
/// `C = Σw/c − 1` clamped below at [`C_FLOOR`].
///
/// `r_star = None` uses [`GreedyTrace::stopping_ratio`].
pub fn smoothed_probabilities<T: Scalar>(inst: &KnapsackInstance<T>, k: T, r_star: Option<T>) -> Result<Vec<T>> {
    if !(k > T::zero()) {
        return Err(Error::invalid(format!("steepness k must be positive, got {k}")));
    }
    let r_star = match r_star {
        Some(r) => r,
        None => lazy_greedy_trace(inst).stopping_ratio(inst),
    };
    let offset = (inst.total_weight() / inst.capacity() - T::one()).max(T::lit(C_FLOOR));
    Ok(inst
        .items()
        .iter()
        .map(|it| T::one() / (T::one() + offset * (-k * (it.ratio() - r_star)).exp()))
        .collect())
}

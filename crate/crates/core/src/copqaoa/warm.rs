use super::copula::CopulaSpec;
use super::objective::ObjectiveTable;
use crate::error::{Error, Result};
use crate::knapsack::{lazy_greedy, smoothed_probabilities, KnapsackInstance};
use crate::qsim::init_product_state;
use crate::Scalar;

/// Warm-start copula spec from the smoothed greedy probabilities.
pub fn warm_start_spec<T: Scalar>(instance: &KnapsackInstance<T>, k: T, r_star: Option<T>, theta: T) -> Result<CopulaSpec<T>> {
    CopulaSpec::with_theta(smoothed_probabilities(instance, k, r_star)?, theta)
}

/// Geometric search for the smallest steepness `k` at which no feasible
/// outcome with product-state probability `≥ floor` beats the lazy greedy
/// value, i.e. the softest warm start whose observable support still
/// tops out at the greedy solution.
///
/// Tries `k_start · growth^j` up to `k_max`; `None` if no rung qualifies.
pub fn greedy_support_k<T: Scalar>(
    instance: &KnapsackInstance<T>,
    floor: T,
    k_start: T,
    growth: T,
    k_max: T,
) -> Result<Option<T>> {
    if !(k_start > T::zero()) || !(growth > T::one()) {
        return Err(Error::invalid("k ladder needs k_start > 0 and growth > 1"));
    }
    let table = ObjectiveTable::new(instance)?;
    let greedy = lazy_greedy(instance).value;
    let mut k = k_start;
    while k <= k_max {
        let probs = smoothed_probabilities(instance, k, None)?;
        let stats = table.stats(&init_product_state(&probs)?.probabilities(), floor)?;
        if stats.best_value().is_none_or(|v| v <= greedy) {
            return Ok(Some(k));
        }
        k *= growth;
    }
    Ok(None)
}

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knapsack::{KnapsackInstance, Selection};
use crate::qsim::SampleSet;
use crate::Scalar;

/// Feasible outcomes with their values and counts, best value first
/// (ties by bitstring).
fn feasible_ranked<T: Scalar>(samples: &SampleSet, instance: &KnapsackInstance<T>) -> Result<Vec<(Selection, T, u64)>> {
    let mut out = Vec::new();
    for (sel, count) in samples.iter() {
        let e = instance.evaluate(sel.bits())?;
        if e.feasible {
            out.push((sel.clone(), e.value, count));
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// Count-weighted mean feasible value divided by `c_star`.
///
/// With `top_k`, only the `k` highest-value feasible shots enter the mean,
/// counting multiplicity and splitting the count at the cutoff.
pub fn approximation_ratio<T: Scalar>(
    samples: &SampleSet,
    instance: &KnapsackInstance<T>,
    c_star: T,
    top_k: Option<u64>,
) -> Result<T> {
    if !(c_star > T::zero()) {
        return Err(Error::invalid(format!("optimal value {c_star} must be positive")));
    }
    if top_k == Some(0) {
        return Err(Error::invalid("top_k must be at least 1"));
    }
    let ranked = feasible_ranked(samples, instance)?;
    let mut left = top_k.unwrap_or(u64::MAX);
    let mut mass = T::zero();
    let mut used = 0u64;
    for (_, value, count) in ranked {
        if left == 0 {
            break;
        }
        let take = count.min(left);
        mass += value * T::lit(take as f64);
        used += take;
        left -= take;
    }
    if used == 0 {
        return Err(Error::UndefinedMetric("approximation ratio needs at least one feasible sample".into()));
    }
    Ok(mass / (T::lit(used as f64) * c_star))
}

/// Fraction of shots that satisfy the capacity.
pub fn valid_ratio<T: Scalar>(samples: &SampleSet, instance: &KnapsackInstance<T>) -> Result<T> {
    if samples.shots() == 0 {
        return Err(Error::invalid("sample set is empty"));
    }
    let feasible: u64 = feasible_ranked(samples, instance)?.iter().map(|r| r.2).sum();
    Ok(T::lit(feasible as f64) / T::lit(samples.shots() as f64))
}

/// Highest feasible sampled outcome.
pub fn best_feasible<T: Scalar>(samples: &SampleSet, instance: &KnapsackInstance<T>) -> Result<Option<(Selection, T)>> {
    Ok(feasible_ranked(samples, instance)?.into_iter().next().map(|(s, v, _)| (s, v)))
}

/// Best feasible sampled value divided by each baseline value.
pub fn best_ratio_report<T: Scalar>(
    samples: &SampleSet,
    instance: &KnapsackInstance<T>,
    baselines: &BTreeMap<String, T>,
) -> Result<BTreeMap<String, T>> {
    let (_, best) = best_feasible(samples, instance)?
        .ok_or_else(|| Error::UndefinedMetric("no feasible sample to compare".into()))?;
    Ok(ratios_against(best, baselines))
}

pub(crate) fn ratios_against<T: Scalar>(best: T, baselines: &BTreeMap<String, T>) -> BTreeMap<String, T> {
    baselines
        .iter()
        .filter(|(_, &b)| b != T::zero())
        .map(|(k, &b)| (k.clone(), best / b))
        .collect()
}

/// Uniformly random bitstrings.
pub fn random_samples(n: usize, shots: u64, seed: u64) -> SampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = SampleSet::new();
    for _ in 0..shots {
        set.add(Selection::new((0..n).map(|_| rng.gen()).collect()), 1);
    }
    set
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knapsack::{KnapsackInstance, Selection};
use crate::qsim::{SampleSet, StateVector, DEFAULT_MAX_QUBITS};
use crate::Scalar;

/// Summary of a measurement distribution under the masked objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EvalStats<T> {
    /// Mean of value over all outcomes, infeasible ones counted as zero.
    pub objective: T,
    /// Probability mass (or shot fraction) on feasible outcomes.
    pub valid_ratio: T,
    /// Best feasible outcome in the support, if any.
    pub best: Option<BestOutcome<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BestOutcome<T> {
    pub selection: Selection,
    pub value: T,
}

impl<T: Scalar> EvalStats<T> {
    pub fn best_value(&self) -> Option<T> {
        self.best.as_ref().map(|b| b.value)
    }
}

fn better<T: Scalar>(best: &Option<BestOutcome<T>>, value: T, sel: &Selection) -> bool {
    match best {
        None => true,
        Some(b) => value > b.value || (value == b.value && *sel < b.selection),
    }
}

/// Masked value of every basis state, for exact-distribution evaluation.
#[derive(Debug, Clone)]
pub struct ObjectiveTable<T> {
    n: usize,
    masked: Vec<T>,
    feasible: Vec<bool>,
}

impl<T: Scalar> ObjectiveTable<T> {
    pub fn new(instance: &KnapsackInstance<T>) -> Result<Self> {
        Self::with_cap(instance, DEFAULT_MAX_QUBITS)
    }

    pub fn with_cap(instance: &KnapsackInstance<T>, max_qubits: usize) -> Result<Self> {
        let n = instance.len();
        if n > max_qubits {
            return Err(Error::Resource(format!("objective table for {n} items exceeds the cap of {max_qubits}")));
        }
        let (masked, feasible) = (0..1usize << n)
            .map(|x| {
                let e = instance.evaluate_index(x);
                (if e.feasible { e.value } else { T::zero() }, e.feasible)
            })
            .unzip();
        Ok(Self { n, masked, feasible })
    }

    pub fn num_items(&self) -> usize {
        self.n
    }

    pub fn masked_value(&self, index: usize) -> T {
        self.masked[index]
    }

    pub fn is_feasible(&self, index: usize) -> bool {
        self.feasible[index]
    }

    /// Exact statistics of a probability vector. Outcomes with probability
    /// below `floor` do not count towards `best`.
    pub fn stats(&self, probs: &[T], floor: T) -> Result<EvalStats<T>> {
        if probs.len() != self.masked.len() {
            return Err(Error::invalid(format!(
                "{} probabilities for {} basis states",
                probs.len(),
                self.masked.len()
            )));
        }
        let mut objective = T::zero();
        let mut valid = T::zero();
        let mut best_idx: Option<usize> = None;
        for (x, &p) in probs.iter().enumerate() {
            if !self.feasible[x] {
                continue;
            }
            objective += p * self.masked[x];
            valid += p;
            if p >= floor && p > T::zero() {
                let v = self.masked[x];
                best_idx = match best_idx {
                    Some(b) if self.masked[b] > v => Some(b),
                    Some(b) if self.masked[b] == v
                        && Selection::from_index(b, self.n) < Selection::from_index(x, self.n) =>
                    {
                        Some(b)
                    }
                    _ => Some(x),
                };
            }
        }
        Ok(EvalStats {
            objective,
            valid_ratio: valid,
            best: best_idx.map(|x| BestOutcome {
                selection: Selection::from_index(x, self.n),
                value: self.masked[x],
            }),
        })
    }

    pub fn state_stats(&self, state: &StateVector<T>, floor: T) -> Result<EvalStats<T>> {
        self.stats(&state.probabilities(), floor)
    }
}

/// Mean masked value over all shots.
pub fn objective_from_samples<T: Scalar>(instance: &KnapsackInstance<T>, samples: &SampleSet) -> Result<T> {
    Ok(sample_stats(instance, samples)?.objective)
}

pub fn sample_stats<T: Scalar>(instance: &KnapsackInstance<T>, samples: &SampleSet) -> Result<EvalStats<T>> {
    if samples.shots() == 0 {
        return Err(Error::invalid("sample set is empty"));
    }
    let mut mass = T::zero();
    let mut feasible_shots = 0u64;
    let mut best = None;
    for (sel, count) in samples.iter() {
        let e = instance.evaluate(sel.bits())?;
        if !e.feasible {
            continue;
        }
        feasible_shots += count;
        mass += e.value * T::lit(count as f64);
        if better(&best, e.value, sel) {
            best = Some(BestOutcome {
                selection: sel.clone(),
                value: e.value,
            });
        }
    }
    let shots = T::lit(samples.shots() as f64);
    Ok(EvalStats {
        objective: mass / shots,
        valid_ratio: T::lit(feasible_shots as f64) / shots,
        best,
    })
}

/// `⟨Σ vᵢZᵢ⟩`, ignoring feasibility. Diagnostic only.
pub fn expected_cost_hamiltonian<T: Scalar>(state: &StateVector<T>, values: &[T]) -> Result<T> {
    if values.len() != state.num_qubits() {
        return Err(Error::invalid(format!("{} values for {} qubits", values.len(), state.num_qubits())));
    }
    let mut z = vec![T::zero(); values.len()];
    for (x, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        for (q, zq) in z.iter_mut().enumerate() {
            if x >> q & 1 == 0 {
                *zq += p;
            } else {
                *zq -= p;
            }
        }
    }
    Ok(z.iter().zip(values).map(|(&zq, &v)| zq * v).sum())
}

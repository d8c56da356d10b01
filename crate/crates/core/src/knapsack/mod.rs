//! 0/1 knapsack instances, classical baselines and exact oracles.

mod exact;
mod generate;
mod greedy;
mod io;

pub use exact::{brute_force, solve_branch_bound, solve_dp, BranchBoundConfig, BRUTE_FORCE_MAX_ITEMS, DEFAULT_DP_CELL_BUDGET};
pub use generate::{gen_inverse_strongly_correlated, inverse_correlated_capacity};
pub use greedy::{lazy_greedy, lazy_greedy_trace, smoothed_probabilities, GreedyTrace, C_FLOOR};
pub use io::{load_instance, load_instance_json, parse_instance, save_instance, save_instance_json, write_instance};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Item<T> {
    #[serde(rename = "v")]
    pub value: T,
    #[serde(rename = "w")]
    pub weight: T,
}

impl<T: Scalar> Item<T> {
    pub fn new(value: T, weight: T) -> Self {
        Self { value, weight }
    }

    /// Value per unit weight.
    pub fn ratio(&self) -> T {
        self.value / self.weight
    }
}

/// A knapsack instance: `max Σ x_i v_i  s.t.  Σ x_i w_i ≤ capacity`.
///
/// Weights may be real valued (reductions from unit commitment produce
/// continuous weights); [`solve_dp`] checks integrality on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance<T>", into = "RawInstance<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct KnapsackInstance<T> {
    id: String,
    capacity: T,
    items: Vec<Item<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct RawInstance<T> {
    id: String,
    capacity: T,
    items: Vec<Item<T>>,
}

impl<T: Scalar> TryFrom<RawInstance<T>> for KnapsackInstance<T> {
    type Error = Error;

    fn try_from(raw: RawInstance<T>) -> Result<Self> {
        KnapsackInstance::new(raw.id, raw.items, raw.capacity)
    }
}

impl<T: Scalar> From<KnapsackInstance<T>> for RawInstance<T> {
    fn from(inst: KnapsackInstance<T>) -> Self {
        RawInstance {
            id: inst.id,
            capacity: inst.capacity,
            items: inst.items,
        }
    }
}

impl<T: Scalar> KnapsackInstance<T> {
    pub fn new(id: impl Into<String>, items: Vec<Item<T>>, capacity: T) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::invalid("knapsack instance needs at least one item"));
        }
        if !(capacity > T::zero()) || !capacity.is_finite() {
            return Err(Error::invalid(format!("capacity must be positive, got {capacity}")));
        }
        for (i, item) in items.iter().enumerate() {
            if !(item.weight > T::zero()) || !item.weight.is_finite() {
                return Err(Error::invalid(format!(
                    "item {i}: weight must be positive, got {}",
                    item.weight
                )));
            }
            if !(item.value >= T::zero()) || !item.value.is_finite() {
                return Err(Error::invalid(format!(
                    "item {i}: value must be nonnegative, got {}",
                    item.value
                )));
            }
        }
        Ok(Self {
            id: id.into(),
            capacity,
            items,
        })
    }

    /// Build from parallel `(value, weight)` pairs.
    pub fn from_pairs(id: impl Into<String>, pairs: &[(T, T)], capacity: T) -> Result<Self> {
        let items = pairs.iter().map(|&(v, w)| Item::new(v, w)).collect();
        Self::new(id, items, capacity)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn capacity(&self) -> T {
        self.capacity
    }

    pub fn items(&self) -> &[Item<T>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.items.iter().map(|it| it.weight).sum()
    }

    pub fn values(&self) -> Vec<T> {
        self.items.iter().map(|it| it.value).collect()
    }

    /// Item indices sorted by non-increasing value/weight ratio, ties by
    /// lower original index.
    pub fn ratio_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.items.len()).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (self.items[a].ratio(), self.items[b].ratio());
            rb.partial_cmp(&ra)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        order
    }

    /// Returns `(value, weight, feasible)` for a selection.
    pub fn evaluate(&self, bits: &[bool]) -> Result<Evaluation<T>> {
        if bits.len() != self.items.len() {
            return Err(Error::invalid(format!(
                "selection has {} bits but instance has {} items",
                bits.len(),
                self.items.len()
            )));
        }
        Ok(self.evaluate_unchecked(bits))
    }

    pub(crate) fn evaluate_unchecked(&self, bits: &[bool]) -> Evaluation<T> {
        let mut value = T::zero();
        let mut weight = T::zero();
        for (item, &b) in self.items.iter().zip(bits) {
            if b {
                value += item.value;
                weight += item.weight;
            }
        }
        Evaluation {
            value,
            weight,
            feasible: weight <= self.capacity,
        }
    }

    /// Evaluate a basis-state index (bit `i` of the index is item `i`).
    pub(crate) fn evaluate_index(&self, index: usize) -> Evaluation<T> {
        let mut value = T::zero();
        let mut weight = T::zero();
        for (i, item) in self.items.iter().enumerate() {
            if index >> i & 1 == 1 {
                value += item.value;
                weight += item.weight;
            }
        }
        Evaluation {
            value,
            weight,
            feasible: weight <= self.capacity,
        }
    }

    /// Package a selection as a [`SolveResult`], recomputing value and weight.
    pub(crate) fn result_for(&self, selection: Selection, proven_optimal: bool, upper_bound: T) -> SolveResult<T> {
        let eval = self.evaluate_unchecked(selection.bits());
        debug_assert!(eval.feasible);
        SolveResult {
            selection,
            value: eval.value,
            weight: eval.weight,
            proven_optimal,
            upper_bound: if proven_optimal { eval.value } else { upper_bound.max(eval.value) },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub weight: T,
    pub feasible: bool,
}

/// Bit vector over items; bit `i` set means item `i` is chosen.
///
/// Renders as a bitstring with item 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Selection(Vec<bool>);

impl Selection {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn empty(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Bits of a basis-state index, little-endian.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("bad bit character {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Selection)
    }
}

impl From<Selection> for String {
    fn from(s: Selection) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Selection {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SolveResult<T> {
    pub selection: Selection,
    pub value: T,
    pub weight: T,
    pub proven_optimal: bool,
    /// Upper bound on the optimum; equals `value` when proven optimal.
    pub upper_bound: T,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// (60,10), (100,20), (120,30) with capacity 50.
    pub fn classic<T: Scalar>() -> KnapsackInstance<T> {
        let p = |v: f64, w: f64| (T::lit(v), T::lit(w));
        KnapsackInstance::from_pairs("classic", &[p(60., 10.), p(100., 20.), p(120., 30.)], T::lit(50.)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::classic;
    use super::*;

    #[test]
    fn evaluate_classic() {
        let inst = classic::<f64>();
        let e = inst.evaluate(&[true, true, false]).unwrap();
        assert_eq!((e.value, e.weight, e.feasible), (160.0, 30.0, true));
        let e = inst.evaluate(&[false; 3]).unwrap();
        assert_eq!((e.value, e.weight, e.feasible), (0.0, 0.0, true));
        let e = inst.evaluate(&[true; 3]).unwrap();
        assert_eq!((e.value, e.weight, e.feasible), (280.0, 60.0, false));
    }

    #[test]
    fn evaluate_length_mismatch() {
        assert!(matches!(
            classic::<f64>().evaluate(&[true]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn evaluate_f32() {
        let e = classic::<f32>().evaluate(&[false, true, true]).unwrap();
        assert_eq!((e.value, e.weight, e.feasible), (220.0f32, 50.0f32, true));
    }

    #[test]
    fn constructor_rejects_bad_fields() {
        assert!(KnapsackInstance::<f64>::from_pairs("x", &[], 1.0).is_err());
        assert!(KnapsackInstance::from_pairs("x", &[(1.0, 0.0)], 1.0).is_err());
        assert!(KnapsackInstance::from_pairs("x", &[(-1.0, 1.0)], 1.0).is_err());
        assert!(KnapsackInstance::from_pairs("x", &[(1.0, 1.0)], 0.0).is_err());
        assert!(KnapsackInstance::from_pairs("x", &[(1.0, f64::NAN)], 1.0).is_err());
    }

    #[test]
    fn selection_index_and_string() {
        let s = Selection::from_index(0b110, 3);
        assert_eq!(s.to_string(), "011");
        assert_eq!(s.to_index(), 6);
        assert_eq!("011".parse::<Selection>().unwrap(), s);
        assert!("01x".parse::<Selection>().is_err());
    }

    #[test]
    fn ratio_order_breaks_ties_by_index() {
        let inst = KnapsackInstance::from_pairs("t", &[(1.0, 1.0), (4.0, 2.0), (2.0, 2.0), (2.0, 1.0)], 3.0).unwrap();
        assert_eq!(inst.ratio_order(), vec![1, 3, 0, 2]);
    }
}

use std::time::{Duration, Instant};

use super::{KnapsackInstance, Selection, SolveResult};
use crate::error::{Error, Result};
use crate::Scalar;

pub const DEFAULT_DP_CELL_BUDGET: u64 = 1_000_000_000;
pub const BRUTE_FORCE_MAX_ITEMS: usize = 25;

/// Pruning slack for the fractional bound.
const BOUND_TOL: f64 = 1e-9;

fn as_integer<T: Scalar>(x: T) -> Option<u64> {
    (x.fract() == T::zero() && x >= T::zero()).then(|| x.to_u64()).flatten()
}

/// Exact 0/1 knapsack by dynamic programming over integer capacity.
pub fn solve_dp<T: Scalar>(inst: &KnapsackInstance<T>) -> Result<SolveResult<T>> {
    solve_dp_with_budget(inst, DEFAULT_DP_CELL_BUDGET)
}

pub fn solve_dp_with_budget<T: Scalar>(inst: &KnapsackInstance<T>, cell_budget: u64) -> Result<SolveResult<T>> {
    let cap = as_integer(inst.capacity())
        .ok_or_else(|| Error::NonIntegerWeights(format!("capacity {}", inst.capacity())))?;
    let weights = inst
        .items()
        .iter()
        .enumerate()
        .map(|(i, it)| as_integer(it.weight).ok_or_else(|| Error::NonIntegerWeights(format!("item {i} weight {}", it.weight))))
        .collect::<Result<Vec<u64>>>()?;
    let n = inst.len() as u64;
    let cells = n.saturating_mul(cap.saturating_add(1));
    if cells > cell_budget {
        return Err(Error::Resource(format!(
            "DP table needs {cells} cells, budget is {cell_budget}"
        )));
    }
    let width = cap as usize + 1;
    let words = width.div_ceil(64);
    let mut best = vec![T::zero(); width];
    let mut take = vec![0u64; inst.len() * words];
    for (i, (item, &w)) in inst.items().iter().zip(&weights).enumerate() {
        let w = w as usize;
        if w >= width {
            continue;
        }
        let row = &mut take[i * words..(i + 1) * words];
        for c in (w..width).rev() {
            let candidate = best[c - w] + item.value;
            if candidate > best[c] {
                best[c] = candidate;
                row[c / 64] |= 1 << (c % 64);
            }
        }
    }
    let mut bits = vec![false; inst.len()];
    let mut c = width - 1;
    for i in (0..inst.len()).rev() {
        if take[i * words + c / 64] >> (c % 64) & 1 == 1 {
            bits[i] = true;
            c -= weights[i] as usize;
        }
    }
    Ok(inst.result_for(Selection::new(bits), true, T::zero()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BranchBoundConfig {
    /// Wall-clock budget; `None` runs to completion.
    pub time_budget: Option<Duration>,
    /// Node budget; deterministic alternative to `time_budget`.
    pub node_limit: Option<u64>,
}

impl BranchBoundConfig {
    pub fn with_time_budget(budget: Duration) -> Self {
        Self {
            time_budget: Some(budget),
            node_limit: None,
        }
    }
}

struct BranchBound<T> {
    values: Vec<T>,
    weights: Vec<T>,
    prefix_values: Vec<T>,
    prefix_weights: Vec<T>,
    capacity: T,
    tol: T,
    path: Vec<bool>,
    best_value: T,
    best_path: Vec<bool>,
    nodes: u64,
    started: Instant,
    config: BranchBoundConfig,
    aborted: bool,
    open_bound: T,
}

impl<T: Scalar> BranchBound<T> {
    /// Dantzig bound for the subtree at `depth` with the given partial load.
    fn bound(&self, depth: usize, value: T, weight: T) -> T {
        let residual = self.capacity - weight;
        let base_w = self.prefix_weights[depth];
        // Last index j ≥ depth such that items depth..j all fit.
        let fits = |j: usize| self.prefix_weights[j] - base_w <= residual;
        let (mut lo, mut hi) = (depth, self.values.len());
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let full = self.prefix_values[lo] - self.prefix_values[depth];
        let mut b = value + full;
        if lo < self.values.len() {
            let left = residual - (self.prefix_weights[lo] - base_w);
            b += left * self.values[lo] / self.weights[lo];
        }
        b
    }

    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if let Some(limit) = self.config.node_limit {
            if self.nodes >= limit {
                self.aborted = true;
            }
        }
        if let Some(budget) = self.config.time_budget {
            if self.nodes.is_multiple_of(256) && self.started.elapsed() >= budget {
                self.aborted = true;
            }
        }
        self.aborted
    }

    fn search(&mut self, depth: usize, value: T, weight: T) {
        if self.out_of_budget() {
            let b = self.bound(depth, value, weight);
            self.open_bound = self.open_bound.max(b);
            return;
        }
        self.nodes += 1;
        if value > self.best_value {
            self.best_value = value;
            self.best_path.copy_from_slice(&self.path);
        }
        if depth == self.values.len() {
            return;
        }
        if self.bound(depth, value, weight) <= self.best_value + self.tol {
            return;
        }
        let w = self.weights[depth];
        if weight + w <= self.capacity {
            self.path[depth] = true;
            self.search(depth + 1, value + self.values[depth], weight + w);
            self.path[depth] = false;
        }
        self.search(depth + 1, value, weight);
    }
}

/// Depth-first branch-and-bound over ratio-sorted items with the fractional
/// (Dantzig) bound; take-branch explored first.
///
/// If the budget runs out the incumbent is returned with
/// `proven_optimal = false` and the largest bound over unexplored subtrees.
pub fn solve_branch_bound<T: Scalar>(inst: &KnapsackInstance<T>, config: BranchBoundConfig) -> SolveResult<T> {
    let order = inst.ratio_order();
    let values: Vec<T> = order.iter().map(|&i| inst.items()[i].value).collect();
    let weights: Vec<T> = order.iter().map(|&i| inst.items()[i].weight).collect();
    let prefix = |xs: &[T]| {
        std::iter::once(T::zero())
            .chain(xs.iter().scan(T::zero(), |acc, &x| {
                *acc += x;
                Some(*acc)
            }))
            .collect::<Vec<T>>()
    };
    let n = inst.len();
    let mut bb = BranchBound {
        prefix_values: prefix(&values),
        prefix_weights: prefix(&weights),
        values,
        weights,
        capacity: inst.capacity(),
        tol: T::lit(BOUND_TOL),
        path: vec![false; n],
        best_value: T::neg_infinity(),
        best_path: vec![false; n],
        nodes: 0,
        started: Instant::now(),
        config,
        aborted: false,
        open_bound: T::neg_infinity(),
    };
    bb.search(0, T::zero(), T::zero());
    let mut bits = vec![false; n];
    for (pos, &i) in order.iter().enumerate() {
        bits[i] = bb.best_path[pos];
    }
    inst.result_for(Selection::new(bits), !bb.aborted, bb.open_bound)
}

/// Exhaustive search over all `2^n` selections.
///
/// Ties resolve to the lexicographically smallest bit vector (item 0 first).
pub fn brute_force<T: Scalar>(inst: &KnapsackInstance<T>) -> Result<SolveResult<T>> {
    let n = inst.len();
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::Resource(format!(
            "brute force is capped at {BRUTE_FORCE_MAX_ITEMS} items, got {n}"
        )));
    }
    // Lexicographic order on (x_0, x_1, ...) is numeric order of the reversed mask.
    let lex_key = |mask: usize| mask.reverse_bits() >> (usize::BITS as usize - n);
    let mut best_mask = 0usize;
    let mut best_value = T::zero();
    for mask in 1..(1usize << n) {
        let e = inst.evaluate_index(mask);
        if !e.feasible {
            continue;
        }
        if e.value > best_value || (e.value == best_value && lex_key(mask) < lex_key(best_mask)) {
            best_value = e.value;
            best_mask = mask;
        }
    }
    Ok(inst.result_for(Selection::from_index(best_mask, n), true, T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapsack::fixtures::classic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng, integer: bool) -> KnapsackInstance<f64> {
        let n = rng.gen_range(1..=16);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let v = rng.gen_range(0..=100) as f64;
                let w = if integer {
                    rng.gen_range(1..=60) as f64
                } else {
                    rng.gen_range(0.5..60.0)
                };
                (v, w)
            })
            .collect();
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let cap = (total * rng.gen_range(0.1..0.9)).max(1.0).round();
        KnapsackInstance::from_pairs("r", &pairs, cap).unwrap()
    }

    #[test]
    fn classic_optimum_is_220() {
        let inst = classic::<f64>();
        for r in [
            solve_dp(&inst).unwrap(),
            solve_branch_bound(&inst, BranchBoundConfig::default()),
            brute_force(&inst).unwrap(),
        ] {
            assert_eq!(r.value, 220.0);
            assert_eq!(r.selection.to_string(), "011");
            assert!(r.proven_optimal);
            assert_eq!(r.upper_bound, r.value);
        }
    }

    #[test]
    fn nothing_fits() {
        let inst = KnapsackInstance::from_pairs("n", &[(5.0, 10.0), (6.0, 11.0)], 9.0).unwrap();
        let r = solve_dp(&inst).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.selection.count_ones(), 0);
        assert_eq!(solve_branch_bound(&inst, BranchBoundConfig::default()).value, 0.0);
    }

    #[test]
    fn single_item_selected() {
        let inst = KnapsackInstance::from_pairs("s", &[(3.0, 2.5)], 3.0).unwrap();
        assert_eq!(solve_branch_bound(&inst, Default::default()).selection.to_string(), "1");
        assert_eq!(brute_force(&inst).unwrap().selection.to_string(), "1");
    }

    #[test]
    fn brute_force_tie_break_and_zero_values() {
        let inst = KnapsackInstance::from_pairs("z", &[(0.0, 1.0), (0.0, 1.0)], 5.0).unwrap();
        let r = brute_force(&inst).unwrap();
        assert_eq!(r.selection.to_string(), "00");
        // {0} and {1} both worth 5: lexicographically smaller is "01".
        let inst = KnapsackInstance::from_pairs("t", &[(5.0, 3.0), (5.0, 3.0)], 4.0).unwrap();
        assert_eq!(brute_force(&inst).unwrap().selection.to_string(), "01");
    }

    #[test]
    fn dp_rejects_fractional_and_oversized() {
        let inst = KnapsackInstance::from_pairs("f", &[(1.0, 1.5)], 3.0).unwrap();
        assert!(matches!(solve_dp(&inst), Err(Error::NonIntegerWeights(_))));
        let inst = KnapsackInstance::from_pairs("f", &[(1.0, 1.0)], 3.5).unwrap();
        assert!(matches!(solve_dp(&inst), Err(Error::NonIntegerWeights(_))));
        let inst = KnapsackInstance::from_pairs("b", &[(1.0, 1.0); 10], 1e6).unwrap();
        assert!(matches!(solve_dp_with_budget(&inst, 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn brute_force_cap() {
        let inst = KnapsackInstance::from_pairs("big", &[(1.0, 1.0); 26], 3.0).unwrap();
        assert!(matches!(brute_force(&inst), Err(Error::Resource(_))));
    }

    #[test]
    fn exact_solvers_agree_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let integer = trial % 2 == 0;
            let inst = random_instance(&mut rng, integer);
            let truth = brute_force(&inst).unwrap();
            let bb = solve_branch_bound(&inst, Default::default());
            assert_eq!(bb.value, truth.value, "trial {trial}");
            assert!(bb.proven_optimal);
            let e = inst.evaluate(bb.selection.bits()).unwrap();
            assert_eq!((e.value, e.weight), (bb.value, bb.weight));
            if integer {
                let dp = solve_dp(&inst).unwrap();
                assert_eq!(dp.value, truth.value, "trial {trial}");
                let e = inst.evaluate(dp.selection.bits()).unwrap();
                assert!(e.feasible);
                assert_eq!((e.value, e.weight), (dp.value, dp.weight));
            }
        }
    }

    #[test]
    fn node_limit_returns_valid_bound() {
        let inst = crate::knapsack::gen_inverse_strongly_correlated::<f64>(60, 5).unwrap();
        let truth = solve_dp(&inst).unwrap();
        let partial = solve_branch_bound(
            &inst,
            BranchBoundConfig {
                node_limit: Some(50),
                time_budget: None,
            },
        );
        assert!(!partial.proven_optimal);
        assert!(partial.weight <= inst.capacity());
        assert!(partial.value <= truth.value);
        assert!(partial.upper_bound >= truth.value - 1e-9);
    }

    #[test]
    fn f32_branch_bound() {
        let r = solve_branch_bound(&classic::<f32>(), Default::default());
        assert_eq!(r.value, 220.0f32);
    }
}

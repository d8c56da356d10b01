use serde::{Deserialize, Serialize};

use super::{build_knapsack, economic_dispatch, uc_cost, Commitment, Dispatch, UcInstance};
use crate::error::{Error, Result};
use crate::knapsack::{lazy_greedy, solve_branch_bound, BranchBoundConfig, KnapsackInstance, Selection};
use crate::Scalar;

pub const DEFAULT_GRID_POINTS: usize = 200;
pub const BRUTE_FORCE_UC_MAX_UNITS: usize = 14;
/// Cap on fixed-point refinement steps after the grid pass.
const MAX_REFINEMENTS: usize = 25;
/// Bisection depth inside a grid interval whose endpoints chose different
/// commitments.
const BREAKPOINT_DEPTH: usize = 12;

/// Knapsack solver used at each grid point.
pub enum ScanSolver<'a, T> {
    /// Branch-and-bound run to completion.
    Exact,
    Greedy,
    BranchBound(BranchBoundConfig),
    /// External solver (e.g. sampled copula-QAOA) returning a switch-off
    /// selection.
    Callback(&'a dyn Fn(&KnapsackInstance<T>) -> Result<Selection>),
}

impl<T: Scalar> ScanSolver<'_, T> {
    fn solve(&self, inst: &KnapsackInstance<T>) -> Result<Selection> {
        Ok(match self {
            ScanSolver::Exact => solve_branch_bound(inst, BranchBoundConfig::default()).selection,
            ScanSolver::Greedy => lazy_greedy(inst).selection,
            ScanSolver::BranchBound(cfg) => solve_branch_bound(inst, *cfg).selection,
            ScanSolver::Callback(f) => f(inst)?,
        })
    }
}

/// How a commitment chosen at `D` is costed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    /// Re-optimize committed outputs by economic dispatch.
    #[default]
    Redispatch,
    /// Cost at the `D`-induced outputs `p_i(D)`.
    Induced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint<T> {
    pub marginal: T,
    /// `+∞` when infeasible.
    pub cost: T,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome<T> {
    pub commitment: Commitment,
    pub dispatch: Dispatch<T>,
    pub cost: T,
    /// Grid (or refinement) value of `D` that produced the best commitment.
    pub marginal: T,
    /// Demand multiplier of the final dispatch.
    pub lambda: T,
    pub curve: Vec<ScanPoint<T>>,
    /// Extra points: bisection between differing grid commitments, then
    /// the dispatch multiplier of the incumbent.
    pub refinements: Vec<ScanPoint<T>>,
}

struct Candidate<T> {
    commitment: Commitment,
    dispatch: Dispatch<T>,
    cost: T,
    lambda: T,
}

fn evaluate_marginal<T: Scalar>(
    uc: &UcInstance<T>,
    d: T,
    solver: &ScanSolver<'_, T>,
    mode: CostMode,
) -> Result<Option<Candidate<T>>> {
    let reduction = match build_knapsack(uc, d) {
        Ok(r) => r,
        Err(Error::InfeasibleAtMarginal { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let switch_off = reduction.knapsack.as_ref().map(|k| solver.solve(k)).transpose()?;
    let commitment = reduction.commitment(switch_off.as_ref())?;
    let supply: T = reduction
        .powers
        .iter()
        .zip(commitment.bits())
        .filter(|(_, &on)| on)
        .map(|(&p, _)| p)
        .sum();
    if supply < uc.load() {
        // A heuristic solver returned an over-capacity switch-off set.
        return Ok(None);
    }
    let (dispatch, lambda) = match mode {
        CostMode::Redispatch => match economic_dispatch(uc, &commitment) {
            Ok((dispatch, lambda)) => (dispatch, lambda.value),
            Err(Error::DemandInfeasible { .. }) => return Ok(None),
            Err(e) => return Err(e),
        },
        CostMode::Induced => {
            let powers = reduction
                .powers
                .iter()
                .zip(commitment.bits())
                .map(|(&p, &on)| if on { p } else { T::zero() })
                .collect();
            (Dispatch { powers }, d)
        }
    };
    let cost = uc_cost(uc, &commitment, &dispatch)?;
    Ok(Some(Candidate {
        commitment,
        dispatch,
        cost,
        lambda,
    }))
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn uniform_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::of_usize(count - 1);
            (0..count).map(|k| lo + step * T::of_usize(k)).collect()
        }
    }
}

/// [`DEFAULT_GRID_POINTS`] points over [`UcInstance::marginal_span`].
pub fn default_grid<T: Scalar>(uc: &UcInstance<T>) -> Vec<T> {
    let (lo, hi) = uc.marginal_span();
    uniform_grid(lo, hi, DEFAULT_GRID_POINTS)
}

/// Solve UC by scanning the marginal-cost parameter `D`.
///
/// For each grid value the switch-off knapsack is solved and the resulting
/// commitment costed (see [`CostMode`]). Adjacent grid points that chose
/// different commitments are bisected to pick up narrower intervals of
/// `D`. In re-dispatch mode the incumbent is then refined by re-evaluating
/// at its own dispatch multiplier until that stops improving.
pub fn solve_uc_via_scan<T: Scalar>(
    uc: &UcInstance<T>,
    grid: &[T],
    solver: &ScanSolver<'_, T>,
    mode: CostMode,
) -> Result<ScanOutcome<T>> {
    if grid.is_empty() {
        return Err(Error::invalid("marginal-cost grid is empty"));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("marginal-cost grid must be sorted"));
    }
    let mut curve = Vec::with_capacity(grid.len());
    let mut best: Option<(T, Candidate<T>)> = None;
    let consider = |d: T, cand: Option<Candidate<T>>, best: &mut Option<(T, Candidate<T>)>| {
        let point = ScanPoint {
            marginal: d,
            cost: cand.as_ref().map_or(T::infinity(), |c| c.cost),
            feasible: cand.is_some(),
        };
        if let Some(c) = cand {
            if best.as_ref().is_none_or(|(_, b)| c.cost < b.cost) {
                *best = Some((d, c));
            }
        }
        point
    };
    let mut chosen = Vec::with_capacity(grid.len());
    for &d in grid {
        let cand = evaluate_marginal(uc, d, solver, mode)?;
        chosen.push(cand.as_ref().map(|c| c.commitment.clone()));
        curve.push(consider(d, cand, &mut best));
    }
    // The knapsack choice is piecewise constant in `D`; commitments living
    // entirely between two grid points are found by bisecting intervals
    // whose endpoints disagree.
    let mut refinements = Vec::new();
    for k in 1..grid.len() {
        let mut stack = vec![(grid[k - 1], chosen[k - 1].clone(), grid[k], chosen[k].clone(), 0)];
        while let Some((lo, c_lo, hi, c_hi, depth)) = stack.pop() {
            if c_lo == c_hi || depth == BREAKPOINT_DEPTH {
                continue;
            }
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                continue;
            }
            let cand = evaluate_marginal(uc, mid, solver, mode)?;
            let c_mid = cand.as_ref().map(|c| c.commitment.clone());
            refinements.push(consider(mid, cand, &mut best));
            stack.push((mid, c_mid.clone(), hi, c_hi, depth + 1));
            stack.push((lo, c_lo, mid, c_mid, depth + 1));
        }
    }
    if mode == CostMode::Redispatch {
        for _ in 0..MAX_REFINEMENTS {
            let Some((_, incumbent)) = best.as_ref() else { break };
            let d = incumbent.lambda;
            let seen = curve.iter().chain(&refinements).any(|p: &ScanPoint<T>| p.marginal == d);
            if seen {
                break;
            }
            let before = incumbent.cost;
            let cand = evaluate_marginal(uc, d, solver, mode)?;
            refinements.push(consider(d, cand, &mut best));
            if best.as_ref().is_some_and(|(_, b)| b.cost >= before) {
                break;
            }
        }
    }
    let (marginal, winner) = best.ok_or_else(|| Error::NoSolution("every grid point is infeasible".into()))?;
    Ok(ScanOutcome {
        commitment: winner.commitment,
        dispatch: winner.dispatch,
        cost: winner.cost,
        marginal,
        lambda: winner.lambda,
        curve,
        refinements,
    })
}

/// Exhaustive minimum over all commitments, each economically dispatched
/// under `Σ p ≥ L`.
pub fn brute_force_uc<T: Scalar>(uc: &UcInstance<T>) -> Result<(Commitment, Dispatch<T>, T)> {
    let n = uc.len();
    if n > BRUTE_FORCE_UC_MAX_UNITS {
        return Err(Error::Resource(format!(
            "brute-force UC is capped at {BRUTE_FORCE_UC_MAX_UNITS} units, got {n}"
        )));
    }
    let mut best: Option<(Commitment, Dispatch<T>, T)> = None;
    for mask in 1..(1usize << n) {
        let commitment = Selection::from_index(mask, n);
        let dispatch = match economic_dispatch(uc, &commitment) {
            Ok((d, _)) => d,
            Err(Error::DemandInfeasible { .. }) => continue,
            Err(e) => return Err(e),
        };
        let cost = uc_cost(uc, &commitment, &dispatch)?;
        if best.as_ref().is_none_or(|b| cost < b.2) {
            best = Some((commitment, dispatch, cost));
        }
    }
    best.ok_or_else(|| Error::NoSolution("no commitment meets the load".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uc::{random_uc, UcRanges, UcUnit};

    #[test]
    fn single_unit_brute_force() {
        let uc = UcInstance::new(vec![UcUnit::<f64>::new(1.0, 1.0, 0.1, 0.0, 50.0).unwrap()], 20.0).unwrap();
        let (c, d, cost) = brute_force_uc(&uc).unwrap();
        assert_eq!(c.to_string(), "1");
        assert!((d.powers[0] - 20.0).abs() < 1e-9);
        assert!((cost - (1.0 + 20.0 + 40.0)).abs() < 1e-6);
    }

    #[test]
    fn cheaper_unit_wins() {
        // Unit 1 is cheaper at every output level and covers the load alone.
        let dear = UcUnit::<f64>::new(30.0, 1.5, 0.2, 0.0, 100.0).unwrap();
        let cheap = UcUnit::<f64>::new(10.0, 0.5, 0.01, 0.0, 100.0).unwrap();
        let uc = UcInstance::new(vec![dear, cheap], 40.0).unwrap();
        let (c, _, cost) = brute_force_uc(&uc).unwrap();
        assert_eq!(c.to_string(), "01");
        // 10 + 0.5·40 + 0.01·1600
        assert!((cost - 46.0).abs() < 1e-6);
    }

    #[test]
    fn brute_force_not_worse_than_all_on() {
        let uc = random_uc::<f64>(10, &UcRanges::standard(), 0.5, 4).unwrap();
        let (_, _, best) = brute_force_uc(&uc).unwrap();
        let all_on = Selection::new(vec![true; 10]);
        let (d, _) = economic_dispatch(&uc, &all_on).unwrap();
        assert!(best <= uc_cost(&uc, &all_on, &d).unwrap());
    }

    #[test]
    fn brute_force_cap() {
        let uc = random_uc::<f64>(15, &UcRanges::standard(), 0.5, 4).unwrap();
        assert!(matches!(brute_force_uc(&uc), Err(Error::Resource(_))));
    }

    #[test]
    fn single_feasible_grid_point() {
        let uc = random_uc::<f64>(6, &UcRanges::standard(), 0.5, 1).unwrap();
        let (_, hi) = uc.marginal_span();
        let out = solve_uc_via_scan(&uc, &[hi], &ScanSolver::Exact, CostMode::Induced).unwrap();
        assert_eq!(out.curve.len(), 1);
        assert_eq!(out.marginal, hi);
        assert!(out.refinements.is_empty());
    }

    #[test]
    fn all_infeasible_grid() {
        let uc = random_uc::<f64>(6, &UcRanges::standard(), 0.9, 1).unwrap();
        let (lo, _) = uc.marginal_span();
        let err = solve_uc_via_scan(&uc, &[lo - 1.0], &ScanSolver::Exact, CostMode::Redispatch).unwrap_err();
        assert!(matches!(err, Error::NoSolution(_)));
    }

    #[test]
    fn grid_validation() {
        let uc = random_uc::<f64>(3, &UcRanges::standard(), 0.5, 1).unwrap();
        assert!(solve_uc_via_scan(&uc, &[], &ScanSolver::Exact, CostMode::Redispatch).is_err());
        assert!(solve_uc_via_scan(&uc, &[2.0, 1.0], &ScanSolver::Exact, CostMode::Redispatch).is_err());
    }

    #[test]
    fn scan_matches_brute_force_small() {
        for seed in 0..25 {
            let n = 2 + (seed as usize % 9);
            let uc = random_uc::<f64>(n, &UcRanges::standard(), 0.2 + 0.025 * seed as f64, seed).unwrap();
            let (_, _, truth) = brute_force_uc(&uc).unwrap();
            let out = solve_uc_via_scan(&uc, &default_grid(&uc), &ScanSolver::Exact, CostMode::Redispatch).unwrap();
            assert!(((out.cost - truth) / truth).abs() <= 1e-6, "seed {seed}: scan {} vs {truth}", out.cost);
        }
    }

    #[test]
    fn callback_solver_is_used() {
        let uc = random_uc::<f64>(5, &UcRanges::standard(), 0.5, 2).unwrap();
        let calls = std::cell::Cell::new(0);
        let f = |k: &KnapsackInstance<f64>| {
            calls.set(calls.get() + 1);
            Ok(Selection::empty(k.len()))
        };
        let out = solve_uc_via_scan(&uc, &default_grid(&uc), &ScanSolver::Callback(&f), CostMode::Redispatch).unwrap();
        assert!(calls.get() > 0);
        assert!(out.cost.is_finite());
    }
}

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{default_ranges, EvalMode, Scorer};
use crate::copqaoa::CopQaoa;
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::seed::{derive_seed, label};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GridSpec<T> {
    pub gammas: Vec<T>,
    pub betas: Vec<T>,
}

impl<T: Scalar> GridSpec<T> {
    /// Evenly spaced points including both endpoints.
    pub fn uniform(gamma_range: [T; 2], n_gamma: usize, beta_range: [T; 2], n_beta: usize) -> Self {
        Self {
            gammas: linspace(gamma_range, n_gamma),
            betas: linspace(beta_range, n_beta),
        }
    }

    /// `n × n` grid over the default training box.
    pub fn default_for(engine: &CopQaoa<T>, n: usize) -> Self {
        let (g, b) = default_ranges(engine);
        Self::uniform(g, n, b, n)
    }
}

fn linspace<T: Scalar>([lo, hi]: [T; 2], n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * T::of_usize(i) / T::of_usize(n - 1))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GridCell<T> {
    pub gamma: T,
    pub beta: T,
    /// Best feasible value observed; `None` when nothing feasible was seen.
    pub best_value: Option<T>,
    pub mean_objective: T,
    pub valid_ratio: T,
}

/// Heatmaps over a `(γ, β)` grid, stored γ-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GridResult<T> {
    pub gammas: Vec<T>,
    pub betas: Vec<T>,
    pub cells: Vec<GridCell<T>>,
    /// The `(0, 0)` evaluation, i.e. the warm start alone.
    pub baseline: GridCell<T>,
    /// Index into `cells` of the best observed value.
    pub argmax: usize,
}

fn cmp_best<T: Scalar>(a: Option<T>, b: Option<T>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Greater,
        (None, Some(_)) => Ordering::Less,
        (None, None) => Ordering::Equal,
    }
}

/// Higher best value first, then smaller `γ`, then smaller `β`.
fn rank<T: Scalar>(a: &GridCell<T>, b: &GridCell<T>) -> Ordering {
    cmp_best(b.best_value, a.best_value)
        .then(a.gamma.partial_cmp(&b.gamma).unwrap_or(Ordering::Equal))
        .then(a.beta.partial_cmp(&b.beta).unwrap_or(Ordering::Equal))
}

impl<T: Scalar> GridResult<T> {
    pub fn dims(&self) -> (usize, usize) {
        (self.gammas.len(), self.betas.len())
    }

    pub fn cell(&self, gi: usize, bi: usize) -> &GridCell<T> {
        &self.cells[gi * self.betas.len() + bi]
    }

    pub fn best(&self) -> &GridCell<T> {
        &self.cells[self.argmax]
    }

    /// Cells whose best observed value beats the baseline.
    pub fn red_dots(&self) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| cmp_best(self.cells[i].best_value, self.baseline.best_value) == Ordering::Greater)
            .collect()
    }

    /// Indices of the `k` best cells in rank order.
    pub fn top(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.cells.len()).collect();
        idx.sort_by(|&a, &b| rank(&self.cells[a], &self.cells[b]));
        idx.truncate(k);
        idx
    }
}

/// Score every `(γ, β)` of `grid` at depth one.
pub fn grid_search_p1<T: Scalar>(
    engine: &CopQaoa<T>,
    instance: &KnapsackInstance<T>,
    grid: &GridSpec<T>,
    mode: EvalMode,
    seed: u64,
) -> Result<GridResult<T>> {
    if grid.gammas.is_empty() || grid.betas.is_empty() {
        return Err(Error::invalid("grid must have at least one gamma and one beta"));
    }
    let scorer = Scorer::new(instance, mode)?;
    let initial = engine.initial_state()?;
    let mut cells = Vec::with_capacity(grid.gammas.len() * grid.betas.len());
    let mut baseline = None;
    for (gi, &gamma) in grid.gammas.iter().enumerate() {
        let mut after_cost = initial.clone();
        engine.apply_cost(&mut after_cost, gamma)?;
        for (bi, &beta) in grid.betas.iter().enumerate() {
            let mut s = after_cost.clone();
            engine.apply_mixer(&mut s, beta)?;
            let stats = scorer.score(&s, derive_seed(seed, &[label("grid"), gi as u64, bi as u64]))?;
            let cell = GridCell {
                gamma,
                beta,
                best_value: stats.best_value(),
                mean_objective: stats.objective,
                valid_ratio: stats.valid_ratio,
            };
            if gamma == T::zero() && beta == T::zero() && baseline.is_none() {
                baseline = Some(cell.clone());
            }
            cells.push(cell);
        }
    }
    let baseline = match baseline {
        Some(b) => b,
        None => {
            let stats = scorer.score(&initial, derive_seed(seed, &[label("grid-baseline")]))?;
            GridCell {
                gamma: T::zero(),
                beta: T::zero(),
                best_value: stats.best_value(),
                mean_objective: stats.objective,
                valid_ratio: stats.valid_ratio,
            }
        }
    };
    let argmax = (0..cells.len())
        .min_by(|&a, &b| rank(&cells[a], &cells[b]).then(a.cmp(&b)))
        .expect("grid is non-empty");
    Ok(GridResult {
        gammas: grid.gammas.clone(),
        betas: grid.betas.clone(),
        cells,
        baseline,
        argmax,
    })
}

/// `gamma,beta,best_value,mean_objective,valid_ratio`; an empty
/// `best_value` means no feasible outcome was observed.
pub fn heatmap_csv<T: Scalar>(result: &GridResult<T>) -> String {
    let mut out = String::from("gamma,beta,best_value,mean_objective,valid_ratio\n");
    for c in &result.cells {
        let best = c.best_value.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", c.gamma, c.beta, best, c.mean_objective, c.valid_ratio);
    }
    out
}

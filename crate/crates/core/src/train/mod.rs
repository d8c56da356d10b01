//! Variational-parameter search for cop-QAOA: a two-variable
//! derivative-free optimizer, layer-wise multi-restart training, and the
//! depth-one `(γ, β)` grid scan.

mod grid;
mod layerwise;
mod optimize;

pub use grid::{grid_search_p1, heatmap_csv, GridCell, GridResult, GridSpec};
pub use layerwise::{train_layerwise, LayerRecord, RestartRecord, StartKind, TrainConfig, TrainTrace};
pub use optimize::{local_optimize, local_optimize_scaled, OptimizeResult};

use serde::{Deserialize, Serialize};

use crate::copqaoa::{sample_stats, CopQaoa, EvalStats, ObjectiveTable};
use crate::error::Result;
use crate::knapsack::KnapsackInstance;
use crate::qsim::{sample, StateVector};
use crate::Scalar;

/// How a parameter point is scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum EvalMode {
    /// Read the full distribution. Outcomes below `floor` probability are
    /// ignored when reporting the best observed value.
    Exact { floor: f64 },
    /// Draw `shots` measurements.
    Sampled { shots: u64 },
}

impl Default for EvalMode {
    fn default() -> Self {
        EvalMode::Sampled { shots: 10_000 }
    }
}

impl EvalMode {
    /// Exact mode with the support floor of a `shots`-shot experiment.
    pub fn exact_for_shots(shots: u64) -> Self {
        EvalMode::Exact {
            floor: 1.0 / shots as f64,
        }
    }
}

/// Scores states of one instance under a fixed [`EvalMode`].
pub struct Scorer<'a, T> {
    instance: &'a KnapsackInstance<T>,
    table: Option<ObjectiveTable<T>>,
    mode: EvalMode,
}

impl<'a, T: Scalar> Scorer<'a, T> {
    pub fn new(instance: &'a KnapsackInstance<T>, mode: EvalMode) -> Result<Self> {
        let table = match mode {
            EvalMode::Exact { .. } => Some(ObjectiveTable::new(instance)?),
            EvalMode::Sampled { .. } => None,
        };
        Ok(Self { instance, table, mode })
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    /// `seed` is only consumed in sampled mode.
    pub fn score(&self, state: &StateVector<T>, seed: u64) -> Result<EvalStats<T>> {
        match (self.mode, &self.table) {
            (EvalMode::Exact { floor }, Some(table)) => table.state_stats(state, T::lit(floor)),
            (EvalMode::Sampled { shots }, _) => sample_stats(self.instance, &sample(state, shots, seed)?),
            (EvalMode::Exact { .. }, None) => unreachable!("exact scorer always owns a table"),
        }
    }
}

/// Default search box: `γ ∈ [0, π / max|vᵢ|]`, `β ∈ [0, π]`.
pub fn default_ranges<T: Scalar>(engine: &CopQaoa<T>) -> ([T; 2], [T; 2]) {
    let vmax = engine.values().iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let gmax = if vmax > T::zero() { T::PI() / vmax } else { T::PI() };
    ([T::zero(), gmax], [T::zero(), T::PI()])
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::optimize::local_optimize_scaled;
use super::{default_ranges, EvalMode, Scorer};
use crate::copqaoa::{CopQaoa, EvalStats, QaoaParams};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::seed::{derive_seed, label};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainConfig<T> {
    pub restarts: usize,
    /// Objective evaluations per restart.
    pub optimizer_budget: usize,
    pub mode: EvalMode,
    pub seed: u64,
    /// `None` uses `[0, π / max|vᵢ|]`.
    pub gamma_range: Option<[T; 2]>,
    /// `None` uses `[0, π]`.
    pub beta_range: Option<[T; 2]>,
    /// Start restart 0 of every layer at `(0, 0)`.
    pub zero_start: bool,
    /// Start point for restart 1 of the first layer, e.g. a grid-scan argmax.
    pub first_layer_start: Option<[T; 2]>,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            restarts: 20,
            optimizer_budget: 40,
            mode: EvalMode::default(),
            seed: 0,
            gamma_range: None,
            beta_range: None,
            zero_start: true,
            first_layer_start: None,
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.optimizer_budget == 0 {
            return Err(Error::invalid("restarts and optimizer budget must be at least 1"));
        }
        if let EvalMode::Sampled { shots: 0 } = self.mode {
            return Err(Error::invalid("shots per evaluation must be at least 1"));
        }
        if let EvalMode::Exact { floor } = self.mode {
            if !(0.0..=1.0).contains(&floor) {
                return Err(Error::invalid(format!("support floor {floor} outside [0, 1]")));
            }
        }
        for (name, r) in [("gamma", self.gamma_range), ("beta", self.beta_range)] {
            if let Some([lo, hi]) = r {
                if !(lo < hi) {
                    return Err(Error::invalid(format!("{name} range [{lo}, {hi}] is degenerate")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Zero,
    Seeded,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RestartRecord<T> {
    pub start: [T; 2],
    pub kind: StartKind,
    pub point: [T; 2],
    pub value: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LayerRecord<T> {
    pub depth: usize,
    /// Parameters of layers `1..depth`, held fixed while this one trained.
    pub frozen: QaoaParams<T>,
    pub gamma: T,
    pub beta: T,
    /// Score of the full depth-`depth` circuit at the chosen angles.
    pub stats: EvalStats<T>,
    /// Best-so-far history of the winning restart.
    pub history: Vec<T>,
    pub chosen_restart: usize,
    pub restarts: Vec<RestartRecord<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainTrace<T> {
    pub seed: u64,
    pub mode: EvalMode,
    /// Score of the depth-0 circuit.
    pub baseline: EvalStats<T>,
    pub layers: Vec<LayerRecord<T>>,
}

impl<T: Scalar> TrainTrace<T> {
    /// Objective at depth `d`, with `d = 0` the baseline.
    pub fn objective_at(&self, d: usize) -> Option<T> {
        match d {
            0 => Some(self.baseline.objective),
            _ => self.layers.get(d - 1).map(|l| l.stats.objective),
        }
    }
}

/// Grow the circuit one layer at a time, training only the newest
/// `(γ, β)` with `config.restarts` Nelder–Mead runs per layer.
pub fn train_layerwise<T: Scalar>(
    engine: &CopQaoa<T>,
    instance: &KnapsackInstance<T>,
    max_depth: usize,
    config: &TrainConfig<T>,
) -> Result<(QaoaParams<T>, TrainTrace<T>)> {
    if max_depth == 0 {
        return Err(Error::invalid("max_depth must be at least 1"));
    }
    config.validate()?;
    if instance.len() != engine.num_qubits() {
        return Err(Error::invalid("instance and circuit sizes differ"));
    }
    let scorer = Scorer::new(instance, config.mode)?;
    let (g_def, b_def) = default_ranges(engine);
    let g_range = config.gamma_range.unwrap_or(g_def);
    let b_range = config.beta_range.unwrap_or(b_def);
    let step = [
        (g_range[1] - g_range[0]) * T::lit(0.1),
        (b_range[1] - b_range[0]) * T::lit(0.1),
    ];
    let root = config.seed;

    let mut params = QaoaParams::empty();
    let mut prefix = engine.initial_state()?;
    let baseline = scorer.score(&prefix, derive_seed(root, &[label("baseline")]))?;
    let mut layers = Vec::with_capacity(max_depth);

    for depth in 1..=max_depth {
        let d = depth as u64;
        let mut restarts: Vec<RestartRecord<T>> = Vec::with_capacity(config.restarts);
        let mut winner: Option<(usize, Vec<T>)> = None;
        for r in 0..config.restarts {
            let (start, kind) = start_point(config, depth, r, g_range, b_range, root);
            let mut counter = 0u64;
            let mut failure = None;
            let objective = |x: [T; 2]| {
                counter += 1;
                let mut s = prefix.clone();
                let result = engine
                    .apply_layer(&mut s, x[0], x[1])
                    .and_then(|_| scorer.score(&s, derive_seed(root, &[label("eval"), d, r as u64, counter])));
                match result {
                    Ok(stats) => stats.objective,
                    Err(e) => {
                        failure.get_or_insert(e);
                        T::neg_infinity()
                    }
                }
            };
            let nm_seed = derive_seed(root, &[label("simplex"), d, r as u64]);
            let out = local_optimize_scaled(objective, start, step, config.optimizer_budget, nm_seed);
            if let Some(e) = failure {
                return Err(e);
            }
            let better = winner.as_ref().is_none_or(|(w, _)| out.value > restarts[*w].value);
            restarts.push(RestartRecord {
                start,
                kind,
                point: out.point,
                value: out.value,
                evaluations: out.evaluations,
            });
            if better {
                winner = Some((r, out.history));
            }
        }
        let (chosen, history) = winner.expect("at least one restart");
        let [gamma, beta] = restarts[chosen].point;
        let frozen = params.clone();
        engine.apply_layer(&mut prefix, gamma, beta)?;
        params.push(gamma, beta);
        let stats = scorer.score(&prefix, derive_seed(root, &[label("layer"), d]))?;
        layers.push(LayerRecord {
            depth,
            frozen,
            gamma,
            beta,
            stats,
            history,
            chosen_restart: chosen,
            restarts,
        });
    }
    Ok((
        params,
        TrainTrace {
            seed: root,
            mode: config.mode,
            baseline,
            layers,
        },
    ))
}

fn start_point<T: Scalar>(
    config: &TrainConfig<T>,
    depth: usize,
    r: usize,
    g: [T; 2],
    b: [T; 2],
    root: u64,
) -> ([T; 2], StartKind) {
    if r == 0 && config.zero_start {
        return ([T::zero(), T::zero()], StartKind::Zero);
    }
    if depth == 1 && r == usize::from(config.zero_start) {
        if let Some(p) = config.first_layer_start {
            return (p, StartKind::Seeded);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(root, &[label("start"), depth as u64, r as u64]));
    let u = |rng: &mut ChaCha8Rng, [lo, hi]: [T; 2]| lo + (hi - lo) * T::lit(rng.gen::<f64>());
    ([u(&mut rng, g), u(&mut rng, b)], StartKind::Random)
}

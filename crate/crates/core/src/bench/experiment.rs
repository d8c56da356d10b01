use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::metrics::{approximation_ratio, best_feasible, random_samples, ratios_against, valid_ratio};
use super::svg::emit_heatmap_svg;
use crate::copqaoa::{greedy_support_k, warm_start_spec, CopQaoa, InitialState, PairingScheme, QaoaParams};
use crate::error::{Error, Result};
use crate::knapsack::{
    brute_force, gen_inverse_strongly_correlated, lazy_greedy, load_instance, save_instance, solve_branch_bound,
    solve_dp, BranchBoundConfig, KnapsackInstance, Selection, SolveResult,
};
use crate::qsim::{sample, SampleSet};
use crate::seed::{derive_seed, label};
use crate::train::{grid_search_p1, heatmap_csv, train_layerwise, EvalMode, GridSpec, TrainConfig};
use crate::uc::{
    brute_force_uc, load_uc, random_uc, save_uc, solve_uc_via_scan, uniform_grid, write_scan_csv, CostMode, ScanSolver,
    UcInstance, UcRanges, BRUTE_FORCE_UC_MAX_UNITS,
};

/// Largest item count for which brute force is run as a baseline.
pub const BRUTE_FORCE_BASELINE_MAX_ITEMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    InverseStronglyCorrelated { n: usize, seed: u64 },
    KnapsackFile { path: PathBuf },
    RandomUc { n: usize, load_factor: f64, seed: u64 },
    UcFile { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Greedy,
    Dp,
    Bnb,
    Brute,
    Copqaoa,
    UcScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingKind {
    #[default]
    Ring,
    Disjoint,
}

impl PairingKind {
    pub fn build(self, n: usize) -> PairingScheme {
        match self {
            PairingKind::Ring => PairingScheme::ring(n),
            PairingKind::Disjoint => PairingScheme::disjoint(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    /// Points per axis over the default `(γ, β)` box.
    pub points: usize,
    /// `None` scores cells exactly with a `1/shots` support floor.
    pub mode: Option<EvalMode>,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self { points: 32, mode: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CopQaoaSettings {
    /// Warm-start steepness; `None` calibrates it with [`greedy_support_k`].
    pub k: Option<f64>,
    pub r_star: Option<f64>,
    pub theta: f64,
    pub pairing: PairingKind,
    pub initial: InitialState,
    /// Layers to train; ignored when `params` is given.
    pub depth: usize,
    /// Fixed angles, skipping training.
    pub params: Option<QaoaParams<f64>>,
    pub restarts: usize,
    pub optimizer_budget: usize,
    /// `None` trains on the exact distribution with a `1/shots` floor.
    pub train_mode: Option<EvalMode>,
    pub zero_start: bool,
    /// Depth-one grid scan; its argmax seeds the first trained layer, or
    /// is used directly when `depth` is 0.
    pub grid: Option<GridSettings>,
    pub top_k: Option<u64>,
    pub random_baseline: bool,
}

impl Default for CopQaoaSettings {
    fn default() -> Self {
        Self {
            k: None,
            r_star: None,
            theta: -1.0,
            pairing: PairingKind::Ring,
            initial: InitialState::Product,
            depth: 1,
            params: None,
            restarts: 20,
            optimizer_budget: 40,
            train_mode: None,
            zero_start: true,
            grid: None,
            top_k: None,
            random_baseline: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub bnb_time_budget_ms: Option<u64>,
    pub bnb_node_limit: Option<u64>,
}

impl SolverSettings {
    fn bnb(&self) -> BranchBoundConfig {
        BranchBoundConfig {
            time_budget: self.bnb_time_budget_ms.map(std::time::Duration::from_millis),
            node_limit: self.bnb_node_limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UcKnapsackSolver {
    #[default]
    Exact,
    Bnb,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UcSettings {
    pub grid_points: usize,
    pub solver: UcKnapsackSolver,
    pub cost_mode: CostMode,
}

impl Default for UcSettings {
    fn default() -> Self {
        Self {
            grid_points: crate::uc::DEFAULT_GRID_POINTS,
            solver: UcKnapsackSolver::Exact,
            cost_mode: CostMode::default(),
        }
    }
}

fn default_shots() -> u64 {
    100_000
}

/// One experiment run. All randomness derives from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub method: Method,
    pub seed: u64,
    #[serde(default = "default_shots")]
    pub shots: u64,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub copqaoa: CopQaoaSettings,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub uc: UcSettings,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSource, method: Method, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            instance,
            method,
            seed,
            shots: default_shots(),
            out_dir: out_dir.into(),
            copqaoa: CopQaoaSettings::default(),
            solver: SolverSettings::default(),
            uc: UcSettings::default(),
        }
    }

    /// Parse either a bare config or a run manifest.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("config") {
            Some(inner) if value.get("seeds").is_some() => Ok(serde_json::from_value(inner.clone())?),
            _ => Ok(serde_json::from_value(value)?),
        }
    }
}

/// Everything measured by a run. Contains no timings so reruns compare
/// byte-for-byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub instance_id: String,
    pub method: Method,
    pub num_items: usize,
    pub shots: Option<u64>,
    pub best_value: Option<f64>,
    pub best_bitstring: Option<Selection>,
    pub proven_optimal: Option<bool>,
    /// Optimum used as the approximation-ratio denominator.
    pub c_star: Option<f64>,
    pub approximation_ratio: Option<f64>,
    pub valid_ratio: Option<f64>,
    pub top_k_used: Option<u64>,
    pub top_k_rule: Option<String>,
    pub baselines: BTreeMap<String, f64>,
    /// `best_value / baseline` per baseline.
    pub best_ratios: BTreeMap<String, f64>,
    pub random_valid_ratio: Option<f64>,
    pub warm_start_k: Option<f64>,
    pub params: Option<QaoaParams<f64>>,
}

impl MetricsReport {
    fn empty(instance_id: &str, method: Method, num_items: usize) -> Self {
        Self {
            instance_id: instance_id.to_string(),
            method,
            num_items,
            shots: None,
            best_value: None,
            best_bitstring: None,
            proven_optimal: None,
            c_star: None,
            approximation_ratio: None,
            valid_ratio: None,
            top_k_used: None,
            top_k_rule: None,
            baselines: BTreeMap::new(),
            best_ratios: BTreeMap::new(),
            random_valid_ratio: None,
            warm_start_k: None,
            params: None,
        }
    }
}

pub const TOP_K_RULE: &str = "highest-value feasible shots, with multiplicity, split at the cutoff";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<String>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: MetricsReport,
    pub manifest: Manifest,
}

pub const INSTANCE_FILE: &str = "instance.txt";
pub const SAMPLES_FILE: &str = "samples.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRACE_FILE: &str = "trace.json";
pub const HEATMAP_CSV_FILE: &str = "heatmap.csv";
pub const HEATMAP_SVG_FILE: &str = "heatmap.svg";
pub const CURVE_FILE: &str = "curve.csv";

struct Run<'a> {
    config: &'a ExperimentConfig,
    seeds: BTreeMap<String, u64>,
    outputs: Vec<String>,
    timings: BTreeMap<String, f64>,
}

impl Run<'_> {
    fn seed(&mut self, name: &str) -> u64 {
        let s = derive_seed(self.config.seed, &[label(name)]);
        self.seeds.insert(name.to_string(), s);
        s
    }

    fn stage<R>(&mut self, name: &'static str, f: impl FnOnce(&mut Self) -> Result<R>) -> Result<R> {
        let t = Instant::now();
        let out = f(self).map_err(|e| e.at_stage(name))?;
        self.timings.insert(name.to_string(), t.elapsed().as_secs_f64());
        Ok(out)
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.config.out_dir.join(name)
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.path(name);
        std::fs::write(p, contents)?;
        Ok(())
    }
}

fn to_json<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Execute `config` end to end and write its artifacts to `out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if config.shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    std::fs::create_dir_all(&config.out_dir)?;
    let mut run = Run {
        config,
        seeds: BTreeMap::new(),
        outputs: Vec::new(),
        timings: BTreeMap::new(),
    };
    let report = match config.method {
        Method::UcScan => run_uc(&mut run)?,
        _ => run_knapsack(&mut run)?,
    };
    run.write(METRICS_FILE, &to_json(&report)?)?;
    run.outputs.push(MANIFEST_FILE.to_string());
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        seeds: run.seeds,
        outputs: run.outputs,
        timings: run.timings,
    };
    std::fs::write(config.out_dir.join(MANIFEST_FILE), to_json(&manifest)?)?;
    Ok(ExperimentOutcome { report, manifest })
}

fn load_knapsack(source: &InstanceSource) -> Result<KnapsackInstance<f64>> {
    match source {
        InstanceSource::InverseStronglyCorrelated { n, seed } => gen_inverse_strongly_correlated(*n, *seed),
        InstanceSource::KnapsackFile { path } => load_instance(path),
        _ => Err(Error::invalid("knapsack methods need a knapsack instance source")),
    }
}

fn exact_solution(inst: &KnapsackInstance<f64>, solver: &SolverSettings) -> SolveResult<f64> {
    solve_dp(inst).unwrap_or_else(|_| solve_branch_bound(inst, solver.bnb()))
}

/// Greedy, exact (DP when applicable, else branch and bound) and brute
/// force for small instances.
fn baselines(inst: &KnapsackInstance<f64>, solver: &SolverSettings) -> Result<(BTreeMap<String, f64>, Option<f64>)> {
    let mut map = BTreeMap::new();
    map.insert("greedy".to_string(), lazy_greedy(inst).value);
    let exact = match solve_dp(inst) {
        Ok(r) => {
            map.insert("dp".to_string(), r.value);
            Some(r.value)
        }
        Err(_) => {
            let r = solve_branch_bound(inst, solver.bnb());
            map.insert("bnb".to_string(), r.value);
            r.proven_optimal.then_some(r.value)
        }
    };
    let brute = if inst.len() <= BRUTE_FORCE_BASELINE_MAX_ITEMS {
        let r = brute_force(inst)?;
        map.insert("brute_force".to_string(), r.value);
        Some(r.value)
    } else {
        None
    };
    Ok((map, exact.or(brute)))
}

fn run_knapsack(run: &mut Run) -> Result<MetricsReport> {
    let config = run.config;
    let inst = run.stage("instance", |_| load_knapsack(&config.instance))?;
    let p = run.path(INSTANCE_FILE);
    save_instance(&inst, p)?;
    let mut report = MetricsReport::empty(inst.id(), config.method, inst.len());
    let (base, c_star) = run.stage("baselines", |_| baselines(&inst, &config.solver))?;
    report.c_star = c_star;
    report.baselines = base;

    let solved = match config.method {
        Method::Greedy => Some(lazy_greedy(&inst)),
        Method::Dp => Some(run.stage("solve", |_| solve_dp(&inst))?),
        Method::Bnb => Some(run.stage("solve", |_| Ok(solve_branch_bound(&inst, config.solver.bnb())))?),
        Method::Brute => Some(run.stage("solve", |_| brute_force(&inst))?),
        Method::Copqaoa => None,
        Method::UcScan => unreachable!("handled by run_uc"),
    };
    if let Some(sol) = solved {
        report.best_value = Some(sol.value);
        report.best_bitstring = Some(sol.selection);
        report.proven_optimal = Some(sol.proven_optimal);
        report.best_ratios = ratios_against(sol.value, &report.baselines);
        return Ok(report);
    }
    run_copqaoa(run, &inst, report)
}

fn run_copqaoa(run: &mut Run, inst: &KnapsackInstance<f64>, mut report: MetricsReport) -> Result<MetricsReport> {
    let config = run.config;
    let s = &config.copqaoa;
    let n = inst.len();
    let floor = 1.0 / config.shots as f64;
    let exact_mode = EvalMode::Exact { floor };
    let k = match s.k {
        Some(k) => k,
        None => run.stage("calibrate", |_| {
            greedy_support_k(inst, floor, 1.0, 1.25, 1e6)?
                .ok_or_else(|| Error::invalid("no warm-start steepness up to 1e6 reduces the support to greedy"))
        })?,
    };
    report.warm_start_k = Some(k);
    let engine = run.stage("circuit", |_| {
        let spec = warm_start_spec(inst, k, s.r_star, s.theta)?;
        CopQaoa::new(inst, spec, s.pairing.build(n), s.initial)
    })?;

    let mut grid_best = None;
    if let Some(g) = &s.grid {
        let seed = run.seed("grid");
        let result = run.stage("grid", |_| {
            let spec = GridSpec::default_for(&engine, g.points);
            grid_search_p1(&engine, inst, &spec, g.mode.unwrap_or(exact_mode), seed)
        })?;
        run.write(HEATMAP_CSV_FILE, &heatmap_csv(&result))?;
        let p = run.path(HEATMAP_SVG_FILE);
        emit_heatmap_svg(&result, p)?;
        grid_best = Some([result.best().gamma, result.best().beta]);
    }

    let params = match (&s.params, s.depth, grid_best) {
        (Some(p), _, _) => p.clone(),
        (None, 0, Some([g, b])) => QaoaParams::new(vec![g], vec![b])?,
        (None, 0, None) => QaoaParams::empty(),
        (None, depth, _) => {
            let seed = run.seed("train");
            let tc = TrainConfig {
                restarts: s.restarts,
                optimizer_budget: s.optimizer_budget,
                mode: s.train_mode.unwrap_or(exact_mode),
                seed,
                gamma_range: None,
                beta_range: None,
                zero_start: s.zero_start,
                first_layer_start: grid_best,
            };
            let (params, trace) = run.stage("train", |_| train_layerwise(&engine, inst, depth, &tc))?;
            run.write(TRACE_FILE, &to_json(&trace)?)?;
            params
        }
    };

    let sample_seed = run.seed("sample");
    let samples = run.stage("sample", |_| sample(&engine.run(&params)?, config.shots, sample_seed))?;
    run.write(SAMPLES_FILE, &samples.to_csv())?;
    let metrics = run.stage("metrics", |_| sampled_metrics(&samples, inst, report.c_star, s.top_k))?;
    report.shots = Some(config.shots);
    report.valid_ratio = Some(metrics.valid_ratio);
    report.approximation_ratio = metrics.approximation_ratio;
    if let Some((sel, v)) = metrics.best {
        report.best_value = Some(v);
        report.best_bitstring = Some(sel);
        report.best_ratios = ratios_against(v, &report.baselines);
    }
    report.top_k_used = s.top_k;
    report.top_k_rule = s.top_k.map(|_| TOP_K_RULE.to_string());
    report.params = Some(params);
    if s.random_baseline {
        let seed = run.seed("random");
        report.random_valid_ratio = Some(valid_ratio(&random_samples(n, config.shots, seed), inst)?);
    }
    Ok(report)
}

/// Metrics recomputable from a samples file and its instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMetrics {
    pub valid_ratio: f64,
    /// `None` when nothing feasible was sampled or no optimum is known.
    pub approximation_ratio: Option<f64>,
    pub best: Option<(Selection, f64)>,
}

pub fn sampled_metrics(
    samples: &SampleSet,
    inst: &KnapsackInstance<f64>,
    c_star: Option<f64>,
    top_k: Option<u64>,
) -> Result<SampledMetrics> {
    let best = best_feasible(samples, inst)?;
    let approximation_ratio = match (c_star, &best) {
        (Some(c), Some(_)) if c > 0.0 => Some(approximation_ratio(samples, inst, c, top_k)?),
        _ => None,
    };
    Ok(SampledMetrics {
        valid_ratio: valid_ratio(samples, inst)?,
        approximation_ratio,
        best,
    })
}

fn run_uc(run: &mut Run) -> Result<MetricsReport> {
    let config = run.config;
    let uc: UcInstance<f64> = run.stage("instance", |_| match &config.instance {
        InstanceSource::RandomUc { n, load_factor, seed } => random_uc(*n, &UcRanges::standard(), *load_factor, *seed),
        InstanceSource::UcFile { path } => load_uc(path),
        _ => Err(Error::invalid("uc-scan needs a unit-commitment instance source")),
    })?;
    let p = run.path(INSTANCE_FILE);
    save_uc(&uc, p)?;
    let id = match &config.instance {
        InstanceSource::RandomUc { n, seed, .. } => format!("uc-n{n}-s{seed}"),
        InstanceSource::UcFile { path } => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        _ => String::new(),
    };
    let mut report = MetricsReport::empty(&id, Method::UcScan, uc.len());
    let solver = match config.uc.solver {
        UcKnapsackSolver::Exact => ScanSolver::Exact,
        UcKnapsackSolver::Bnb => ScanSolver::BranchBound(config.solver.bnb()),
        UcKnapsackSolver::Greedy => ScanSolver::Greedy,
    };
    let outcome = run.stage("scan", |_| {
        let (lo, hi) = uc.marginal_span();
        solve_uc_via_scan(&uc, &uniform_grid(lo, hi, config.uc.grid_points), &solver, config.uc.cost_mode)
    })?;
    run.write(CURVE_FILE, &write_scan_csv(&outcome.curve))?;
    report.best_value = Some(outcome.cost);
    report.best_bitstring = Some(outcome.commitment);
    if uc.len() <= BRUTE_FORCE_UC_MAX_UNITS {
        let (_, _, cost) = run.stage("brute_force", |_| brute_force_uc(&uc))?;
        report.baselines.insert("brute_force".to_string(), cost);
        report.c_star = Some(cost);
    }
    report.best_ratios = ratios_against(outcome.cost, &report.baselines);
    Ok(report)
}

/// Recompute the sample-derived metrics of a finished run from its
/// directory alone.
pub fn recompute_from_dir(dir: impl AsRef<Path>, top_k: Option<u64>) -> Result<SampledMetrics> {
    let dir = dir.as_ref();
    let inst: KnapsackInstance<f64> = load_instance(dir.join(INSTANCE_FILE))?;
    let samples = SampleSet::from_csv(&std::fs::read_to_string(dir.join(SAMPLES_FILE))?)?;
    let c_star = exact_solution(&inst, &SolverSettings::default());
    sampled_metrics(&samples, &inst, c_star.proven_optimal.then_some(c_star.value), top_k)
}

//! Benchmark metrics, reproducible experiment runs and heatmap rendering.

mod experiment;
mod metrics;
mod svg;

pub use experiment::{
    recompute_from_dir, run_experiment, sampled_metrics, CopQaoaSettings, ExperimentConfig, ExperimentOutcome,
    GridSettings, InstanceSource, Manifest, Method, MetricsReport, PairingKind, SampledMetrics, SolverSettings,
    UcKnapsackSolver, UcSettings, BRUTE_FORCE_BASELINE_MAX_ITEMS, CURVE_FILE, HEATMAP_CSV_FILE, HEATMAP_SVG_FILE,
    INSTANCE_FILE, MANIFEST_FILE, METRICS_FILE, SAMPLES_FILE, TOP_K_RULE, TRACE_FILE,
};
pub use metrics::{approximation_ratio, best_feasible, best_ratio_report, random_samples, valid_ratio};
pub use svg::{emit_heatmap_svg, render_heatmap_svg};

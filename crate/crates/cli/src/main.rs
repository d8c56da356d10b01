use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use copqaoa_core::bench::{
    recompute_from_dir, run_experiment, CopQaoaSettings, ExperimentConfig, GridSettings, InstanceSource, Method,
};
use copqaoa_core::copqaoa::QaoaParams;
use copqaoa_core::knapsack::{
    brute_force, gen_inverse_strongly_correlated, lazy_greedy, load_instance, save_instance, solve_branch_bound,
    solve_dp, BranchBoundConfig, KnapsackInstance,
};
use copqaoa_core::train::EvalMode;
use copqaoa_core::uc::{
    load_uc, random_uc, save_uc, solve_uc_via_scan, uniform_grid, write_scan_csv, CostMode, ScanSolver, UcInstance,
    UcRanges, DEFAULT_GRID_POINTS,
};

/// Copula-QAOA and classical baselines for knapsack and unit commitment.
#[derive(Parser)]
#[command(name = "copqaoa", version)]
struct Cli {
    /// Run an experiment config or replay a run manifest.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance.
    Gen(GenArgs),
    /// Solve a knapsack instance classically.
    Solve(SolveArgs),
    /// Solve unit commitment by scanning the marginal cost.
    UcScan(UcScanArgs),
    /// Sample cop-QAOA at fixed angles.
    QaoaRun(QaoaRunArgs),
    /// Layer-wise training, optionally initialised from a depth-one grid.
    QaoaTrain(QaoaTrainArgs),
    /// Depth-one (γ, β) grid scan with heatmap output.
    QaoaGrid(QaoaGridArgs),
    /// Recompute sample metrics from a run directory.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Inversely strongly correlated knapsack.
    Isc,
    /// Random unit commitment.
    Uc,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "isc")]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Load as a fraction of total capacity (unit commitment only).
    #[arg(long, default_value_t = 0.6)]
    load_factor: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Greedy,
    Dp,
    Bnb,
    Brute,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "dp")]
    method: SolveMethod,
    /// Branch-and-bound wall-clock budget.
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Write the result JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum UcSolver {
    Exact,
    Bnb,
    Greedy,
}

#[derive(Args)]
struct UcScanArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
    #[arg(long, value_enum, default_value = "exact")]
    solver: UcSolver,
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Cost commitments at the induced outputs instead of re-dispatching.
    #[arg(long)]
    induced: bool,
    /// Write the scan curve CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QaoaCommon {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Warm-start steepness; calibrated automatically when omitted.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long)]
    top_k: Option<u64>,
}

impl QaoaCommon {
    fn config(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            InstanceSource::KnapsackFile { path: self.instance.clone() },
            Method::Copqaoa,
            self.seed,
            &self.out,
        );
        c.shots = self.shots;
        c.copqaoa = CopQaoaSettings {
            k: self.k,
            theta: self.theta,
            top_k: self.top_k,
            ..CopQaoaSettings::default()
        };
        c
    }
}

#[derive(Args)]
struct QaoaRunArgs {
    #[command(flatten)]
    common: QaoaCommon,
    /// Comma-separated γ per layer.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gammas: Vec<f64>,
    /// Comma-separated β per layer.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    betas: Vec<f64>,
}

#[derive(Args)]
struct QaoaTrainArgs {
    #[command(flatten)]
    common: QaoaCommon,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 40)]
    budget: usize,
    /// Score training points by sampling this many shots instead of exactly.
    #[arg(long)]
    train_shots: Option<u64>,
    /// Seed the first layer from a depth-one grid scan.
    #[arg(long)]
    grid_init: bool,
    #[arg(long, default_value_t = 32)]
    grid_points: usize,
}

#[derive(Args)]
struct QaoaGridArgs {
    #[command(flatten)]
    common: QaoaCommon,
    #[arg(long, default_value_t = 32)]
    points: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directory holding instance.txt and samples.csv.
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    top_k: Option<u64>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match (cli.config, cli.command) {
        (Some(path), None) => run_config(&path),
        (None, Some(cmd)) => dispatch(cmd),
        (Some(_), Some(_)) => bail!("--config cannot be combined with a subcommand"),
        (None, None) => bail!("expected a subcommand or --config <json>; see --help"),
    }
}

/// Print to stdout; a closed pipe ends the process quietly.
fn emit(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == ErrorKind::BrokenPipe => std::process::exit(0),
        other => Ok(other?),
    }
}

fn run_config(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = ExperimentConfig::from_json(&text)?;
    experiment(&config)
}

fn experiment(config: &ExperimentConfig) -> Result<()> {
    let out = run_experiment(config)?;
    emit(&serde_json::to_string_pretty(&out.report)?)?;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::UcScan(a) => uc_scan(a),
        Command::QaoaRun(a) => {
            let mut c = a.common.config();
            c.copqaoa.params = Some(QaoaParams::new(a.gammas, a.betas)?);
            experiment(&c)
        }
        Command::QaoaTrain(a) => {
            let mut c = a.common.config();
            c.copqaoa.depth = a.depth;
            c.copqaoa.restarts = a.restarts;
            c.copqaoa.optimizer_budget = a.budget;
            c.copqaoa.train_mode = a.train_shots.map(|shots| EvalMode::Sampled { shots });
            if a.grid_init {
                c.copqaoa.grid = Some(GridSettings {
                    points: a.grid_points,
                    mode: None,
                });
            }
            experiment(&c)
        }
        Command::QaoaGrid(a) => {
            let mut c = a.common.config();
            c.copqaoa.depth = 0;
            c.copqaoa.grid = Some(GridSettings {
                points: a.points,
                mode: None,
            });
            experiment(&c)
        }
        Command::Report(a) => {
            let m = recompute_from_dir(&a.dir, a.top_k)?;
            let json = serde_json::json!({
                "valid_ratio": m.valid_ratio,
                "approximation_ratio": m.approximation_ratio,
                "best_value": m.best.as_ref().map(|b| b.1),
                "best_bitstring": m.best.as_ref().map(|b| b.0.to_string()),
                "top_k": a.top_k,
            });
            emit(&serde_json::to_string_pretty(&json)?)?;
            Ok(())
        }
    }
}

fn gen(a: GenArgs) -> Result<()> {
    match a.family {
        Family::Isc => {
            let inst: KnapsackInstance<f64> = gen_inverse_strongly_correlated(a.n, a.seed)?;
            save_instance(&inst, &a.out)?;
        }
        Family::Uc => {
            let uc: UcInstance<f64> = random_uc(a.n, &UcRanges::standard(), a.load_factor, a.seed)?;
            save_uc(&uc, &a.out)?;
        }
    }
    eprintln!("wrote {}", a.out.display());
    Ok(())
}

fn bnb_config(ms: Option<u64>) -> BranchBoundConfig {
    BranchBoundConfig {
        time_budget: ms.map(std::time::Duration::from_millis),
        node_limit: None,
    }
}

fn solve(a: SolveArgs) -> Result<()> {
    let inst: KnapsackInstance<f64> = load_instance(&a.instance)?;
    let result = match a.method {
        SolveMethod::Greedy => lazy_greedy(&inst),
        SolveMethod::Dp => solve_dp(&inst)?,
        SolveMethod::Bnb => solve_branch_bound(&inst, bnb_config(a.time_budget_ms)),
        SolveMethod::Brute => brute_force(&inst)?,
    };
    let json = serde_json::to_string_pretty(&result)?;
    match a.out {
        Some(p) => std::fs::write(&p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => emit(&json)?,
    }
    Ok(())
}

fn uc_scan(a: UcScanArgs) -> Result<()> {
    let uc: UcInstance<f64> = load_uc(&a.instance)?;
    let solver = match a.solver {
        UcSolver::Exact => ScanSolver::Exact,
        UcSolver::Bnb => ScanSolver::BranchBound(bnb_config(a.time_budget_ms)),
        UcSolver::Greedy => ScanSolver::Greedy,
    };
    let mode = if a.induced { CostMode::Induced } else { CostMode::Redispatch };
    let (lo, hi) = uc.marginal_span();
    let outcome = solve_uc_via_scan(&uc, &uniform_grid(lo, hi, a.grid), &solver, mode)?;
    if let Some(p) = &a.out {
        std::fs::write(p, write_scan_csv(&outcome.curve)).with_context(|| format!("writing {}", p.display()))?;
    }
    let json = serde_json::json!({
        "cost": outcome.cost,
        "commitment": outcome.commitment.to_string(),
        "marginal": outcome.marginal,
        "lambda": outcome.lambda,
        "powers": outcome.dispatch.powers,
    });
    emit(&serde_json::to_string_pretty(&json)?)?;
    Ok(())
}

//! Command-line front end: data generation/ingestion, graph learning,
//! interpolation, and evaluation sweeps. Artifacts go to files, logs to
//! stderr; every output embeds the fully resolved configuration that
//! produced it. Exit codes: 0 success, 1 runtime/solver failure,
//! 2 usage/validation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gridgsp::config::{EvalSection, GenSection, InterpolateSection, LearnSection, RunConfig, SweepMuSection, SweepRhoSection};
use gridgsp::clime::ClimeConfig;
use gridgsp::eval::{run_covariance_sweep, run_split_ablation, run_sweep_with_options, SweepSpec};
use gridgsp::interpolate::{interpolate, InterpolateConfig, SamplingPattern};
use gridgsp::laplacian::HermitianLaplacian;
use gridgsp::linalg::{ComplexVector, Normalizer};
use gridgsp::lp::{LpAlgorithm, LpStatus, SolverSettings};
use gridgsp::pipeline::{learn_laplacian, LearnSettings};
use gridgsp::data;

#[derive(Parser)]
#[command(name = "gridgsp", version, about = "Hermitian graph learning and grid-state interpolation")]
struct Cli {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (column solves, evaluation trials). Defaults to the
    /// available cores; results do not depend on the width.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic ground-truth model and dataset.
    Gen(GenArgs),
    /// Learn a Hermitian Laplacian from a dataset.
    Learn(LearnArgs),
    /// Interpolate a state vector from partial observations.
    Interpolate(InterpolateArgs),
    /// MSE sweeps over observed-node counts (and optionally covariance sizes).
    Eval(EvalArgs),
    /// Learn with several sparsity slacks and compare.
    SweepRho(SweepRhoArgs),
    /// Interpolate with several GLR weights and compare.
    SweepMu(SweepMuArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    edge_density: Option<f64>,
    #[arg(long)]
    phase_spread: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_model: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    sparsity_epsilon: Option<f64>,
    /// Covariance divisor: "by_nodes" (N) or "by_samples" (K).
    #[arg(long)]
    normalizer: Option<String>,
    /// Train on a random subset of this many columns (see --split-seed).
    #[arg(long)]
    train_count: Option<usize>,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    pd_floor: Option<f64>,
    /// LP backend: "interior_point" or "simplex".
    #[arg(long)]
    algorithm: Option<String>,
    /// Exit 0 even when some columns failed to solve to optimality.
    #[arg(long)]
    allow_degraded: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InterpolateArgs {
    #[arg(long)]
    laplacian: Option<PathBuf>,
    /// CSV with one row holding the M observed values (re/im pairs).
    #[arg(long)]
    observations: Option<PathBuf>,
    /// Observed node indices, e.g. --observed 0,3,7
    #[arg(long, value_delimiter = ',')]
    observed: Option<Vec<usize>>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    cg_tol: Option<f64>,
    #[arg(long)]
    cg_max_iters: Option<usize>,
    #[arg(long)]
    jacobi: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Reuse an existing Laplacian instead of learning from the train split
    /// (all dataset columns then score as test vectors).
    #[arg(long)]
    laplacian: Option<PathBuf>,
    #[arg(long)]
    train_count: Option<usize>,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    sample_counts: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Report raw complex MSE instead of magnitude/phase decomposition.
    #[arg(long)]
    no_decompose: bool,
    #[arg(long)]
    normalizer: Option<String>,
    #[arg(long)]
    algorithm: Option<String>,
    /// Also sweep covariance sizes, e.g. --k-sweep 100,500,2000
    #[arg(long, value_delimiter = ',')]
    k_sweep: Option<Vec<usize>>,
    /// Fixed M for the covariance sweep.
    #[arg(long)]
    m_fixed: Option<usize>,
    /// Also run the real/imag-split ablation.
    #[arg(long)]
    ablation: bool,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_table: Option<PathBuf>,
    #[arg(long)]
    per_trial_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepRhoArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    train_count: Option<usize>,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    rhos: Option<Vec<f64>>,
    /// Observed-node count used to score each candidate.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    normalizer: Option<String>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_table: Option<PathBuf>,
}

#[derive(Args)]
struct SweepMuArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    train_count: Option<usize>,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    mus: Option<Vec<f64>>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    normalizer: Option<String>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_table: Option<PathBuf>,
}

/// Command failure with its exit code.
struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

type CmdResult<T> = Result<T, CmdError>;

fn usage<T>(r: gridgsp::Result<T>, what: &str) -> CmdResult<T> {
    r.map_err(|e| CmdError::usage(format!("{what}: {e}")))
}

fn runtime<T>(r: gridgsp::Result<T>, what: &str) -> CmdResult<T> {
    r.map_err(|e| CmdError::runtime(format!("{what}: {e}")))
}

fn parse_normalizer(s: Option<&str>, from_cfg: Option<Normalizer>) -> CmdResult<Normalizer> {
    match s {
        Some("by_nodes") | Some("by-nodes") => Ok(Normalizer::ByNodes),
        Some("by_samples") | Some("by-samples") => Ok(Normalizer::BySamples),
        Some(other) => Err(CmdError::usage(format!(
            "unknown normalizer {other:?}; expected by_nodes or by_samples"
        ))),
        None => Ok(from_cfg.unwrap_or(Normalizer::ByNodes)),
    }
}

fn parse_algorithm(s: Option<&str>, from_cfg: Option<LpAlgorithm>) -> CmdResult<LpAlgorithm> {
    match s {
        Some("interior_point") | Some("interior-point") => Ok(LpAlgorithm::InteriorPoint),
        Some("simplex") => Ok(LpAlgorithm::Simplex),
        Some(other) => Err(CmdError::usage(format!(
            "unknown algorithm {other:?}; expected interior_point or simplex"
        ))),
        None => Ok(from_cfg.unwrap_or_default()),
    }
}

fn load_config(path: &Option<PathBuf>) -> CmdResult<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CmdError::usage(format!("cannot read config {}: {e}", p.display())))?;
            RunConfig::from_toml_str(&text).map_err(|e| CmdError::usage(e.to_string()))
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CmdResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CmdError::runtime(format!("cannot write {}: {e}", path.display())))
}

fn required<T: Clone>(flag: Option<T>, cfg: Option<T>, name: &str) -> CmdResult<T> {
    flag.or(cfg)
        .ok_or_else(|| CmdError::usage(format!("missing required option --{name} (or config field)")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CmdResult<()> {
    let cfg = load_config(&cli.config)?;
    let threads = cli.threads.or(cfg.threads);
    if let Some(t) = threads {
        if t == 0 {
            return Err(CmdError::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CmdError::runtime(format!("thread pool: {e}")))?;
    }
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args, cfg.gen.unwrap_or_default()),
        Cmd::Learn(args) => cmd_learn(args, cfg.learn.unwrap_or_default()),
        Cmd::Interpolate(args) => cmd_interpolate(args, cfg.interpolate.unwrap_or_default()),
        Cmd::Eval(args) => cmd_eval(args, cfg.eval.unwrap_or_default()),
        Cmd::SweepRho(args) => cmd_sweep_rho(args, cfg.sweep_rho.unwrap_or_default()),
        Cmd::SweepMu(args) => cmd_sweep_mu(args, cfg.sweep_mu.unwrap_or_default()),
    }
}

#[derive(Serialize)]
struct ResolvedGen {
    nodes: usize,
    samples: usize,
    edge_density: f64,
    phase_spread: f64,
    seed: u64,
    out_csv: String,
    out_model: String,
}

fn cmd_gen(args: GenArgs, cfg: GenSection) -> CmdResult<()> {
    let resolved = ResolvedGen {
        nodes: required(args.nodes, cfg.nodes, "nodes")?,
        samples: args.samples.or(cfg.samples).unwrap_or(5000),
        edge_density: args.edge_density.or(cfg.edge_density).unwrap_or(0.3),
        phase_spread: args.phase_spread.or(cfg.phase_spread).unwrap_or(1.0),
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        out_csv: required(args.out_csv, cfg.out_csv.map(PathBuf::from), "out-csv")?
            .display()
            .to_string(),
        out_model: required(args.out_model, cfg.out_model.map(PathBuf::from), "out-model")?
            .display()
            .to_string(),
    };

    let model = usage(
        data::random_hermitian_laplacian(resolved.nodes, resolved.edge_density, resolved.phase_spread, resolved.seed),
        "generator",
    )?;
    let ds = runtime(data::sample_gmrf(&model, resolved.samples, resolved.seed), "sampling")?;

    runtime(data::save_csv(&ds, Path::new(&resolved.out_csv)), "writing dataset")?;
    let mut doc: serde_json::Value = serde_json::from_str(&runtime(model.to_json_string(), "serializing model")?)
        .expect("model json is valid");
    doc.as_object_mut()
        .expect("model json is an object")
        .insert("config".to_string(), serde_json::to_value(&resolved).expect("config serializes"));
    write_file(
        Path::new(&resolved.out_model),
        &format!("{}\n", serde_json::to_string_pretty(&doc).expect("model document serializes")),
    )?;
    log::info!(
        "generated {} nodes x {} samples (seed {}) -> {}, {}",
        resolved.nodes,
        resolved.samples,
        resolved.seed,
        resolved.out_csv,
        resolved.out_model
    );
    Ok(())
}

#[derive(Serialize)]
struct ResolvedLearn {
    dataset: String,
    rho: f64,
    sparsity_epsilon: f64,
    normalizer: Normalizer,
    train_count: Option<usize>,
    split_seed: u64,
    pd_floor: Option<f64>,
    algorithm: LpAlgorithm,
    allow_degraded: bool,
    out: String,
}

fn cmd_learn(args: LearnArgs, cfg: LearnSection) -> CmdResult<()> {
    let resolved = ResolvedLearn {
        dataset: required(args.dataset, cfg.dataset.map(PathBuf::from), "dataset")?
            .display()
            .to_string(),
        rho: args.rho.or(cfg.rho).unwrap_or(0.2),
        sparsity_epsilon: args.sparsity_epsilon.or(cfg.sparsity_epsilon).unwrap_or(1e-6),
        normalizer: parse_normalizer(args.normalizer.as_deref(), cfg.normalizer)?,
        train_count: args.train_count.or(cfg.train_count),
        split_seed: args.split_seed.or(cfg.split_seed).unwrap_or(0),
        pd_floor: args.pd_floor.or(cfg.pd_floor),
        algorithm: parse_algorithm(args.algorithm.as_deref(), cfg.algorithm)?,
        allow_degraded: args.allow_degraded || cfg.allow_degraded.unwrap_or(false),
        out: required(args.out, cfg.out.map(PathBuf::from), "out")?.display().to_string(),
    };
    if !(resolved.rho > 0.0) {
        return Err(CmdError::usage(format!("rho must be positive, got {}", resolved.rho)));
    }

    let ds = usage(data::load_csv(Path::new(&resolved.dataset)), "loading dataset")?;
    let ds = match resolved.train_count {
        Some(t) => usage(data::split(&ds, t, resolved.split_seed), "splitting dataset")?,
        None => ds,
    };
    let x_train = usage(ds.train_matrix(), "train split")?;
    let input_max_imag = x_train.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let settings = LearnSettings {
        clime: ClimeConfig {
            rho: resolved.rho,
            sparsity_epsilon: resolved.sparsity_epsilon,
            column_parallelism: 0,
        },
        normalizer: resolved.normalizer,
        solver: SolverSettings {
            algorithm: resolved.algorithm,
            ..SolverSettings::default()
        },
        pd_floor: resolved.pd_floor,
    };
    let outcome = runtime(learn_laplacian(&x_train, &settings), "learning")?;

    for (i, (status, residual)) in outcome
        .precision
        .per_column_status()
        .iter()
        .zip(outcome.precision.per_column_residual())
        .enumerate()
    {
        log::info!("column {i}: {status} (residual {residual:.3e})");
    }
    if input_max_imag == 0.0 {
        log::warn!(
            "input is real-valued; the learned Laplacian reduces to the real case (max imaginary entry {:.3e})",
            outcome.precision.max_imag_abs()
        );
    }
    let degraded = outcome.precision.is_degraded();
    if degraded && !resolved.allow_degraded {
        return Err(CmdError::runtime(format!(
            "{} of {} columns failed to solve to optimality (rerun with --allow-degraded to keep the estimate)",
            outcome
                .precision
                .per_column_status()
                .iter()
                .filter(|s| **s != LpStatus::Optimal)
                .count(),
            outcome.precision.n(),
        )));
    }

    let mut doc: serde_json::Value =
        serde_json::from_str(&runtime(outcome.laplacian.to_json_string(), "serializing laplacian")?)
            .expect("laplacian json is valid");
    let obj = doc.as_object_mut().expect("laplacian json is an object");
    obj.insert("config".to_string(), serde_json::to_value(&resolved).expect("config serializes"));
    obj.insert(
        "statuses".to_string(),
        serde_json::to_value(outcome.precision.per_column_status()).expect("statuses serialize"),
    );
    obj.insert(
        "lambda_min_before_repair".to_string(),
        serde_json::json!(outcome.lambda_min_before_repair),
    );
    obj.insert("degraded".to_string(), serde_json::json!(degraded));
    write_file(
        Path::new(&resolved.out),
        &format!("{}\n", serde_json::to_string_pretty(&doc).expect("laplacian document serializes")),
    )?;
    log::info!(
        "learned {}-node Laplacian (rho {}, {} off-diagonal entries) -> {}",
        outcome.laplacian.n(),
        resolved.rho,
        outcome.laplacian.nnz_off_diagonal(),
        resolved.out
    );
    Ok(())
}

#[derive(Serialize)]
struct ResolvedInterpolate {
    laplacian: String,
    observations: String,
    observed: Vec<usize>,
    mu: f64,
    cg_tol: f64,
    cg_max_iters: Option<usize>,
    jacobi: bool,
    out: String,
}

fn cmd_interpolate(args: InterpolateArgs, cfg: InterpolateSection) -> CmdResult<()> {
    let resolved = ResolvedInterpolate {
        laplacian: required(args.laplacian, cfg.laplacian.map(PathBuf::from), "laplacian")?
            .display()
            .to_string(),
        observations: required(args.observations, cfg.observations.map(PathBuf::from), "observations")?
            .display()
            .to_string(),
        observed: required(args.observed, cfg.observed, "observed")?,
        mu: args.mu.or(cfg.mu).unwrap_or(0.1),
        cg_tol: args.cg_tol.or(cfg.cg_tol).unwrap_or(1e-8),
        cg_max_iters: args.cg_max_iters.or(cfg.cg_max_iters),
        jacobi: args.jacobi || cfg.jacobi.unwrap_or(false),
        out: required(args.out, cfg.out.map(PathBuf::from), "out")?.display().to_string(),
    };

    let text = std::fs::read(Path::new(&resolved.laplacian))
        .map_err(|e| CmdError::usage(format!("cannot read laplacian {}: {e}", resolved.laplacian)))?;
    let text = String::from_utf8(text).map_err(|_| CmdError::usage("laplacian file is not utf-8"))?;
    let laplacian = usage(HermitianLaplacian::from_json_str(&text), "parsing laplacian")?;

    let y_matrix = usage(data::load_csv(Path::new(&resolved.observations)), "loading observations")?;
    if y_matrix.k() != 1 {
        return Err(CmdError::usage(format!(
            "observations file must contain exactly one row, found {}",
            y_matrix.k()
        )));
    }
    let y = usage(ComplexVector::new(y_matrix.x().column(0)), "observations")?;

    let pattern = usage(SamplingPattern::new(laplacian.n(), resolved.observed.clone()), "sampling pattern")?;
    if y.len() != pattern.num_observed() {
        return Err(CmdError::usage(format!(
            "{} observed indices but {} observation values",
            pattern.num_observed(),
            y.len()
        )));
    }

    let icfg = InterpolateConfig {
        mu: resolved.mu,
        cg_tol: resolved.cg_tol,
        cg_max_iters: resolved.cg_max_iters,
        pd_floor: None,
        jacobi: resolved.jacobi,
    };
    let result = runtime(interpolate(&y, &pattern, &laplacian, &icfg), "interpolation")?;
    if !result.converged {
        return Err(CmdError::runtime(format!(
            "conjugate gradient did not reach tolerance {} in {} iterations (residual {:.3e})",
            resolved.cg_tol, result.cg_iterations, result.final_relative_residual
        )));
    }

    let doc = serde_json::json!({
        "n": laplacian.n(),
        "observed": pattern.observed(),
        "x_star": {
            "re": result.x_star.entries().iter().map(|z| z.re).collect::<Vec<_>>(),
            "im": result.x_star.entries().iter().map(|z| z.im).collect::<Vec<_>>(),
        },
        "cg_iterations": result.cg_iterations,
        "final_relative_residual": result.final_relative_residual,
        "objective_value": result.objective_value,
        "config": serde_json::to_value(&resolved).expect("config serializes"),
    });
    write_file(
        Path::new(&resolved.out),
        &format!("{}\n", serde_json::to_string_pretty(&doc).expect("state document serializes")),
    )?;
    log::info!(
        "interpolated {} nodes from {} observations in {} CG iterations (residual {:.3e}) -> {}",
        laplacian.n(),
        pattern.num_observed(),
        result.cg_iterations,
        result.final_relative_residual,
        resolved.out
    );
    Ok(())
}

#[derive(Serialize)]
struct ResolvedEval {
    dataset: String,
    laplacian: Option<String>,
    train_count: Option<usize>,
    split_seed: u64,
    sample_counts: Vec<usize>,
    trials: usize,
    seed: u64,
    mu: f64,
    rho: f64,
    decompose: bool,
    normalizer: Normalizer,
    algorithm: LpAlgorithm,
    k_sweep: Option<Vec<usize>>,
    m_fixed: Option<usize>,
    ablation: bool,
    out_json: String,
    out_table: Option<String>,
    per_trial_csv: Option<String>,
}

fn cmd_eval(args: EvalArgs, cfg: EvalSection) -> CmdResult<()> {
    let resolved = ResolvedEval {
        dataset: required(args.dataset, cfg.dataset.map(PathBuf::from), "dataset")?
            .display()
            .to_string(),
        laplacian: args
            .laplacian
            .map(|p| p.display().to_string())
            .or(cfg.laplacian),
        train_count: args.train_count.or(cfg.train_count),
        split_seed: args.split_seed.or(cfg.split_seed).unwrap_or(0),
        sample_counts: args
            .sample_counts
            .or(cfg.sample_counts)
            .unwrap_or_else(|| vec![8, 12, 16, 20, 24]),
        trials: args.trials.or(cfg.trials).unwrap_or(10),
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        mu: args.mu.or(cfg.mu).unwrap_or(0.1),
        rho: args.rho.or(cfg.rho).unwrap_or(0.2),
        decompose: !args.no_decompose && cfg.decompose.unwrap_or(true),
        normalizer: parse_normalizer(args.normalizer.as_deref(), cfg.normalizer)?,
        algorithm: parse_algorithm(args.algorithm.as_deref(), cfg.algorithm)?,
        k_sweep: args.k_sweep.or(cfg.k_sweep),
        m_fixed: args.m_fixed.or(cfg.m_fixed),
        ablation: args.ablation || cfg.ablation.unwrap_or(false),
        out_json: required(args.out_json, cfg.out_json.map(PathBuf::from), "out-json")?
            .display()
            .to_string(),
        out_table: args.out_table.map(|p| p.display().to_string()).or(cfg.out_table),
        per_trial_csv: args
            .per_trial_csv
            .map(|p| p.display().to_string())
            .or(cfg.per_trial_csv),
    };

    let ds = usage(data::load_csv(Path::new(&resolved.dataset)), "loading dataset")?;
    let spec_probe = SweepSpec {
        sample_counts: resolved.sample_counts.clone(),
        trials: resolved.trials,
        seed: resolved.seed,
        mu: resolved.mu,
        rho: resolved.rho,
        decompose: resolved.decompose,
    };
    usage(spec_probe.validate(ds.n()), "sweep specification")?;
    if let Some(m) = resolved.m_fixed {
        if m == 0 || m > ds.n() {
            return Err(CmdError::usage(format!(
                "--m-fixed {m} out of range for {} nodes",
                ds.n()
            )));
        }
    }
    let learn_settings = LearnSettings {
        clime: ClimeConfig {
            rho: resolved.rho,
            ..ClimeConfig::default()
        },
        normalizer: resolved.normalizer,
        solver: SolverSettings {
            algorithm: resolved.algorithm,
            ..SolverSettings::default()
        },
        pd_floor: None,
    };

    // Wire the split so the learned Laplacian is a pure function of the
    // train columns; with an external Laplacian every column is test data.
    let (ds, laplacian) = match &resolved.laplacian {
        Some(path) => {
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|e| CmdError::usage(format!("cannot read laplacian {path}: {e}")))?;
            let l = usage(HermitianLaplacian::from_json_str(&text), "parsing laplacian")?;
            let all: Vec<usize> = (0..ds.k()).collect();
            let ds = usage(
                data::Dataset::new(ds.x().clone(), Vec::new(), all, ds.source().clone(), ds.is_centered()),
                "dataset",
            )?;
            (ds, l)
        }
        None => {
            let train_count = resolved
                .train_count
                .ok_or_else(|| CmdError::usage("eval needs --train-count (or --laplacian)"))?;
            let ds = usage(data::split(&ds, train_count, resolved.split_seed), "splitting dataset")?;
            let x_train = usage(ds.train_matrix(), "train split")?;
            let outcome = runtime(learn_laplacian(&x_train, &learn_settings), "learning")?;
            (ds, outcome.laplacian)
        }
    };

    let spec = SweepSpec {
        sample_counts: resolved.sample_counts.clone(),
        trials: resolved.trials,
        seed: resolved.seed,
        mu: resolved.mu,
        rho: resolved.rho,
        decompose: resolved.decompose,
    };
    let keep_per_trial = resolved.per_trial_csv.is_some();
    let report = runtime(
        run_sweep_with_options(&ds, &laplacian, &spec, keep_per_trial),
        "sweep",
    )?;
    log::info!("sample-count sweep finished in {:.2}s", report.wall_clock_seconds);

    let mut documents = vec![("sample_count_sweep", report.clone())];

    if let Some(ks) = &resolved.k_sweep {
        let m_fixed = resolved
            .m_fixed
            .ok_or_else(|| CmdError::usage("--k-sweep needs --m-fixed"))?;
        if resolved.laplacian.is_some() {
            return Err(CmdError::usage("--k-sweep re-learns per K and conflicts with --laplacian"));
        }
        let k_report = runtime(
            run_covariance_sweep(&ds, ks, m_fixed, &spec, &learn_settings),
            "covariance sweep",
        )?;
        log::info!("covariance sweep finished in {:.2}s", k_report.wall_clock_seconds);
        documents.push(("covariance_sweep", k_report));
    }
    if resolved.ablation {
        if resolved.laplacian.is_some() {
            return Err(CmdError::usage("--ablation re-learns and conflicts with --laplacian"));
        }
        let ab = runtime(run_split_ablation(&ds, &spec, &learn_settings), "split ablation")?;
        log::info!("split ablation finished in {:.2}s", ab.wall_clock_seconds);
        documents.push(("split_ablation", ab));
    }

    let mut doc = serde_json::Map::new();
    doc.insert(
        "config".to_string(),
        serde_json::to_value(&resolved).expect("config serializes"),
    );
    let mut tables = String::new();
    for (name, rep) in &documents {
        doc.insert(
            name.to_string(),
            serde_json::to_value(rep).expect("report serializes"),
        );
        tables.push_str(&format!("{name}\n{}\n", rep.text_table()));
    }
    write_file(
        Path::new(&resolved.out_json),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("report document serializes")
        ),
    )?;
    if let Some(table_path) = &resolved.out_table {
        write_file(Path::new(table_path), &tables)?;
    }
    if let Some(csv_path) = &resolved.per_trial_csv {
        write_file(Path::new(csv_path), &documents[0].1.per_trial_csv())?;
    }
    log::info!("evaluation report -> {}", resolved.out_json);
    Ok(())
}

#[derive(Serialize)]
struct ResolvedSweepRho {
    dataset: String,
    train_count: usize,
    split_seed: u64,
    rhos: Vec<f64>,
    m: usize,
    trials: usize,
    mu: f64,
    seed: u64,
    normalizer: Normalizer,
    out_json: String,
    out_table: Option<String>,
}

fn cmd_sweep_rho(args: SweepRhoArgs, cfg: SweepRhoSection) -> CmdResult<()> {
    let resolved = ResolvedSweepRho {
        dataset: required(args.dataset, cfg.dataset.map(PathBuf::from), "dataset")?
            .display()
            .to_string(),
        train_count: required(args.train_count, cfg.train_count, "train-count")?,
        split_seed: args.split_seed.or(cfg.split_seed).unwrap_or(0),
        rhos: args
            .rhos
            .or(cfg.rhos)
            .unwrap_or_else(|| vec![0.05, 0.1, 0.2, 0.4]),
        m: required(args.m, cfg.m, "m")?,
        trials: args.trials.or(cfg.trials).unwrap_or(5),
        mu: args.mu.or(cfg.mu).unwrap_or(0.1),
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        normalizer: parse_normalizer(args.normalizer.as_deref(), cfg.normalizer)?,
        out_json: required(args.out_json, cfg.out_json.map(PathBuf::from), "out-json")?
            .display()
            .to_string(),
        out_table: args.out_table.map(|p| p.display().to_string()).or(cfg.out_table),
    };
    for &rho in &resolved.rhos {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(CmdError::usage(format!("rho must be positive, got {rho}")));
        }
    }

    let ds = usage(data::load_csv(Path::new(&resolved.dataset)), "loading dataset")?;
    let ds = usage(data::split(&ds, resolved.train_count, resolved.split_seed), "splitting dataset")?;
    let x_train = usage(ds.train_matrix(), "train split")?;

    #[derive(Serialize)]
    struct RhoRow {
        rho: f64,
        nnz_off_diagonal: usize,
        columns_optimal: usize,
        lambda_min_before_repair: f64,
        mse_magnitude: f64,
        mse_phase: f64,
    }
    let mut rows = Vec::new();
    let mut table = format!(
        "{:>8}  {:>8} {:>8} {:>14} {:>12} {:>12}\n",
        "rho", "nnz", "optimal", "lambda_min", "mag MSE", "phase MSE"
    );
    for &rho in &resolved.rhos {
        let settings = LearnSettings {
            clime: ClimeConfig {
                rho,
                ..ClimeConfig::default()
            },
            normalizer: resolved.normalizer,
            solver: SolverSettings::default(),
            pd_floor: None,
        };
        let outcome = runtime(learn_laplacian(&x_train, &settings), "learning")?;
        let spec = SweepSpec {
            sample_counts: vec![resolved.m],
            trials: resolved.trials,
            seed: resolved.seed,
            mu: resolved.mu,
            rho,
            decompose: true,
        };
        let report = runtime(run_sweep_with_options(&ds, &outcome.laplacian, &spec, false), "sweep")?;
        let row = &report.rows[0];
        let mag = row.mse_magnitude.expect("decomposed sweep").mean;
        let phase = row.mse_phase.expect("decomposed sweep").mean;
        let optimal = outcome
            .precision
            .per_column_status()
            .iter()
            .filter(|s| **s == LpStatus::Optimal)
            .count();
        table.push_str(&format!(
            "{rho:>8.4}  {:>8} {:>8} {:>14.6e} {mag:>12.6e} {phase:>12.6e}\n",
            outcome.laplacian.nnz_off_diagonal(),
            optimal,
            outcome.lambda_min_before_repair
        ));
        rows.push(RhoRow {
            rho,
            nnz_off_diagonal: outcome.laplacian.nnz_off_diagonal(),
            columns_optimal: optimal,
            lambda_min_before_repair: outcome.lambda_min_before_repair,
            mse_magnitude: mag,
            mse_phase: phase,
        });
    }

    let doc = serde_json::json!({
        "config": serde_json::to_value(&resolved).expect("config serializes"),
        "rows": rows,
    });
    write_file(
        Path::new(&resolved.out_json),
        &format!("{}\n", serde_json::to_string_pretty(&doc).expect("sweep document serializes")),
    )?;
    if let Some(path) = &resolved.out_table {
        write_file(Path::new(path), &table)?;
    }
    log::info!("rho sweep -> {}", resolved.out_json);
    Ok(())
}

#[derive(Serialize)]
struct ResolvedSweepMu {
    dataset: String,
    train_count: usize,
    split_seed: u64,
    rho: f64,
    mus: Vec<f64>,
    m: usize,
    trials: usize,
    seed: u64,
    normalizer: Normalizer,
    out_json: String,
    out_table: Option<String>,
}

fn cmd_sweep_mu(args: SweepMuArgs, cfg: SweepMuSection) -> CmdResult<()> {
    let resolved = ResolvedSweepMu {
        dataset: required(args.dataset, cfg.dataset.map(PathBuf::from), "dataset")?
            .display()
            .to_string(),
        train_count: required(args.train_count, cfg.train_count, "train-count")?,
        split_seed: args.split_seed.or(cfg.split_seed).unwrap_or(0),
        rho: args.rho.or(cfg.rho).unwrap_or(0.2),
        mus: args
            .mus
            .or(cfg.mus)
            .unwrap_or_else(|| vec![0.01, 0.05, 0.1, 0.5, 1.0]),
        m: required(args.m, cfg.m, "m")?,
        trials: args.trials.or(cfg.trials).unwrap_or(5),
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        normalizer: parse_normalizer(args.normalizer.as_deref(), cfg.normalizer)?,
        out_json: required(args.out_json, cfg.out_json.map(PathBuf::from), "out-json")?
            .display()
            .to_string(),
        out_table: args.out_table.map(|p| p.display().to_string()).or(cfg.out_table),
    };
    for &mu in &resolved.mus {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(CmdError::usage(format!("mu must be positive, got {mu}")));
        }
    }

    let ds = usage(data::load_csv(Path::new(&resolved.dataset)), "loading dataset")?;
    let ds = usage(data::split(&ds, resolved.train_count, resolved.split_seed), "splitting dataset")?;
    let x_train = usage(ds.train_matrix(), "train split")?;
    let settings = LearnSettings {
        clime: ClimeConfig {
            rho: resolved.rho,
            ..ClimeConfig::default()
        },
        normalizer: resolved.normalizer,
        solver: SolverSettings::default(),
        pd_floor: None,
    };
    let outcome = runtime(learn_laplacian(&x_train, &settings), "learning")?;

    #[derive(Serialize)]
    struct MuRow {
        mu: f64,
        mse_magnitude: f64,
        mse_phase: f64,
    }
    let mut rows = Vec::new();
    let mut table = format!("{:>10}  {:>12} {:>12}\n", "mu", "mag MSE", "phase MSE");
    for &mu in &resolved.mus {
        let spec = SweepSpec {
            sample_counts: vec![resolved.m],
            trials: resolved.trials,
            seed: resolved.seed,
            mu,
            rho: resolved.rho,
            decompose: true,
        };
        let report = runtime(run_sweep_with_options(&ds, &outcome.laplacian, &spec, false), "sweep")?;
        let row = &report.rows[0];
        let mag = row.mse_magnitude.expect("decomposed sweep").mean;
        let phase = row.mse_phase.expect("decomposed sweep").mean;
        table.push_str(&format!("{mu:>10.4}  {mag:>12.6e} {phase:>12.6e}\n"));
        rows.push(MuRow {
            mu,
            mse_magnitude: mag,
            mse_phase: phase,
        });
    }

    let doc = serde_json::json!({
        "config": serde_json::to_value(&resolved).expect("config serializes"),
        "rows": rows,
    });
    write_file(
        Path::new(&resolved.out_json),
        &format!("{}\n", serde_json::to_string_pretty(&doc).expect("sweep document serializes")),
    )?;
    if let Some(path) = &resolved.out_table {
        write_file(Path::new(path), &table)?;
    }
    log::info!("mu sweep -> {}", resolved.out_json);
    Ok(())
}

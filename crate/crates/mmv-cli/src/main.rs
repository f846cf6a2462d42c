//! Single-binary CLI for multichannel sparse recovery.
//!
//! Subcommands: `generate` (measurement matrices), `analyze` (condition
//! reports), `solve` (one recovery problem), `bound` (closed-form failure
//! bounds), `experiment` (phase-transition sweeps with CSV/SVG output), and
//! `plot` (re-render an existing sweep CSV).
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

mod plot;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use mmv::bounds;
use mmv::conditions;
use mmv::ensembles::{
    alltop_gabor, bernoulli_ensemble, dirac_fourier, gaussian_ensemble, spherical_ensemble,
};
use mmv::io as mio;
use mmv::montecarlo::{
    collect_trials, aggregate, AlgorithmKind, CoefficientSpec, EnsembleSpec, ExperimentConfig,
    MatrixMode, PhaseCurve,
};
use mmv::solvers::{l0_oracle, p_somp, p_thresholding, solve_l21, DEFAULT_ORACLE_BUDGET};
use mmv::{Error, Result, SolverOptions, Support};

#[derive(Parser)]
#[command(
    name = "mmv",
    version,
    about = "Multichannel sparse recovery: matrices, certificates, solvers, bounds, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a measurement matrix (CSV plus JSON metadata sidecar).
    Generate(GenerateArgs),
    /// Analyze a matrix (and optionally a support) into a condition report.
    Analyze(AnalyzeArgs),
    /// Run one recovery algorithm on a measurements file.
    Solve(SolveArgs),
    /// Evaluate a closed-form failure bound.
    Bound(BoundArgs),
    /// Run a phase-transition sweep; writes CSV, SVG charts, and a manifest.
    Experiment(ExperimentArgs),
    /// Render SVG charts from an existing sweep CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Family: spherical | gaussian | bernoulli | dirac-fourier | alltop
    #[arg(long)]
    ensemble: String,
    /// Measurement dimension (rows).
    #[arg(long)]
    n: usize,
    /// Columns; required for the random families, implied for the others.
    #[arg(long = "N")]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; defaults to a name derived from the parameters.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Matrix CSV (metadata sidecar is honored when present).
    #[arg(long)]
    matrix: PathBuf,
    /// Comma-separated support indices, e.g. 3,17,42.
    #[arg(long)]
    support: Option<String>,
    /// Also compute the exact restricted-isometry constant for this sparsity.
    #[arg(long)]
    rip_k: Option<usize>,
    /// Subset budget for the exact computation.
    #[arg(long, default_value_t = conditions::DEFAULT_RIP_BUDGET)]
    rip_budget: u128,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Measurements CSV: n rows, L channels.
    #[arg(long)]
    measurements: PathBuf,
    /// l21 | thresh | somp | l0
    #[arg(long)]
    algorithm: String,
    /// Sparsity (thresh/somp) or maximal sparsity (l0).
    #[arg(long)]
    k: Option<usize>,
    /// Correlation exponent for the greedy algorithms.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long, default_value_t = 1e-6)]
    support_tol: f64,
    #[arg(long, default_value_t = 1.0)]
    penalty: f64,
    /// Subset budget for the exhaustive search.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    budget: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// t4 | t5 | t7 | t8 | t9 | t10 | bernstein
    #[arg(long)]
    theorem: String,
    #[arg(long = "N")]
    cols: Option<usize>,
    #[arg(long = "L")]
    channels: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    opnorm_sq: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    /// Use the complex coefficient model.
    #[arg(long)]
    complex: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// fig1 | fig2 | fig3 (the three reference sweeps).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON experiment configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Comma-separated sparsity grid, e.g. 1,2,4,8.
    #[arg(long)]
    k_grid: Option<String>,
    /// Comma-separated channel grid, e.g. 1,2,4.
    #[arg(long)]
    l_grid: Option<String>,
    /// Comma-separated algorithms, e.g. l21,somp.
    #[arg(long)]
    algorithms: Option<String>,
    /// Draw one matrix for the whole sweep instead of one per trial.
    #[arg(long)]
    fixed_matrix: bool,
    /// Output prefix; writes <prefix>.csv, <prefix>_<algo>.svg,
    /// <prefix>_manifest.json.
    #[arg(long, default_value = "experiment")]
    out_prefix: PathBuf,
    /// Also write every trial record to this JSON-lines file.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep CSV produced by `experiment`.
    #[arg(long)]
    curve: PathBuf,
    #[arg(long, default_value = "curve")]
    out_prefix: PathBuf,
}

/// Provenance record written next to experiment outputs.
#[derive(Serialize, Deserialize)]
struct RunManifest {
    command: String,
    config_digest: String,
    base_seed: u64,
    artifact_version: String,
    outputs: Vec<String>,
}

fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    format!("{hash:016x}")
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>> {
    let items: std::result::Result<Vec<usize>, _> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>())
        .collect();
    let items = items.map_err(|e| Error::Config(format!("bad {what} list '{text}': {e}")))?;
    if items.is_empty() {
        return Err(Error::Config(format!("{what} list is empty")));
    }
    Ok(items)
}

fn require<T: Copy>(value: Option<T>, name: &str, theorem: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("--{name} is required for theorem {theorem}")))
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let matrix = match args.ensemble.as_str() {
        "spherical" | "gaussian" | "bernoulli" => {
            let cols = args.cols.ok_or_else(|| {
                Error::Config(format!("--N is required for the {} ensemble", args.ensemble))
            })?;
            match args.ensemble.as_str() {
                "spherical" => spherical_ensemble(args.n, cols, args.seed)?,
                "gaussian" => gaussian_ensemble(args.n, cols, args.seed)?,
                _ => bernoulli_ensemble(args.n, cols, args.seed)?,
            }
        }
        "dirac-fourier" => dirac_fourier(args.n)?,
        "alltop" => alltop_gabor(args.n)?,
        other => return Err(Error::Config(format!("unknown ensemble '{other}'"))),
    };

    let out = args.out.unwrap_or_else(|| {
        let mut name = format!("{}-n{}", args.ensemble, args.n);
        if let Some(cols) = args.cols {
            name.push_str(&format!("-N{cols}"));
        }
        if matrix.seed().is_some() {
            name.push_str(&format!("-seed{}", args.seed));
        }
        PathBuf::from(format!("{name}.csv"))
    });
    mio::write_matrix_csv(&out, &matrix)?;
    let meta = mio::MatrixMetadata {
        ensemble: matrix.tag().to_string(),
        n: matrix.n_rows(),
        cols: matrix.n_cols(),
        seed: matrix.seed(),
    };
    let meta_path = mio::metadata_path(&out);
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    eprintln!(
        "wrote {} ({}x{}) and {}",
        out.display(),
        matrix.n_rows(),
        matrix.n_cols(),
        meta_path.display()
    );
    Ok(())
}

fn parse_support(text: &str) -> Result<Support> {
    Support::new(parse_usize_list(text, "support")?)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let matrix = mio::read_matrix_csv_with_meta(&args.matrix)?;
    let support = args.support.as_deref().map(parse_support).transpose()?;
    let report = conditions::analyze(&matrix, support.as_ref())?;
    let mut json = serde_json::to_value(&report)?;
    if let Some(k) = args.rip_k {
        let rip = conditions::rip_constant_exact(&matrix, k, args.rip_budget)?;
        json["rip_exact"] = serde_json::json!({ "k": k, "delta": rip });
    }
    write_or_print(&args.out, &serde_json::to_string_pretty(&json)?)
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let matrix = mio::read_matrix_csv_with_meta(&args.matrix)?;
    let y = mio::read_complex_csv(&args.measurements)?;
    let opts = SolverOptions {
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        support_tol: args.support_tol,
        penalty: args.penalty,
    };
    let (result, unique) = match args.algorithm.as_str() {
        "l21" => (solve_l21(&matrix, y.view(), &opts)?, None),
        "thresh" | "thresholding" => {
            let k = require(args.k, "k", "thresh")?;
            (p_thresholding(&matrix, y.view(), k, args.p)?, None)
        }
        "somp" => {
            let k = require(args.k, "k", "somp")?;
            (p_somp(&matrix, y.view(), k, args.p)?, None)
        }
        "l0" => {
            let k = require(args.k, "k", "l0")?;
            let outcome = l0_oracle(&matrix, y.view(), k, args.budget)?;
            (outcome.recovery, Some(outcome.unique))
        }
        other => return Err(Error::Config(format!("unknown algorithm '{other}'"))),
    };

    let mut json = serde_json::json!({
        "algorithm": args.algorithm,
        "iterations": result.iterations,
        "converged": result.converged,
        "residual": result.residual,
        "objective": result.objective,
        "support": result.recovered_support.indices(),
        "estimate": mio::SignalJson::from_signal(&result.estimate),
    });
    if let Some(unique) = unique {
        json["unique"] = serde_json::Value::Bool(unique);
    }
    write_or_print(&args.out, &serde_json::to_string_pretty(&json)?)
}

fn cmd_bound(args: BoundArgs) -> Result<()> {
    let t = args.theorem.as_str();
    let report = match t {
        "t4" => bounds::l21_failure_bound(
            require(args.cols, "N", t)?,
            require(args.channels, "L", t)?,
            require(args.alpha, "alpha", t)?,
            args.complex,
        )?,
        "t5" => {
            let k = require(args.k, "k", t)?;
            let l = require(args.channels, "L", t)?;
            let (gamma, success) = bounds::recovery_norm_threshold(k, l)?;
            let mut parameters = std::collections::BTreeMap::new();
            parameters.insert("k".to_string(), k as f64);
            parameters.insert("L".to_string(), l as f64);
            parameters.insert("gamma".to_string(), gamma);
            parameters.insert("success_probability".to_string(), success);
            bounds::BoundReport {
                name: "recovery_norm_threshold".into(),
                condition_holds: true,
                condition_margin: gamma,
                failure_probability: 1.0 - success,
                parameters,
            }
        }
        "t7" => bounds::random_support_norm_bound(
            require(args.k, "k", t)?,
            require(args.cols, "N", t)?,
            require(args.mu, "mu", t)?,
            require(args.opnorm_sq, "opnorm-sq", t)?,
            require(args.delta, "delta", t)?,
            require(args.eps, "eps", t)?,
        )?,
        "t8" => {
            let k = require(args.k, "k", t)?;
            let eps = require(args.eps, "eps", t)?;
            let holds = bounds::random_support_gram_condition(
                k,
                require(args.cols, "N", t)?,
                require(args.mu, "mu", t)?,
                require(args.opnorm_sq, "opnorm-sq", t)?,
                require(args.delta, "delta", t)?,
                eps,
            );
            let mut parameters = std::collections::BTreeMap::new();
            parameters.insert("k".to_string(), k as f64);
            parameters.insert("eps".to_string(), eps);
            bounds::BoundReport {
                name: "random_support_gram".into(),
                condition_holds: holds,
                condition_margin: 0.0,
                failure_probability: if holds { eps } else { 1.0 },
                parameters,
            }
        }
        "t9" => bounds::thresholding_failure_bound(
            require(args.cols, "N", t)?,
            require(args.channels, "L", t)?,
            require(args.theta, "theta", t)?,
            args.complex,
        )?,
        "t10" => bounds::somp_failure_bound(
            require(args.cols, "N", t)?,
            require(args.k, "k", t)?,
            require(args.channels, "L", t)?,
            require(args.eps, "eps", t)?,
            args.complex,
        )?,
        "bernstein" => {
            let u = require(args.u, "u", t)?;
            let l = require(args.channels, "L", t)?;
            let tail = bounds::bernstein_tail(u, l, args.complex)?;
            let mut parameters = std::collections::BTreeMap::new();
            parameters.insert("u".to_string(), u);
            parameters.insert("L".to_string(), l as f64);
            parameters.insert("complex".to_string(), if args.complex { 1.0 } else { 0.0 });
            bounds::BoundReport {
                name: "bernstein_tail".into(),
                condition_holds: true,
                condition_margin: u - 1.0,
                failure_probability: tail,
                parameters,
            }
        }
        other => return Err(Error::Config(format!("unknown theorem '{other}'"))),
    };
    write_or_print(&args.out, &serde_json::to_string_pretty(&report)?)
}

/// The three reference sweeps. Presets redraw a random matrix per trial and
/// use solver settings sized for a sweep (success is decided at 1e-4).
fn preset(name: &str) -> Result<ExperimentConfig> {
    let solver = SolverOptions {
        max_iterations: 4000,
        tolerance: 1e-7,
        ..SolverOptions::default()
    };
    let all = vec![
        AlgorithmKind::L21,
        AlgorithmKind::Thresholding,
        AlgorithmKind::Somp,
    ];
    let config = match name {
        "fig1" => ExperimentConfig {
            ensemble: EnsembleSpec::Spherical { n: 32, cols: 256 },
            matrix_mode: MatrixMode::RedrawPerTrial,
            k_grid: vec![1, 2, 3, 4, 5, 6, 8, 10, 12, 14, 16],
            l_grid: vec![1, 2, 4],
            model: CoefficientSpec::model_one(),
            algorithms: all,
            trials: 100,
            base_seed: 2010,
            solver,
            success_relative_error: 1e-4,
        },
        "fig2" => ExperimentConfig {
            ensemble: EnsembleSpec::DiracFourier { n: 32 },
            matrix_mode: MatrixMode::Fixed,
            k_grid: vec![1, 2, 3, 4, 6, 8, 10, 12, 14, 16],
            l_grid: vec![1, 2, 4],
            model: CoefficientSpec::model_two(),
            algorithms: all,
            trials: 100,
            base_seed: 2010,
            solver,
            success_relative_error: 1e-4,
        },
        "fig3" => ExperimentConfig {
            ensemble: EnsembleSpec::AlltopGabor { n: 29 },
            matrix_mode: MatrixMode::Fixed,
            k_grid: vec![1, 2, 3, 4, 5, 6, 8],
            l_grid: vec![1, 2, 4],
            model: CoefficientSpec::model_two(),
            algorithms: vec![AlgorithmKind::L21, AlgorithmKind::Somp],
            trials: 100,
            base_seed: 2010,
            solver,
            success_relative_error: 1e-4,
        },
        other => return Err(Error::Config(format!("unknown preset '{other}'"))),
    };
    Ok(config)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let mut config = if let Some(path) = &args.config {
        serde_json::from_str(&std::fs::read_to_string(path)?)?
    } else {
        preset(args.preset.as_deref().unwrap_or("fig1"))?
    };
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.base_seed {
        config.base_seed = seed;
    }
    if let Some(text) = &args.k_grid {
        config.k_grid = parse_usize_list(text, "k")?;
    }
    if let Some(text) = &args.l_grid {
        config.l_grid = parse_usize_list(text, "L")?;
    }
    if let Some(text) = &args.algorithms {
        let algorithms: Result<Vec<AlgorithmKind>> = text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| AlgorithmKind::parse(s.trim()))
            .collect();
        config.algorithms = algorithms?;
    }
    if args.fixed_matrix {
        config.matrix_mode = MatrixMode::Fixed;
    }
    config.validate()?;

    let records = collect_trials(&config)?;
    let curve = aggregate(&config, &records);

    let prefix = args.out_prefix.clone();
    if let Some(dir) = prefix.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut outputs = Vec::new();

    let csv_path = prefix.with_extension("csv");
    std::fs::write(&csv_path, curve.to_csv())?;
    outputs.push(csv_path.display().to_string());

    for &algorithm in &config.algorithms {
        let svg = plot::phase_curve_svg(&curve, algorithm);
        let svg_path = PathBuf::from(format!("{}_{}.svg", prefix.display(), algorithm));
        std::fs::write(&svg_path, svg)?;
        outputs.push(svg_path.display().to_string());
    }

    if let Some(path) = &args.records {
        let mut lines = String::new();
        for record in &records {
            lines.push_str(&serde_json::to_string(record)?);
            lines.push('\n');
        }
        std::fs::write(path, lines)?;
        outputs.push(path.display().to_string());
    }

    let manifest = RunManifest {
        command: std::env::args().collect::<Vec<_>>().join(" "),
        config_digest: fnv1a_hex(serde_json::to_string(&config)?.as_bytes()),
        base_seed: config.base_seed,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: outputs.clone(),
    };
    let manifest_path = PathBuf::from(format!("{}_manifest.json", prefix.display()));
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    for path in &outputs {
        eprintln!("wrote {path}");
    }
    eprintln!("wrote {}", manifest_path.display());
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let curve = PhaseCurve::from_csv(&std::fs::read_to_string(&args.curve)?)?;
    let mut algorithms: Vec<AlgorithmKind> = curve.points.iter().map(|p| p.algorithm).collect();
    algorithms.dedup();
    algorithms.sort_by_key(|a| a.label());
    algorithms.dedup();
    for algorithm in algorithms {
        let svg = plot::phase_curve_svg(&curve, algorithm);
        let path = PathBuf::from(format!("{}_{}.svg", args.out_prefix.display(), algorithm));
        if let Some(dir) = Path::new(&path).parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(&path, svg)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Config(_)
        | Error::InvalidDimension(_)
        | Error::DimensionMismatch(_)
        | Error::OutOfRange { .. }
        | Error::Parse(_)
        | Error::EmptySupport
        | Error::SupportOutOfRange { .. }
        | Error::SupportCoversAllColumns
        | Error::InvalidGaborOrder(_)
        | Error::Json(_) => 2,
        Error::RankDeficient { .. } | Error::BudgetExceeded { .. } | Error::Io(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}

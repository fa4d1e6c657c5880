//! The `hollowgram` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hollowgram_core::{
    hamming_risk, oracle_known_center, oracle_supervised, random_lloyd, sample_dataset_seeded,
    spectral_init, spectral_lloyd, CenterMode, Dataset, EstimateTrace, ProblemConfig, Rng,
};

use crate::config_file::{load_config, ConfigSpec};
use crate::csv_out::{write_curve_csv, write_diff_csv, write_grid_csv};
use crate::dataset_file::{read_dataset, write_dataset};
use crate::experiments::{
    diff_grids, resume_grid_with, run_curve, run_grid_with, GridResult, GridSpec, Method,
    RunOptions,
};
use crate::manifest::{build_manifest, timestamp_now, write_manifest};
use crate::presets::preset_by_name;
use crate::svg::{render_diff_svg, render_heatmap_svg};
use crate::HarnessError;

#[derive(Parser)]
#[command(
    name = "hollowgram",
    version,
    about = "Two-component Gaussian mixture label recovery: datasets, estimators, phase diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a dataset and write it to a binary file.
    Generate(GenerateArgs),
    /// Run one estimator on a dataset file and report its risk.
    Estimate(EstimateArgs),
    /// Run a phase-diagram grid; emits CSV, SVG heatmaps and a manifest.
    PhaseGrid(PhaseGridArgs),
    /// Difference map between two methods of finished grid runs.
    Compare(CompareArgs),
    /// Risk-versus-SNR sweep; emits CSV and a manifest.
    Curve(CurveArgs),
    /// Run the built-in property checks.
    Selftest,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Center draw: `fixed_norm` or `gaussian_prior`.
    #[arg(long, default_value = "fixed_norm")]
    mode: String,
    /// Prior scale when `--mode gaussian_prior`.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// One of: spectral_lloyd, spectral, random_lloyd, oracle_supervised,
    /// oracle_known_center.
    #[arg(long)]
    method: String,
    /// Seed of the estimator's own randomness (eigensolver start vector or
    /// random Lloyd start).
    #[arg(long, default_value_t = 0)]
    solver_seed: u64,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PhaseGridArgs {
    /// Named preset: `desk` or `paper` (the full-scale reproduction).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Plain-text config file (see docs for keys).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the preset/config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Resume from the checkpoint in the output directory.
    #[arg(long)]
    resume: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Output directory of a finished phase-grid run.
    #[arg(long)]
    grid: PathBuf,
    /// Second grid directory; defaults to `--grid` (within-run diff).
    #[arg(long)]
    grid_b: Option<PathBuf>,
    #[arg(long)]
    method_a: String,
    #[arg(long)]
    method_b: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CurveArgs {
    /// Config file with `kind=curve` (alternative to the flags below).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    p: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Comma-separated target SNR values, increasing.
    #[arg(long, required_unless_present = "config")]
    r: Option<String>,
    #[arg(long, default_value_t = 100)]
    reps: u32,
    /// Comma-separated method names.
    #[arg(long, default_value = "spectral_lloyd,spectral")]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Parses and runs `argv`; never panics on user input.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Estimate(args) => run_estimate(args),
        Command::PhaseGrid(args) => run_phase_grid(args),
        Command::Compare(args) => run_compare(args),
        Command::Curve(args) => run_curve_cmd(args),
        Command::Selftest => {
            return match crate::selftest::run_all(std::io::stdout()) {
                Ok(0) => 0,
                Ok(_) => 2,
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn parse_center_mode(mode: &str, alpha: f64) -> Result<CenterMode, HarnessError> {
    match mode {
        "fixed_norm" => Ok(CenterMode::FixedNorm),
        "gaussian_prior" => Ok(CenterMode::GaussianPrior { alpha }),
        other => Err(HarnessError::Other(format!(
            "unknown center mode {other:?} (expected fixed_norm or gaussian_prior)"
        ))),
    }
}

fn run_generate(args: GenerateArgs) -> Result<(), HarnessError> {
    let config = ProblemConfig::new(args.n, args.p, args.sigma, args.delta)?;
    let mode = parse_center_mode(&args.mode, args.alpha)?;
    let mut rng = Rng::new(args.seed);
    let ds = sample_dataset_seeded(&config, mode, &mut rng, args.seed)?;
    write_dataset(&ds, &args.out)?;
    println!(
        "wrote {} (n={}, p={}, sigma={}, delta={}, seed={})",
        args.out.display(),
        args.n,
        args.p,
        args.sigma,
        args.delta,
        args.seed
    );
    Ok(())
}

#[derive(Serialize)]
struct EstimateReport {
    method: String,
    n: usize,
    p: usize,
    sigma: f64,
    delta: f64,
    dataset_seed: u64,
    solver_seed: u64,
    hamming: usize,
    /// Misclassified fraction after the optimal global flip, in [0, 1/2].
    miscls_frac: f64,
    /// The same loss on the `r / n` scale used by risk displays, in [0, 2].
    risk_over_n: f64,
    exact: bool,
    correlation: f64,
    iterations_run: usize,
    converged_at: Option<usize>,
    eigen_gap_warning: bool,
}

fn estimate_with_method(
    ds: &Dataset,
    method: Method,
    solver_seed: u64,
) -> Result<EstimateTrace, HarnessError> {
    let mut rng = Rng::new(solver_seed);
    let trace = match method {
        Method::SpectralLloyd => spectral_lloyd(&ds.y, &mut rng)?,
        Method::Spectral => {
            let hg = hollowgram_core::hollow(hollowgram_core::gram(&ds.y)?);
            spectral_init(&hg, &mut rng)?
        }
        Method::RandomLloyd => random_lloyd(&ds.y, &mut rng)?,
        Method::OracleSupervised => EstimateTrace {
            labels: oracle_supervised(&ds.y, &ds.eta)?,
            iterations_run: 0,
            converged_at: None,
            eigen_gap_warning: false,
        },
        Method::OracleKnownCenter => EstimateTrace {
            labels: oracle_known_center(&ds.y, &ds.theta)?,
            iterations_run: 0,
            converged_at: None,
            eigen_gap_warning: false,
        },
    };
    Ok(trace)
}

fn run_estimate(args: EstimateArgs) -> Result<(), HarnessError> {
    let method = Method::from_name(&args.method)
        .ok_or_else(|| HarnessError::Other(format!("unknown method {:?}", args.method)))?;
    let ds = read_dataset(&args.dataset)?;
    let trace = estimate_with_method(&ds, method, args.solver_seed)?;
    let risk = hamming_risk(&trace.labels, &ds.eta)?;
    let report = EstimateReport {
        method: method.name().to_string(),
        n: ds.config.n,
        p: ds.config.p,
        sigma: ds.config.sigma,
        delta: ds.config.delta,
        dataset_seed: ds.seed,
        solver_seed: args.solver_seed,
        hamming: risk.hamming,
        miscls_frac: risk.normalized,
        risk_over_n: risk.hamming as f64 / ds.config.n as f64,
        exact: risk.exact,
        correlation: risk.correlation,
        iterations_run: trace.iterations_run,
        converged_at: trace.converged_at,
        eigen_gap_warning: trace.eigen_gap_warning,
    };
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report)
                .map_err(|e| HarnessError::Other(e.to_string()))?
        );
    } else {
        println!(
            "{}: hamming {} ({} of {} labels), exact {}, correlation {:.6}",
            report.method,
            report.hamming,
            report.hamming / 2,
            report.n,
            report.exact,
            report.correlation
        );
    }
    Ok(())
}

fn grid_spec_from_args(args: &PhaseGridArgs) -> Result<GridSpec, HarnessError> {
    let mut spec = match (&args.preset, &args.config) {
        (Some(name), None) => preset_by_name(name, 0).ok_or_else(|| {
            HarnessError::Other(format!("unknown preset {name:?} (expected desk or paper)"))
        })?,
        (None, Some(path)) => match load_config(path)? {
            ConfigSpec::Grid(spec) => spec,
            ConfigSpec::Curve(_) => {
                return Err(HarnessError::Other(
                    "config is a curve spec; use the curve subcommand".into(),
                ))
            }
        },
        _ => {
            return Err(HarnessError::Other(
                "phase-grid needs exactly one of --preset or --config".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    if args.preset.as_deref() == Some("paper") {
        eprintln!(
            "warning: the paper preset ({} cells x {} reps at n = {}) is a \
             multi-hour full-scale run; use --preset desk for a quick map",
            spec.cell_count(),
            spec.reps,
            spec.n
        );
    }
    Ok(spec)
}

fn grid_output_paths(out: &Path, spec: &GridSpec) -> (PathBuf, Vec<(Method, PathBuf)>, PathBuf) {
    let csv = out.join("grid.csv");
    let svgs = spec
        .methods
        .iter()
        .map(|&m| (m, out.join(format!("heatmap_{}.svg", m.name()))))
        .collect();
    let result_json = out.join("result.json");
    (csv, svgs, result_json)
}

fn run_phase_grid(args: PhaseGridArgs) -> Result<(), HarnessError> {
    let started = timestamp_now();
    std::fs::create_dir_all(&args.out).map_err(|e| HarnessError::io(&args.out, e))?;
    let checkpoint = args.out.join("checkpoint.jsonl");

    let (spec, result) = if args.resume {
        let opts = RunOptions {
            workers: args.workers,
            ..RunOptions::default()
        };
        let result = resume_grid_with(&checkpoint, &opts)?;
        (result.spec.clone(), result)
    } else {
        let spec = grid_spec_from_args(&args)?;
        let opts = RunOptions {
            workers: args.workers,
            checkpoint: Some(checkpoint.clone()),
            ..RunOptions::default()
        };
        let result = run_grid_with(&spec, &opts)?;
        (spec, result)
    };

    let (csv_path, svg_paths, result_path) = grid_output_paths(&args.out, &spec);
    write_grid_csv(&result, &csv_path)?;
    for (method, path) in &svg_paths {
        render_heatmap_svg(&result, *method, path, true)?;
    }
    let result_json =
        serde_json::to_string(&result).map_err(|e| HarnessError::Other(e.to_string()))?;
    std::fs::write(&result_path, result_json).map_err(|e| HarnessError::io(&result_path, e))?;

    let mut outputs = vec![csv_path.clone(), result_path];
    outputs.extend(svg_paths.iter().map(|(_, p)| p.clone()));
    let manifest = build_manifest(&spec.canonical_text(), spec.master_seed, started, &outputs)?;
    write_manifest(&manifest, &args.out.join("manifest.json"))?;
    println!(
        "phase grid done: {} cells x {} reps, outputs in {}",
        spec.cell_count(),
        spec.reps,
        args.out.display()
    );
    Ok(())
}

fn load_grid_result(dir: &Path) -> Result<GridResult, HarnessError> {
    let path = dir.join("result.json");
    let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Other(format!("{}: {e}", path.display())))
}

fn run_compare(args: CompareArgs) -> Result<(), HarnessError> {
    let started = timestamp_now();
    let method_a = Method::from_name(&args.method_a)
        .ok_or_else(|| HarnessError::Other(format!("unknown method {:?}", args.method_a)))?;
    let method_b = Method::from_name(&args.method_b)
        .ok_or_else(|| HarnessError::Other(format!("unknown method {:?}", args.method_b)))?;
    let result_a = load_grid_result(&args.grid)?;
    let result_b = match &args.grid_b {
        Some(dir) => load_grid_result(dir)?,
        None => result_a.clone(),
    };
    let diff = diff_grids(&result_a, method_a, &result_b, method_b)?;

    std::fs::create_dir_all(&args.out).map_err(|e| HarnessError::io(&args.out, e))?;
    let csv_path = args.out.join("diff.csv");
    let svg_path = args.out.join("diff.svg");
    write_diff_csv(&diff, &csv_path)?;
    render_diff_svg(&diff, &svg_path, true)?;
    let manifest = build_manifest(
        &result_a.spec.canonical_text(),
        result_a.spec.master_seed,
        started,
        &[csv_path, svg_path],
    )?;
    write_manifest(&manifest, &args.out.join("manifest.json"))?;
    println!(
        "compare done: {} - {} over {} cells",
        method_a.name(),
        method_b.name(),
        diff.values.len()
    );
    Ok(())
}

fn run_curve_cmd(args: CurveArgs) -> Result<(), HarnessError> {
    let started = timestamp_now();
    let spec = match &args.config {
        Some(path) => match load_config(path)? {
            ConfigSpec::Curve(spec) => spec,
            ConfigSpec::Grid(_) => {
                return Err(HarnessError::Other(
                    "config is a grid spec; use the phase-grid subcommand".into(),
                ))
            }
        },
        None => {
            let r_grid: Vec<f64> = args
                .r
                .as_deref()
                .unwrap()
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| HarnessError::Other(format!("bad r value {v:?}")))
                })
                .collect::<Result<_, _>>()?;
            let methods: Vec<Method> = args
                .methods
                .split(',')
                .map(|name| {
                    Method::from_name(name.trim())
                        .ok_or_else(|| HarnessError::Other(format!("unknown method {name:?}")))
                })
                .collect::<Result<_, _>>()?;
            crate::experiments::CurveSpec {
                n: args.n.unwrap(),
                p: args.p.unwrap(),
                sigma: args.sigma,
                r_grid,
                reps: args.reps,
                methods,
                master_seed: args.seed,
            }
        }
    };
    let result = run_curve(&spec, args.workers)?;
    std::fs::create_dir_all(&args.out).map_err(|e| HarnessError::io(&args.out, e))?;
    let csv_path = args.out.join("curve.csv");
    write_curve_csv(&result, &csv_path)?;
    let spec_text = serde_json::to_string(&spec).map_err(|e| HarnessError::Other(e.to_string()))?;
    let manifest = build_manifest(&spec_text, spec.master_seed, started, &[csv_path])?;
    write_manifest(&manifest, &args.out.join("manifest.json"))?;
    println!(
        "curve done: {} SNR points x {} reps, outputs in {}",
        spec.r_grid.len(),
        spec.reps,
        args.out.display()
    );
    Ok(())
}

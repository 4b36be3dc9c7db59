//! The `autotune` command line: argument parsing, command dispatch, run
//! manifests and exit codes.
//!
//! Results go to standard output as JSON, diagnostics to standard error,
//! and files are written only where `--out` or `--save-model` ask for them.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use autotune_core::dataset::{load_csv, make_synthetic, write_csv, ColumnRef, Dataset, SyntheticKind, Task};
use autotune_core::evaluation::{parse_fast, EvalScheme, SchemeVariant};
use autotune_core::learners::{Family, ModelParams};
use autotune_core::optimizers::{grid_search_with_cap, Objective, OptConfig, Sample};
use autotune_core::tuner::{
    benchmark, default_scheme, tune, BenchConfig, Optimizer, SpaceRegistry,
    TuneRequest,
};
use autotune_core::{evaluation::Evaluator, Error};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_RESOURCE_CAP: i32 = 5;

/// Saved-model files carry this version number.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// JSON keys whose values depend on wall-clock time. Two runs with the same
/// arguments and seeds agree on everything else.
pub const TIMING_FIELDS: &[&str] = &[
    "elapsed_seconds",
    "seconds",
    "mean_seconds",
    "scaled_time",
    "mean_scaled_time",
    "started_at",
    "finished_at",
];

/// Removes every [`TIMING_FIELDS`] key, at any depth.
pub fn strip_timing(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.retain(|k, _| !TIMING_FIELDS.contains(&k.as_str()));
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "autotune",
    version,
    about = "Hyperparameter tuning for SVM, gradient boosting and AdaBoost models"
)]
pub struct Cli {
    /// Worker threads for folds, grid cells and population members
    /// (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Search a model family's tuning space and refit the winner.
    Tune(TuneArgs),
    /// Cross-validate fixed parameters or a saved model's parameters.
    Verify(VerifyArgs),
    /// Evaluate a full parameter lattice and write one CSV row per cell.
    GridSurface(GridArgs),
    /// Repeat tuning runs and score them against a grid.
    Benchmark(BenchArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tune(_) => "tune",
            Command::Verify(_) => "verify",
            Command::GridSurface(_) => "grid-surface",
            Command::Benchmark(_) => "benchmark",
            Command::Synth(_) => "synth",
            Command::Replay(_) => "replay",
        }
    }

    fn seed_mut(&mut self) -> Option<&mut u64> {
        match self {
            Command::Tune(a) => Some(&mut a.seed.seed),
            Command::Verify(a) => Some(&mut a.seed.seed),
            Command::GridSurface(a) => Some(&mut a.seed.seed),
            Command::Benchmark(a) => Some(&mut a.seed.seed),
            Command::Synth(a) => Some(&mut a.seed.seed),
            Command::Replay(_) => None,
        }
    }
}

fn parse_task(s: &str) -> Result<Task, String> {
    Task::from_str(s).map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::from_str(s).map_err(|e| e.to_string())
}

fn parse_optimizer(s: &str) -> Result<Optimizer, String> {
    Optimizer::from_str(s).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<SyntheticKind, String> {
    SyntheticKind::from_str(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Response column, by header name or zero-based index.
    #[arg(long)]
    pub response: String,
    /// bin (binary classification) or reg (regression).
    #[arg(long, value_parser = parse_task)]
    pub task: Task,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeedArg {
    #[arg(long, env = "AUTOTUNE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchemeArgs {
    /// k-fold cross-validation.
    #[arg(long, conflicts_with_all = ["fast", "resub"])]
    pub cv: Option<usize>,
    /// Single holdout: `true` (half the rows), a training fraction, or a
    /// training row count.
    #[arg(long, conflicts_with = "resub")]
    pub fast: Option<String>,
    /// Score on the training rows.
    #[arg(long)]
    pub resub: bool,
}

impl SchemeArgs {
    fn resolve(&self, n_rows: usize, seed: u64) -> Result<EvalScheme, Error> {
        if let Some(k) = self.cv {
            return Ok(EvalScheme::cv(k, seed));
        }
        if let Some(v) = &self.fast {
            let variant = parse_fast(v)?;
            return Ok(EvalScheme { variant, seed });
        }
        if self.resub {
            return Ok(EvalScheme {
                variant: SchemeVariant::Resub,
                seed,
            });
        }
        Ok(default_scheme(n_rows, seed))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TuneArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// svm, gbm or ada.
    #[arg(long, value_parser = parse_family)]
    pub model: Family,
    /// hjn (Hooke-Jeeves) or ga (genetic algorithm).
    #[arg(long, value_parser = parse_optimizer, default_value = "hjn")]
    pub opt: Optimizer,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Objective evaluation budget.
    #[arg(long)]
    pub max_evals: Option<usize>,
    /// Write the refitted model as JSON.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Model saved by `tune --save-model`.
    #[arg(long, conflicts_with_all = ["model", "params"])]
    pub model_file: Option<PathBuf>,
    /// Family for `--params`.
    #[arg(long, value_parser = parse_family, requires = "params")]
    pub model: Option<Family>,
    /// Parameter values such as `cost=10,gamma=0.03125`.
    #[arg(long, requires = "model")]
    pub params: Option<String>,
    /// Number of folds.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_parser = parse_family)]
    pub model: Family,
    /// Points per dimension, such as `9,9`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub points: Vec<usize>,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Largest lattice allowed.
    #[arg(long, default_value_t = autotune_core::optimizers::DEFAULT_CELL_CAP)]
    pub cell_cap: usize,
    /// Cell CSV destination.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_parser = parse_family)]
    pub model: Family,
    /// Optimizers to compare, such as `hjn,ga`.
    #[arg(long, value_parser = parse_optimizer, value_delimiter = ',', default_value = "hjn")]
    pub opt: Vec<Optimizer>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Reference grid points per dimension.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid_points: Vec<usize>,
    /// Scheme used by the tuning runs; the grid always uses 10-fold CV.
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub max_evals: Option<usize>,
    #[arg(long, default_value_t = autotune_core::optimizers::DEFAULT_CELL_CAP)]
    pub cell_cap: usize,
    /// Per-repetition CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    /// two-gaussians or friedman1.
    #[arg(long, value_parser = parse_kind)]
    pub kind: SyntheticKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Everything needed to re-run a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments as given, program name first.
    pub argv: Vec<String>,
    /// Every option after defaults and environment fallbacks were applied.
    pub options: Value,
    pub seeds: Vec<u64>,
    pub jobs: Option<usize>,
    pub started_at: String,
    pub finished_at: String,
}

impl RunManifest {
    fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}

fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Io { .. } | Error::Data { .. } => EXIT_DATA,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::ResourceCap(_) => EXIT_RESOURCE_CAP,
        Error::Fit { .. } => EXIT_DATA,
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Error> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn load_data(args: &DataArgs, err: &mut dyn Write) -> Result<Dataset, Error> {
    let response = ColumnRef::from_str(&args.response).expect("infallible");
    let raw = load_csv(&args.data, &response, args.task)?;
    let (ds, _) = raw.encode()?;
    for w in &ds.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(ds)
}

fn dataset_json(ds: &Dataset) -> Value {
    json!({
        "name": ds.name,
        "rows": ds.n_rows(),
        "columns": ds.n_cols(),
        "task": ds.task(),
    })
}

fn opt_config(max_evals: Option<usize>) -> OptConfig {
    let mut cfg = OptConfig::default();
    if let Some(m) = max_evals {
        cfg.max_evaluations = m;
    }
    cfg
}

/// Files written by a command; each gets a manifest beside it.
type Outputs = Vec<PathBuf>;

fn cmd_tune(a: &TuneArgs, err: &mut dyn Write) -> Result<(Value, Outputs), Error> {
    let ds = load_data(&a.data, err)?;
    let seed = a.seed.seed;
    let req = TuneRequest {
        family: a.model,
        optimizer: a.opt,
        scheme: a.scheme.resolve(ds.n_rows(), seed)?,
        opt_config: opt_config(a.max_evals),
        seed,
    };
    let res = tune(&ds, &req)?;
    for w in &res.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let mut outputs = Vec::new();
    if let Some(path) = &a.save_model {
        let saved = json!({
            "format_version": MODEL_FORMAT_VERSION,
            "family": res.family,
            "task": res.task,
            "params": res.params,
            "best_params": res.best_params,
            "columns": ds.column_meta(),
            "model": res.model,
        });
        write_json(path, &saved)?;
        outputs.push(path.clone());
    }
    let out = json!({
        "command": "tune",
        "dataset": dataset_json(&ds),
        "family": res.family,
        "task": res.task,
        "optimizer": res.optimizer,
        "scheme": res.scheme_used,
        "seed": seed,
        "best_params": res.best_params,
        "params": res.params,
        "search_loss": res.search_loss,
        "search_ucl95": res.search_ucl95,
        "evaluations_used": res.evaluations_used,
        "elapsed_seconds": res.elapsed_seconds,
        "warnings": res.warnings,
    });
    Ok((out, outputs))
}

fn parse_params(family: Family, task: Task, text: &str) -> Result<ModelParams, Error> {
    let space = SpaceRegistry::space(family, task)?;
    let mut values: Vec<Option<f64>> = vec![None; space.len()];
    for pair in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("expected name=value, got '{pair}'"))
        })?;
        let idx = space
            .names()
            .iter()
            .position(|n| *n == key.trim())
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown parameter '{}' for {family} (expected {})",
                    key.trim(),
                    space.names().join(", ")
                ))
            })?;
        let v: f64 = value.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("'{}' is not a number", value.trim()))
        })?;
        values[idx] = Some(v);
    }
    let point: Vec<f64> = values
        .iter()
        .zip(space.names())
        .map(|(v, name)| {
            v.ok_or_else(|| Error::InvalidParameter(format!("missing parameter '{name}'")))
        })
        .collect::<Result<_, _>>()?;
    SpaceRegistry::params(family, task, &point)
}

fn read_saved_params(path: &Path, task: Task) -> Result<ModelParams, Error> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let saved: Value = serde_json::from_str(&text)
        .map_err(|e| Error::data(format!("{} is not JSON: {e}", path.display())))?;
    let version = saved.get("format_version").and_then(Value::as_u64);
    if version != Some(MODEL_FORMAT_VERSION as u64) {
        return Err(Error::data(format!(
            "{}: unsupported model format version {version:?}",
            path.display()
        )));
    }
    let saved_task: Task = serde_json::from_value(saved["task"].clone())
        .map_err(|e| Error::data(format!("{}: bad task: {e}", path.display())))?;
    if saved_task != task {
        return Err(Error::data(format!(
            "model was tuned for {saved_task}, data is {task}"
        )));
    }
    serde_json::from_value(saved["params"].clone())
        .map_err(|e| Error::data(format!("{}: bad params: {e}", path.display())))
}

fn cmd_verify(a: &VerifyArgs, err: &mut dyn Write) -> Result<(Value, Outputs), Error> {
    let ds = load_data(&a.data, err)?;
    let params = match (&a.model_file, a.model, &a.params) {
        (Some(path), _, _) => read_saved_params(path, ds.task())?,
        (None, Some(family), Some(text)) => parse_params(family, ds.task(), text)?,
        _ => {
            return Err(Error::InvalidParameter(
                "verify needs --model-file or --model with --params".into(),
            ))
        }
    };
    if a.k < 2 {
        return Err(Error::InvalidParameter(format!("--k must be at least 2, got {}", a.k)));
    }
    let cv = autotune_core::evaluation::evaluate(&ds, &params, EvalScheme::cv(a.k, a.seed.seed))?;
    Ok((
        json!({
            "command": "verify",
            "dataset": dataset_json(&ds),
            "params": params,
            "k": a.k,
            "seed": a.seed.seed,
            "cv": cv,
        }),
        Vec::new(),
    ))
}

struct CellObjective<'a> {
    evaluator: Evaluator<'a>,
    family: Family,
}

impl Objective for CellObjective<'_> {
    fn evaluate(&self, point: &[f64]) -> autotune_core::Result<Sample> {
        let task = self.evaluator.dataset().task();
        let params = SpaceRegistry::params(self.family, task, point)?;
        let r = self.evaluator.evaluate(&params)?;
        Ok(Sample {
            loss: r.mean_loss,
            ucl95: r.ucl95,
        })
    }
}

fn cmd_grid(a: &GridArgs, err: &mut dyn Write) -> Result<(Value, Outputs), Error> {
    let ds = load_data(&a.data, err)?;
    let space = SpaceRegistry::space(a.model, ds.task())?;
    let scheme = a.scheme.resolve(ds.n_rows(), a.seed.seed)?;
    let objective = CellObjective {
        evaluator: Evaluator::new(&ds, scheme)?,
        family: a.model,
    };
    let grid = grid_search_with_cap(&objective, &space, &a.points, a.cell_cap)?;
    let file = File::create(&a.out).map_err(io_err(&a.out))?;
    grid.write_csv(BufWriter::new(file))?;
    let best = grid.best_cell();
    Ok((
        json!({
            "command": "grid-surface",
            "dataset": dataset_json(&ds),
            "family": a.model,
            "scheme": scheme,
            "dimensions": grid.names,
            "points": a.points,
            "cells": grid.cells.len(),
            "best": {
                "index": grid.best,
                "point": best.point,
                "loss": best.loss,
                "ucl95": best.ucl95,
            },
            "worst_loss": grid.worst_loss(),
            "best_20_percent": grid.best_fraction(0.2),
            "best_20": grid.best_n(20),
            "out": a.out,
        }),
        vec![a.out.clone()],
    ))
}

fn cmd_benchmark(a: &BenchArgs, err: &mut dyn Write) -> Result<(Value, Outputs), Error> {
    let ds = load_data(&a.data, err)?;
    let seed = a.seed.seed;
    let scheme = a.scheme.resolve(ds.n_rows(), seed)?;
    let requests: Vec<TuneRequest> = a
        .opt
        .iter()
        .map(|&optimizer| TuneRequest {
            family: a.model,
            optimizer,
            scheme,
            opt_config: opt_config(a.max_evals),
            seed,
        })
        .collect();
    let mut cfg = BenchConfig::new(a.grid_points.clone(), seed);
    cfg.reps = a.reps;
    cfg.cell_cap = a.cell_cap;
    let report = benchmark(&ds, &requests, &cfg)?;
    for row in report.rows.iter().filter(|r| r.failed) {
        let _ = writeln!(
            err,
            "warning: {} repetition {} failed: {}",
            row.request,
            row.repetition,
            row.error.as_deref().unwrap_or("unknown error")
        );
    }
    let mut outputs = Vec::new();
    if let Some(path) = &a.out {
        let file = File::create(path).map_err(io_err(path))?;
        report.write_csv(BufWriter::new(file))?;
        outputs.push(path.clone());
    }
    let mut out = serde_json::to_value(&report).expect("report serializes");
    out["command"] = json!("benchmark");
    Ok((out, outputs))
}

fn cmd_synth(a: &SynthArgs) -> Result<(Value, Outputs), Error> {
    let ds = make_synthetic(a.kind, a.n, a.noise, a.seed.seed)?;
    let file = File::create(&a.out).map_err(io_err(&a.out))?;
    write_csv(&ds, BufWriter::new(file))?;
    Ok((
        json!({
            "command": "synth",
            "kind": a.kind.to_string(),
            "n": a.n,
            "noise": a.noise,
            "seed": a.seed.seed,
            "columns": ds.n_cols(),
            "task": ds.task(),
            "out": a.out,
        }),
        vec![a.out.clone()],
    ))
}

fn execute(cmd: &Command, err: &mut dyn Write) -> Result<(Value, Outputs), Error> {
    match cmd {
        Command::Tune(a) => cmd_tune(a, err),
        Command::Verify(a) => cmd_verify(a, err),
        Command::GridSurface(a) => cmd_grid(a, err),
        Command::Benchmark(a) => cmd_benchmark(a, err),
        Command::Synth(a) => cmd_synth(a),
        Command::Replay(_) => Err(Error::InvalidParameter(
            "a manifest cannot replay another replay".into(),
        )),
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// Runs the recorded command with the recorded seed, regardless of the
/// current environment.
fn load_replay(path: &Path) -> Result<(Cli, Vec<String>), Error> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| Error::data(format!("{} is not a run manifest: {e}", path.display())))?;
    let mut cli = Cli::try_parse_from(&manifest.argv).map_err(|e| {
        Error::data(format!("manifest arguments no longer parse: {e}"))
    })?;
    if let (Some(seed), Some(&recorded)) = (cli.command.seed_mut(), manifest.seeds.first()) {
        *seed = recorded;
    }
    if cli.jobs.is_none() {
        cli.jobs = manifest.jobs;
    }
    Ok((cli, manifest.argv))
}

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit code. JSON goes to `out`, diagnostics to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let (cli, argv) = match &cli.command {
        Command::Replay(r) => match load_replay(&r.manifest) {
            Ok(pair) => pair,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return exit_code(&e);
            }
        },
        _ => (cli, argv),
    };

    let started_at = now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return EXIT_USAGE;
        }
    };
    // Diagnostics are buffered so the writer need not cross threads.
    let mut diagnostics: Vec<u8> = Vec::new();
    let result = pool.install(|| execute(&cli.command, &mut diagnostics));
    let _ = err.write_all(&diagnostics);
    let (mut value, outputs) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };

    let manifest = RunManifest {
        tool: "autotune".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name().into(),
        argv,
        options: serde_json::to_value(&cli.command).expect("options serialize"),
        seeds: cli.command_seed().into_iter().collect(),
        jobs: cli.jobs,
        started_at,
        finished_at: now(),
    };
    for path in &outputs {
        if let Err(e) = write_json(&RunManifest::path_for(path), &manifest) {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    }
    value["manifest"] = serde_json::to_value(&manifest).expect("manifest serializes");
    let text = serde_json::to_string_pretty(&value).expect("output serializes");
    if writeln!(out, "{text}").is_err() {
        return EXIT_DATA;
    }
    EXIT_OK
}

impl Cli {
    fn command_seed(&self) -> Option<u64> {
        match &self.command {
            Command::Tune(a) => Some(a.seed.seed),
            Command::Verify(a) => Some(a.seed.seed),
            Command::GridSurface(a) => Some(a.seed.seed),
            Command::Benchmark(a) => Some(a.seed.seed),
            Command::Synth(a) => Some(a.seed.seed),
            Command::Replay(_) => None,
        }
    }
}

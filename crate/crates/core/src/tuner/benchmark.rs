//! Repeated tuning runs scored against an exhaustive grid.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{cv_verify, tune, SpaceRegistry, TuneRequest};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::{standardize_scores, EvalScheme, RawScore, ScoreRange};
use crate::learners::Family;
use crate::optimizers::{grid_search_with_cap, Objective, Sample, DEFAULT_CELL_CAP};

/// Label of the reference row holding the grid's best cell.
pub const GRID_BEST_LABEL: &str = "grid-best";

/// Added to a repetition's seed to draw its verification folds, so they
/// differ from the folds used during the search.
pub const VERIFY_SEED_OFFSET: u64 = 1_000_003;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub reps: usize,
    pub grid_points: Vec<usize>,
    /// Scheme used to score grid cells.
    pub grid_scheme: EvalScheme,
    pub verify_k: usize,
    pub cell_cap: usize,
}

impl BenchConfig {
    pub fn new(grid_points: Vec<usize>, seed: u64) -> Self {
        BenchConfig {
            reps: 10,
            grid_points,
            grid_scheme: EvalScheme::cv(10, seed),
            verify_k: 10,
            cell_cap: DEFAULT_CELL_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub request: String,
    pub repetition: usize,
    pub seed: u64,
    pub verified_loss: Option<f64>,
    pub search_loss: Option<f64>,
    pub evaluations_used: Option<usize>,
    pub seconds: Option<f64>,
    pub scaled_loss: f64,
    pub scaled_time: f64,
    pub failed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestSummary {
    pub request: String,
    pub mean_verified_loss: Option<f64>,
    pub mean_seconds: Option<f64>,
    pub mean_scaled_loss: f64,
    pub mean_scaled_time: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub names: Vec<String>,
    pub points_per_dim: Vec<usize>,
    pub cells: usize,
    pub best_point: Vec<f64>,
    pub best_loss: f64,
    pub worst_loss: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub family: Family,
    pub grid: GridSummary,
    /// The grid-best reference row first, then one row per request and
    /// repetition.
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<RequestSummary>,
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::data(format!("csv write failed: {e}"));
        w.write_record([
            "request",
            "repetition",
            "seed",
            "verified_loss",
            "search_loss",
            "evaluations_used",
            "seconds",
            "scaled_loss",
            "scaled_time",
            "failed",
        ])
        .map_err(csv_err)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.request.clone(),
                r.repetition.to_string(),
                r.seed.to_string(),
                opt(r.verified_loss),
                opt(r.search_loss),
                r.evaluations_used.map(|v| v.to_string()).unwrap_or_default(),
                opt(r.seconds),
                r.scaled_loss.to_string(),
                r.scaled_time.to_string(),
                r.failed.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| Error::data(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

struct GridObjective<'a> {
    evaluator: crate::evaluation::Evaluator<'a>,
    family: Family,
}

impl Objective for GridObjective<'_> {
    fn evaluate(&self, point: &[f64]) -> Result<Sample> {
        let params = SpaceRegistry::params(self.family, self.evaluator.dataset().task(), point)?;
        let r = self.evaluator.evaluate(&params)?;
        Ok(Sample {
            loss: r.mean_loss,
            ucl95: r.ucl95,
        })
    }
}

/// Runs the grid once as the reference, then every request `cfg.reps`
/// times with seeds `request.seed + rep`. Each winner is re-scored by
/// `cfg.verify_k`-fold cross-validation on fresh folds, and losses and times
/// are standardized against the grid's best and worst cells and the
/// fastest and slowest repetitions. A failing repetition is recorded with
/// the sentinel (1, 1) rather than aborting the benchmark.
pub fn benchmark(ds: &Dataset, requests: &[TuneRequest], cfg: &BenchConfig) -> Result<BenchReport> {
    let family = requests
        .first()
        .map(|r| r.family)
        .ok_or_else(|| Error::InvalidParameter("benchmark needs at least one request".into()))?;
    if requests.iter().any(|r| r.family != family) {
        return Err(Error::InvalidParameter(
            "all benchmark requests must tune the same model family".into(),
        ));
    }
    if cfg.reps == 0 {
        return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
    }
    let space = SpaceRegistry::space(family, ds.task())?;
    let objective = GridObjective {
        evaluator: crate::evaluation::Evaluator::new(ds, cfg.grid_scheme)?,
        family,
    };
    let started = std::time::Instant::now();
    let grid = grid_search_with_cap(&objective, &space, &cfg.grid_points, cfg.cell_cap)?;
    let grid_seconds = started.elapsed().as_secs_f64();
    let best = grid.best_cell();
    let summary = GridSummary {
        names: grid.names.clone(),
        points_per_dim: cfg.grid_points.clone(),
        cells: grid.cells.len(),
        best_point: best.point.clone(),
        best_loss: best.loss,
        worst_loss: grid.worst_loss(),
        seconds: grid_seconds,
    };

    struct Run {
        request: String,
        repetition: usize,
        seed: u64,
        outcome: std::result::Result<(f64, f64, usize, f64), String>,
    }
    let mut runs = Vec::new();
    for req in requests {
        for rep in 0..cfg.reps {
            let seed = req.seed.wrapping_add(rep as u64);
            let mut r = req.clone();
            r.seed = seed;
            r.scheme = r.scheme.with_seed(seed);
            let outcome = tune(ds, &r)
                .and_then(|res| {
                    let v = cv_verify(ds, &res, cfg.verify_k, seed.wrapping_add(VERIFY_SEED_OFFSET))?;
                    Ok((v.mean_loss, res.search_loss, res.evaluations_used, res.elapsed_seconds))
                })
                .map_err(|e| e.to_string());
            runs.push(Run {
                request: req.label(),
                repetition: rep,
                seed,
                outcome,
            });
        }
    }

    let times: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|o| o.3))
        .collect();
    let time_range = ScoreRange::new(
        times.iter().copied().fold(f64::INFINITY, f64::min),
        times.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let loss_range = ScoreRange::new(summary.best_loss, summary.worst_loss);

    let mut raw = vec![RawScore {
        label: GRID_BEST_LABEL.into(),
        loss: Some(summary.best_loss),
        seconds: Some(grid_seconds),
    }];
    raw.extend(runs.iter().map(|r| RawScore {
        label: r.request.clone(),
        loss: r.outcome.as_ref().ok().map(|o| o.0),
        seconds: r.outcome.as_ref().ok().map(|o| o.3),
    }));
    let scaled = standardize_scores(&raw, loss_range, time_range)?;

    let mut rows = vec![BenchRow {
        request: GRID_BEST_LABEL.into(),
        repetition: 0,
        seed: cfg.grid_scheme.seed,
        verified_loss: Some(summary.best_loss),
        search_loss: Some(summary.best_loss),
        evaluations_used: Some(summary.cells),
        seconds: Some(grid_seconds),
        scaled_loss: scaled[0].scaled_loss,
        scaled_time: scaled[0].scaled_time,
        failed: false,
        error: None,
    }];
    for (run, s) in runs.iter().zip(&scaled[1..]) {
        let ok = run.outcome.as_ref().ok();
        rows.push(BenchRow {
            request: run.request.clone(),
            repetition: run.repetition,
            seed: run.seed,
            verified_loss: ok.map(|o| o.0),
            search_loss: ok.map(|o| o.1),
            evaluations_used: ok.map(|o| o.2),
            seconds: ok.map(|o| o.3),
            scaled_loss: s.scaled_loss,
            scaled_time: s.scaled_time,
            failed: s.failed,
            error: run.outcome.as_ref().err().cloned(),
        });
    }

    let mut summaries = Vec::new();
    for req in requests {
        let label = req.label();
        if summaries.iter().any(|s: &RequestSummary| s.request == label) {
            continue;
        }
        let mine: Vec<&BenchRow> = rows[1..].iter().filter(|r| r.request == label).collect();
        let mean = |vals: Vec<f64>| -> Option<f64> {
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        };
        summaries.push(RequestSummary {
            request: label,
            mean_verified_loss: mean(mine.iter().filter_map(|r| r.verified_loss).collect()),
            mean_seconds: mean(mine.iter().filter_map(|r| r.seconds).collect()),
            mean_scaled_loss: mean(mine.iter().map(|r| r.scaled_loss).collect()).unwrap_or(1.0),
            mean_scaled_time: mean(mine.iter().map(|r| r.scaled_time).collect()).unwrap_or(1.0),
            failures: mine.iter().filter(|r| r.failed).count(),
        });
    }

    Ok(BenchReport {
        dataset: ds.name.clone(),
        family,
        grid: summary,
        rows,
        summaries,
    })
}

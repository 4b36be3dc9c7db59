//! Tuning a model family end to end: resolve its search space, minimize the
//! cross-validated loss, refit the winner on all rows.

mod benchmark;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::evaluation::{check_compatible, evaluate, CvResult, EvalScheme, Evaluator};
use crate::learners::{fit, AdaParams, Family, GbmParams, Model, ModelParams};
use crate::optimizers::{
    genetic_algorithm, hooke_jeeves, Dim, Objective, OptConfig, OptResult, Sample, SearchSpace,
};

pub use benchmark::{
    benchmark, BenchConfig, BenchReport, BenchRow, GridSummary, RequestSummary, GRID_BEST_LABEL,
    VERIFY_SEED_OFFSET,
};

/// Datasets with more rows than this default to 3-fold instead of 10-fold
/// cross-validation.
pub const LARGE_DATASET_ROWS: usize = 2000;

pub fn default_scheme(n_rows: usize, seed: u64) -> EvalScheme {
    let k = if n_rows <= LARGE_DATASET_ROWS { 10 } else { 3 };
    EvalScheme::cv(k, seed)
}

/// Search spaces and start points per (family, task).
pub struct SpaceRegistry;

impl SpaceRegistry {
    pub fn space(family: Family, task: Task) -> Result<SearchSpace> {
        let p2 = |e: i32| 2f64.powi(e);
        let dims = match (family, task) {
            (Family::Svm, Task::Classification) => vec![
                Dim::log2("cost", 1.0, 1024.0, 10.0),
                Dim::log2("gamma", p2(-10), p2(10), p2(-5)),
            ],
            (Family::Svm, Task::Regression) => vec![
                Dim::log2("cost", 1.0, 1024.0, 2.0),
                Dim::log2("gamma", p2(-10), p2(0), p2(-5)),
                Dim::linear("epsilon", 0.0, 0.5, 0.4),
            ],
            (Family::Gbm, Task::Classification) => vec![
                Dim::integer("trees", 50.0, 3000.0, 500.0),
                Dim::integer("depth", 1.0, 15.0, 5.0),
                Dim::linear("shrinkage", 0.001, 0.1, 0.1),
                Dim::integer("min_obs", 5.0, 12.0, 8.0),
            ],
            (Family::Gbm, Task::Regression) => vec![
                Dim::integer("trees", 50.0, 5000.0, 2000.0),
                Dim::integer("depth", 1.0, 15.0, 8.0),
                Dim::linear("shrinkage", 0.001, 0.1, 0.1),
                Dim::integer("min_obs", 5.0, 10.0, 5.0),
            ],
            (Family::Ada, Task::Classification) => vec![
                Dim::integer("trees", 50.0, 500.0, 300.0),
                Dim::integer("depth", 1.0, 10.0, 10.0),
                Dim::linear("shrinkage", 0.01, 0.5, 0.05),
            ],
            (Family::Ada, Task::Regression) => {
                return Err(Error::Infeasible(
                    "adaboost regression is not supported; adaboost is classification only".into(),
                ))
            }
        };
        SearchSpace::new(dims)
    }

    /// Model parameters for a natural-unit point of `space(family, task)`.
    pub fn params(family: Family, task: Task, point: &[f64]) -> Result<ModelParams> {
        let expected = Self::space(family, task)?.len();
        if point.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "{family} {task} expects {expected} parameters, got {}",
                point.len()
            )));
        }
        let count = |v: f64| v.round().max(0.0) as usize;
        Ok(match family {
            Family::Svm => ModelParams::Svm {
                cost: point[0],
                gamma: point[1],
                epsilon: (task == Task::Regression).then(|| point[2]),
            },
            Family::Gbm => ModelParams::Gbm(GbmParams {
                n_trees: count(point[0]),
                interaction_depth: count(point[1]),
                shrinkage: point[2],
                min_obs_node: count(point[3]),
            }),
            Family::Ada => ModelParams::Ada(AdaParams {
                n_trees: count(point[0]),
                depth: count(point[1]),
                shrinkage: point[2],
            }),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Optimizer {
    #[serde(rename = "hjn")]
    HookeJeeves,
    #[serde(rename = "ga")]
    Genetic,
}

impl Optimizer {
    pub fn name(self) -> &'static str {
        match self {
            Optimizer::HookeJeeves => "hjn",
            Optimizer::Genetic => "ga",
        }
    }

    pub fn run<O: Objective + ?Sized>(
        self,
        objective: &O,
        space: &SearchSpace,
        cfg: &OptConfig,
    ) -> Result<OptResult> {
        match self {
            Optimizer::HookeJeeves => hooke_jeeves(objective, space, cfg),
            Optimizer::Genetic => genetic_algorithm(objective, space, cfg),
        }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hjn" | "hj" | "hooke_jeeves" | "hooke-jeeves" => Ok(Optimizer::HookeJeeves),
            "ga" | "genetic" => Ok(Optimizer::Genetic),
            other => Err(Error::InvalidParameter(format!(
                "unknown optimizer '{other}' (expected hjn or ga)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneRequest {
    pub family: Family,
    pub optimizer: Optimizer,
    pub scheme: EvalScheme,
    pub opt_config: OptConfig,
    /// Drives the optimizer; the scheme carries its own partition seed.
    pub seed: u64,
}

impl TuneRequest {
    /// Request with default optimizer settings and the default scheme for
    /// `n_rows`, all seeded from `seed`.
    pub fn new(family: Family, optimizer: Optimizer, n_rows: usize, seed: u64) -> Self {
        TuneRequest {
            family,
            optimizer,
            scheme: default_scheme(n_rows, seed),
            opt_config: OptConfig::default(),
            seed,
        }
    }

    pub fn with_scheme(mut self, scheme: EvalScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Short label such as `hjn/cv=10`.
    pub fn label(&self) -> String {
        format!("{}/{}", self.optimizer, self.scheme)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub family: Family,
    pub task: Task,
    pub optimizer: Optimizer,
    /// Winning values keyed by dimension name, in search-space order.
    pub best_params: IndexMap<String, f64>,
    pub params: ModelParams,
    /// Objective value at the winning point.
    pub search_loss: f64,
    pub search_ucl95: f64,
    /// Refit on every row of the dataset.
    pub model: Model,
    pub evaluations_used: usize,
    pub elapsed_seconds: f64,
    pub scheme_used: EvalScheme,
    pub warnings: Vec<String>,
}

/// The cross-validated loss of a point in a family's search space.
struct TuningObjective<'a> {
    evaluator: Evaluator<'a>,
    family: Family,
    task: Task,
}

impl Objective for TuningObjective<'_> {
    fn evaluate(&self, point: &[f64]) -> Result<Sample> {
        let params = SpaceRegistry::params(self.family, self.task, point)?;
        let r = self.evaluator.evaluate(&params)?;
        Ok(Sample {
            loss: r.mean_loss,
            ucl95: r.ucl95,
        })
    }
}

pub fn tune(ds: &Dataset, req: &TuneRequest) -> Result<TuneResult> {
    let started = Instant::now();
    let task = ds.task();
    check_compatible(req.family, task)?;
    let space = SpaceRegistry::space(req.family, task)?;
    let objective = TuningObjective {
        evaluator: Evaluator::new(ds, req.scheme)?,
        family: req.family,
        task,
    };
    let cfg = req.opt_config.with_seed(req.seed);
    let found = req.optimizer.run(&objective, &space, &cfg)?;
    let params = SpaceRegistry::params(req.family, task, &found.best_point)?;
    let model = fit(ds, &params)?;
    let best_params = space
        .names()
        .into_iter()
        .map(String::from)
        .zip(found.best_point.iter().copied())
        .collect();
    let mut warnings = ds.warnings.clone();
    warnings.extend(objective.evaluator.warnings().iter().cloned());
    Ok(TuneResult {
        family: req.family,
        task,
        optimizer: req.optimizer,
        best_params,
        params,
        search_loss: found.best_loss,
        search_ucl95: found.best_ucl95,
        model,
        evaluations_used: found.evaluations_used,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        scheme_used: req.scheme,
        warnings,
    })
}

/// Fresh k-fold cross-validation of the winning parameters, with folds
/// drawn from `seed`.
pub fn cv_verify(ds: &Dataset, result: &TuneResult, k: usize, seed: u64) -> Result<CvResult> {
    evaluate(ds, &result.params, EvalScheme::cv(k, seed))
}

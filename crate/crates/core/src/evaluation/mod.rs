//! Scoring a parameter vector: loss metrics, evaluation schemes and the
//! cross-validated objective every optimizer minimizes.

mod standardize;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dataset::{holdout_indices, kfold, Dataset, HoldoutSize, Task};
use crate::error::{Error, Result};
use crate::learners::{fit, Family, ModelParams};

pub use standardize::{standardize_scores, RawScore, ScaledScore, ScoreRange};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidParameter(format!(
            "length mismatch: {a} predictions for {b} observations"
        )));
    }
    if a == 0 {
        return Err(Error::InvalidParameter("no observations to score".into()));
    }
    Ok(())
}

/// Fraction of positions where the labels differ.
pub fn misclassification_rate(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    check_lengths(predicted.len(), actual.len())?;
    let wrong = predicted.iter().zip(actual).filter(|(p, a)| p != a).count();
    Ok(wrong as f64 / actual.len() as f64)
}

pub fn mse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    check_lengths(predicted.len(), actual.len())?;
    Ok(predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).powi(2))
        .sum::<f64>()
        / actual.len() as f64)
}

/// Misclassification rate for classification, MSE for regression.
pub fn task_loss(task: Task, predicted: &[f64], actual: &[f64]) -> Result<f64> {
    match task {
        Task::Classification => misclassification_rate(predicted, actual),
        Task::Regression => mse(predicted, actual),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeVariant {
    /// Fit and score on all rows.
    Resub,
    /// k-fold cross-validation.
    Cv { k: usize },
    /// Train on a fraction of the rows, validate on the rest.
    FastFraction { p: f64 },
    /// Train on `n` rows, validate on the rest.
    FastN { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalScheme {
    #[serde(flatten)]
    pub variant: SchemeVariant,
    pub seed: u64,
}

impl EvalScheme {
    pub fn resub() -> Self {
        EvalScheme {
            variant: SchemeVariant::Resub,
            seed: 0,
        }
    }

    pub fn cv(k: usize, seed: u64) -> Self {
        EvalScheme {
            variant: SchemeVariant::Cv { k },
            seed,
        }
    }

    /// The `Fast = TRUE` setting: a stratified 50/50 holdout.
    pub fn fast(seed: u64) -> Self {
        Self::fast_fraction(0.5, seed)
    }

    pub fn fast_fraction(p: f64, seed: u64) -> Self {
        EvalScheme {
            variant: SchemeVariant::FastFraction { p },
            seed,
        }
    }

    pub fn fast_n(n: usize, seed: u64) -> Self {
        EvalScheme {
            variant: SchemeVariant::FastN { n },
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the scheme against a dataset size.
    pub fn validate(&self, n_rows: usize) -> Result<()> {
        match self.variant {
            SchemeVariant::Resub => Ok(()),
            SchemeVariant::Cv { k } if k < 2 => Err(Error::InvalidParameter(format!(
                "cross-validation needs k >= 2, got {k}"
            ))),
            SchemeVariant::Cv { k } if k > n_rows => Err(Error::Infeasible(format!(
                "{k}-fold cross-validation on {n_rows} rows"
            ))),
            SchemeVariant::Cv { .. } => Ok(()),
            SchemeVariant::FastFraction { p } if !(p > 0.0 && p < 1.0) => Err(
                Error::InvalidParameter(format!("fast fraction must lie in (0, 1), got {p}")),
            ),
            SchemeVariant::FastFraction { .. } => Ok(()),
            SchemeVariant::FastN { n } if n < 10 || n >= n_rows => Err(Error::Infeasible(
                format!("fast training size {n} must be >= 10 and < {n_rows} rows"),
            )),
            SchemeVariant::FastN { .. } => Ok(()),
        }
    }
}

impl fmt::Display for EvalScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            SchemeVariant::Resub => f.write_str("resub"),
            SchemeVariant::Cv { k } => write!(f, "cv={k}"),
            SchemeVariant::FastFraction { p } => write!(f, "fast={p}"),
            SchemeVariant::FastN { n } => write!(f, "fast={n}"),
        }
    }
}

impl FromStr for SchemeVariant {
    type Err = Error;

    /// Accepts `resub`, `cv=K`, `fast=true`, `fast=P` (0 < P < 1) and
    /// `fast=N` (integer N > 1).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidParameter(format!("unrecognized evaluation scheme '{s}'"));
        if s == "resub" {
            return Ok(SchemeVariant::Resub);
        }
        let (kind, value) = s.split_once('=').ok_or_else(bad)?;
        match kind {
            "cv" => Ok(SchemeVariant::Cv {
                k: value.parse().map_err(|_| bad())?,
            }),
            "fast" => parse_fast(value),
            _ => Err(bad()),
        }
    }
}

/// Interprets a `--fast` value: `true`, a fraction in (0,1), or a row count.
pub fn parse_fast(value: &str) -> Result<SchemeVariant> {
    let value = value.trim();
    if value.eq_ignore_ascii_case("true") {
        return Ok(SchemeVariant::FastFraction { p: 0.5 });
    }
    if let Ok(n) = value.parse::<usize>() {
        if n > 1 {
            return Ok(SchemeVariant::FastN { n });
        }
    }
    match value.parse::<f64>() {
        Ok(p) if p > 0.0 && p < 1.0 => Ok(SchemeVariant::FastFraction { p }),
        _ => Err(Error::InvalidParameter(format!(
            "--fast expects true, a fraction in (0,1) or a row count > 1; got '{value}'"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub mean_loss: f64,
    pub per_fold_losses: Vec<f64>,
    pub ucl95: f64,
    pub elapsed_seconds: f64,
    pub n_model_fits: usize,
}

/// One-sided 95% upper confidence limit of the mean fold loss:
/// `mean + t(0.975, k-1) * sd / sqrt(k)`. A single loss is its own limit.
pub fn ucl95(losses: &[f64]) -> f64 {
    let k = losses.len();
    let mean = losses.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return mean;
    }
    let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    if var == 0.0 {
        return mean;
    }
    let t = StudentsT::new(0.0, 1.0, (k - 1) as f64)
        .expect("k >= 2 gives positive degrees of freedom")
        .inverse_cdf(0.975);
    mean + t * var.sqrt() / (k as f64).sqrt()
}

struct Split {
    train: Dataset,
    valid_x: Array2<f64>,
    valid_y: Vec<f64>,
}

impl Split {
    fn new(ds: &Dataset, train: &[usize], valid: &[usize]) -> Result<Split> {
        Ok(Split {
            train: ds
                .subset(train)
                .map_err(|e| Error::Infeasible(format!("unusable training split: {e}")))?,
            valid_x: ds.features().select(Axis(0), valid),
            valid_y: valid.iter().map(|&i| ds.response()[i]).collect(),
        })
    }
}

/// A dataset bound to an evaluation scheme. Partitions are drawn once at
/// construction, so every parameter vector scored through the same
/// `Evaluator` sees identical folds.
pub struct Evaluator<'a> {
    ds: &'a Dataset,
    scheme: EvalScheme,
    splits: Vec<Split>,
    warnings: Vec<String>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ds: &'a Dataset, scheme: EvalScheme) -> Result<Self> {
        scheme.validate(ds.n_rows())?;
        let mut warnings = Vec::new();
        let splits = match scheme.variant {
            SchemeVariant::Resub => Vec::new(),
            SchemeVariant::Cv { k } => {
                let folds = kfold(ds, k, scheme.seed)?;
                warnings.extend(folds.warnings.iter().cloned());
                (0..k)
                    .map(|f| {
                        let (train, valid) = folds.split(f);
                        Split::new(ds, &train, &valid)
                    })
                    .collect::<Result<_>>()?
            }
            SchemeVariant::FastFraction { p } => {
                let (train, valid) = holdout_indices(ds, HoldoutSize::Fraction(p), scheme.seed)?;
                vec![Split::new(ds, &train, &valid)?]
            }
            SchemeVariant::FastN { n } => {
                let (train, valid) = holdout_indices(ds, HoldoutSize::Count(n), scheme.seed)?;
                vec![Split::new(ds, &train, &valid)?]
            }
        };
        Ok(Evaluator {
            ds,
            scheme,
            splits,
            warnings,
        })
    }

    pub fn scheme(&self) -> EvalScheme {
        self.scheme
    }

    pub fn dataset(&self) -> &Dataset {
        self.ds
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn evaluate(&self, params: &ModelParams) -> Result<CvResult> {
        check_compatible(params.family(), self.ds.task())?;
        let start = Instant::now();
        let task = self.ds.task();
        let per_fold_losses: Vec<f64> = if self.splits.is_empty() {
            let model = fit(self.ds, params)?;
            let pred = model.predict(self.ds.features())?;
            vec![task_loss(task, &pred, self.ds.response())?]
        } else {
            // Fold fits may run concurrently; collect keeps fold order.
            self.splits
                .par_iter()
                .map(|s| {
                    let model = fit(&s.train, params)?;
                    let pred = model.predict(s.valid_x.view())?;
                    task_loss(task, &pred, &s.valid_y)
                })
                .collect::<Result<_>>()?
        };
        let n_model_fits = per_fold_losses.len();
        let mean_loss = per_fold_losses.iter().sum::<f64>() / n_model_fits as f64;
        let ucl = ucl95(&per_fold_losses).max(mean_loss);
        Ok(CvResult {
            mean_loss,
            ucl95: ucl,
            per_fold_losses,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            n_model_fits,
        })
    }
}

pub fn check_compatible(family: Family, task: Task) -> Result<()> {
    if family == Family::Ada && task == Task::Regression {
        return Err(Error::Infeasible(
            "adaboost regression is not supported; adaboost is classification only".into(),
        ));
    }
    Ok(())
}

/// Scores one parameter vector under `scheme`.
pub fn evaluate(ds: &Dataset, params: &ModelParams, scheme: EvalScheme) -> Result<CvResult> {
    Evaluator::new(ds, scheme)?.evaluate(params)
}

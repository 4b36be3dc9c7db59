//! Tabular data: CSV ingestion, categorical encoding, scaling, splits and
//! synthetic generators.
//!
//! Loading produces a [`RawDataset`] whose columns keep their original
//! representation. [`RawDataset::encode`] turns it into the numeric
//! [`Dataset`] every learner consumes, together with an [`Encoder`] that
//! applies the same column layout to rows seen later.

mod csv_io;
mod split;
mod synthetic;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, write_csv, ColumnRef};
pub use split::{holdout_indices, holdout_split, kfold, FoldAssignment, HoldoutSize};
pub use synthetic::{make_synthetic, SyntheticKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

impl Task {
    pub fn short_name(self) -> &'static str {
        match self {
            Task::Classification => "bin",
            Task::Regression => "reg",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bin" | "binary" | "classification" | "class" => Ok(Task::Classification),
            "reg" | "regression" | "continuous" => Ok(Task::Regression),
            other => Err(Error::InvalidParameter(format!("unknown task '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Continuous,
}

/// Describes one column of an encoded feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    pub kind: ColumnKind,
    /// Name of the original CSV column this one was derived from.
    pub source: String,
}

/// A predictor column as it was read, before encoding.
#[derive(Debug, Clone, PartialEq)]
pub enum RawColumn {
    Continuous(Vec<f64>),
    Categorical(Vec<String>),
}

impl RawColumn {
    pub fn len(&self) -> usize {
        match self {
            RawColumn::Continuous(v) => v.len(),
            RawColumn::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            RawColumn::Continuous(_) => ColumnKind::Continuous,
            RawColumn::Categorical(_) => ColumnKind::Categorical,
        }
    }
}

/// Loaded but unencoded data.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub name: String,
    pub column_names: Vec<String>,
    pub columns: Vec<RawColumn>,
    pub response: Vec<f64>,
    pub task: Task,
    /// Original response values mapped to labels 0 and 1, classification only.
    pub class_labels: Option<[String; 2]>,
}

impl RawDataset {
    pub fn n_rows(&self) -> usize {
        self.response.len()
    }

    /// One-hot encodes categorical columns (first level dropped) and passes
    /// continuous columns through.
    pub fn encode(&self) -> Result<(Dataset, Encoder)> {
        let mut plan = Vec::with_capacity(self.columns.len());
        let mut warnings = Vec::new();
        for (name, column) in self.column_names.iter().zip(&self.columns) {
            match column {
                RawColumn::Continuous(_) => plan.push(EncodedColumn::Continuous {
                    source: name.clone(),
                }),
                RawColumn::Categorical(values) => {
                    let levels: Vec<String> = values
                        .iter()
                        .cloned()
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    if levels.len() < 2 {
                        warnings.push(format!(
                            "column '{name}' has a single level and was dropped"
                        ));
                        plan.push(EncodedColumn::Dropped {
                            source: name.clone(),
                        });
                    } else {
                        plan.push(EncodedColumn::Indicators {
                            source: name.clone(),
                            levels,
                        });
                    }
                }
            }
        }
        let encoder = Encoder { columns: plan };
        let features = encoder.transform(self)?;
        let mut ds = Dataset::new(
            self.name.clone(),
            features,
            self.response.clone(),
            self.task,
            encoder.column_meta(),
        )?;
        ds.warnings = warnings;
        Ok((ds, encoder))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EncodedColumn {
    Continuous { source: String },
    /// Indicator columns for `levels[1..]`; `levels[0]` is the reference level.
    Indicators { source: String, levels: Vec<String> },
    Dropped { source: String },
}

/// Column layout produced by [`RawDataset::encode`], reusable on new rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    pub columns: Vec<EncodedColumn>,
}

impl Encoder {
    pub fn width(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match c {
                EncodedColumn::Continuous { .. } => 1,
                EncodedColumn::Indicators { levels, .. } => levels.len() - 1,
                EncodedColumn::Dropped { .. } => 0,
            })
            .sum()
    }

    pub fn column_meta(&self) -> Vec<ColumnMeta> {
        let mut out = Vec::with_capacity(self.width());
        for column in &self.columns {
            match column {
                EncodedColumn::Continuous { source } => out.push(ColumnMeta {
                    name: source.clone(),
                    kind: ColumnKind::Continuous,
                    source: source.clone(),
                }),
                EncodedColumn::Indicators { source, levels } => {
                    for level in &levels[1..] {
                        out.push(ColumnMeta {
                            name: format!("{source}={level}"),
                            kind: ColumnKind::Categorical,
                            source: source.clone(),
                        });
                    }
                }
                EncodedColumn::Dropped { .. } => {}
            }
        }
        out
    }

    /// Encodes raw rows with this layout. Categorical levels not seen at
    /// encode time map to the all-zeros indicator block.
    pub fn transform(&self, raw: &RawDataset) -> Result<Array2<f64>> {
        if raw.columns.len() != self.columns.len() {
            return Err(Error::data(format!(
                "expected {} predictor columns, found {}",
                self.columns.len(),
                raw.columns.len()
            )));
        }
        let n = raw.n_rows();
        let mut out = Array2::zeros((n, self.width()));
        let mut j = 0;
        for (plan, column) in self.columns.iter().zip(&raw.columns) {
            match (plan, column) {
                (EncodedColumn::Continuous { .. }, RawColumn::Continuous(values)) => {
                    for (i, v) in values.iter().enumerate() {
                        out[[i, j]] = *v;
                    }
                    j += 1;
                }
                (EncodedColumn::Indicators { levels, .. }, RawColumn::Categorical(values)) => {
                    for (i, v) in values.iter().enumerate() {
                        if let Ok(pos) = levels.binary_search(v) {
                            if pos > 0 {
                                out[[i, j + pos - 1]] = 1.0;
                            }
                        }
                    }
                    j += levels.len() - 1;
                }
                (EncodedColumn::Dropped { .. }, _) => {}
                (plan, column) => {
                    return Err(Error::data(format!(
                        "column kind mismatch: encoder expects {plan:?}, data is {:?}",
                        column.kind()
                    )))
                }
            }
        }
        Ok(out)
    }
}

/// Numeric, encoded data ready for fitting. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    features: Array2<f64>,
    response: Vec<f64>,
    task: Task,
    column_meta: Vec<ColumnMeta>,
    /// Non-fatal notes collected while building the dataset.
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        response: Vec<f64>,
        task: Task,
        column_meta: Vec<ColumnMeta>,
    ) -> Result<Self> {
        let (rows, cols) = features.dim();
        if rows != response.len() {
            return Err(Error::data(format!(
                "feature matrix has {rows} rows but response has {}",
                response.len()
            )));
        }
        if rows < 2 {
            return Err(Error::data("a dataset needs at least 2 rows"));
        }
        if column_meta.len() != cols {
            return Err(Error::data(format!(
                "{} column descriptors for {cols} feature columns",
                column_meta.len()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("feature matrix contains non-finite values"));
        }
        match task {
            Task::Classification => {
                if response.iter().any(|&y| y != 0.0 && y != 1.0) {
                    return Err(Error::data("classification labels must be 0 or 1"));
                }
                let positives = response.iter().filter(|&&y| y == 1.0).count();
                if positives == 0 || positives == rows {
                    return Err(Error::data("classification response has a single class"));
                }
            }
            Task::Regression => {
                if response.iter().any(|y| !y.is_finite()) {
                    return Err(Error::data("response contains non-finite values"));
                }
            }
        }
        Ok(Dataset {
            name: name.into(),
            features,
            response,
            task,
            column_meta,
            warnings: Vec::new(),
        })
    }

    /// All-continuous dataset with generated column names `x1, x2, ...`.
    pub fn from_matrix(
        name: impl Into<String>,
        features: Array2<f64>,
        response: Vec<f64>,
        task: Task,
    ) -> Result<Self> {
        let meta = (1..=features.ncols())
            .map(|j| ColumnMeta {
                name: format!("x{j}"),
                kind: ColumnKind::Continuous,
                source: format!("x{j}"),
            })
            .collect();
        Dataset::new(name, features, response, task, meta)
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn column_meta(&self) -> &[ColumnMeta] {
        &self.column_meta
    }

    pub fn n_rows(&self) -> usize {
        self.response.len()
    }

    pub fn n_cols(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_positive(&self) -> usize {
        self.response.iter().filter(|&&y| y == 1.0).count()
    }

    /// Rows selected by index, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        let features = self.features.select(Axis(0), rows);
        let response = rows.iter().map(|&i| self.response[i]).collect();
        let mut ds = Dataset::new(
            self.name.clone(),
            features,
            response,
            self.task,
            self.column_meta.clone(),
        )?;
        ds.warnings = self.warnings.clone();
        Ok(ds)
    }
}

/// Per-column centring and scaling learned from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl ScalingParams {
    /// Continuous columns get their mean and sample standard deviation.
    /// Indicator columns and zero-variance columns get (0, 1), which leaves
    /// them unchanged.
    pub fn fit(ds: &Dataset) -> ScalingParams {
        let x = ds.features();
        let n = x.nrows() as f64;
        let mut means = Vec::with_capacity(x.ncols());
        let mut sds = Vec::with_capacity(x.ncols());
        for (j, meta) in ds.column_meta().iter().enumerate() {
            let col = x.column(j);
            if meta.kind == ColumnKind::Categorical {
                means.push(0.0);
                sds.push(1.0);
                continue;
            }
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            if sd > 1e-12 * (1.0 + mean.abs()) {
                means.push(mean);
                sds.push(sd);
            } else {
                means.push(0.0);
                sds.push(1.0);
            }
        }
        ScalingParams { means, sds }
    }

    pub fn identity(width: usize) -> ScalingParams {
        ScalingParams {
            means: vec![0.0; width],
            sds: vec![1.0; width],
        }
    }

    pub fn width(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, rows: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if rows.ncols() != self.width() {
            return Err(Error::InvalidParameter(format!(
                "row width {} does not match scaling width {}",
                rows.ncols(),
                self.width()
            )));
        }
        let mut out = rows.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.means[j], self.sds[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
        Ok(out)
    }
}

/// Standardizes continuous columns to mean 0 and sample sd 1.
pub fn standardize(ds: &Dataset) -> Result<(Dataset, ScalingParams)> {
    let params = ScalingParams::fit(ds);
    let features = params.apply(ds.features())?;
    let mut out = Dataset::new(
        ds.name.clone(),
        features,
        ds.response.clone(),
        ds.task,
        ds.column_meta.clone(),
    )?;
    out.warnings = ds.warnings.clone();
    Ok((out, params))
}

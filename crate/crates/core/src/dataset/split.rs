use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub fold_of_row: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FoldAssignment {
    /// `(training rows, validation rows)` for fold `fold`, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::with_capacity(self.fold_of_row.len());
        let mut valid = Vec::new();
        for (row, &f) in self.fold_of_row.iter().enumerate() {
            if f == fold {
                valid.push(row);
            } else {
                train.push(row);
            }
        }
        (train, valid)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of_row {
            sizes[f] += 1;
        }
        sizes
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn class_indices(ds: &Dataset) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (i, &y) in ds.response().iter().enumerate() {
        out[(y == 1.0) as usize].push(i);
    }
    out
}

/// Deterministic k-fold assignment.
///
/// Classification rows are shuffled within each class and dealt to folds
/// round-robin, continuing the fold counter from one class to the next, so
/// fold sizes differ by at most one and every fold is non-empty. When a class
/// has fewer than `k` members the assignment is kept and a warning recorded.
/// Regression rows are shuffled and dealt the same way.
pub fn kfold(ds: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    let n = ds.n_rows();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::Infeasible(format!(
            "k = {k} exceeds the {n} available rows"
        )));
    }
    let mut rng = rng_for(seed);
    let mut fold_of_row = vec![0; n];
    let mut warnings = Vec::new();
    let groups: Vec<Vec<usize>> = match ds.task() {
        Task::Classification => {
            let classes = class_indices(ds);
            for (label, members) in classes.iter().enumerate() {
                if members.len() < k {
                    warnings.push(format!(
                        "class {label} has {} rows, fewer than k = {k}; some folds lack it",
                        members.len()
                    ));
                }
            }
            classes.into_iter().collect()
        }
        Task::Regression => vec![(0..n).collect()],
    };
    let mut next = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for row in group {
            fold_of_row[row] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment {
        fold_of_row,
        k,
        seed,
        warnings,
    })
}

/// How much of the data goes to the training side of a holdout split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoldoutSize {
    Fraction(f64),
    Count(usize),
}

/// Row indices of a (stratified, for classification) holdout split.
pub fn holdout_indices(
    ds: &Dataset,
    size: HoldoutSize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = ds.n_rows();
    let n_train = match size {
        HoldoutSize::Fraction(p) => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "training fraction must lie in (0, 1), got {p}"
                )));
            }
            (p * n as f64).round() as usize
        }
        HoldoutSize::Count(m) => {
            if m >= n {
                return Err(Error::Infeasible(format!(
                    "training size {m} must be smaller than the {n} available rows"
                )));
            }
            m
        }
    };
    if n_train == 0 || n_train >= n {
        return Err(Error::Infeasible(format!(
            "holdout of {size:?} on {n} rows leaves one side empty"
        )));
    }
    if n_train < 10 {
        return Err(Error::Infeasible(format!(
            "holdout training side has {n_train} rows; at least 10 are required"
        )));
    }

    let mut rng = rng_for(seed);
    let mut train = Vec::with_capacity(n_train);
    let mut valid = Vec::with_capacity(n - n_train);
    match ds.task() {
        Task::Classification => {
            let [mut neg, mut pos] = class_indices(ds);
            neg.shuffle(&mut rng);
            pos.shuffle(&mut rng);
            let mut take_pos =
                ((n_train as f64) * pos.len() as f64 / n as f64).round() as usize;
            take_pos = take_pos.clamp(1, pos.len());
            let mut take_neg = n_train - take_pos.min(n_train);
            if take_neg > neg.len() {
                take_pos += take_neg - neg.len();
                take_neg = neg.len();
            }
            if take_neg == 0 {
                take_neg = 1;
                take_pos -= 1;
            }
            if take_pos == 0 || take_neg == 0 || take_pos > pos.len() {
                return Err(Error::Infeasible(
                    "holdout training side cannot contain both classes".into(),
                ));
            }
            train.extend_from_slice(&pos[..take_pos]);
            train.extend_from_slice(&neg[..take_neg]);
            valid.extend_from_slice(&pos[take_pos..]);
            valid.extend_from_slice(&neg[take_neg..]);
        }
        Task::Regression => {
            let mut rows: Vec<usize> = (0..n).collect();
            rows.shuffle(&mut rng);
            train.extend_from_slice(&rows[..n_train]);
            valid.extend_from_slice(&rows[n_train..]);
        }
    }
    if valid.is_empty() {
        return Err(Error::Infeasible("holdout validation side is empty".into()));
    }
    train.sort_unstable();
    valid.sort_unstable();
    Ok((train, valid))
}

/// Splits into disjoint (training, validation) datasets.
pub fn holdout_split(ds: &Dataset, size: HoldoutSize, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, valid) = holdout_indices(ds, size, seed)?;
    Ok((ds.subset(&train)?, ds.subset(&valid)?))
}

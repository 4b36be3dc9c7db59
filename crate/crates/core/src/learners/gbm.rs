//! Gradient boosting with squared loss (regression) and logistic loss
//! (binary classification).

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::learners::tree::{check_width, grow_tree, Node, SortedColumns, Tree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub n_trees: usize,
    pub interaction_depth: usize,
    pub shrinkage: f64,
    pub min_obs_node: usize,
}

impl GbmParams {
    pub fn validate(&self) -> Result<()> {
        if self.interaction_depth == 0 {
            return Err(Error::InvalidParameter("interaction depth must be >= 1".into()));
        }
        if self.min_obs_node == 0 {
            return Err(Error::InvalidParameter(
                "minimum observations per node must be >= 1".into(),
            ));
        }
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "shrinkage must lie in (0, 1], got {}",
                self.shrinkage
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GbmLoss {
    Squared,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub init_value: f64,
    pub trees: Vec<Tree>,
    pub params: GbmParams,
    pub loss: GbmLoss,
    /// Training loss before the first stage and after each stage: mean
    /// squared error for squared loss, mean negative log-likelihood for
    /// logistic loss.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub train_loss: Vec<f64>,
    pub n_features: usize,
}

fn sigmoid(f: f64) -> f64 {
    1.0 / (1.0 + (-f).exp())
}

fn stage_loss(loss: GbmLoss, y: &[f64], f: &[f64]) -> f64 {
    let n = y.len() as f64;
    match loss {
        GbmLoss::Squared => y.iter().zip(f).map(|(y, f)| (y - f).powi(2)).sum::<f64>() / n,
        // log(1 + e^f) - y f, written to avoid overflow for large |f|
        GbmLoss::Logistic => {
            y.iter()
                .zip(f)
                .map(|(y, f)| f.max(0.0) + (-f.abs()).exp().ln_1p() - y * f)
                .sum::<f64>()
                / n
        }
    }
}

pub fn fit_gbm(ds: &Dataset, params: GbmParams) -> Result<GbmModel> {
    params.validate()?;
    let x = ds.features();
    let y = ds.response();
    let n = y.len();
    let loss = match ds.task() {
        Task::Regression => GbmLoss::Squared,
        Task::Classification => GbmLoss::Logistic,
    };

    let init_value = match loss {
        GbmLoss::Squared => y.iter().sum::<f64>() / n as f64,
        GbmLoss::Logistic => {
            let p = ds.n_positive() as f64 / n as f64;
            if p <= 0.0 || p >= 1.0 {
                return Err(Error::data("classification response has a single class"));
            }
            (p / (1.0 - p)).ln()
        }
    };

    let mut f = vec![init_value; n];
    let mut train_loss = Vec::with_capacity(params.n_trees + 1);
    train_loss.push(stage_loss(loss, y, &f));
    let mut trees = Vec::with_capacity(params.n_trees);
    if params.n_trees > 0 {
        let sorted = SortedColumns::new(x);
        let weights = vec![1.0; n];
        let tree_params = TreeParams {
            max_depth: params.interaction_depth,
            min_obs: params.min_obs_node,
        };
        let mut residual = vec![0.0; n];
        for _ in 0..params.n_trees {
            match loss {
                GbmLoss::Squared => {
                    for i in 0..n {
                        residual[i] = y[i] - f[i];
                    }
                }
                GbmLoss::Logistic => {
                    for i in 0..n {
                        residual[i] = y[i] - sigmoid(f[i]);
                    }
                }
            }
            let (mut tree, leaf_of_row) = grow_tree(x, &sorted, &residual, &weights, tree_params);
            if loss == GbmLoss::Logistic {
                newton_leaf_values(&mut tree, &leaf_of_row, &residual, &f);
            }
            for i in 0..n {
                f[i] += params.shrinkage * tree.leaf_value(leaf_of_row[i]);
            }
            train_loss.push(stage_loss(loss, y, &f));
            trees.push(tree);
        }
    }

    Ok(GbmModel {
        init_value,
        trees,
        params,
        loss,
        train_loss,
        n_features: x.ncols(),
    })
}

/// One Newton step per leaf for the logistic loss:
/// sum(residual) / sum(p (1 - p)), denominator floored at 1e-12.
fn newton_leaf_values(tree: &mut Tree, leaf_of_row: &[usize], residual: &[f64], f: &[f64]) {
    let mut num = vec![0.0; tree.nodes.len()];
    let mut den = vec![0.0; tree.nodes.len()];
    for (i, &leaf) in leaf_of_row.iter().enumerate() {
        let p = sigmoid(f[i]);
        num[leaf] += residual[i];
        den[leaf] += p * (1.0 - p);
    }
    for leaf in 0..tree.nodes.len() {
        if matches!(tree.nodes[leaf], Node::Leaf { .. }) {
            tree.set_leaf_value(leaf, num[leaf] / den[leaf].max(1e-12));
        }
    }
}

impl GbmModel {
    /// Additive score F(x) for each row.
    pub fn decision_function(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        check_width(rows.ncols(), self.n_features)?;
        Ok(rows
            .outer_iter()
            .map(|row| {
                self.init_value
                    + self.params.shrinkage
                        * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
            })
            .collect())
    }

    /// Real predictions for squared loss, labels {0,1} for logistic loss.
    pub fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let scores = self.decision_function(rows)?;
        Ok(match self.loss {
            GbmLoss::Squared => scores,
            GbmLoss::Logistic => scores
                .into_iter()
                .map(|f| if sigmoid(f) > 0.5 { 1.0 } else { 0.0 })
                .collect(),
        })
    }
}

//! Discrete AdaBoost with a learning rate on the stage weights.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::learners::tree::{check_width, grow_tree, SortedColumns, Tree, TreeParams};

/// Stage weight used when a weak learner classifies every row correctly,
/// before the shrinkage factor is applied: log(1e10).
pub const PERFECT_STAGE_LOG_ODDS: f64 = 23.025850929940457;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaParams {
    pub n_trees: usize,
    pub depth: usize,
    pub shrinkage: f64,
}

impl AdaParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidParameter("AdaBoost needs at least one tree".into()));
        }
        if self.depth == 0 {
            return Err(Error::InvalidParameter("tree depth must be >= 1".into()));
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaModel {
    pub trees: Vec<Tree>,
    pub stage_weights: Vec<f64>,
    pub params: AdaParams,
    /// Weighted-majority label, used only if no stage was accepted.
    pub fallback_label: f64,
    pub n_features: usize,
}

/// Per-stage diagnostics from [`fit_adaboost_traced`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaStage {
    pub weighted_error: f64,
    pub stage_weight: f64,
    pub accepted: bool,
    /// Sum of the row weights after the update and renormalization.
    pub weight_sum: f64,
}

pub fn fit_adaboost(ds: &Dataset, params: AdaParams) -> Result<AdaModel> {
    fit_adaboost_traced(ds, params).map(|(model, _)| model)
}

pub fn fit_adaboost_traced(ds: &Dataset, params: AdaParams) -> Result<(AdaModel, Vec<AdaStage>)> {
    params.validate()?;
    if ds.task() != Task::Classification {
        return Err(Error::Infeasible(
            "AdaBoost supports classification only; regression is not available".into(),
        ));
    }
    let x = ds.features();
    let y = ds.response();
    let n = y.len();
    let positives = ds.n_positive();
    if positives == 0 || positives == n {
        return Err(Error::data("classification response has a single class"));
    }

    let sorted = SortedColumns::new(x);
    let tree_params = TreeParams {
        max_depth: params.depth,
        min_obs: 1,
    };
    let mut weights = vec![1.0 / n as f64; n];
    let mut trees = Vec::new();
    let mut stage_weights = Vec::new();
    let mut stages = Vec::new();

    for _ in 0..params.n_trees {
        let (tree, leaf_of_row) = grow_tree(x, &sorted, y, &weights, tree_params);
        let wrong: Vec<bool> = (0..n)
            .map(|i| vote(tree.leaf_value(leaf_of_row[i])) != y[i])
            .collect();
        let err: f64 = weights
            .iter()
            .zip(&wrong)
            .filter(|(_, &w)| w)
            .map(|(w, _)| w)
            .sum();

        if err >= 0.5 {
            stages.push(AdaStage {
                weighted_error: err,
                stage_weight: 0.0,
                accepted: false,
                weight_sum: weights.iter().sum(),
            });
            break;
        }
        if err <= 0.0 {
            let alpha = params.shrinkage * PERFECT_STAGE_LOG_ODDS;
            trees.push(tree);
            stage_weights.push(alpha);
            stages.push(AdaStage {
                weighted_error: err,
                stage_weight: alpha,
                accepted: true,
                weight_sum: weights.iter().sum(),
            });
            break;
        }

        let alpha = params.shrinkage * ((1.0 - err) / err).ln();
        let boost = alpha.exp();
        for (w, &miss) in weights.iter_mut().zip(&wrong) {
            if miss {
                *w *= boost;
            }
        }
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        trees.push(tree);
        stage_weights.push(alpha);
        stages.push(AdaStage {
            weighted_error: err,
            stage_weight: alpha,
            accepted: true,
            weight_sum: weights.iter().sum(),
        });
    }

    let fallback_label = if 2 * positives >= n { 1.0 } else { 0.0 };
    Ok((
        AdaModel {
            trees,
            stage_weights,
            params,
            fallback_label,
            n_features: x.ncols(),
        },
        stages,
    ))
}

/// Weak-learner vote from a leaf value fitted to 0/1 targets.
fn vote(leaf_value: f64) -> f64 {
    if leaf_value > 0.5 {
        1.0
    } else {
        0.0
    }
}

impl AdaModel {
    /// Signed ensemble score: sum of stage weight times +1/-1 votes.
    pub fn decision_function(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        check_width(rows.ncols(), self.n_features)?;
        Ok(rows
            .outer_iter()
            .map(|row| {
                self.trees
                    .iter()
                    .zip(&self.stage_weights)
                    .map(|(t, a)| a * (2.0 * vote(t.predict_row(row)) - 1.0))
                    .sum()
            })
            .collect())
    }

    pub fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let scores = self.decision_function(rows)?;
        if self.trees.is_empty() {
            return Ok(vec![self.fallback_label; scores.len()]);
        }
        Ok(scores
            .into_iter()
            .map(|s| if s > 0.0 { 1.0 } else { 0.0 })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{make_synthetic, SyntheticKind};
    use crate::evaluation::misclassification_rate;
    use ndarray::array;

    fn train_error(model: &AdaModel, ds: &Dataset) -> f64 {
        misclassification_rate(&model.predict(ds.features()).unwrap(), ds.response()).unwrap()
    }

    #[test]
    fn separable_data_stops_after_one_stage() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 60, 0.0, 2).unwrap();
        let params = AdaParams {
            n_trees: 50,
            depth: 4,
            shrinkage: 0.5,
        };
        let (model, stages) = fit_adaboost_traced(&ds, params).unwrap();
        assert_eq!(model.trees.len(), 1);
        assert_eq!(stages.len(), 1);
        assert_eq!(stages[0].weighted_error, 0.0);
        assert!((model.stage_weights[0] - 0.5 * 1e10f64.ln()).abs() < 1e-12);
        assert_eq!(train_error(&model, &ds), 0.0);
    }

    #[test]
    fn weights_stay_normalized() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 150, 1.0, 9).unwrap();
        let params = AdaParams {
            n_trees: 40,
            depth: 1,
            shrinkage: 0.3,
        };
        let (_, stages) = fit_adaboost_traced(&ds, params).unwrap();
        assert!(stages.len() > 1);
        for s in &stages {
            assert!((s.weight_sum - 1.0).abs() <= 1e-12, "{}", s.weight_sum);
            if s.accepted {
                assert!(s.weighted_error < 0.5);
                assert!(s.stage_weight.is_finite());
            }
        }
    }

    #[test]
    fn many_stages_no_worse_than_one() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 200, 0.5, 21).unwrap();
        let one = fit_adaboost(&ds, AdaParams { n_trees: 1, depth: 1, shrinkage: 0.5 }).unwrap();
        let many = fit_adaboost(&ds, AdaParams { n_trees: 100, depth: 1, shrinkage: 0.5 }).unwrap();
        assert!(train_error(&many, &ds) <= train_error(&one, &ds));
    }

    #[test]
    fn single_stage_predicts_like_its_tree() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 80, 1.2, 4).unwrap();
        let model = fit_adaboost(&ds, AdaParams { n_trees: 1, depth: 2, shrinkage: 0.1 }).unwrap();
        let tree_votes: Vec<f64> = model.trees[0]
            .predict(ds.features())
            .unwrap()
            .into_iter()
            .map(vote)
            .collect();
        assert_eq!(model.predict(ds.features()).unwrap(), tree_votes);
    }

    #[test]
    fn regression_rejected() {
        let ds = crate::dataset::Dataset::from_matrix(
            "r",
            array![[1.0], [2.0], [3.0]],
            vec![0.1, 0.2, 0.3],
            Task::Regression,
        )
        .unwrap();
        let err = fit_adaboost(&ds, AdaParams { n_trees: 5, depth: 1, shrinkage: 0.1 }).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }
}

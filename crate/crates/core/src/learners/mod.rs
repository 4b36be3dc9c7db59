//! The three model families: RBF support vector machines, gradient boosted
//! trees and AdaBoost, plus the regression tree they share.

mod adaboost;
mod gbm;
mod smo;
mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};

pub use adaboost::{fit_adaboost, fit_adaboost_traced, AdaModel, AdaParams, AdaStage};
pub use gbm::{fit_gbm, GbmLoss, GbmModel, GbmParams};
pub use svm::{fit_svc, fit_svr, SvmModel, KKT_TOLERANCE};
pub use tree::{fit_tree, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Svm,
    Gbm,
    Ada,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Svm, Family::Gbm, Family::Ada];

    pub fn name(self) -> &'static str {
        match self {
            Family::Svm => "svm",
            Family::Gbm => "gbm",
            Family::Ada => "ada",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svm" => Ok(Family::Svm),
            "gbm" => Ok(Family::Gbm),
            "ada" | "adaboost" => Ok(Family::Ada),
            other => Err(Error::InvalidParameter(format!(
                "unknown model family '{other}' (expected svm, gbm or ada)"
            ))),
        }
    }
}

/// Tuning parameters for one model family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelParams {
    Svm {
        cost: f64,
        gamma: f64,
        /// Tube half-width; `None` for classification.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
    Gbm(GbmParams),
    Ada(AdaParams),
}

impl ModelParams {
    pub fn family(&self) -> Family {
        match self {
            ModelParams::Svm { .. } => Family::Svm,
            ModelParams::Gbm(_) => Family::Gbm,
            ModelParams::Ada(_) => Family::Ada,
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelParams::Svm {
                cost,
                gamma,
                epsilon: None,
            } => write!(f, "svm(cost={cost}, gamma={gamma})"),
            ModelParams::Svm {
                cost,
                gamma,
                epsilon: Some(e),
            } => write!(f, "svm(cost={cost}, gamma={gamma}, epsilon={e})"),
            ModelParams::Gbm(p) => write!(
                f,
                "gbm(n_trees={}, interaction_depth={}, shrinkage={}, min_obs_node={})",
                p.n_trees, p.interaction_depth, p.shrinkage, p.min_obs_node
            ),
            ModelParams::Ada(p) => write!(
                f,
                "ada(n_trees={}, depth={}, shrinkage={})",
                p.n_trees, p.depth, p.shrinkage
            ),
        }
    }
}

/// A fitted model of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Model {
    Svm(SvmModel),
    Gbm(GbmModel),
    Ada(AdaModel),
}

impl Model {
    pub fn family(&self) -> Family {
        match self {
            Model::Svm(_) => Family::Svm,
            Model::Gbm(_) => Family::Gbm,
            Model::Ada(_) => Family::Ada,
        }
    }

    /// Labels in {0,1} for classifiers, real values for regressors.
    pub fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        match self {
            Model::Svm(m) => m.predict(rows),
            Model::Gbm(m) => m.predict(rows),
            Model::Ada(m) => m.predict(rows),
        }
    }
}

/// Fits `params` on `ds`. Any failure is wrapped with the parameter vector
/// that caused it.
pub fn fit(ds: &Dataset, params: &ModelParams) -> Result<Model> {
    let fitted = match (*params, ds.task()) {
        (ModelParams::Svm { cost, gamma, .. }, Task::Classification) => {
            fit_svc(ds, cost, gamma).map(Model::Svm)
        }
        (ModelParams::Svm { cost, gamma, epsilon }, Task::Regression) => {
            fit_svr(ds, cost, gamma, epsilon.unwrap_or(0.0)).map(Model::Svm)
        }
        (ModelParams::Gbm(p), _) => fit_gbm(ds, p).map(Model::Gbm),
        (ModelParams::Ada(p), _) => fit_adaboost(ds, p).map(Model::Ada),
    };
    fitted.map_err(|e| Error::Fit {
        params: params.to_string(),
        source: Box::new(e),
    })
}

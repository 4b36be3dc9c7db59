//! Hyperparameter tuning for RBF support vector machines, gradient boosted
//! trees and AdaBoost.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod optimizers;
pub mod tuner;

pub use error::{Error, Result};

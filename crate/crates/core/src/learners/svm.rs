//! RBF-kernel support vector classification and epsilon-regression.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, ScalingParams, Task};
use crate::error::{Error, Result};
use crate::learners::smo::{self, KernelCache, Problem};
use crate::learners::tree::check_width;

/// KKT violation tolerance for the SMO stopping rule.
pub const KKT_TOLERANCE: f64 = 1e-3;

/// Dual coefficients at or below this magnitude are not stored.
const SUPPORT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub task: Task,
    /// Support vectors in standardized feature space.
    pub support_vectors: Array2<f64>,
    /// Training-row index of each support vector.
    pub support_indices: Vec<usize>,
    /// `alpha_i * y_i` (classification, y in {-1,+1}) or `alpha_i - alpha_i*`
    /// (regression).
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub cost: f64,
    pub epsilon: f64,
    pub scaling: ScalingParams,
    pub iterations: usize,
    pub converged: bool,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

fn max_iter(l: usize) -> usize {
    (100 * l).max(10_000_000)
}

/// Soft-margin C-SVC with kernel `exp(-gamma |x - z|^2)` on standardized
/// features.
pub fn fit_svc(ds: &Dataset, cost: f64, gamma: f64) -> Result<SvmModel> {
    check_positive("cost", cost)?;
    check_positive("gamma", gamma)?;
    if ds.task() != Task::Classification {
        return Err(Error::InvalidParameter("fit_svc needs a classification task".into()));
    }
    let scaling = ScalingParams::fit(ds);
    let x = scaling.apply(ds.features())?;
    let y: Vec<f64> = ds
        .response()
        .iter()
        .map(|&v| if v == 1.0 { 1.0 } else { -1.0 })
        .collect();
    let linear = vec![-1.0; y.len()];
    let mut cache = KernelCache::new(x.view(), gamma);
    let sol = smo::solve(
        &mut cache,
        &Problem {
            linear: &linear,
            y: &y,
            cost,
            tolerance: KKT_TOLERANCE,
            max_iter: max_iter(y.len()),
        },
    );
    let coefs: Vec<f64> = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).collect();
    Ok(assemble(
        Task::Classification,
        x,
        &coefs,
        sol,
        (cost, gamma, 0.0),
        scaling,
    ))
}

/// Epsilon-insensitive support vector regression.
pub fn fit_svr(ds: &Dataset, cost: f64, gamma: f64, epsilon: f64) -> Result<SvmModel> {
    check_positive("cost", cost)?;
    check_positive("gamma", gamma)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    if ds.task() != Task::Regression {
        return Err(Error::InvalidParameter("fit_svr needs a regression task".into()));
    }
    let scaling = ScalingParams::fit(ds);
    let x = scaling.apply(ds.features())?;
    let n = ds.n_rows();
    let response = ds.response();
    let mut linear = Vec::with_capacity(2 * n);
    let mut y = Vec::with_capacity(2 * n);
    for &r in response {
        linear.push(epsilon - r);
        y.push(1.0);
    }
    for &r in response {
        linear.push(epsilon + r);
        y.push(-1.0);
    }
    let mut cache = KernelCache::new(x.view(), gamma);
    let sol = smo::solve(
        &mut cache,
        &Problem {
            linear: &linear,
            y: &y,
            cost,
            tolerance: KKT_TOLERANCE,
            max_iter: max_iter(2 * n),
        },
    );
    let coefs: Vec<f64> = (0..n).map(|i| sol.alpha[i] - sol.alpha[i + n]).collect();
    Ok(assemble(
        Task::Regression,
        x,
        &coefs,
        sol,
        (cost, gamma, epsilon),
        scaling,
    ))
}

fn assemble(
    task: Task,
    x: Array2<f64>,
    coefs: &[f64],
    sol: smo::Solution,
    (cost, gamma, epsilon): (f64, f64, f64),
    scaling: ScalingParams,
) -> SvmModel {
    let support_indices: Vec<usize> = coefs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > SUPPORT_THRESHOLD)
        .map(|(i, _)| i)
        .collect();
    SvmModel {
        task,
        support_vectors: x.select(Axis(0), &support_indices),
        dual_coefs: support_indices.iter().map(|&i| coefs[i]).collect(),
        support_indices,
        bias: -sol.rho,
        gamma,
        cost,
        epsilon,
        scaling,
        iterations: sol.iterations,
        converged: sol.converged,
    }
}

impl SvmModel {
    /// `f(x) = bias + sum_i coef_i K(x, sv_i)` on raw (unscaled) rows.
    pub fn decision_function(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        check_width(rows.ncols(), self.scaling.width())?;
        let scaled = self.scaling.apply(rows)?;
        Ok(scaled
            .outer_iter()
            .map(|row| {
                self.bias
                    + self
                        .support_vectors
                        .outer_iter()
                        .zip(&self.dual_coefs)
                        .map(|(sv, c)| c * smo::rbf(sv, row, self.gamma))
                        .sum::<f64>()
            })
            .collect())
    }

    pub fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let f = self.decision_function(rows)?;
        Ok(match self.task {
            Task::Classification => f
                .into_iter()
                .map(|v| if v > 0.0 { 1.0 } else { 0.0 })
                .collect(),
            Task::Regression => f,
        })
    }

    pub fn n_support(&self) -> usize {
        self.support_indices.len()
    }

    /// Largest KKT violation over the training rows of a classifier, using
    /// margins `y_i f(x_i)`:
    /// alpha = 0 needs margin >= 1, 0 < alpha < C needs margin = 1,
    /// alpha = C needs margin <= 1.
    pub fn max_kkt_violation(&self, train: &Dataset) -> Result<f64> {
        if self.task != Task::Classification {
            return Err(Error::InvalidParameter(
                "KKT margins are defined here for classifiers only".into(),
            ));
        }
        let f = self.decision_function(train.features())?;
        let mut alpha = vec![0.0; train.n_rows()];
        for (&i, c) in self.support_indices.iter().zip(&self.dual_coefs) {
            alpha[i] = c.abs();
        }
        let bound_eps = 1e-9 * self.cost;
        let mut worst: f64 = 0.0;
        for (i, (&fi, &label)) in f.iter().zip(train.response()).enumerate() {
            let y = if label == 1.0 { 1.0 } else { -1.0 };
            let margin = y * fi;
            let violation = if alpha[i] <= SUPPORT_THRESHOLD {
                (1.0 - margin).max(0.0)
            } else if alpha[i] >= self.cost - bound_eps {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            };
            worst = worst.max(violation);
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{make_synthetic, SyntheticKind};
    use crate::evaluation::{misclassification_rate, mse};
    use ndarray::{array, Array2};

    #[test]
    fn two_points_bisector() {
        let ds = Dataset::from_matrix(
            "pair",
            array![[0.0, 0.0], [2.0, 2.0]],
            vec![0.0, 1.0],
            Task::Classification,
        )
        .unwrap();
        let model = fit_svc(&ds, 10.0, 0.5).unwrap();
        assert_eq!(model.n_support(), 2);
        assert_eq!(model.predict(ds.features()).unwrap(), vec![0.0, 1.0]);
        // Symmetric pair: the midpoint sits on the boundary.
        let mid = model.decision_function(array![[1.0, 1.0]].view()).unwrap()[0];
        assert!(mid.abs() < 1e-9, "{mid}");
        let near_a = model.decision_function(array![[0.9, 0.9]].view()).unwrap()[0];
        let near_b = model.decision_function(array![[1.1, 1.1]].view()).unwrap()[0];
        assert!(near_a < 0.0 && near_b > 0.0);
        assert!((near_a + near_b).abs() < 1e-9);
    }

    #[test]
    fn dual_feasibility_and_box() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 120, 1.0, 3).unwrap();
        let model = fit_svc(&ds, 4.0, 0.5).unwrap();
        assert!(model.converged);
        let sum: f64 = model.dual_coefs.iter().sum();
        assert!(sum.abs() < 1e-6, "{sum}");
        assert!(model.dual_coefs.iter().all(|c| c.abs() <= 4.0 + 1e-9));
        assert!(model.max_kkt_violation(&ds).unwrap() <= KKT_TOLERANCE);
    }

    #[test]
    fn separable_gaussians_fit_well() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 100, 0.3, 8).unwrap();
        let model = fit_svc(&ds, 10.0, 2f64.powi(-5)).unwrap();
        let pred = model.predict(ds.features()).unwrap();
        let acc = 1.0 - misclassification_rate(&pred, ds.response()).unwrap();
        assert!(acc >= 0.9, "accuracy {acc}");
    }

    #[test]
    fn noiseless_separable_interpolates() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 80, 0.0, 8).unwrap();
        let model = fit_svc(&ds, 10.0, 2f64.powi(-5)).unwrap();
        assert_eq!(model.predict(ds.features()).unwrap(), ds.response());
    }

    #[test]
    fn constant_response_inside_tube() {
        let x = Array2::from_shape_fn((20, 1), |(i, _)| i as f64);
        let ds = Dataset::from_matrix("c", x, vec![3.0; 20], Task::Regression).unwrap();
        let model = fit_svr(&ds, 5.0, 1.0, 0.5).unwrap();
        assert_eq!(model.n_support(), 0);
        for p in model.predict(ds.features()).unwrap() {
            assert!((p - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn svr_fits_sine() {
        let x = Array2::from_shape_fn((50, 1), |(i, _)| i as f64 * 2.0 * std::f64::consts::PI / 49.0);
        let y: Vec<f64> = x.column(0).iter().map(|v| v.sin()).collect();
        let ds = Dataset::from_matrix("sin", x, y, Task::Regression).unwrap();
        let model = fit_svr(&ds, 10.0, 1.0, 0.1).unwrap();
        assert!(model.dual_coefs.iter().all(|c| c.abs() <= 10.0 + 1e-9));
        let err = mse(&model.predict(ds.features()).unwrap(), ds.response()).unwrap();
        assert!(err < 0.05, "mse {err}");
    }

    #[test]
    fn bad_parameters_rejected() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 40, 0.5, 1).unwrap();
        assert!(fit_svc(&ds, 0.0, 1.0).is_err());
        assert!(fit_svc(&ds, 1.0, -1.0).is_err());
        let reg = make_synthetic(SyntheticKind::Friedman1, 40, 0.5, 1).unwrap();
        assert!(fit_svc(&reg, 1.0, 1.0).is_err());
        assert!(fit_svr(&reg, 1.0, 1.0, -0.1).is_err());
        assert!(fit_svr(&ds, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn width_mismatch_rejected() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 40, 0.5, 1).unwrap();
        let model = fit_svc(&ds, 1.0, 1.0).unwrap();
        assert!(model.predict(array![[1.0, 2.0, 3.0]].view()).is_err());
    }
}

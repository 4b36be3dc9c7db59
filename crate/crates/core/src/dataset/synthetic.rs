use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// Two isotropic Gaussian classes centred at (-1,-1) and (+1,+1).
    TwoGaussians,
    /// The Friedman #1 regression surface on 10 uniform features.
    Friedman1,
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-gaussians" => Ok(SyntheticKind::TwoGaussians),
            "friedman1" => Ok(SyntheticKind::Friedman1),
            other => Err(Error::InvalidParameter(format!(
                "unknown synthetic kind '{other}' (expected two-gaussians or friedman1)"
            ))),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticKind::TwoGaussians => "two-gaussians",
            SyntheticKind::Friedman1 => "friedman1",
        })
    }
}

pub fn friedman1_mean(x: &[f64]) -> f64 {
    10.0 * (PI * x[0] * x[1]).sin() + 20.0 * (x[2] - 0.5).powi(2) + 10.0 * x[3] + 5.0 * x[4]
}

pub fn make_synthetic(kind: SyntheticKind, n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n < 20 {
        return Err(Error::InvalidParameter(format!("n must be at least 20, got {n}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise must be >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // sd = 0 is accepted and yields exact centres.
    let normal = Normal::new(0.0, noise).expect("validated noise");
    match kind {
        SyntheticKind::TwoGaussians => {
            let mut x = Array2::zeros((n, 2));
            let mut y = Vec::with_capacity(n);
            for i in 0..n {
                let label = (i % 2) as f64;
                let centre = if label == 1.0 { 1.0 } else { -1.0 };
                for j in 0..2 {
                    x[[i, j]] = centre + normal.sample(&mut rng);
                }
                y.push(label);
            }
            Dataset::from_matrix(format!("two-gaussians-{n}"), x, y, Task::Classification)
        }
        SyntheticKind::Friedman1 => {
            let mut x = Array2::zeros((n, 10));
            let mut y = Vec::with_capacity(n);
            for i in 0..n {
                let row: Vec<f64> = (0..10).map(|_| rng.gen::<f64>()).collect();
                for (j, v) in row.iter().enumerate() {
                    x[[i, j]] = *v;
                }
                y.push(friedman1_mean(&row) + normal.sample(&mut rng));
            }
            Dataset::from_matrix(format!("friedman1-{n}"), x, y, Task::Regression)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_gaussians_are_separable() {
        let ds = make_synthetic(SyntheticKind::TwoGaussians, 100, 0.0, 5).unwrap();
        for (row, &y) in ds.features().outer_iter().zip(ds.response()) {
            assert_eq!((row[0] + row[1] > 0.0) as u8 as f64, y);
        }
        assert_eq!(ds.n_positive(), 50);
    }

    #[test]
    fn friedman_formula_at_centre() {
        let v = friedman1_mean(&[0.5; 10]);
        assert!((v - (10.0 * (PI / 4.0).sin() + 5.0 + 2.5)).abs() < 1e-12);
        assert!((v - 14.571).abs() < 1e-3);
    }

    #[test]
    fn noiseless_friedman_matches_formula() {
        let ds = make_synthetic(SyntheticKind::Friedman1, 30, 0.0, 1).unwrap();
        for (row, &y) in ds.features().outer_iter().zip(ds.response()) {
            assert_eq!(friedman1_mean(row.as_slice().unwrap()), y);
            assert!(row.iter().all(|v| (0.0..1.0).contains(v)));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        for kind in [SyntheticKind::TwoGaussians, SyntheticKind::Friedman1] {
            let a = make_synthetic(kind, 40, 0.7, 11).unwrap();
            let b = make_synthetic(kind, 40, 0.7, 11).unwrap();
            let c = make_synthetic(kind, 40, 0.7, 12).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(make_synthetic(SyntheticKind::Friedman1, 10, 1.0, 0).is_err());
        assert!(make_synthetic(SyntheticKind::Friedman1, 50, -1.0, 0).is_err());
        assert!("spiral".parse::<SyntheticKind>().is_err());
    }
}

//! Rescaling losses and run times onto a common [0, 1] reference so that
//! results from different datasets can be compared.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference interval mapped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreRange {
    pub best: f64,
    pub worst: f64,
}

impl ScoreRange {
    pub fn new(best: f64, worst: f64) -> Self {
        ScoreRange { best, worst }
    }
}

/// One method's outcome. `loss = None` marks a failed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawScore {
    pub label: String,
    pub loss: Option<f64>,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledScore {
    pub label: String,
    pub scaled_loss: f64,
    pub scaled_time: f64,
    pub failed: bool,
}

/// Maps each loss to `(loss - best) / (worst - best)` and each time the same
/// way against `time_range`, clamped to [0, 1]. Failed runs get the
/// sentinel (1, 1).
///
/// A degenerate time range (all runs equally fast) maps every time to 0.
pub fn standardize_scores(
    raw: &[RawScore],
    loss_range: ScoreRange,
    time_range: ScoreRange,
) -> Result<Vec<ScaledScore>> {
    let loss_span = loss_range.worst - loss_range.best;
    if !(loss_span > 0.0) || !loss_span.is_finite() {
        return Err(Error::Infeasible(format!(
            "degenerate loss range: best {} and worst {} must satisfy worst > best",
            loss_range.best, loss_range.worst
        )));
    }
    let time_span = time_range.worst - time_range.best;
    Ok(raw
        .iter()
        .map(|r| match (r.loss, r.seconds) {
            (Some(loss), seconds) if loss.is_finite() => ScaledScore {
                label: r.label.clone(),
                scaled_loss: ((loss - loss_range.best) / loss_span).clamp(0.0, 1.0),
                scaled_time: match seconds {
                    Some(t) if time_span > 0.0 => {
                        ((t - time_range.best) / time_span).clamp(0.0, 1.0)
                    }
                    _ => 0.0,
                },
                failed: false,
            },
            _ => ScaledScore {
                label: r.label.clone(),
                scaled_loss: 1.0,
                scaled_time: 1.0,
                failed: true,
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(loss: Option<f64>, seconds: f64) -> RawScore {
        RawScore {
            label: "m".into(),
            loss,
            seconds: Some(seconds),
        }
    }

    #[test]
    fn endpoints_map_to_zero_and_one() {
        let out = standardize_scores(
            &[score(Some(0.1), 2.0), score(Some(0.3), 6.0), score(Some(0.2), 4.0)],
            ScoreRange::new(0.1, 0.3),
            ScoreRange::new(2.0, 6.0),
        )
        .unwrap();
        assert_eq!(out[0].scaled_loss, 0.0);
        assert_eq!(out[0].scaled_time, 0.0);
        assert_eq!(out[1].scaled_loss, 1.0);
        assert_eq!(out[1].scaled_time, 1.0);
        assert!((out[2].scaled_loss - 0.5).abs() < 1e-12);
        assert!((out[2].scaled_time - 0.5).abs() < 1e-12);
    }

    #[test]
    fn failures_get_sentinel() {
        let out = standardize_scores(
            &[score(None, 1.0), score(Some(f64::NAN), 1.0)],
            ScoreRange::new(0.0, 1.0),
            ScoreRange::new(0.0, 2.0),
        )
        .unwrap();
        for s in out {
            assert!(s.failed);
            assert_eq!((s.scaled_loss, s.scaled_time), (1.0, 1.0));
        }
    }

    #[test]
    fn degenerate_loss_range_rejected() {
        assert!(standardize_scores(&[], ScoreRange::new(0.2, 0.2), ScoreRange::new(0.0, 1.0)).is_err());
        assert!(standardize_scores(&[], ScoreRange::new(0.3, 0.2), ScoreRange::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn outside_range_is_clamped() {
        let out = standardize_scores(
            &[score(Some(-0.1), 9.0), score(Some(0.9), -1.0)],
            ScoreRange::new(0.0, 0.5),
            ScoreRange::new(0.0, 4.0),
        )
        .unwrap();
        assert_eq!((out[0].scaled_loss, out[0].scaled_time), (0.0, 1.0));
        assert_eq!((out[1].scaled_loss, out[1].scaled_time), (1.0, 0.0));
    }

    #[test]
    fn degenerate_time_range_maps_to_zero() {
        let out = standardize_scores(
            &[score(Some(0.5), 3.0)],
            ScoreRange::new(0.0, 1.0),
            ScoreRange::new(3.0, 3.0),
        )
        .unwrap();
        assert_eq!(out[0].scaled_time, 0.0);
    }

    proptest! {
        #[test]
        fn losses_inside_range_land_in_unit_interval(
            best in -10.0f64..10.0,
            span in 1e-3f64..10.0,
            frac in 0.0f64..=1.0,
        ) {
            let loss = best + frac * span;
            let out = standardize_scores(
                &[score(Some(loss), 0.0)],
                ScoreRange::new(best, best + span),
                ScoreRange::new(0.0, 1.0),
            ).unwrap();
            prop_assert!(out[0].scaled_loss >= -1e-9 && out[0].scaled_loss <= 1.0 + 1e-9);
            prop_assert!((out[0].scaled_loss - frac).abs() < 1e-9);
        }
    }
}

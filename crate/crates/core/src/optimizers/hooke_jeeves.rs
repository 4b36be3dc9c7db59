//! Bounded Hooke-Jeeves pattern search.

use std::time::Instant;

use super::{Objective, OptConfig, OptResult, SearchSpace, Tracker};
use crate::error::{Error, Result};

/// Pattern search from the space's start point.
///
/// Each pass probes `+step` then `-step` along every unit coordinate,
/// keeping any improvement. After a successful pass the search jumps along
/// the direction of progress and explores again from there; after a failed
/// pass the step contracts. The last contraction is floored at `min_step`
/// so the final pass always probes at exactly `min_step`, and the search
/// stops once that pass fails or the evaluation budget runs out.
pub fn hooke_jeeves<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    cfg: &OptConfig,
) -> Result<OptResult> {
    cfg.validate()?;
    if cfg.max_evaluations == 0 {
        return Err(Error::InvalidParameter(
            "evaluation budget allows no evaluations".into(),
        ));
    }
    let started = Instant::now();
    let mut tracker = Tracker::new(objective, space, cfg.max_evaluations);
    let min_step = cfg.hj.min_step;
    let mut step = cfg.hj.initial_step.max(min_step);

    let mut base = space.to_unit(&space.start())?;
    let mut f_base = tracker.probe(&base)?;

    while !tracker.exhausted {
        let (x, fx) = explore(&mut tracker, &base, f_base, step)?;
        if fx < f_base {
            let mut prev = std::mem::replace(&mut base, x);
            f_base = fx;
            while !tracker.exhausted {
                let pattern: Vec<f64> = base
                    .iter()
                    .zip(&prev)
                    .map(|(b, p)| (2.0 * b - p).clamp(0.0, 1.0))
                    .collect();
                let f_pattern = tracker.probe(&pattern)?;
                let (y, fy) = explore(&mut tracker, &pattern, f_pattern, step)?;
                if fy < f_base {
                    prev = std::mem::replace(&mut base, y);
                    f_base = fy;
                } else {
                    break;
                }
            }
        } else if step <= min_step {
            break;
        } else {
            step = (step * cfg.hj.contraction).max(min_step);
        }
    }

    tracker.finish(Vec::new(), started.elapsed().as_secs_f64())
}

/// One exploratory pass around `point`; returns the best point found and
/// its loss (the input point if nothing improved).
fn explore<O: Objective + ?Sized>(
    tracker: &mut Tracker<'_, O>,
    point: &[f64],
    f_point: f64,
    step: f64,
) -> Result<(Vec<f64>, f64)> {
    let mut x = point.to_vec();
    let mut fx = f_point;
    for i in 0..x.len() {
        let origin = x[i];
        let mut moved = false;
        for delta in [step, -step] {
            let candidate = (origin + delta).clamp(0.0, 1.0);
            if candidate == origin {
                continue;
            }
            x[i] = candidate;
            let f = tracker.probe(&x)?;
            if f < fx {
                fx = f;
                moved = true;
                break;
            }
        }
        if !moved {
            x[i] = origin;
        }
        if tracker.exhausted {
            break;
        }
    }
    Ok((x, fx))
}

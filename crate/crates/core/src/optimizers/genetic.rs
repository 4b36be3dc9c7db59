//! Real-coded genetic algorithm with tournament selection, blend crossover,
//! Gaussian mutation and elitism.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Objective, OptConfig, OptResult, SearchSpace, Tracker};
use crate::error::{Error, Result};

/// Blend crossover extends the parents' interval by this fraction of its
/// width on each side.
const BLEND_ALPHA: f64 = 0.25;

/// Minimizes `objective` over `space`.
///
/// The first generation is the start point plus `population - 1` uniform
/// random points. Each later generation keeps the `elitism` best members and
/// fills the rest with offspring. The run stops after `generations`
/// generations, or before a generation whose new evaluations would exceed
/// the budget. Points already evaluated are not charged again.
pub fn genetic_algorithm<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    cfg: &OptConfig,
) -> Result<OptResult> {
    cfg.validate()?;
    let ga = cfg.ga;
    if ga.population > cfg.max_evaluations {
        return Err(Error::InvalidParameter(format!(
            "population {} exceeds the evaluation budget {}",
            ga.population, cfg.max_evaluations
        )));
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tracker = Tracker::new(objective, space, cfg.max_evaluations);
    let d = space.len();
    let mutation = Normal::new(0.0, ga.mutation_sd).map_err(|e| {
        Error::InvalidParameter(format!("mutation_sd {}: {e}", ga.mutation_sd))
    })?;

    let mut population: Vec<Vec<f64>> = Vec::with_capacity(ga.population);
    population.push(space.to_unit(&space.start())?);
    for _ in 1..ga.population {
        population.push((0..d).map(|_| rng.gen::<f64>()).collect());
    }
    let mut losses = tracker
        .probe_batch(&population)?
        .expect("population fits the budget");
    let mut generation_best = vec![min_loss(&losses)];

    for _ in 1..ga.generations {
        // Stable sort: equal losses keep their earlier position.
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]));

        let mut next: Vec<Vec<f64>> = order[..ga.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < ga.population {
            let a = tournament(&losses, ga.tournament, &mut rng);
            let b = tournament(&losses, ga.tournament, &mut rng);
            let mut child = if rng.gen::<f64>() < ga.crossover_rate {
                blend(&population[a], &population[b], &mut rng)
            } else {
                population[a].clone()
            };
            for gene in child.iter_mut() {
                if rng.gen::<f64>() < ga.mutation_rate {
                    *gene = (*gene + mutation.sample(&mut rng)).clamp(0.0, 1.0);
                }
            }
            next.push(child);
        }

        let Some(next_losses) = tracker.probe_batch(&next)? else {
            break;
        };
        population = next;
        losses = next_losses;
        generation_best.push(min_loss(&losses));
    }

    tracker.finish(generation_best, started.elapsed().as_secs_f64())
}

fn min_loss(losses: &[f64]) -> f64 {
    losses.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Index of the best of `size` members drawn with replacement; the earliest
/// draw wins ties.
fn tournament(losses: &[f64], size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.gen_range(0..losses.len());
    for _ in 1..size {
        let c = rng.gen_range(0..losses.len());
        if losses[c] < losses[best] {
            best = c;
        }
    }
    best
}

fn blend(a: &[f64], b: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let (lo, hi) = (x.min(y), x.max(y));
            let pad = BLEND_ALPHA * (hi - lo);
            if hi - lo == 0.0 {
                x
            } else {
                rng.gen_range(lo - pad..=hi + pad).clamp(0.0, 1.0)
            }
        })
        .collect()
}

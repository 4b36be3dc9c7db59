//! Box-constrained derivative-free minimizers over tuning spaces and the
//! exhaustive grid used as a reference.
//!
//! Both optimizers work in unit coordinates: every dimension is mapped onto
//! [0, 1] (affinely, or affinely in log2 space), and integer dimensions are
//! rounded when a unit point is turned back into natural units.

mod genetic;
mod grid;
mod hooke_jeeves;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use genetic::genetic_algorithm;
pub use grid::{grid_search, grid_search_with_cap, GridCell, GridResult, DEFAULT_CELL_CAP};
pub use hooke_jeeves::hooke_jeeves;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dim {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub scale: Scale,
    pub integer: bool,
    pub start: f64,
}

impl Dim {
    pub fn linear(name: &str, lower: f64, upper: f64, start: f64) -> Dim {
        Dim {
            name: name.to_string(),
            lower,
            upper,
            scale: Scale::Linear,
            integer: false,
            start,
        }
    }

    pub fn log2(name: &str, lower: f64, upper: f64, start: f64) -> Dim {
        Dim {
            scale: Scale::Log2,
            ..Dim::linear(name, lower, upper, start)
        }
    }

    pub fn integer(name: &str, lower: f64, upper: f64, start: f64) -> Dim {
        Dim {
            integer: true,
            ..Dim::linear(name, lower, upper, start)
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("dimension '{}': {msg}", self.name)));
        if !(self.lower.is_finite() && self.upper.is_finite() && self.start.is_finite()) {
            return bad("bounds and start must be finite");
        }
        if self.lower >= self.upper {
            return bad("lower bound must be below upper bound");
        }
        if !(self.lower..=self.upper).contains(&self.start) {
            return bad("start lies outside the bounds");
        }
        if self.scale == Scale::Log2 && self.lower <= 0.0 {
            return bad("log2 scale needs a positive lower bound");
        }
        if self.integer
            && [self.lower, self.upper, self.start]
                .iter()
                .any(|v| v.fract() != 0.0)
        {
            return bad("integer dimension needs integer bounds and start");
        }
        Ok(())
    }

    fn to_unit(&self, v: f64) -> f64 {
        let u = match self.scale {
            Scale::Linear => (v - self.lower) / (self.upper - self.lower),
            Scale::Log2 => {
                let (lo, hi) = (self.lower.log2(), self.upper.log2());
                (v.log2() - lo) / (hi - lo)
            }
        };
        u.clamp(0.0, 1.0)
    }

    fn from_unit(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        // Log round trips drift by an ulp; keep the start value exact.
        if u == self.to_unit(self.start) {
            return self.start;
        }
        let v = match self.scale {
            Scale::Linear => self.lower + u * (self.upper - self.lower),
            Scale::Log2 => {
                let (lo, hi) = (self.lower.log2(), self.upper.log2());
                (lo + u * (hi - lo)).exp2()
            }
        };
        let v = v.clamp(self.lower, self.upper);
        if self.integer {
            v.round()
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    dims: Vec<Dim>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dim>) -> Result<SearchSpace> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("search space has no dimensions".into()));
        }
        for d in &dims {
            d.validate()?;
        }
        Ok(SearchSpace { dims })
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.dims.iter().map(|d| d.name.as_str()).collect()
    }

    pub fn start(&self) -> Vec<f64> {
        self.dims.iter().map(|d| d.start).collect()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dims.len()
            && self
                .dims
                .iter()
                .zip(point)
                .all(|(d, &v)| v >= d.lower && v <= d.upper && (!d.integer || v.fract() == 0.0))
    }

    /// Natural units to unit coordinates.
    pub fn to_unit(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.dims.len() {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, space has {} dimensions",
                point.len(),
                self.dims.len()
            )));
        }
        for (d, &v) in self.dims.iter().zip(point) {
            if !(v >= d.lower && v <= d.upper) {
                return Err(Error::InvalidParameter(format!(
                    "{}={v} lies outside [{}, {}]",
                    d.name, d.lower, d.upper
                )));
            }
        }
        Ok(self.dims.iter().zip(point).map(|(d, &v)| d.to_unit(v)).collect())
    }

    /// Unit coordinates to natural units. Coordinates are clamped to [0, 1]
    /// and integer dimensions rounded to the nearest integer.
    pub fn from_unit(&self, unit: &[f64]) -> Vec<f64> {
        self.dims.iter().zip(unit).map(|(d, &u)| d.from_unit(u)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HjConfig {
    pub initial_step: f64,
    pub contraction: f64,
    pub min_step: f64,
}

impl Default for HjConfig {
    fn default() -> Self {
        HjConfig {
            initial_step: 0.25,
            contraction: 0.5,
            min_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub mutation_sd: f64,
    pub elitism: usize,
    pub tournament: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 20,
            generations: 50,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_sd: 0.1,
            elitism: 2,
            tournament: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub max_evaluations: usize,
    pub seed: u64,
    pub hj: HjConfig,
    pub ga: GaConfig,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            max_evaluations: 1000,
            seed: 0,
            hj: HjConfig::default(),
            ga: GaConfig::default(),
        }
    }
}

impl OptConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let hj = &self.hj;
        if !(hj.initial_step > 0.0 && hj.initial_step <= 1.0) {
            return bad(format!("initial_step must lie in (0, 1], got {}", hj.initial_step));
        }
        if !(hj.contraction > 0.0 && hj.contraction < 1.0) {
            return bad(format!("contraction must lie in (0, 1), got {}", hj.contraction));
        }
        if !(hj.min_step > 0.0) {
            return bad(format!("min_step must be positive, got {}", hj.min_step));
        }
        let ga = &self.ga;
        for (name, rate) in [
            ("crossover_rate", ga.crossover_rate),
            ("mutation_rate", ga.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} must lie in [0, 1], got {rate}"));
            }
        }
        if !(ga.mutation_sd >= 0.0) {
            return bad(format!("mutation_sd must be non-negative, got {}", ga.mutation_sd));
        }
        if ga.population < 4 {
            return bad(format!("population must be at least 4, got {}", ga.population));
        }
        if ga.elitism >= ga.population {
            return bad(format!(
                "elitism {} must be below population {}",
                ga.elitism, ga.population
            ));
        }
        if ga.tournament == 0 {
            return bad("tournament size must be at least 1".into());
        }
        Ok(())
    }
}

/// One objective value: the loss to minimize and its upper confidence limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub loss: f64,
    pub ucl95: f64,
}

impl Sample {
    pub fn exact(loss: f64) -> Sample {
        Sample { loss, ucl95: loss }
    }
}

/// Function minimized by the optimizers. Points are in natural units.
pub trait Objective: Sync {
    fn evaluate(&self, point: &[f64]) -> Result<Sample>;
}

/// Wraps an infallible closure returning a plain loss.
pub struct FnObjective<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn evaluate(&self, point: &[f64]) -> Result<Sample> {
        Ok(Sample::exact((self.0)(point)))
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn evaluate(&self, point: &[f64]) -> Result<Sample> {
        (**self).evaluate(point)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// 1-based count of objective evaluations so far.
    pub evaluation: usize,
    pub best_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    /// Natural units.
    pub best_point: Vec<f64>,
    pub best_loss: f64,
    pub best_ucl95: f64,
    pub evaluations_used: usize,
    pub trace: Vec<TracePoint>,
    /// Best loss in each generation (genetic algorithm only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generation_best: Vec<f64>,
    pub elapsed_seconds: f64,
}

fn point_key(point: &[f64]) -> Vec<u64> {
    point.iter().map(|v| v.to_bits()).collect()
}

/// NaN losses sort last.
fn sanitize(mut s: Sample) -> Sample {
    if s.loss.is_nan() {
        s.loss = f64::INFINITY;
    }
    s
}

/// Counts evaluations, memoizes them by natural-unit point and tracks the
/// incumbent. Memo hits are free.
struct Tracker<'a, O: ?Sized> {
    objective: &'a O,
    space: &'a SearchSpace,
    budget: usize,
    used: usize,
    memo: HashMap<Vec<u64>, Sample>,
    best: Option<(Vec<f64>, Sample)>,
    trace: Vec<TracePoint>,
    exhausted: bool,
}

impl<'a, O: Objective + ?Sized> Tracker<'a, O> {
    fn new(objective: &'a O, space: &'a SearchSpace, budget: usize) -> Self {
        Tracker {
            objective,
            space,
            budget,
            used: 0,
            memo: HashMap::new(),
            best: None,
            trace: Vec::new(),
            exhausted: false,
        }
    }

    fn record(&mut self, point: Vec<f64>, sample: Sample) {
        self.used += 1;
        let improves = self.best.as_ref().map_or(true, |(_, b)| sample.loss < b.loss);
        self.memo.insert(point_key(&point), sample);
        if improves {
            self.best = Some((point, sample));
        }
        let best_loss = self.best.as_ref().map(|(_, b)| b.loss).unwrap_or(f64::INFINITY);
        self.trace.push(TracePoint {
            evaluation: self.used,
            best_loss,
        });
    }

    /// Loss at a unit point, or infinity once the budget is spent.
    fn probe(&mut self, unit: &[f64]) -> Result<f64> {
        let point = self.space.from_unit(unit);
        if let Some(s) = self.memo.get(&point_key(&point)) {
            return Ok(s.loss);
        }
        if self.used >= self.budget {
            self.exhausted = true;
            return Ok(f64::INFINITY);
        }
        let sample = sanitize(self.objective.evaluate(&point)?);
        self.record(point, sample);
        Ok(sample.loss)
    }

    /// Losses for a batch of unit points, evaluated concurrently and
    /// recorded in index order. Returns `None` without evaluating anything
    /// if the distinct new points would overrun the budget.
    fn probe_batch(&mut self, units: &[Vec<f64>]) -> Result<Option<Vec<f64>>> {
        let points: Vec<Vec<f64>> = units.iter().map(|u| self.space.from_unit(u)).collect();
        let mut fresh: Vec<usize> = Vec::new();
        let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            let key = point_key(p);
            if !self.memo.contains_key(&key) && seen.insert(key, ()).is_none() {
                fresh.push(i);
            }
        }
        if self.used + fresh.len() > self.budget {
            self.exhausted = true;
            return Ok(None);
        }
        let objective = self.objective;
        let samples: Vec<Sample> = fresh
            .par_iter()
            .map(|&i| objective.evaluate(&points[i]).map(sanitize))
            .collect::<Result<_>>()?;
        for (&i, s) in fresh.iter().zip(samples) {
            self.record(points[i].clone(), s);
        }
        Ok(Some(
            points
                .iter()
                .map(|p| self.memo[&point_key(p)].loss)
                .collect(),
        ))
    }

    fn finish(self, generation_best: Vec<f64>, elapsed_seconds: f64) -> Result<OptResult> {
        let (best_point, best) = self.best.ok_or_else(|| {
            Error::InvalidParameter("evaluation budget allows no evaluations".into())
        })?;
        Ok(OptResult {
            best_point,
            best_loss: best.loss,
            best_ucl95: best.ucl95,
            evaluations_used: self.used,
            trace: self.trace,
            generation_best,
            elapsed_seconds,
        })
    }
}

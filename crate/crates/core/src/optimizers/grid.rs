//! Exhaustive lattice evaluation.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dim, Objective, Scale, SearchSpace};
use crate::error::{Error, Result};

pub const DEFAULT_CELL_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    /// Natural units.
    pub point: Vec<f64>,
    pub loss: f64,
    pub ucl95: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub names: Vec<String>,
    pub cells: Vec<GridCell>,
    /// Index of the lowest-loss cell (earliest on ties).
    pub best: usize,
}

impl GridResult {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }

    pub fn worst_loss(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.loss)
            .filter(|l| l.is_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cell indices sorted by loss, ties by index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.cells.len()).collect();
        order.sort_by(|&a, &b| self.cells[a].loss.total_cmp(&self.cells[b].loss));
        order
    }

    /// The `ceil(fraction * cells)` lowest-loss cells.
    pub fn best_fraction(&self, fraction: f64) -> Vec<usize> {
        let n = (fraction * self.cells.len() as f64).ceil() as usize;
        self.best_n(n.max(1))
    }

    /// The `min(n, cells)` lowest-loss cells.
    pub fn best_n(&self, n: usize) -> Vec<usize> {
        let mut r = self.ranked();
        r.truncate(n.min(self.cells.len()));
        r
    }

    /// One row per cell: parameter values, loss, ucl95, seconds.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::data(format!("csv write failed: {e}"));
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        header.extend(["loss", "ucl95", "seconds"]);
        w.write_record(&header).map_err(csv_err)?;
        for c in &self.cells {
            let mut row: Vec<String> = c.point.iter().map(|v| v.to_string()).collect();
            row.push(c.loss.to_string());
            row.push(c.ucl95.to_string());
            row.push(c.seconds.to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| Error::data(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Lattice values along one dimension.
fn axis(dim: &Dim, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![dim.start];
    }
    let t = |i: usize| i as f64 / (points - 1) as f64;
    let mut values: Vec<f64> = (0..points)
        .map(|i| match dim.scale {
            Scale::Linear => dim.lower + t(i) * (dim.upper - dim.lower),
            Scale::Log2 => {
                let (lo, hi) = (dim.lower.log2(), dim.upper.log2());
                (lo + t(i) * (hi - lo)).exp2()
            }
        })
        .map(|v| v.clamp(dim.lower, dim.upper))
        .collect();
    if dim.integer {
        for v in values.iter_mut() {
            *v = v.round();
        }
        values.dedup();
    }
    values
}

pub fn grid_search<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    points_per_dim: &[usize],
) -> Result<GridResult> {
    grid_search_with_cap(objective, space, points_per_dim, DEFAULT_CELL_CAP)
}

/// Evaluates every cell of the lattice with `points_per_dim[i]` points on
/// dimension `i` (log2 dimensions spaced in log2, integer dimensions on
/// distinct integers, a single point placed at the start value). Cells are
/// ordered with the last dimension varying fastest.
pub fn grid_search_with_cap<O: Objective + ?Sized>(
    objective: &O,
    space: &SearchSpace,
    points_per_dim: &[usize],
    cell_cap: usize,
) -> Result<GridResult> {
    if points_per_dim.len() != space.len() {
        return Err(Error::InvalidParameter(format!(
            "{} grid sizes given for {} dimensions ({})",
            points_per_dim.len(),
            space.len(),
            space.names().join(", ")
        )));
    }
    if points_per_dim.contains(&0) {
        return Err(Error::InvalidParameter("grid sizes must be at least 1".into()));
    }
    let total = points_per_dim
        .iter()
        .try_fold(1usize, |acc, &p| acc.checked_mul(p))
        .filter(|&t| t <= cell_cap)
        .ok_or_else(|| {
            Error::ResourceCap(format!(
                "grid {points_per_dim:?} exceeds the cap of {cell_cap} cells"
            ))
        })?;

    let axes: Vec<Vec<f64>> = space
        .dims()
        .iter()
        .zip(points_per_dim)
        .map(|(d, &p)| axis(d, p))
        .collect();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    loop {
        points.push(idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect());
        let mut k = axes.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if k == usize::MAX {
            break;
        }
    }

    let cells: Vec<GridCell> = points
        .into_par_iter()
        .map(|point| {
            let start = Instant::now();
            let s = objective.evaluate(&point)?;
            Ok(GridCell {
                point,
                loss: if s.loss.is_nan() { f64::INFINITY } else { s.loss },
                ucl95: s.ucl95,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, c) in cells.iter().enumerate() {
        if c.loss < cells[best].loss {
            best = i;
        }
    }
    Ok(GridResult {
        names: space.names().iter().map(|s| s.to_string()).collect(),
        cells,
        best,
    })
}

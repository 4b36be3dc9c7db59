//! Weighted least-squares regression trees (CART) used as the weak learner
//! by both boosting families.

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

impl Tree {
    fn leaf(value: f64, n_features: usize) -> Tree {
        Tree {
            nodes: vec![Node::Leaf { value }],
            n_features,
        }
    }

    /// Index of the leaf reached by `row`.
    pub fn leaf_index(&self, row: ArrayView1<'_, f64>) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
                Node::Leaf { .. } => return at,
            }
        }
    }

    pub fn predict_row(&self, row: ArrayView1<'_, f64>) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }

    pub fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        check_width(rows.ncols(), self.n_features)?;
        Ok(rows.outer_iter().map(|r| self.predict_row(r)).collect())
    }

    /// Value stored at a leaf node; 0 for split nodes.
    pub fn leaf_value(&self, node: usize) -> f64 {
        match self.nodes[node] {
            Node::Leaf { value } => value,
            Node::Split { .. } => 0.0,
        }
    }

    pub fn set_leaf_value(&mut self, node: usize, value: f64) {
        if let Node::Leaf { value: v } = &mut self.nodes[node] {
            *v = value;
        }
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

pub(crate) fn check_width(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::InvalidParameter(format!(
            "rows have {got} columns, model expects {expected}"
        )));
    }
    Ok(())
}

/// Row indices sorted by each feature (ascending, ties by row index) with
/// the matching feature values. Computed once per training matrix and
/// shared by every tree grown on it.
pub struct SortedColumns {
    n_rows: usize,
    /// Feature `f` occupies `[f * n_rows, (f + 1) * n_rows)`.
    rows: Vec<u32>,
    values: Vec<f64>,
}

impl SortedColumns {
    pub fn new(x: ArrayView2<'_, f64>) -> SortedColumns {
        let n_rows = x.nrows();
        let mut rows = Vec::with_capacity(n_rows * x.ncols());
        let mut values = Vec::with_capacity(n_rows * x.ncols());
        for col in x.columns() {
            let mut idx: Vec<u32> = (0..n_rows as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
            values.extend(idx.iter().map(|&r| col[r as usize]));
            rows.extend(idx);
        }
        SortedColumns {
            n_rows,
            rows,
            values,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_obs: usize,
}

/// Growth state. Each node owns the range `[lo, hi)` of every feature's
/// segment in `rows`/`values`; a split partitions those ranges in place,
/// stably, so each segment stays sorted.
struct Grower<'a> {
    n_rows: usize,
    n_features: usize,
    rows: Vec<u32>,
    values: Vec<f64>,
    targets: &'a [f64],
    weights: &'a [f64],
    /// `weights[r] * targets[r]`.
    weighted: Vec<f64>,
    params: TreeParams,
    nodes: Vec<Node>,
    leaf_of_row: Vec<usize>,
    goes_left: Vec<bool>,
    scratch_rows: Vec<u32>,
    scratch_values: Vec<f64>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    position: usize,
    threshold: f64,
}

impl Grower<'_> {
    fn grow(&mut self, lo: usize, hi: usize, depth: usize) -> usize {
        let (mut w, mut s, mut stt) = (0.0, 0.0, 0.0);
        for &r in &self.rows[lo..hi] {
            let r = r as usize;
            let (wi, ti) = (self.weights[r], self.targets[r]);
            w += wi;
            s += wi * ti;
            stt += wi * ti * ti;
        }
        let count = hi - lo;
        let value = if w > 0.0 {
            s / w
        } else {
            self.rows[lo..hi]
                .iter()
                .map(|&r| self.targets[r as usize])
                .sum::<f64>()
                / count as f64
        };

        let split = if depth < self.params.max_depth && count >= 2 * self.params.min_obs && w > 0.0
        {
            self.best_split(lo, hi, w, s, stt)
        } else {
            None
        };

        let Some(split) = split else {
            let id = self.nodes.len();
            self.nodes.push(Node::Leaf { value });
            for &r in &self.rows[lo..hi] {
                self.leaf_of_row[r as usize] = id;
            }
            return id;
        };

        let n = self.n_rows;
        let base = split.feature * n;
        for (i, &r) in self.rows[base + lo..base + hi].iter().enumerate() {
            self.goes_left[r as usize] = i <= split.position;
        }
        let mid = lo + split.position + 1;
        for f in 0..self.n_features {
            let seg = f * n;
            let mut left = seg + lo;
            self.scratch_rows.clear();
            self.scratch_values.clear();
            for i in seg + lo..seg + hi {
                let r = self.rows[i];
                let v = self.values[i];
                if self.goes_left[r as usize] {
                    self.rows[left] = r;
                    self.values[left] = v;
                    left += 1;
                } else {
                    self.scratch_rows.push(r);
                    self.scratch_values.push(v);
                }
            }
            self.rows[left..seg + hi].copy_from_slice(&self.scratch_rows);
            self.values[left..seg + hi].copy_from_slice(&self.scratch_values);
        }

        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value });
        let left = self.grow(lo, mid, depth + 1);
        let right = self.grow(mid, hi, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    /// Best (feature, threshold) by weighted squared-error reduction. Scans
    /// features and thresholds in ascending order and keeps only strict
    /// improvements, so ties go to the lowest feature then lowest threshold.
    fn best_split(&self, lo: usize, hi: usize, w: f64, s: f64, stt: f64) -> Option<BestSplit> {
        let min_obs = self.params.min_obs.max(1);
        let count = hi - lo;
        let parent = s * s / w;
        let mut best: Option<BestSplit> = None;
        let mut best_score = f64::NEG_INFINITY;
        for feature in 0..self.n_features {
            let seg = feature * self.n_rows;
            let rows = &self.rows[seg + lo..seg + hi];
            let vals = &self.values[seg + lo..seg + hi];
            if vals[0] == vals[count - 1] {
                continue;
            }
            // Candidate split after position i needs min_obs rows per side.
            let first = min_obs - 1;
            let last = count - min_obs;
            let (mut wl, mut sl) = (0.0, 0.0);
            for &r in &rows[..first] {
                wl += self.weights[r as usize];
                sl += self.weighted[r as usize];
            }
            let candidates = rows[first..last].iter().zip(vals[first..=last].windows(2));
            for (offset, (&r, pair)) in candidates.enumerate() {
                let r = r as usize;
                wl += self.weights[r];
                sl += self.weighted[r];
                let (a, b) = (pair[0], pair[1]);
                if a >= b {
                    continue;
                }
                let wr = w - wl;
                if wl <= 0.0 || wr <= 0.0 {
                    continue;
                }
                let sr = s - sl;
                // sl^2/wl + sr^2/wr > best, without dividing per candidate
                let num = sl * sl * wr + sr * sr * wl;
                let den = wl * wr;
                if num > best_score * den {
                    best_score = num / den;
                    let mid = a + (b - a) / 2.0;
                    best = Some(BestSplit {
                        gain: best_score - parent,
                        feature,
                        position: first + offset,
                        threshold: if mid < b { mid } else { a },
                    });
                }
            }
        }
        best.filter(|b| b.gain > 1e-12 * stt.max(f64::MIN_POSITIVE))
    }
}

/// Grows a tree on presorted columns and also reports the leaf each
/// training row landed in.
pub fn grow_tree(
    x: ArrayView2<'_, f64>,
    sorted: &SortedColumns,
    targets: &[f64],
    weights: &[f64],
    params: TreeParams,
) -> (Tree, Vec<usize>) {
    let n = x.nrows();
    debug_assert_eq!(sorted.n_rows, n);
    let mut grower = Grower {
        n_rows: n,
        n_features: x.ncols(),
        rows: sorted.rows.clone(),
        values: sorted.values.clone(),
        targets,
        weights,
        weighted: weights.iter().zip(targets).map(|(w, t)| w * t).collect(),
        params,
        nodes: Vec::new(),
        leaf_of_row: vec![0; n],
        goes_left: vec![false; n],
        scratch_rows: Vec::with_capacity(n),
        scratch_values: Vec::with_capacity(n),
    };
    if x.ncols() == 0 {
        // Node row sets are read from the first segment.
        grower.rows = (0..n as u32).collect();
    }
    grower.grow(0, n, 0);
    let tree = Tree {
        nodes: grower.nodes,
        n_features: x.ncols(),
    };
    (tree, grower.leaf_of_row)
}

/// Greedy CART fit minimizing weighted squared error.
///
/// Growth stops at `max_depth`, when a node has fewer than `2 * min_obs`
/// rows, or when no split reduces the error. Every leaf keeps at least
/// `min_obs` rows. Thresholds are midpoints between consecutive distinct
/// values.
pub fn fit_tree(
    x: ArrayView2<'_, f64>,
    targets: &[f64],
    weights: &[f64],
    max_depth: usize,
    min_obs: usize,
) -> Result<Tree> {
    let n = x.nrows();
    if targets.len() != n || weights.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{n} rows but {} targets and {} weights",
            targets.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidParameter("weights must be non-negative".into()));
    }
    if n == 0 {
        return Ok(Tree::leaf(0.0, x.ncols()));
    }
    if x.ncols() == 0 {
        let w: f64 = weights.iter().sum();
        let value = if w > 0.0 {
            targets.iter().zip(weights).map(|(t, w)| t * w).sum::<f64>() / w
        } else {
            targets.iter().sum::<f64>() / n as f64
        };
        return Ok(Tree::leaf(value, 0));
    }
    let sorted = SortedColumns::new(x);
    let params = TreeParams { max_depth, min_obs };
    Ok(grow_tree(x, &sorted, targets, weights, params).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sse(tree: &Tree, x: ArrayView2<'_, f64>, y: &[f64]) -> f64 {
        tree.predict(x)
            .unwrap()
            .iter()
            .zip(y)
            .map(|(p, t)| (p - t).powi(2))
            .sum()
    }

    #[test]
    fn constant_targets_give_single_leaf() {
        let x = array![[1.0, 5.0], [2.0, 4.0], [3.0, 3.0], [4.0, 1.0]];
        let tree = fit_tree(x.view(), &[2.5; 4], &[1.0; 4], 3, 1).unwrap();
        assert_eq!(tree.nodes, vec![Node::Leaf { value: 2.5 }]);
    }

    #[test]
    fn perfect_stump() {
        let x = array![[1.0], [2.0], [3.0], [4.0]];
        let tree = fit_tree(x.view(), &[0.0, 0.0, 1.0, 1.0], &[1.0; 4], 1, 1).unwrap();
        match tree.nodes[0] {
            Node::Split { threshold, .. } => assert!(threshold > 2.0 && threshold <= 3.0),
            _ => panic!("expected a split"),
        }
        assert_eq!(tree.predict(x.view()).unwrap(), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(tree.depth(), 1);
    }

    #[test]
    fn ties_prefer_lowest_feature() {
        // Both columns separate the targets identically.
        let x = array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]];
        let tree = fit_tree(x.view(), &[0.0, 0.0, 1.0, 1.0], &[1.0; 4], 1, 1).unwrap();
        assert!(matches!(tree.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn weights_shift_leaf_means() {
        let x = array![[1.0], [1.0], [1.0]];
        let tree = fit_tree(x.view(), &[0.0, 1.0, 1.0], &[2.0, 1.0, 1.0], 2, 1).unwrap();
        assert_eq!(tree.predict_row(x.row(0)), 0.5);
    }

    #[test]
    fn width_mismatch_rejected() {
        let x = array![[1.0], [2.0]];
        let tree = fit_tree(x.view(), &[0.0, 1.0], &[1.0; 2], 1, 1).unwrap();
        assert!(tree.predict(array![[1.0, 2.0]].view()).is_err());
    }

    #[test]
    fn deeper_tree_fits_no_worse() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = Array2::from_shape_fn((50, 3), |_| rng.gen::<f64>());
        let y: Vec<f64> = (0..50).map(|i| x[[i, 0]] * 3.0 + (x[[i, 1]] * 6.0).sin()).collect();
        let w = vec![1.0; 50];
        let d1 = fit_tree(x.view(), &y, &w, 1, 1).unwrap();
        let d2 = fit_tree(x.view(), &y, &w, 2, 1).unwrap();
        assert!(sse(&d2, x.view(), &y) <= sse(&d1, x.view(), &y));
        assert!(sse(&d2, x.view(), &y) < sse(&d1, x.view(), &y));
    }

    proptest! {
        #[test]
        fn structure_respects_limits(seed: u64, depth in 1usize..6, min_obs in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 60;
            let x = Array2::from_shape_fn((n, 2), |_| (rng.gen::<f64>() * 10.0).floor());
            let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.1).collect();
            let sorted = SortedColumns::new(x.view());
            let (tree, leaf_of_row) = grow_tree(x.view(), &sorted, &y, &w, TreeParams { max_depth: depth, min_obs });
            prop_assert!(tree.depth() <= depth);
            let mut counts = std::collections::HashMap::new();
            for (i, &leaf) in leaf_of_row.iter().enumerate() {
                prop_assert_eq!(tree.leaf_index(x.row(i)), leaf);
                *counts.entry(leaf).or_insert(0usize) += 1;
            }
            prop_assert_eq!(counts.len(), tree.n_leaves());
            if tree.n_leaves() > 1 {
                prop_assert!(counts.values().all(|&c| c >= min_obs));
            }
        }

        #[test]
        fn monotone_feature_transform_preserves_predictions(seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 40;
            let x = Array2::from_shape_fn((n, 2), |_| rng.gen::<f64>() * 4.0 - 2.0);
            let y: Vec<f64> = (0..n).map(|i| x[[i, 0]].powi(2) + x[[i, 1]]).collect();
            let w = vec![1.0; n];
            let mut xt = x.clone();
            xt.column_mut(0).mapv_inplace(|v| v.powi(3) + 2.0 * v);
            let a = fit_tree(x.view(), &y, &w, 3, 2).unwrap();
            let b = fit_tree(xt.view(), &y, &w, 3, 2).unwrap();
            prop_assert_eq!(a.predict(x.view()).unwrap(), b.predict(xt.view()).unwrap());
        }
    }
}

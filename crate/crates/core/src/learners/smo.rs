//! Sequential minimal optimization for box-constrained SVM duals.
//!
//! Solves
//!
//! ```text
//! min_b  0.5 b'Qb + p'b   s.t.  y'b = const,  0 <= b_t <= C
//! ```
//!
//! with `Q_st = y_s y_t K(s mod n, t mod n)`, which covers both C-SVC
//! (`n` variables) and epsilon-SVR (`2n` variables). Each iteration picks
//! the maximal violating pair with second-order working-set selection and
//! solves the two-variable subproblem in closed form.

use std::collections::VecDeque;
use std::rc::Rc;

use ndarray::ArrayView2;

/// Degenerate curvature replacement for non-positive-definite pairs.
const TAU: f64 = 1e-12;

/// Kernel rows are cached on demand up to this many bytes.
const CACHE_BYTES: usize = 256 << 20;

pub(crate) fn rbf(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>, gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b.iter()).map(|(x, z)| (x - z) * (x - z)).sum();
    (-gamma * d2).exp()
}

/// RBF kernel rows over the training matrix, computed lazily and evicted
/// oldest-first once the byte budget is reached.
pub(crate) struct KernelCache<'a> {
    x: ArrayView2<'a, f64>,
    gamma: f64,
    rows: Vec<Option<Rc<[f64]>>>,
    order: VecDeque<usize>,
    max_rows: usize,
}

impl<'a> KernelCache<'a> {
    pub(crate) fn new(x: ArrayView2<'a, f64>, gamma: f64) -> Self {
        let n = x.nrows();
        let max_rows = (CACHE_BYTES / (8 * n.max(1))).max(2);
        KernelCache {
            x,
            gamma,
            rows: vec![None; n],
            order: VecDeque::new(),
            max_rows,
        }
    }

    pub(crate) fn row(&mut self, i: usize) -> Rc<[f64]> {
        if let Some(r) = &self.rows[i] {
            return Rc::clone(r);
        }
        let xi = self.x.row(i);
        let row: Rc<[f64]> = self
            .x
            .outer_iter()
            .map(|xj| rbf(xi, xj, self.gamma))
            .collect();
        if self.order.len() >= self.max_rows {
            if let Some(old) = self.order.pop_front() {
                self.rows[old] = None;
            }
        }
        self.rows[i] = Some(Rc::clone(&row));
        self.order.push_back(i);
        row
    }
}

pub(crate) struct Problem<'p> {
    /// Linear term, one entry per dual variable.
    pub linear: &'p [f64],
    /// +1 / -1 per dual variable.
    pub y: &'p [f64],
    pub cost: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    /// Offset such that the decision value is `sum(coef K) - rho`.
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn is_upper(a: f64, c: f64) -> bool {
    a >= c
}

fn is_lower(a: f64) -> bool {
    a <= 0.0
}

pub(crate) fn solve(cache: &mut KernelCache<'_>, problem: &Problem<'_>) -> Solution {
    let l = problem.linear.len();
    let n = cache.rows.len();
    let y = problem.y;
    let c = problem.cost;
    let mut alpha = vec![0.0; l];
    let mut grad: Vec<f64> = problem.linear.to_vec();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < problem.max_iter {
        // i: maximal -y_t G_t over I_up.
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..l {
            let up = if y[t] > 0.0 {
                !is_upper(alpha[t], c)
            } else {
                !is_lower(alpha[t])
            };
            if up && -y[t] * grad[t] > g_max {
                g_max = -y[t] * grad[t];
                i_sel = t;
            }
        }

        // j: second-order selection over I_low.
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut obj_min = f64::INFINITY;
        let k_i = if i_sel != usize::MAX {
            Some(cache.row(i_sel % n))
        } else {
            None
        };
        for t in 0..l {
            let low = if y[t] > 0.0 {
                !is_lower(alpha[t])
            } else {
                !is_upper(alpha[t], c)
            };
            if !low {
                continue;
            }
            let yg = y[t] * grad[t];
            if yg > g_max2 {
                g_max2 = yg;
            }
            if let Some(k_i) = &k_i {
                let b = g_max + yg;
                if b > 0.0 {
                    // RBF diagonal is 1, so K_ii + K_tt - 2 K_it.
                    let a = 2.0 - 2.0 * k_i[t % n];
                    let a = if a > 0.0 { a } else { TAU };
                    let obj = -(b * b) / a;
                    if obj < obj_min {
                        obj_min = obj;
                        j_sel = t;
                    }
                }
            }
        }

        if g_max + g_max2 < problem.tolerance || i_sel == usize::MAX || j_sel == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let k_i = k_i.expect("i selected");
        let k_j = cache.row(j % n);
        let k_ij = k_i[j % n];
        let (old_ai, old_aj) = (alpha[i], alpha[j]);

        // Curvature of the pair subproblem; the same for both sign cases.
        let quad = {
            let q = 2.0 - 2.0 * k_ij;
            if q > 0.0 {
                q
            } else {
                TAU
            }
        };
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_ai = alpha[i] - old_ai;
        let d_aj = alpha[j] - old_aj;
        for t in 0..l {
            let m = t % n;
            grad[t] += y[t] * (y[i] * k_i[m] * d_ai + y[j] * k_j[m] * d_aj);
        }
    }

    let rho = compute_rho(&alpha, &grad, y, c);
    Solution {
        alpha,
        rho,
        iterations,
        converged,
    }
}

fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut n_free = 0usize;
    let mut sum_free = 0.0;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if is_upper(alpha[t], c) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if is_lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

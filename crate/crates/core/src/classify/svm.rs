//! One-vs-rest linear SVM.
//!
//! Each binary machine minimizes
//! `1/2 |w|^2 + C * sum_i max(0, 1 - y_i (w . x_i + b))`
//! with an SMO solver on the dual (second-order working-set selection over
//! a precomputed Gram matrix). After every epoch of `n` pair updates the
//! primal objective is evaluated, with `b` minimized exactly for the current
//! `w`. An epoch is accepted only if it does not increase the objective;
//! the returned machine is the last accepted iterate.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::SparseVector;
use crate::error::{Error, Result};
use crate::num::Real;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams<T> {
    /// Hinge-loss trade-off.
    pub c: T,
    pub max_epochs: usize,
    /// Stop once an accepted epoch improves the objective by less than this
    /// fraction.
    pub rel_tolerance: T,
    /// Stop once the maximal KKT violation falls below this.
    pub kkt_tolerance: T,
}

impl<T: Real> Default for SvmParams<T> {
    fn default() -> Self {
        Self {
            c: T::one(),
            max_epochs: 1000,
            rel_tolerance: T::from_f64_lossy(1e-6),
            kkt_tolerance: T::from_f64_lossy(1e-3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord<T> {
    pub objective: T,
    pub accepted: bool,
}

/// A single `w . x + b` separator.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm<T> {
    pub weights: Vec<T>,
    pub bias: T,
    /// Objective after each epoch; entry 0 is the all-zero starting point.
    pub trace: Vec<EpochRecord<T>>,
    pub converged: bool,
}

impl<T: Real> BinarySvm<T> {
    pub fn decision(&self, x: &SparseVector<T>) -> T {
        x.dot_dense(&self.weights) + self.bias
    }

    pub fn accepted_objectives(&self) -> Vec<T> {
        self.trace
            .iter()
            .filter(|r| r.accepted)
            .map(|r| r.objective)
            .collect()
    }

    pub fn final_objective(&self) -> T {
        *self
            .accepted_objectives()
            .last()
            .expect("initial point is accepted")
    }
}

/// Primal objective of `(w, b)` on a labelled set (`labels[i]` true means +1).
pub fn primal_objective<T: Real>(
    weights: &[T],
    bias: T,
    rows: &[&SparseVector<T>],
    labels: &[bool],
    c: T,
) -> T {
    let half = T::from_f64_lossy(0.5);
    let reg = half * weights.iter().map(|&w| w * w).sum::<T>();
    let loss: T = rows
        .iter()
        .zip(labels)
        .map(|(x, &pos)| {
            let y = if pos { T::one() } else { -T::one() };
            (T::one() - y * (x.dot_dense(weights) + bias)).max(T::zero())
        })
        .sum();
    reg + c * loss
}

/// Bias minimizing `sum_i hinge_i(b)` for fixed scores `f_i = w . x_i`.
/// The loss is convex piecewise linear with kinks at `y_i - f_i`; its slope
/// is `-P` left of all kinks and rises by one at each, so the minimum is
/// reached at the `P`-th smallest kink (`P` = number of positives). When the
/// slope is exactly zero up to the next kink the midpoint is taken.
fn optimal_bias<T: Real>(scores: &[T], labels: &[bool]) -> T {
    let positives = labels.iter().filter(|&&p| p).count();
    let mut kinks: Vec<T> = scores
        .iter()
        .zip(labels)
        .map(|(&f, &pos)| if pos { T::one() - f } else { -T::one() - f })
        .collect();
    kinks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    match positives {
        0 => kinks[0] - T::one(),
        p if p == kinks.len() => kinks[p - 1] + T::one(),
        p => (kinks[p - 1] + kinks[p]) * T::from_f64_lossy(0.5),
    }
}

struct Smo<'a, T> {
    gram: Vec<T>,
    y: Vec<T>,
    labels: &'a [bool],
    alpha: Vec<T>,
    grad: Vec<T>,
    c: T,
    n: usize,
}

impl<'a, T: Real> Smo<'a, T> {
    fn new(rows: &[&SparseVector<T>], labels: &'a [bool], c: T) -> Self {
        let n = rows.len();
        let mut gram = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let k = rows[i].dot(rows[j]);
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
        }
        Self {
            gram,
            y: labels
                .iter()
                .map(|&p| if p { T::one() } else { -T::one() })
                .collect(),
            labels,
            alpha: vec![T::zero(); n],
            grad: vec![-T::one(); n],
            c,
            n,
        }
    }

    fn q(&self, i: usize, j: usize) -> T {
        self.y[i] * self.y[j] * self.gram[i * self.n + j]
    }

    fn is_upper(&self, i: usize) -> bool {
        self.alpha[i] >= self.c
    }

    fn is_lower(&self, i: usize) -> bool {
        self.alpha[i] <= T::zero()
    }

    /// Second-order working-set selection. Returns `None` when the maximal
    /// violation is below `eps`.
    fn select(&self, eps: T) -> Option<(usize, usize)> {
        let tau = T::from_f64_lossy(TAU);
        let mut gmax = T::neg_infinity();
        let mut gmax_idx = None;
        for t in 0..self.n {
            let pos = self.y[t] > T::zero();
            if pos && !self.is_upper(t) {
                if -self.grad[t] >= gmax {
                    gmax = -self.grad[t];
                    gmax_idx = Some(t);
                }
            } else if !pos && !self.is_lower(t) && self.grad[t] >= gmax {
                gmax = self.grad[t];
                gmax_idx = Some(t);
            }
        }
        let i = gmax_idx?;

        let mut gmax2 = T::neg_infinity();
        let mut gmin_idx = None;
        let mut obj_diff_min = T::infinity();
        let qd_i = self.gram[i * self.n + i];
        for j in 0..self.n {
            let grad_diff = if self.y[j] > T::zero() {
                if self.is_lower(j) {
                    continue;
                }
                gmax2 = gmax2.max(self.grad[j]);
                gmax + self.grad[j]
            } else {
                if self.is_upper(j) {
                    continue;
                }
                gmax2 = gmax2.max(-self.grad[j]);
                gmax - self.grad[j]
            };
            if grad_diff > T::zero() {
                // curvature along the pair direction: K_ii + K_jj - 2 K_ij
                let quad =
                    qd_i + self.gram[j * self.n + j] - T::from_count(2) * self.gram[i * self.n + j];
                let quad = if quad > T::zero() { quad } else { tau };
                let obj_diff = -(grad_diff * grad_diff) / quad;
                if obj_diff <= obj_diff_min {
                    obj_diff_min = obj_diff;
                    gmin_idx = Some(j);
                }
            }
        }
        if gmax + gmax2 < eps {
            return None;
        }
        gmin_idx.map(|j| (i, j))
    }

    fn max_violation(&self) -> T {
        let mut up = T::neg_infinity();
        let mut low = T::neg_infinity();
        for t in 0..self.n {
            let pos = self.y[t] > T::zero();
            if (pos && !self.is_upper(t)) || (!pos && !self.is_lower(t)) {
                up = up.max(-self.y[t] * self.grad[t]);
            }
            if (pos && !self.is_lower(t)) || (!pos && !self.is_upper(t)) {
                low = low.max(self.y[t] * self.grad[t]);
            }
        }
        up + low
    }

    fn update(&mut self, i: usize, j: usize) {
        let tau = T::from_f64_lossy(TAU);
        let c = self.c;
        let old_i = self.alpha[i];
        let old_j = self.alpha[j];
        let q_ij = self.q(i, j);
        let qd_i = self.gram[i * self.n + i];
        let qd_j = self.gram[j * self.n + j];

        if self.y[i] != self.y[j] {
            let mut quad = qd_i + qd_j + T::from_count(2) * q_ij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = self.alpha[i] - self.alpha[j];
            self.alpha[i] += delta;
            self.alpha[j] += delta;
            if diff > T::zero() {
                if self.alpha[j] < T::zero() {
                    self.alpha[j] = T::zero();
                    self.alpha[i] = diff;
                }
            } else if self.alpha[i] < T::zero() {
                self.alpha[i] = T::zero();
                self.alpha[j] = -diff;
            }
            if diff > T::zero() {
                if self.alpha[i] > c {
                    self.alpha[i] = c;
                    self.alpha[j] = c - diff;
                }
            } else if self.alpha[j] > c {
                self.alpha[j] = c;
                self.alpha[i] = c + diff;
            }
        } else {
            let mut quad = qd_i + qd_j - T::from_count(2) * q_ij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = self.alpha[i] + self.alpha[j];
            self.alpha[i] -= delta;
            self.alpha[j] += delta;
            if sum > c {
                if self.alpha[i] > c {
                    self.alpha[i] = c;
                    self.alpha[j] = sum - c;
                }
            } else if self.alpha[j] < T::zero() {
                self.alpha[j] = T::zero();
                self.alpha[i] = sum;
            }
            if sum > c {
                if self.alpha[j] > c {
                    self.alpha[j] = c;
                    self.alpha[i] = sum - c;
                }
            } else if self.alpha[i] < T::zero() {
                self.alpha[i] = T::zero();
                self.alpha[j] = sum;
            }
        }

        let d_i = self.alpha[i] - old_i;
        let d_j = self.alpha[j] - old_j;
        for k in 0..self.n {
            let g = self.q(i, k) * d_i + self.q(j, k) * d_j;
            self.grad[k] += g;
        }
    }

    /// `w . x_k` for every training row, via the Gram matrix.
    fn scores(&self) -> Vec<T> {
        (0..self.n)
            .map(|k| {
                (0..self.n)
                    .filter(|&j| self.alpha[j] > T::zero())
                    .map(|j| self.alpha[j] * self.y[j] * self.gram[j * self.n + k])
                    .sum()
            })
            .collect()
    }

    /// Primal objective of the current `alpha` with the exact best bias.
    fn primal(&self) -> (T, T) {
        let scores = self.scores();
        let bias = optimal_bias(&scores, self.labels);
        let w_sq: T = (0..self.n)
            .map(|k| self.alpha[k] * self.y[k] * scores[k])
            .sum();
        let loss: T = (0..self.n)
            .map(|k| (T::one() - self.y[k] * (scores[k] + bias)).max(T::zero()))
            .sum();
        (T::from_f64_lossy(0.5) * w_sq + self.c * loss, bias)
    }
}

/// Trains one binary machine. `labels[i]` true marks the positive class;
/// both classes must be present.
pub fn train_binary<T: Real>(
    rows: &[&SparseVector<T>],
    labels: &[bool],
    dim: usize,
    params: &SvmParams<T>,
) -> BinarySvm<T> {
    assert_eq!(rows.len(), labels.len());
    let mut smo = Smo::new(rows, labels, params.c);
    let n = rows.len().max(1);

    let (obj0, bias0) = smo.primal();
    let mut trace = vec![EpochRecord {
        objective: obj0,
        accepted: true,
    }];
    let mut best_alpha = smo.alpha.clone();
    let mut best_bias = bias0;
    let mut best_obj = obj0;
    let mut converged = false;

    for _ in 0..params.max_epochs {
        let mut updates = 0;
        while updates < n {
            match smo.select(params.kkt_tolerance) {
                Some((i, j)) => smo.update(i, j),
                None => {
                    converged = true;
                    break;
                }
            }
            updates += 1;
        }
        let (obj, bias) = smo.primal();
        let accepted = obj <= best_obj;
        trace.push(EpochRecord {
            objective: obj,
            accepted,
        });
        let mut small_step = false;
        if accepted {
            let scale = best_obj.abs().max(T::min_positive_value());
            small_step = (best_obj - obj) / scale < params.rel_tolerance;
            best_alpha.clone_from(&smo.alpha);
            best_bias = bias;
            best_obj = obj;
        }
        if converged || (small_step && smo.max_violation() < params.kkt_tolerance.sqrt()) {
            break;
        }
    }

    let mut weights = vec![T::zero(); dim];
    for (k, row) in rows.iter().enumerate() {
        if best_alpha[k] > T::zero() {
            row.axpy_into(best_alpha[k] * smo.y[k], &mut weights);
        }
    }
    BinarySvm {
        weights,
        bias: best_bias,
        trace,
        converged,
    }
}

/// Per-class linear decision functions; `classes` is sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel<T> {
    pub classes: Vec<String>,
    pub dim: usize,
    pub c: T,
    /// One machine per class, empty for a degenerate single-class model.
    pub machines: Vec<BinarySvm<T>>,
}

impl<T: Real> SvmModel<T> {
    /// True when training saw a single class and every prediction is that
    /// class.
    pub fn is_degenerate(&self) -> bool {
        self.machines.is_empty()
    }

    pub fn decision_values(&self, x: &SparseVector<T>) -> Vec<T> {
        if self.is_degenerate() {
            return vec![T::zero(); self.classes.len()];
        }
        self.machines.iter().map(|m| m.decision(x)).collect()
    }

    /// Index of the class with the largest decision value; ties go to the
    /// alphabetically first class.
    pub fn predict_index(&self, x: &SparseVector<T>) -> usize {
        argmax_first(&self.decision_values(x))
    }

    pub fn predict(&self, x: &SparseVector<T>) -> &str {
        &self.classes[self.predict_index(x)]
    }

    /// Every `(w_c, b_c)` multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        for m in &mut out.machines {
            for w in &mut m.weights {
                *w *= factor;
            }
            m.bias *= factor;
        }
        out
    }
}

pub fn argmax_first<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// One-vs-rest training on the given rows. Classes are the distinct labels
/// sorted; with a single class the model is degenerate (constant).
pub fn train_rows<T: Real>(
    rows: &[&SparseVector<T>],
    labels: &[&str],
    dim: usize,
    params: &SvmParams<T>,
) -> Result<SvmModel<T>> {
    if rows.is_empty() {
        return Err(Error::Data("cannot train on an empty training set".into()));
    }
    if rows.len() != labels.len() {
        return Err(Error::Data(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if !params.c.is_finite() || params.c <= T::zero() {
        return Err(Error::Config(format!("C must be > 0, got {}", params.c)));
    }
    let mut classes: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    classes.sort();
    classes.dedup();

    if classes.len() == 1 {
        log::warn!(
            "training set has a single class `{}`; model predicts it for every input",
            classes[0]
        );
        return Ok(SvmModel {
            classes,
            dim,
            c: params.c,
            machines: Vec::new(),
        });
    }

    let machines = classes
        .par_iter()
        .map(|class| {
            let y: Vec<bool> = labels.iter().map(|l| l == class).collect();
            train_binary(rows, &y, dim, params)
        })
        .collect();
    Ok(SvmModel {
        classes,
        dim,
        c: params.c,
        machines,
    })
}

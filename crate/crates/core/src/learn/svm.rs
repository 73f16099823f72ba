//! Soft-margin kernel SVM.
//!
//! The binary dual
//!
//! ```text
//! min  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! is solved by sequential minimal optimization: each step picks the most
//! violating pair (second-order selection) and solves the two-variable
//! subproblem in closed form, until the maximal KKT violation drops below
//! `tol`. Multiclass problems use one machine per class against the rest.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use super::codec::{self, Reader, Writer};
use super::kernel::KernelSpec;
use super::Prediction;
use crate::dataset::{fit_standardize, Dataset, FeatureId, StandardizeModel, TrafficClass};
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;
/// Bytes of kernel columns kept per solver.
const CACHE_BYTES: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub c: f64,
    pub kernel: KernelSpec,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            kernel: KernelSpec::default(),
            tol: 1e-3,
            max_iter: 10_000_000,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        self.kernel.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmBinaryModel {
    support: Vec<Vec<f64>>,
    labels: Vec<f64>,
    alpha: Vec<f64>,
    bias: f64,
    kernel: KernelSpec,
}

impl SvmBinaryModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(self.alpha.iter().zip(&self.labels))
            .map(|(sv, (a, y))| a * y * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    /// Primal weight vector `sum a_i y_i x_i`; meaningful for the linear
    /// kernel only.
    pub fn linear_weights(&self) -> Vec<f64> {
        let d = self.support.first().map_or(0, Vec::len);
        let mut w = vec![0.0; d];
        for (sv, (a, y)) in self.support.iter().zip(self.alpha.iter().zip(&self.labels)) {
            for (wj, xj) in w.iter_mut().zip(sv) {
                *wj += a * y * xj;
            }
        }
        w
    }

    fn write(&self, w: &mut Writer, i: usize) {
        w.line(&format!("machine{i}"), [self.support.len()]);
        w.floats("bias", [&self.bias]);
        w.floats("alpha", &self.alpha);
        w.floats("y", &self.labels);
        for sv in &self.support {
            w.floats("sv", sv);
        }
    }

    fn read(r: &mut Reader, i: usize, width: usize, kernel: KernelSpec) -> Result<SvmBinaryModel> {
        let n: usize = r.single(&format!("machine{i}"))?;
        let bias = r.single("bias")?;
        let alpha = r.floats("alpha", n)?;
        let labels = r.floats("y", n)?;
        let support = (0..n).map(|_| r.floats("sv", width)).collect::<Result<Vec<_>>>()?;
        Ok(SvmBinaryModel {
            support,
            labels,
            alpha,
            bias,
            kernel,
        })
    }
}

struct KernelCache<'a> {
    points: &'a [Vec<f64>],
    kernel: KernelSpec,
    columns: HashMap<usize, Rc<Vec<f64>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    fn new(points: &'a [Vec<f64>], kernel: KernelSpec) -> Self {
        let capacity = (CACHE_BYTES / (8 * points.len().max(1))).max(2);
        KernelCache {
            points,
            kernel,
            columns: HashMap::new(),
            order: VecDeque::new(),
            capacity,
        }
    }

    fn column(&mut self, i: usize) -> Rc<Vec<f64>> {
        if let Some(c) = self.columns.get(&i) {
            return Rc::clone(c);
        }
        if self.columns.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.columns.remove(&old);
            }
        }
        let xi = &self.points[i];
        let col = Rc::new(
            self.points
                .iter()
                .map(|xj| self.kernel.eval_unchecked(xi, xj))
                .collect::<Vec<_>>(),
        );
        self.columns.insert(i, Rc::clone(&col));
        self.order.push_back(i);
        col
    }
}

/// Trains one binary machine; `labels` must be `-1.0` or `+1.0`.
pub fn svm_fit_binary(points: &[Vec<f64>], labels: &[f64], cfg: &SvmConfig) -> Result<SvmBinaryModel> {
    cfg.validate()?;
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch {
            actual: labels.len(),
            predicted: points.len(),
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch(d, p.len()));
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::InvalidConfig("SVM labels must be -1 or +1".into()));
    }
    if !(labels.contains(&1.0) && labels.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }

    let n = points.len();
    let c = cfg.c;
    let y = labels;
    let diag: Vec<f64> = points
        .iter()
        .map(|x| cfg.kernel.eval_unchecked(x, x))
        .collect();
    let mut cache = KernelCache::new(points, cfg.kernel);
    let mut alpha = vec![0.0; n];
    // gradient of the dual objective: Q a - e
    let mut grad = vec![-1.0; n];

    let at_upper = |a: f64| a >= c;
    let at_lower = |a: f64| a <= 0.0;

    let mut iter = 0;
    loop {
        // i: maximal violator among I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if y[t] > 0.0 {
                if !at_upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i = t;
                }
            } else if !at_lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                i = t;
            }
        }
        if i == usize::MAX {
            break;
        }
        let ki = cache.column(i);

        // j: second-order choice among I_low
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut j = usize::MAX;
        for t in 0..n {
            let (g, movable) = if y[t] > 0.0 {
                (grad[t], !at_lower(alpha[t]))
            } else {
                (-grad[t], !at_upper(alpha[t]))
            };
            if !movable {
                continue;
            }
            gmax2 = gmax2.max(g);
            let grad_diff = gmax + g;
            if grad_diff > 0.0 {
                let quad = diag[i] + diag[t] - 2.0 * ki[t];
                let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                if obj <= best_obj {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < cfg.tol || j == usize::MAX {
            break;
        }
        iter += 1;
        if iter > cfg.max_iter {
            return Err(Error::NoConvergence(cfg.max_iter));
        }

        let kj = cache.column(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = ki[j];
        if y[i] != y[j] {
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
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
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
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

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }

    // bias from free vectors, or the midpoint of the feasible interval
    let (mut ub, mut lb, mut sum_free, mut n_free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if at_upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower(alpha[t]) {
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
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    let keep: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    Ok(SvmBinaryModel {
        support: keep.iter().map(|&t| points[t].clone()).collect(),
        labels: keep.iter().map(|&t| y[t]).collect(),
        alpha: keep.iter().map(|&t| alpha[t]).collect(),
        bias: -rho,
        kernel: cfg.kernel,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmMultiModel {
    classes: Vec<TrafficClass>,
    schema: Vec<FeatureId>,
    standardize: StandardizeModel,
    c: f64,
    kernel: KernelSpec,
    machines: Vec<SvmBinaryModel>,
}

/// One machine per class present in `ds`, trained on standardized inputs.
pub fn svm_fit_multi(ds: &Dataset, cfg: &SvmConfig) -> Result<SvmMultiModel> {
    cfg.validate()?;
    ds.require_non_empty()?;
    let classes = ds.census().present();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let standardize = fit_standardize(ds)?;
    let points: Vec<Vec<f64>> = ds
        .records()
        .iter()
        .map(|r| standardize.transform(r.features()))
        .collect();
    let machines = classes
        .iter()
        .map(|&c| {
            let y: Vec<f64> = ds
                .records()
                .iter()
                .map(|r| if r.label() == c { 1.0 } else { -1.0 })
                .collect();
            svm_fit_binary(&points, &y, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SvmMultiModel {
        classes,
        schema: ds.schema().to_vec(),
        standardize,
        c: cfg.c,
        kernel: cfg.kernel,
        machines,
    })
}

impl SvmMultiModel {
    pub fn classes(&self) -> &[TrafficClass] {
        &self.classes
    }

    pub fn schema(&self) -> &[FeatureId] {
        &self.schema
    }

    pub fn machines(&self) -> &[SvmBinaryModel] {
        &self.machines
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn decisions(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.schema.len() {
            return Err(Error::WidthMismatch {
                expected: self.schema.len(),
                got: features.len(),
            });
        }
        let x = self.standardize.transform(features);
        Ok(self.machines.iter().map(|m| m.decision(&x)).collect())
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        let d = self.decisions(features)?;
        Ok(Prediction::argmax(&self.classes, d))
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        codec::header(w, "svm");
        w.classes(&self.classes);
        w.schema(&self.schema);
        w.floats("mean", self.standardize.mean());
        w.floats("std", self.standardize.std());
        w.floats("c", [&self.c]);
        w.line("kernel", [self.kernel]);
        for (i, m) in self.machines.iter().enumerate() {
            m.write(w, i);
        }
        w.line::<&str>("end", []);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<SvmMultiModel> {
        let classes = r.classes()?;
        let schema = r.schema()?;
        let mean = r.floats("mean", schema.len())?;
        let std = r.floats("std", schema.len())?;
        let c = r.single("c")?;
        let kernel = KernelSpec::parse(&r.single::<String>("kernel")?)?;
        let machines = (0..classes.len())
            .map(|i| SvmBinaryModel::read(r, i, schema.len(), kernel))
            .collect::<Result<Vec<_>>>()?;
        r.end()?;
        Ok(SvmMultiModel {
            classes,
            schema,
            standardize: StandardizeModel::from_parts(mean, std),
            c,
            kernel,
            machines,
        })
    }
}

//! Bayes classifier with the naive structure (class -> each feature) over
//! equal-frequency bins.
//!
//! `P(h | D) ∝ P(h) * prod_f P(v_f | h)`, with
//! `P(v | h) = (count(v, h) + alpha) / (count(h) + alpha * bins)`.

use super::codec::{self, Reader, Writer};
use super::Prediction;
use crate::dataset::{apply_bins, fit_bins, BinningModel, Dataset, Discretized, FeatureId, TrafficClass, DEFAULT_BINS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesConfig {
    pub alpha: f64,
    pub bins: usize,
}

impl Default for BayesConfig {
    fn default() -> Self {
        BayesConfig {
            alpha: 0.5,
            bins: DEFAULT_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesModel {
    classes: Vec<TrafficClass>,
    alpha: f64,
    prior: Vec<f64>,
    /// `cond[f][bin][class]`
    cond: Vec<Vec<Vec<f64>>>,
    binning: BinningModel,
}

/// Priors and smoothed conditional tables estimated from bin codes.
fn estimate(
    d: &Discretized,
    classes: &[TrafficClass],
    alpha: f64,
) -> (Vec<f64>, Vec<Vec<Vec<f64>>>) {
    let class_slot = |c: TrafficClass| classes.iter().position(|x| *x == c).unwrap();
    let k = classes.len();
    let mut class_count = vec![0usize; k];
    for l in d.labels() {
        class_count[class_slot(*l)] += 1;
    }
    let n = d.len() as f64;
    let prior = class_count.iter().map(|&c| c as f64 / n).collect();

    let cond = d
        .bin_counts()
        .iter()
        .enumerate()
        .map(|(j, &bins)| {
            let mut counts = vec![vec![0usize; k]; bins];
            for (row, l) in d.codes().iter().zip(d.labels()) {
                counts[row[j]][class_slot(*l)] += 1;
            }
            counts
                .iter()
                .map(|per_class| {
                    per_class
                        .iter()
                        .zip(&class_count)
                        .map(|(&c, &total)| {
                            (c as f64 + alpha) / (total as f64 + alpha * bins as f64)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (prior, cond)
}

pub fn bayes_fit(ds: &Dataset, cfg: &BayesConfig) -> Result<BayesModel> {
    ds.require_non_empty()?;
    if !(cfg.alpha.is_finite() && cfg.alpha > 0.0) {
        return Err(Error::InvalidSmoothing(cfg.alpha));
    }
    let binning = fit_bins(ds, cfg.bins)?;
    let d = apply_bins(&binning, ds)?;
    let classes = ds.census().present();
    let (prior, cond) = estimate(&d, &classes, cfg.alpha);
    Ok(BayesModel {
        classes,
        alpha: cfg.alpha,
        prior,
        cond,
        binning,
    })
}

impl BayesModel {
    pub fn classes(&self) -> &[TrafficClass] {
        &self.classes
    }

    pub fn schema(&self) -> &[FeatureId] {
        self.binning.schema()
    }

    pub fn priors(&self) -> &[f64] {
        &self.prior
    }

    /// `P(bin | class)` for feature column `j`.
    pub fn conditional(&self, j: usize, bin: usize, class: TrafficClass) -> Option<f64> {
        let c = self.classes.iter().position(|x| *x == class)?;
        self.cond.get(j)?.get(bin).map(|row| row[c])
    }

    pub fn binning(&self) -> &BinningModel {
        &self.binning
    }

    /// Unnormalized log posterior per trained class.
    pub fn log_scores(&self, features: &[f64]) -> Result<Vec<f64>> {
        let bins = self.binning.bin_record(features)?;
        Ok((0..self.classes.len())
            .map(|c| {
                self.prior[c].ln()
                    + bins
                        .iter()
                        .enumerate()
                        .map(|(j, &b)| self.cond[j][b][c].ln())
                        .sum::<f64>()
            })
            .collect())
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        let scores = self.log_scores(features)?;
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let z: f64 = unnorm.iter().sum();
        let posterior: Vec<f64> = unnorm.iter().map(|u| u / z).collect();
        Ok(Prediction::argmax(&self.classes, posterior))
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        codec::header(w, "bayes");
        w.classes(&self.classes);
        w.schema(self.binning.schema());
        w.floats("alpha", [&self.alpha]);
        w.line("bins", [self.binning.requested_bins()]);
        for j in 0..self.cond.len() {
            w.floats(&format!("cuts{j}"), self.binning.cuts(j));
        }
        w.floats("prior", &self.prior);
        for (j, table) in self.cond.iter().enumerate() {
            for (b, row) in table.iter().enumerate() {
                w.floats(&format!("cond{j}.{b}"), row);
            }
        }
        w.line::<&str>("end", []);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<BayesModel> {
        let classes = r.classes()?;
        let schema = r.schema()?;
        let alpha = r.single("alpha")?;
        let bins = r.single("bins")?;
        let cuts = (0..schema.len())
            .map(|j| r.parsed::<f64>(&format!("cuts{j}")))
            .collect::<Result<Vec<_>>>()?;
        let prior = r.floats("prior", classes.len())?;
        let mut cond = Vec::with_capacity(schema.len());
        for (j, c) in cuts.iter().enumerate() {
            let table = (0..=c.len())
                .map(|b| r.floats(&format!("cond{j}.{b}"), classes.len()))
                .collect::<Result<Vec<_>>>()?;
            cond.push(table);
        }
        r.end()?;
        Ok(BayesModel {
            classes,
            alpha,
            prior,
            cond,
            binning: BinningModel::from_parts(bins, schema, cuts),
        })
    }
}

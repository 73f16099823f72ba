//! Transforms fitted on a training split and applied to any split with the
//! same schema.

use super::schema::{FeatureId, TrafficClass};
use super::{Dataset, MibRecord};
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 10;

/// Equal-frequency cut points per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningModel {
    bins: usize,
    schema: Vec<FeatureId>,
    cuts: Vec<Vec<f64>>,
}

impl BinningModel {
    pub fn requested_bins(&self) -> usize {
        self.bins
    }

    pub fn schema(&self) -> &[FeatureId] {
        &self.schema
    }

    /// Strictly increasing cut points of feature column `j`.
    pub fn cuts(&self, j: usize) -> &[f64] {
        &self.cuts[j]
    }

    /// Number of bins actually used by column `j`; fewer than requested when
    /// the training values have heavy ties.
    pub fn bin_count(&self, j: usize) -> usize {
        self.cuts[j].len() + 1
    }

    pub fn bin_counts(&self) -> Vec<usize> {
        (0..self.cuts.len()).map(|j| self.bin_count(j)).collect()
    }

    pub fn bin_value(&self, j: usize, v: f64) -> usize {
        self.cuts[j].partition_point(|&c| c < v)
    }

    pub fn bin_record(&self, features: &[f64]) -> Result<Vec<usize>> {
        if features.len() != self.cuts.len() {
            return Err(Error::WidthMismatch {
                expected: self.cuts.len(),
                got: features.len(),
            });
        }
        Ok(features
            .iter()
            .enumerate()
            .map(|(j, &v)| self.bin_value(j, v))
            .collect())
    }

    pub(crate) fn from_parts(bins: usize, schema: Vec<FeatureId>, cuts: Vec<Vec<f64>>) -> Self {
        BinningModel { bins, schema, cuts }
    }
}

fn equal_frequency_cuts(mut values: Vec<f64>, bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let is_boundary = |p: usize| p >= 1 && p < n && values[p - 1] < values[p];
    let mut cuts = Vec::with_capacity(bins - 1);
    for j in 1..bins {
        let target = (j * n + bins / 2) / bins;
        // nearest position where the sorted values actually change
        let pos = (0..n).find_map(|d| {
            if target >= d && is_boundary(target - d) {
                Some(target - d)
            } else if is_boundary(target + d) {
                Some(target + d)
            } else {
                None
            }
        });
        if let Some(p) = pos {
            let (lo, hi) = (values[p - 1], values[p]);
            cuts.push(lo + (hi - lo) / 2.0);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

pub fn fit_bins(ds: &Dataset, bins: usize) -> Result<BinningModel> {
    if bins < 2 {
        return Err(Error::BinCountTooSmall(bins));
    }
    ds.require_non_empty()?;
    let cuts = (0..ds.width())
        .map(|j| equal_frequency_cuts(ds.column(j).collect(), bins))
        .collect();
    Ok(BinningModel {
        bins,
        schema: ds.schema().to_vec(),
        cuts,
    })
}

/// A dataset whose feature values are bin indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretized {
    schema: Vec<FeatureId>,
    bin_counts: Vec<usize>,
    codes: Vec<Vec<usize>>,
    labels: Vec<TrafficClass>,
}

impl Discretized {
    /// Builds a discretized view from explicit codes; every code of column
    /// `j` must be below `bin_counts[j]`.
    pub fn new(
        schema: Vec<FeatureId>,
        bin_counts: Vec<usize>,
        codes: Vec<Vec<usize>>,
        labels: Vec<TrafficClass>,
    ) -> Result<Discretized> {
        if bin_counts.len() != schema.len() {
            return Err(Error::WidthMismatch {
                expected: schema.len(),
                got: bin_counts.len(),
            });
        }
        if codes.len() != labels.len() {
            return Err(Error::LengthMismatch {
                actual: labels.len(),
                predicted: codes.len(),
            });
        }
        for (i, row) in codes.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::WidthMismatch {
                    expected: schema.len(),
                    got: row.len(),
                });
            }
            if let Some((j, &c)) = row.iter().enumerate().find(|(j, &c)| c >= bin_counts[*j]) {
                return Err(Error::NotDiscretized(format!(
                    "row {i} column {j}: code {c} not below bin count {}",
                    bin_counts[j]
                )));
            }
        }
        Ok(Discretized {
            schema,
            bin_counts,
            codes,
            labels,
        })
    }

    /// Interprets a dataset whose values are already small non-negative
    /// integers as bin codes.
    pub fn from_integer_dataset(ds: &Dataset) -> Result<Discretized> {
        let mut bin_counts = vec![1usize; ds.width()];
        let mut codes = Vec::with_capacity(ds.len());
        for r in ds.records() {
            let mut row = Vec::with_capacity(ds.width());
            for (j, &v) in r.features().iter().enumerate() {
                if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(Error::NotDiscretized(format!("value {v} is not a bin code")));
                }
                let c = v as usize;
                bin_counts[j] = bin_counts[j].max(c + 1);
                row.push(c);
            }
            codes.push(row);
        }
        Ok(Discretized {
            schema: ds.schema().to_vec(),
            bin_counts,
            codes,
            labels: ds.labels(),
        })
    }

    pub fn schema(&self) -> &[FeatureId] {
        &self.schema
    }

    pub fn bin_counts(&self) -> &[usize] {
        &self.bin_counts
    }

    pub fn codes(&self) -> &[Vec<usize>] {
        &self.codes
    }

    pub fn labels(&self) -> &[TrafficClass] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn apply_bins(model: &BinningModel, ds: &Dataset) -> Result<Discretized> {
    if ds.schema() != model.schema() {
        return Err(Error::WidthMismatch {
            expected: model.schema().len(),
            got: ds.width(),
        });
    }
    let codes = ds
        .records()
        .iter()
        .map(|r| model.bin_record(r.features()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Discretized {
        schema: ds.schema().to_vec(),
        bin_counts: model.bin_counts(),
        codes,
        labels: ds.labels(),
    })
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizeModel {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl StandardizeModel {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&x, (&m, &s))| if s > 0.0 { (x - m) / s } else { 0.0 })
            .collect()
    }

    pub(crate) fn from_parts(mean: Vec<f64>, std: Vec<f64>) -> Self {
        StandardizeModel { mean, std }
    }
}

pub fn fit_standardize(ds: &Dataset) -> Result<StandardizeModel> {
    ds.require_non_empty()?;
    let n = ds.len() as f64;
    let mut mean = Vec::with_capacity(ds.width());
    let mut std = Vec::with_capacity(ds.width());
    for j in 0..ds.width() {
        let (lo, hi) = ds
            .column(j)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let m = ds.column(j).sum::<f64>() / n;
        // exact zero for constant columns; the mean of repeated values is not
        // always bit-equal to the value itself
        let s = if lo == hi {
            0.0
        } else {
            (ds.column(j).map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt()
        };
        mean.push(m);
        std.push(s);
    }
    Ok(StandardizeModel { mean, std })
}

pub fn apply_standardize(model: &StandardizeModel, ds: &Dataset) -> Result<Dataset> {
    if ds.width() != model.width() {
        return Err(Error::WidthMismatch {
            expected: model.width(),
            got: ds.width(),
        });
    }
    let records = ds
        .records()
        .iter()
        .map(|r| MibRecord::new(model.transform(r.features()), r.label()))
        .collect();
    Ok(ds.with_records(records))
}

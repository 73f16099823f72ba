//! MIB datasets: schema, CSV ingestion, projection onto feature subsets,
//! and the transforms fitted on training folds.

mod csv_io;
mod schema;
mod synth;
mod transform;

use std::collections::BTreeSet;

pub use csv_io::{load_csv, read_csv, save_csv, write_csv};
pub use schema::{
    FeatureId, MibGroup, TrafficClass, CLASS_COLUMN, FEATURE_NAMES, NUM_CLASSES, NUM_FEATURES,
};
pub use synth::{synthesize, ClassProfile, SynthConfig, TABLE1_CENSUS};
pub use transform::{
    apply_bins, apply_standardize, fit_bins, fit_standardize, BinningModel, Discretized,
    StandardizeModel, DEFAULT_BINS,
};

use crate::error::{Error, Result};
use crate::featsel::FeatureSubset;

/// One sampled observation: counter values in schema order plus its label.
#[derive(Debug, Clone, PartialEq)]
pub struct MibRecord {
    features: Vec<f64>,
    label: TrafficClass,
}

impl MibRecord {
    pub fn new(features: Vec<f64>, label: TrafficClass) -> MibRecord {
        MibRecord { features, label }
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn label(&self) -> TrafficClass {
        self.label
    }
}

/// Per-class record counts, indexed in class declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Census([usize; NUM_CLASSES]);

impl Census {
    pub fn from_counts(counts: [usize; NUM_CLASSES]) -> Census {
        Census(counts)
    }

    pub fn of<'a>(labels: impl IntoIterator<Item = &'a TrafficClass>) -> Census {
        let mut c = [0; NUM_CLASSES];
        for l in labels {
            c[l.index()] += 1;
        }
        Census(c)
    }

    pub fn get(&self, class: TrafficClass) -> usize {
        self.0[class.index()]
    }

    pub fn counts(&self) -> &[usize; NUM_CLASSES] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Classes with at least one record, in declaration order.
    pub fn present(&self) -> Vec<TrafficClass> {
        TrafficClass::ALL
            .into_iter()
            .filter(|c| self.get(*c) > 0)
            .collect()
    }

    pub fn smallest_present(&self) -> Option<usize> {
        self.0.iter().copied().filter(|&n| n > 0).min()
    }

    /// Largest class count divided by the total; the accuracy of always
    /// predicting the majority class.
    pub fn majority_rate(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        *self.0.iter().max().unwrap() as f64 / total as f64
    }
}

/// Immutable ordered collection of records sharing one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<MibRecord>,
    schema: Vec<FeatureId>,
    census: Census,
    source: String,
}

impl Dataset {
    /// Builds a dataset, checking that every record has one finite value per
    /// schema column. Non-negativity is a property of raw counters and is
    /// checked at ingestion, not here, since standardized views are signed.
    pub fn new(
        schema: Vec<FeatureId>,
        records: Vec<MibRecord>,
        source: impl Into<String>,
    ) -> Result<Dataset> {
        for r in &records {
            if r.features.len() != schema.len() {
                return Err(Error::WidthMismatch {
                    expected: schema.len(),
                    got: r.features.len(),
                });
            }
            if let Some(v) = r.features.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite(*v));
            }
        }
        let census = Census::of(records.iter().map(|r| &r.label));
        Ok(Dataset {
            records,
            schema,
            census,
            source: source.into(),
        })
    }

    pub fn records(&self) -> &[MibRecord] {
        &self.records
    }

    pub fn schema(&self) -> &[FeatureId] {
        &self.schema
    }

    pub fn census(&self) -> &Census {
        &self.census
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn width(&self) -> usize {
        self.schema.len()
    }

    pub fn labels(&self) -> Vec<TrafficClass> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(move |r| r.features[j])
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let records: Vec<MibRecord> = rows.iter().map(|&i| self.records[i].clone()).collect();
        let census = Census::of(records.iter().map(|r| &r.label));
        Dataset {
            records,
            schema: self.schema.clone(),
            census,
            source: self.source.clone(),
        }
    }

    pub(crate) fn with_records(&self, records: Vec<MibRecord>) -> Dataset {
        debug_assert!(records.iter().all(|r| r.features.len() == self.schema.len()));
        Dataset {
            census: Census::of(records.iter().map(|r| &r.label)),
            records,
            schema: self.schema.clone(),
            source: self.source.clone(),
        }
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.records.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }
}

/// Keeps only the subset's columns, ordered by ascending feature index.
pub fn project(ds: &Dataset, subset: &FeatureSubset) -> Result<Dataset> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut cols = Vec::with_capacity(subset.len());
    for f in subset.iter() {
        let j = ds
            .schema
            .iter()
            .position(|s| *s == f)
            .ok_or_else(|| Error::UnknownFeature(f.to_string()))?;
        cols.push(j);
    }
    let records = ds
        .records
        .iter()
        .map(|r| MibRecord {
            features: cols.iter().map(|&j| r.features[j]).collect(),
            label: r.label,
        })
        .collect();
    Ok(Dataset {
        records,
        schema: subset.iter().collect(),
        census: ds.census,
        source: ds.source.clone(),
    })
}

/// Canonical member set of a named MIB group (`IF`, `TCP`, `UDP`, `IP`, `ICMP`).
pub fn group_features(group: &str) -> Result<FeatureSubset> {
    let g: MibGroup = group.parse()?;
    Ok(FeatureSubset::new(
        g.members().into_iter().collect::<BTreeSet<_>>(),
        format!("group-{}", g.as_str().to_ascii_lowercase()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        let records = (0..6)
            .map(|i| {
                MibRecord::new(
                    (0..NUM_FEATURES).map(|j| (i * 100 + j) as f64).collect(),
                    TrafficClass::ALL[i % 3],
                )
            })
            .collect();
        Dataset::new(FeatureId::all(), records, "toy").unwrap()
    }

    #[test]
    fn census_sums_to_len() {
        let ds = toy();
        assert_eq!(ds.census().total(), ds.len());
        assert_eq!(ds.census().get(TrafficClass::Normal), 2);
        assert_eq!(ds.census().present().len(), 3);
    }

    #[test]
    fn project_keeps_ascending_subset_columns() {
        let ds = toy();
        let s = FeatureSubset::from_indices([9, 3, 34], "t").unwrap();
        let p = project(&ds, &s).unwrap();
        assert_eq!(p.width(), 3);
        assert_eq!(p.len(), ds.len());
        assert_eq!(p.records()[1].features(), &[102.0, 108.0, 133.0]);
        assert_eq!(p.labels(), ds.labels());
    }

    #[test]
    fn project_full_is_identity_and_idempotent() {
        let ds = toy();
        let full = FeatureSubset::from_indices(1..=34, "all").unwrap();
        assert_eq!(project(&ds, &full).unwrap(), ds);
        let s = FeatureSubset::from_indices([2, 5, 7], "s").unwrap();
        let once = project(&ds, &s).unwrap();
        assert_eq!(project(&once, &s).unwrap(), once);
    }

    #[test]
    fn project_errors() {
        let ds = toy();
        let empty = FeatureSubset::from_indices([], "e").unwrap();
        assert!(matches!(project(&ds, &empty), Err(Error::EmptySubset)));
        let s = FeatureSubset::from_indices([2, 5], "s").unwrap();
        let narrow = project(&ds, &s).unwrap();
        let other = FeatureSubset::from_indices([7], "o").unwrap();
        assert!(matches!(project(&narrow, &other), Err(Error::UnknownFeature(_))));
    }

    #[test]
    fn named_groups() {
        let ip: Vec<usize> = group_features("IP").unwrap().iter().map(|f| f.index()).collect();
        assert_eq!(ip, (21..=28).collect::<Vec<_>>());
        let udp: Vec<usize> = group_features("UDP").unwrap().iter().map(|f| f.index()).collect();
        assert_eq!(udp, vec![17, 18, 19, 20]);
        assert!(matches!(group_features("DNS"), Err(Error::UnknownGroup(_))));
    }

    #[test]
    fn rejects_ragged_records() {
        let r = MibRecord::new(vec![1.0, 2.0], TrafficClass::Normal);
        assert!(matches!(
            Dataset::new(FeatureId::all(), vec![r], "x"),
            Err(Error::WidthMismatch { .. })
        ));
    }
}

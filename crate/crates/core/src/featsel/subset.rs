use std::collections::BTreeSet;
use std::fmt;

use crate::dataset::{FeatureId, NUM_FEATURES};
use crate::error::{Error, Result};

/// A set of MIB variables plus a label recording where it came from
/// (`infogain-top10`, `gs-bayes`, `wiener-legacy`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSubset {
    features: BTreeSet<FeatureId>,
    label: String,
}

impl FeatureSubset {
    pub fn new(features: BTreeSet<FeatureId>, label: impl Into<String>) -> FeatureSubset {
        FeatureSubset {
            features,
            label: label.into(),
        }
    }

    pub fn from_indices(
        indices: impl IntoIterator<Item = usize>,
        label: impl Into<String>,
    ) -> Result<FeatureSubset> {
        let features = indices
            .into_iter()
            .map(FeatureId::new)
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(FeatureSubset::new(features, label))
    }

    pub fn full() -> FeatureSubset {
        FeatureSubset::new(FeatureId::all().into_iter().collect(), "all")
    }

    pub fn iter(&self) -> impl Iterator<Item = FeatureId> + '_ {
        self.features.iter().copied()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().map(FeatureId::index).collect()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn contains(&self, f: FeatureId) -> bool {
        self.features.contains(&f)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> FeatureSubset {
        self.label = label.into();
        self
    }

    /// Bit `i - 1` set for every member with index `i`.
    pub fn bitmask(&self) -> u64 {
        self.iter().fold(0u64, |m, f| m | 1 << (f.index() - 1))
    }

    /// `{3,6,7}` form used on the command line and in subset files.
    pub fn to_literal(&self) -> String {
        let body: Vec<String> = self.iter().map(|f| f.index().to_string()).collect();
        format!("{{{}}}", body.join(","))
    }

    /// Parses `{3,6,7}`; the braces are optional and whitespace is ignored.
    pub fn parse_literal(s: &str, label: impl Into<String>) -> Result<FeatureSubset> {
        let t = s.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .unwrap_or(t)
            .trim();
        if inner.is_empty() {
            return Ok(FeatureSubset::new(BTreeSet::new(), label));
        }
        let indices = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::BadSubsetLiteral(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        FeatureSubset::from_indices(indices, label)
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// Features that occur in at least `min_occurrence` of the given subsets
/// (`None` means all of them). May return an empty subset.
pub fn frequent_features(
    subsets: &[FeatureSubset],
    min_occurrence: Option<usize>,
) -> Result<FeatureSubset> {
    let t = min_occurrence.unwrap_or(subsets.len());
    if subsets.is_empty() || t == 0 || t > subsets.len() {
        return Err(Error::ThresholdOutOfRange {
            t,
            max: subsets.len(),
        });
    }
    let mut counts = [0usize; NUM_FEATURES];
    for s in subsets {
        for f in s.iter() {
            counts[f.index() - 1] += 1;
        }
    }
    let features = FeatureId::all()
        .into_iter()
        .filter(|f| counts[f.index() - 1] >= t)
        .collect();
    Ok(FeatureSubset::new(features, format!("frequent-t{t}")))
}

pub const PRESET_NAMES: [&str; 5] = [
    "gs-svm",
    "gs-mlp",
    "gs-bayes",
    "table7-frequent",
    "wiener-legacy",
];

/// Published subsets: the three genetic-search results, their common core,
/// and the legacy six-variable selection.
pub fn preset(name: &str) -> Result<FeatureSubset> {
    let indices: &[usize] = match name {
        "gs-svm" => &[
            3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 17, 18, 22, 23, 24, 25, 26, 27, 28, 29,
            30, 31, 32, 33, 34,
        ],
        "gs-mlp" => &[
            1, 3, 5, 7, 9, 10, 13, 15, 16, 18, 19, 20, 21, 23, 24, 25, 26, 28, 29, 32,
        ],
        "gs-bayes" => &[3, 6, 7, 8, 9, 17, 19, 24, 26, 30, 34],
        "table7-frequent" => &[3, 7, 9, 24, 26],
        "wiener-legacy" => &[5, 7, 8, 21, 22, 23],
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    FeatureSubset::from_indices(indices.iter().copied(), name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[usize]) -> FeatureSubset {
        FeatureSubset::from_indices(ix.iter().copied(), "t").unwrap()
    }

    #[test]
    fn presets() {
        assert_eq!(
            preset("gs-bayes").unwrap().indices(),
            vec![3, 6, 7, 8, 9, 17, 19, 24, 26, 30, 34]
        );
        assert_eq!(preset("wiener-legacy").unwrap().indices(), vec![5, 7, 8, 21, 22, 23]);
        assert_eq!(preset("gs-svm").unwrap().len(), 28);
        assert_eq!(preset("gs-mlp").unwrap().len(), 20);
        assert!(matches!(preset("gs-knn"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn genetic_presets_intersect_to_frequent_core() {
        let gs: Vec<_> = ["gs-svm", "gs-mlp", "gs-bayes"]
            .iter()
            .map(|n| preset(n).unwrap())
            .collect();
        let core = frequent_features(&gs, Some(3)).unwrap();
        assert_eq!(core.indices(), vec![3, 7, 9, 24, 26]);
        assert_eq!(core.indices(), preset("table7-frequent").unwrap().indices());
    }

    #[test]
    fn frequent_edge_cases() {
        let a = s(&[1, 2, 3]);
        assert_eq!(frequent_features(&[a.clone()], Some(1)).unwrap().indices(), a.indices());
        let disjoint = [s(&[1, 2]), s(&[3, 4])];
        assert!(frequent_features(&disjoint, Some(2)).unwrap().is_empty());
        assert_eq!(frequent_features(&disjoint, Some(1)).unwrap().indices(), vec![1, 2, 3, 4]);
        assert!(matches!(
            frequent_features(&disjoint, Some(3)),
            Err(Error::ThresholdOutOfRange { .. })
        ));
        assert!(frequent_features(&[], None).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let x = s(&[26, 3, 9]);
        assert_eq!(x.to_literal(), "{3,9,26}");
        assert_eq!(FeatureSubset::parse_literal(" { 3, 9 ,26 } ", "t").unwrap(), x);
        assert_eq!(FeatureSubset::parse_literal("3,9,26", "t").unwrap(), x);
        assert!(FeatureSubset::parse_literal("{}", "t").unwrap().is_empty());
        assert!(FeatureSubset::parse_literal("{3,x}", "t").is_err());
        assert!(FeatureSubset::parse_literal("{35}", "t").is_err());
    }

    #[test]
    fn bitmask_is_injective_on_members() {
        assert_eq!(s(&[1]).bitmask(), 1);
        assert_eq!(s(&[34]).bitmask(), 1 << 33);
        assert_eq!(s(&[1, 3]).bitmask(), 0b101);
    }
}

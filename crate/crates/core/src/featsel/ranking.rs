use std::cmp::Ordering;
use std::io::{Read, Write};

use super::FeatureSubset;
use crate::dataset::FeatureId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScore {
    pub feature: FeatureId,
    pub score: f64,
}

/// Scores ordered by descending score, ties broken by ascending feature index.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    method: String,
    entries: Vec<FeatureScore>,
}

fn rank_order(a: &FeatureScore, b: &FeatureScore) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.feature.cmp(&b.feature))
}

impl Ranking {
    pub fn new(method: impl Into<String>, mut entries: Vec<FeatureScore>) -> Ranking {
        entries.sort_by(rank_order);
        Ranking {
            method: method.into(),
            entries,
        }
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn entries(&self) -> &[FeatureScore] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score_of(&self, f: FeatureId) -> Option<f64> {
        self.entries.iter().find(|e| e.feature == f).map(|e| e.score)
    }

    pub fn order(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.feature.index()).collect()
    }

    /// CSV with header `feature_index,feature_name,score`, best first.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "feature_index,feature_name,score")?;
        for e in &self.entries {
            writeln!(w, "{},{},{}", e.feature.index(), e.feature.name(), e.score)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, method: impl Into<String>) -> Result<Ranking> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let mut entries = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let bad = |col: &str| Error::NonNumeric {
                value: row.get(0).unwrap_or("").to_string(),
                row: i + 1,
                column: col.to_string(),
            };
            let index: usize = row
                .get(0)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad("feature_index"))?;
            let score: f64 = row
                .get(2)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad("score"))?;
            entries.push(FeatureScore {
                feature: FeatureId::new(index)?,
                score,
            });
        }
        Ok(Ranking::new(method, entries))
    }
}

/// The first `n` features of the ranking.
pub fn rank_top_n(r: &Ranking, n: usize) -> Result<FeatureSubset> {
    if n == 0 || n > r.len() {
        return Err(Error::NOutOfRange { n, max: r.len() });
    }
    Ok(FeatureSubset::new(
        r.entries[..n].iter().map(|e| e.feature).collect(),
        format!("{}-top{n}", r.method),
    ))
}

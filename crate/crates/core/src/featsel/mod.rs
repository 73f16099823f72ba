//! Feature selection: filter rankers (InfoGain, ReliefF), the genetic
//! wrapper search, frequent-feature aggregation and the published subsets.

mod genetic;
mod infogain;
mod ranking;
mod relieff;
mod subset;

use std::collections::HashMap;

pub use genetic::{genetic_search, genetic_search_from, Chromosome, GaConfig, GaOutcome};
pub use infogain::{class_entropy, info_gain};
pub use ranking::{rank_top_n, FeatureScore, Ranking};
pub use relieff::{relieff, ReliefConfig, SampleCount};
pub use subset::{frequent_features, preset, FeatureSubset, PRESET_NAMES};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::eval::cross_validate;
use crate::learn::ClassifierSpec;

/// Default number of internal folds for wrapper fitness.
pub const WRAPPER_FOLDS: usize = 5;

/// Subset fitness for the genetic search: pooled accuracy of a classifier
/// under stratified cross-validation on the projected data. Results are
/// memoized per subset bitmask.
#[derive(Debug)]
pub struct WrapperFitness<'a> {
    ds: &'a Dataset,
    spec: ClassifierSpec,
    folds: usize,
    seed: u64,
    cache: HashMap<u64, f64>,
}

pub fn wrapper_fitness(
    ds: &Dataset,
    spec: ClassifierSpec,
    folds: usize,
    seed: u64,
) -> Result<WrapperFitness<'_>> {
    if ds.census().present().len() < 2 {
        return Err(Error::SingleClass);
    }
    if folds < 2 {
        return Err(Error::KOutOfRange {
            k: folds,
            max: ds.census().smallest_present().unwrap_or(0),
        });
    }
    Ok(WrapperFitness {
        ds,
        spec,
        folds,
        seed,
        cache: HashMap::new(),
    })
}

impl WrapperFitness<'_> {
    pub fn evaluate(&mut self, subset: &FeatureSubset) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let key = subset.bitmask();
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let acc = cross_validate(self.ds, &self.spec, subset, self.folds, self.seed)?.accuracy();
        self.cache.insert(key, acc);
        Ok(acc)
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }
}

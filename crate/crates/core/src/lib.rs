//! Detection and classification of network attacks from SNMP-MIB counter
//! records.
//!
//! The crate covers the whole pipeline:
//!
//! * [`dataset`]: the 34-variable MIB schema, CSV ingestion, a seeded
//!   synthetic generator, projection onto feature subsets, binning and
//!   standardization.
//! * [`featsel`]: InfoGain and ReliefF rankers, genetic wrapper search and
//!   the published subsets.
//! * [`learn`]: Bayes, multilayer perceptron and SVM classifiers.
//! * [`eval`]: stratified k-fold cross-validation and metrics.
//!
//! ```
//! use mibids::dataset::{synthesize, SynthConfig};
//! use mibids::eval::cross_validate;
//! use mibids::featsel::preset;
//! use mibids::learn::ClassifierSpec;
//!
//! let ds = synthesize(&SynthConfig::default().scaled(300, 10)).unwrap();
//! let subset = preset("gs-bayes").unwrap();
//! let report = cross_validate(&ds, &ClassifierSpec::bayes(1), &subset, 5, 1).unwrap();
//! assert!(report.accuracy() > 0.5);
//! ```

pub mod dataset;
pub mod error;
pub mod eval;
pub mod featsel;
pub mod learn;

pub use dataset::{Dataset, FeatureId, MibGroup, MibRecord, TrafficClass};
pub use error::{Error, Result};
pub use eval::{cross_validate, EvaluationReport};
pub use featsel::FeatureSubset;
pub use learn::{ClassifierKind, ClassifierSpec, TrainedModel};

//! Stratified cross-validation, confusion matrices and the accuracy,
//! precision, recall and F-measure metrics with support-weighted
//! multi-class aggregation.

mod confusion;
mod cv;
mod folds;

pub use confusion::{confusion, confusion_indexed, metrics, ClassMetrics, ConfusionMatrix, Metrics};
pub use cv::{cross_validate, percent, seconds, EvaluationReport, MARKDOWN_HEADER};
pub use folds::{stratified_folds, stratified_subsample, FoldPlan};

/// Seed for the `index`-th sub-task of a run seeded with `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(master ^ mix(index))
}

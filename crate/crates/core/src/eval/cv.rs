use std::time::Instant;

use serde_json::{json, Value};

use super::{confusion, derive_seed, metrics, stratified_folds, ConfusionMatrix, FoldPlan, Metrics};
use crate::dataset::{project, Dataset, TrafficClass};
use crate::featsel::FeatureSubset;
use crate::learn::{ClassifierKind, ClassifierSpec};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub kind: ClassifierKind,
    /// Classifier configuration, see [`ClassifierSpec::describe`].
    pub classifier: String,
    pub subset: FeatureSubset,
    pub seed: u64,
    pub folds: FoldPlan,
    pub records: usize,
    pub source: String,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    /// Sum of model fit wall-clock time over all folds.
    pub build_seconds: f64,
    /// Free-form key/value notes attached by the caller.
    pub provenance: Vec<(String, String)>,
}

/// Percentage with two decimals, e.g. `99.90%`.
pub fn percent(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

pub fn seconds(x: f64) -> String {
    format!("{x:.2}")
}

pub const MARKDOWN_HEADER: &str = "| ALGORITHM | ACC | Precision | Recall | F-Measure | Time Taken (seconds) |\n|---|---|---|---|---|---|";

impl EvaluationReport {
    pub fn accuracy(&self) -> f64 {
        self.metrics.accuracy
    }

    /// One table row; the time column is `-` when `timing` is off.
    pub fn markdown_row(&self, name: &str, timing: bool) -> String {
        let m = &self.metrics;
        format!(
            "| {name} | {} | {} | {} | {} | {} |",
            percent(m.accuracy),
            percent(m.precision),
            percent(m.recall),
            percent(m.f_measure),
            if timing { seconds(self.build_seconds) } else { "-".into() }
        )
    }

    pub fn to_json_value(&self, timing: bool) -> Value {
        let m = &self.metrics;
        let per_class: Vec<Value> = m
            .per_class
            .iter()
            .map(|c| {
                json!({
                    "class": c.label,
                    "tp": c.tp,
                    "fp": c.fp,
                    "fn": c.fn_count,
                    "tn": c.tn,
                    "precision": c.precision,
                    "recall": c.recall,
                    "f_measure": c.f_measure,
                    "support": c.support,
                })
            })
            .collect();
        let mut v = json!({
            "classifier": self.kind.id(),
            "config": self.classifier,
            "subset": {
                "label": self.subset.label(),
                "features": self.subset.indices(),
            },
            "k": self.folds.k(),
            "seed": self.seed,
            "fold_sizes": self.folds.sizes(),
            "records": self.records,
            "source": self.source,
            "accuracy": m.accuracy,
            "precision": m.precision,
            "recall": m.recall,
            "f_measure": m.f_measure,
            "per_class": per_class,
            "confusion": {
                "labels": self.confusion.labels(),
                "counts": self.confusion.rows(),
            },
            "provenance": self
                .provenance
                .iter()
                .map(|(k, v)| json!({ "key": k, "value": v }))
                .collect::<Vec<_>>(),
        });
        if timing {
            v["build_seconds"] = json!((self.build_seconds * 100.0).round() / 100.0);
        }
        v
    }

    pub fn to_json(&self, timing: bool) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value(timing))
            .expect("report values are always serializable");
        s.push('\n');
        s
    }
}

/// Stratified k-fold cross-validation of `spec` on the `subset` columns of
/// `ds`. All transforms are fitted on the training folds only; test-fold
/// predictions are pooled into one confusion matrix. Fold `f` trains with
/// seed `derive_seed(seed, f)`.
pub fn cross_validate(
    ds: &Dataset,
    spec: &ClassifierSpec,
    subset: &FeatureSubset,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    let data = project(ds, subset)?;
    let plan = stratified_folds(&data, k, seed)?;
    let mut actual: Vec<TrafficClass> = Vec::with_capacity(data.len());
    let mut predicted = Vec::with_capacity(data.len());
    let mut build_seconds = 0.0;
    for f in 0..k {
        let train = data.select_rows(&plan.train(f));
        let fold_spec = spec.with_seed(derive_seed(seed, f as u64));
        let start = Instant::now();
        let model = fold_spec.fit(&train)?;
        build_seconds += start.elapsed().as_secs_f64();
        for &i in plan.test(f) {
            let r = &data.records()[i];
            actual.push(r.label());
            predicted.push(model.predict(r.features())?);
        }
    }
    let cm = confusion(&actual, &predicted)?;
    let metrics = metrics(&cm)?;
    Ok(EvaluationReport {
        kind: spec.kind(),
        classifier: spec.describe(),
        subset: subset.clone(),
        seed,
        folds: plan,
        records: data.len(),
        source: data.source().to_string(),
        confusion: cm,
        metrics,
        build_seconds,
        provenance: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synthesize, SynthConfig};

    fn small() -> Dataset {
        synthesize(&SynthConfig::default().scaled(400, 20)).unwrap()
    }

    fn strip_timing(mut r: EvaluationReport) -> EvaluationReport {
        r.build_seconds = 0.0;
        r
    }

    #[test]
    fn deterministic_given_seed() {
        let ds = small();
        let spec = ClassifierSpec::bayes(0);
        let a = cross_validate(&ds, &spec, &FeatureSubset::full(), 5, 11).unwrap();
        let b = cross_validate(&ds, &spec, &FeatureSubset::full(), 5, 11).unwrap();
        assert_eq!(strip_timing(a.clone()), strip_timing(b.clone()));
        assert_eq!(a.to_json(false), b.to_json(false));
        assert_eq!(a.confusion.total() as usize, ds.len());
    }

    #[test]
    fn invariant_to_record_order() {
        let ds = small();
        let rev: Vec<usize> = (0..ds.len()).rev().collect();
        let shuffled = ds.select_rows(&rev);
        let spec = ClassifierSpec::bayes(0);
        let a = cross_validate(&ds, &spec, &FeatureSubset::full(), 4, 3).unwrap();
        let b = cross_validate(&shuffled, &spec, &FeatureSubset::full(), 4, 3).unwrap();
        assert_eq!(a.confusion, b.confusion);
    }

    #[test]
    fn row_formatting() {
        let ds = small();
        let r = cross_validate(&ds, &ClassifierSpec::bayes(0), &FeatureSubset::full(), 3, 1).unwrap();
        let row = r.markdown_row("BayesNet", false);
        assert!(row.starts_with("| BayesNet | "));
        assert!(row.ends_with("| - |"));
        assert!(row.contains(&percent(r.metrics.accuracy)));
        assert_eq!(percent(0.999), "99.90%");
        let v = r.to_json_value(true);
        assert!(v.get("build_seconds").is_some());
        assert!(r.to_json_value(false).get("build_seconds").is_none());
    }

    #[test]
    fn propagates_errors() {
        let ds = small();
        let spec = ClassifierSpec::bayes(0);
        assert!(cross_validate(&ds, &spec, &FeatureSubset::full(), 1, 0).is_err());
        let empty = FeatureSubset::from_indices([], "none").unwrap();
        assert!(cross_validate(&ds, &spec, &empty, 5, 0).is_err());
    }
}

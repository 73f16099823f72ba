use crate::dataset::TrafficClass;
use crate::error::{Error, Result};

/// Square count matrix indexed `[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(labels: Vec<String>, counts: Vec<Vec<u64>>) -> Result<ConfusionMatrix> {
        if labels.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if counts.len() != labels.len() || counts.iter().any(|r| r.len() != labels.len()) {
            return Err(Error::InvalidConfig(format!(
                "confusion matrix must be {0}x{0}",
                labels.len()
            )));
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    /// The binary matrix with the first class as positive.
    pub fn binary(tp: u64, fp: u64, fn_count: u64, tn: u64) -> ConfusionMatrix {
        ConfusionMatrix {
            labels: vec!["+".into(), "-".into()],
            counts: vec![vec![tp, fn_count], vec![fp, tn]],
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual][predicted]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    /// `(TP, FP, FN, TN)` for class `c` against the rest.
    pub fn one_vs_rest(&self, c: usize) -> (u64, u64, u64, u64) {
        let tp = self.counts[c][c];
        let actual: u64 = self.counts[c].iter().sum();
        let predicted: u64 = self.counts.iter().map(|r| r[c]).sum();
        let fp = predicted - tp;
        let fn_count = actual - tp;
        (tp, fp, fn_count, self.total() - tp - fp - fn_count)
    }

    /// Adds another matrix over the same labels.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::InvalidConfig("confusion matrices have different labels".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }
}

/// Confusion over class indices `0..labels.len()`.
pub fn confusion_indexed(
    labels: Vec<String>,
    actual: &[usize],
    predicted: &[usize],
) -> Result<ConfusionMatrix> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = labels.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (&a, &p) in actual.iter().zip(predicted) {
        if a >= n || p >= n {
            return Err(Error::InvalidConfig(format!("class index {} out of range", a.max(p))));
        }
        counts[a][p] += 1;
    }
    ConfusionMatrix::from_counts(labels, counts)
}

/// Confusion over all eight traffic classes in declaration order.
pub fn confusion(actual: &[TrafficClass], predicted: &[TrafficClass]) -> Result<ConfusionMatrix> {
    let labels = TrafficClass::ALL.iter().map(|c| c.as_str().to_string()).collect();
    let idx = |v: &[TrafficClass]| v.iter().map(|c| c.index()).collect::<Vec<_>>();
    confusion_indexed(labels, &idx(actual), &idx(predicted))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub label: String,
    pub tp: u64,
    pub fp: u64,
    pub fn_count: u64,
    pub tn: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    /// Support-weighted means of the per-class values.
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let per_class: Vec<ClassMetrics> = (0..cm.n_classes())
        .map(|c| {
            let (tp, fp, fn_count, tn) = cm.one_vs_rest(c);
            let precision = ratio(tp, tp + fp);
            let recall = ratio(tp, tp + fn_count);
            let f_measure = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                label: cm.labels()[c].clone(),
                tp,
                fp,
                fn_count,
                tn,
                precision,
                recall,
                f_measure,
                support: tp + fn_count,
            }
        })
        .collect();
    let weighted = |f: fn(&ClassMetrics) -> f64| {
        per_class.iter().map(|m| m.support as f64 * f(m)).sum::<f64>() / total as f64
    };
    Ok(Metrics {
        accuracy: cm.trace() as f64 / total as f64,
        precision: weighted(|m| m.precision),
        recall: weighted(|m| m.recall),
        f_measure: weighted(|m| m.f_measure),
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_class_direct_count() {
        // actual [+,+,-], predicted [+,-,-]
        let cm = confusion_indexed(vec!["+".into(), "-".into()], &[0, 0, 1], &[0, 1, 1]).unwrap();
        assert_eq!(cm.one_vs_rest(0), (1, 0, 1, 1));
        assert_eq!(cm.total(), 3);
    }

    #[test]
    fn perfect_predictions_are_diagonal() {
        let labels = [TrafficClass::Normal, TrafficClass::Slowloris, TrafficClass::Normal];
        let cm = confusion(&labels, &labels).unwrap();
        assert_eq!(cm.trace(), 3);
        let m = metrics(&cm).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!((m.precision, m.recall, m.f_measure), (1.0, 1.0, 1.0));
        // absent classes report zeros with zero support
        let absent = &m.per_class[TrafficClass::UdpFlood.index()];
        assert_eq!((absent.precision, absent.recall, absent.f_measure, absent.support), (0.0, 0.0, 0.0, 0));
    }

    #[test]
    fn binary_arithmetic() {
        let m = metrics(&ConfusionMatrix::binary(50, 10, 5, 35)).unwrap();
        let pos = &m.per_class[0];
        assert!((m.accuracy - 85.0 / 100.0).abs() < 1e-12);
        assert!((pos.precision - 50.0 / 60.0).abs() < 1e-12);
        assert!((pos.recall - 50.0 / 55.0).abs() < 1e-12);
        let f = 2.0 * (50.0 / 60.0) * (50.0 / 55.0) / (50.0 / 60.0 + 50.0 / 55.0);
        assert!((pos.f_measure - f).abs() < 1e-12);
        assert_eq!(pos.support, 55);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            confusion(&[TrafficClass::Normal, TrafficClass::Normal], &[TrafficClass::Normal]),
            Err(Error::LengthMismatch { actual: 2, predicted: 1 })
        ));
        assert!(matches!(confusion(&[], &[]), Err(Error::EmptyInput)));
        let zero = ConfusionMatrix::binary(0, 0, 0, 0);
        assert!(matches!(metrics(&zero), Err(Error::EmptyMatrix)));
        assert!(ConfusionMatrix::from_counts(vec!["a".into()], vec![vec![1, 2]]).is_err());
    }

    #[test]
    fn merge_adds_cells() {
        let mut a = ConfusionMatrix::binary(1, 2, 3, 4);
        a.merge(&ConfusionMatrix::binary(1, 1, 1, 1)).unwrap();
        assert_eq!(a, ConfusionMatrix::binary(2, 3, 4, 5));
    }
}

use super::{FeatureScore, Ranking};
use crate::dataset::{Discretized, NUM_CLASSES};
use crate::error::{Error, Result};

fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Information gain of each feature about the class, in bits:
/// `H(class) - sum_v (n_v / n) H(class | feature = v)`.
pub fn info_gain(ds: &Discretized) -> Result<Ranking> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = ds.len() as f64;
    let mut class_counts = [0usize; NUM_CLASSES];
    for l in ds.labels() {
        class_counts[l.index()] += 1;
    }
    let h_class = entropy(&class_counts);

    let scores = ds
        .schema()
        .iter()
        .enumerate()
        .map(|(j, &feature)| {
            let mut table = vec![[0usize; NUM_CLASSES]; ds.bin_counts()[j]];
            for (row, l) in ds.codes().iter().zip(ds.labels()) {
                table[row[j]][l.index()] += 1;
            }
            let conditional: f64 = table
                .iter()
                .map(|counts| {
                    let nv: usize = counts.iter().sum();
                    nv as f64 / n * entropy(counts)
                })
                .sum();
            FeatureScore {
                feature,
                score: (h_class - conditional).clamp(0.0, h_class),
            }
        })
        .collect();
    Ok(Ranking::new("infogain", scores))
}

/// Entropy of the class distribution in bits.
pub fn class_entropy(ds: &Discretized) -> f64 {
    let mut class_counts = [0usize; NUM_CLASSES];
    for l in ds.labels() {
        class_counts[l.index()] += 1;
    }
    entropy(&class_counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureId, TrafficClass};
    use proptest::prelude::*;

    const POS: TrafficClass = TrafficClass::Normal;
    const NEG: TrafficClass = TrafficClass::TcpSyn;

    fn disc(columns: &[&[usize]], labels: &[TrafficClass]) -> Discretized {
        let width = columns.len();
        let schema = (1..=width).map(|i| FeatureId::new(i).unwrap()).collect();
        let bins = columns.iter().map(|c| c.iter().max().unwrap() + 1).collect();
        let codes = (0..labels.len())
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Discretized::new(schema, bins, codes, labels.to_vec()).unwrap()
    }

    #[test]
    fn hand_example() {
        let d = disc(&[&[0, 0, 1, 1]], &[POS, POS, POS, NEG]);
        let r = info_gain(&d).unwrap();
        // H(3/4, 1/4) = 0.811278..., children: 0 and 1 bit averaged = 0.5
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((h - 0.8112781244591328).abs() < 1e-12);
        assert!((r.entries()[0].score - (h - 0.5)).abs() < 1e-12);
        assert!((r.entries()[0].score - 0.3113).abs() < 1e-4);
    }

    #[test]
    fn constant_and_perfect_features() {
        let labels = [POS, NEG, POS, NEG, TrafficClass::Slowpost];
        let d = disc(&[&[0, 0, 0, 0, 0], &[0, 1, 0, 1, 2]], &labels);
        let r = info_gain(&d).unwrap();
        let f1 = FeatureId::new(1).unwrap();
        let f2 = FeatureId::new(2).unwrap();
        assert_eq!(r.score_of(f1).unwrap(), 0.0);
        assert!((r.score_of(f2).unwrap() - class_entropy(&d)).abs() < 1e-12);
    }

    #[test]
    fn empty_dataset() {
        let d = Discretized::new(vec![FeatureId::new(1).unwrap()], vec![2], vec![], vec![]).unwrap();
        assert!(matches!(info_gain(&d), Err(Error::EmptyDataset)));
    }

    proptest! {
        #[test]
        fn bounded_and_relabel_invariant(
            rows in proptest::collection::vec((0usize..4, 0usize..3), 1..40),
            perm_seed in 0usize..24,
        ) {
            let labels: Vec<_> = rows.iter().map(|r| TrafficClass::ALL[r.1]).collect();
            let col: Vec<usize> = rows.iter().map(|r| r.0).collect();
            let d = disc(&[&col], &labels);
            let h = class_entropy(&d);
            let s = info_gain(&d).unwrap().entries()[0].score;
            prop_assert!(s >= 0.0 && s <= h);

            // any bijection on bin values
            let mut perm = vec![0, 1, 2, 3];
            let mut k = perm_seed;
            for i in (1..4).rev() {
                perm.swap(i, k % (i + 1));
                k /= i + 1;
            }
            let relabeled: Vec<usize> = col.iter().map(|&c| perm[c]).collect();
            let d2 = Discretized::new(
                d.schema().to_vec(),
                vec![4],
                relabeled.iter().map(|&c| vec![c]).collect(),
                labels,
            ).unwrap();
            let s2 = info_gain(&d2).unwrap().entries()[0].score;
            prop_assert!((s - s2).abs() < 1e-12);
        }
    }
}

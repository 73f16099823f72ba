use mibids::dataset::{project, read_csv, synthesize, write_csv, MibRecord, SynthConfig};
use mibids::eval::{metrics, stratified_folds, ConfusionMatrix};
use mibids::featsel::FeatureSubset;
use mibids::{Dataset, FeatureId, TrafficClass};
use proptest::prelude::*;

fn dataset(census: &[usize], width: usize, values: &[f64]) -> Dataset {
    let mut records = Vec::new();
    let mut v = values.iter().cycle();
    for (c, &n) in census.iter().enumerate() {
        for _ in 0..n {
            let row = (0..width).map(|_| *v.next().unwrap()).collect();
            records.push(MibRecord::new(row, TrafficClass::ALL[c]));
        }
    }
    Dataset::new((1..=width).map(|i| FeatureId::new(i).unwrap()).collect(), records, "prop").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_partition_and_stratify(
        census in prop::collection::vec(0usize..40, 8),
        k in 2usize..8,
        seed in any::<u64>(),
        values in prop::collection::vec(0.0f64..5.0, 1..50),
    ) {
        let ds = dataset(&census, 3, &values);
        let smallest = census.iter().copied().filter(|&c| c > 0).min();
        let plan = stratified_folds(&ds, k, seed);
        match smallest {
            Some(m) if k <= m => {
                let plan = plan.unwrap();
                let mut seen = vec![0; ds.len()];
                for f in plan.folds() {
                    for &i in f {
                        seen[i] += 1;
                    }
                }
                prop_assert!(seen.iter().all(|&c| c == 1));
                for class in TrafficClass::ALL {
                    let total = ds.census().get(class) as f64;
                    for f in plan.folds() {
                        let n = f.iter().filter(|&&i| ds.records()[i].label() == class).count() as f64;
                        prop_assert!((n - total / k as f64).abs() <= 1.0);
                    }
                }
                for f in 0..k {
                    prop_assert_eq!(plan.train(f).len() + plan.test(f).len(), ds.len());
                }
            }
            _ => prop_assert!(plan.is_err()),
        }
    }

    #[test]
    fn metrics_stay_in_range(counts in prop::collection::vec(prop::collection::vec(0u64..30, 4), 4)) {
        prop_assume!(counts.iter().flatten().sum::<u64>() > 0);
        let labels = (0..4).map(|i| format!("c{i}")).collect();
        let cm = ConfusionMatrix::from_counts(labels, counts).unwrap();
        let m = metrics(&cm).unwrap();
        for c in &m.per_class {
            for v in [c.precision, c.recall, c.f_measure] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(c.f_measure <= c.precision.max(c.recall) + 1e-12);
            prop_assert_eq!(c.tp + c.fp + c.fn_count + c.tn, cm.total());
        }
        for v in [m.accuracy, m.precision, m.recall, m.f_measure] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>(), s in 0.0f64..=1.0) {
        let ds = synthesize(&SynthConfig::default().scaled(80, 2).with_seed(seed).with_separability(s)).unwrap();
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), "mem").unwrap();
        prop_assert_eq!(back.len(), ds.len());
        prop_assert_eq!(back.schema(), ds.schema());
        for (a, b) in back.records().iter().zip(ds.records()) {
            prop_assert_eq!(a.label(), b.label());
            prop_assert_eq!(a.features(), b.features());
        }
    }

    #[test]
    fn projection_is_idempotent(indices in prop::collection::btree_set(1usize..=34, 1..10)) {
        let ds = synthesize(&SynthConfig::default().scaled(40, 2)).unwrap();
        let subset = FeatureSubset::from_indices(indices.iter().copied(), "p").unwrap();
        let once = project(&ds, &subset).unwrap();
        let twice = project(&once, &subset).unwrap();
        prop_assert_eq!(once.schema().len(), indices.len());
        prop_assert_eq!(once.schema(), twice.schema());
        for (a, b) in once.records().iter().zip(twice.records()) {
            prop_assert_eq!(a.features(), b.features());
        }
    }
}

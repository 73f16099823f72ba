use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, TrafficClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    seed: u64,
    folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }

    pub fn test(&self, f: usize) -> &[usize] {
        &self.folds[f]
    }

    /// Every index outside fold `f`, in fold order.
    pub fn train(&self, f: usize) -> Vec<usize> {
        self.folds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != f)
            .flat_map(|(_, v)| v.iter().copied())
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.folds.iter().map(Vec::len).collect()
    }
}

fn by_content(ds: &Dataset, a: usize, b: usize) -> Ordering {
    let (fa, fb) = (ds.records()[a].features(), ds.records()[b].features());
    fa.iter()
        .zip(fb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(a.cmp(&b))
}

/// Members of each class are put in a canonical order (by feature values),
/// shuffled with the seed, then dealt round-robin; the dealing position
/// carries over from one class to the next so fold sizes stay balanced.
pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    ds.require_non_empty()?;
    let max = ds.census().smallest_present().unwrap_or(0);
    if k < 2 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in TrafficClass::ALL {
        let mut members = canonical_members(ds, class);
        members.shuffle(&mut rng);
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    Ok(FoldPlan { k, seed, folds })
}

fn canonical_members(ds: &Dataset, class: TrafficClass) -> Vec<usize> {
    let mut members: Vec<usize> = (0..ds.len())
        .filter(|&i| ds.records()[i].label() == class)
        .collect();
    members.sort_by(|&a, &b| by_content(ds, a, b));
    members
}

/// A seeded subsample of about `n` records that keeps the class
/// proportions; every present class keeps at least `min(count, floor)`
/// records. Returns the dataset unchanged when `n >= len`.
pub fn stratified_subsample(ds: &Dataset, n: usize, floor: usize, seed: u64) -> Result<Dataset> {
    ds.require_non_empty()?;
    if n >= ds.len() {
        return Ok(ds.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = ds.len();
    let mut rows = Vec::with_capacity(n);
    for class in TrafficClass::ALL {
        let mut members = canonical_members(ds, class);
        if members.is_empty() {
            continue;
        }
        members.shuffle(&mut rng);
        let want = ((members.len() * n + total / 2) / total).max(floor).min(members.len());
        rows.extend_from_slice(&members[..want]);
    }
    Ok(ds.select_rows(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureId, MibRecord};

    fn labelled(classes: &[TrafficClass]) -> Dataset {
        Dataset::new(
            vec![FeatureId::new(1).unwrap()],
            classes
                .iter()
                .enumerate()
                .map(|(i, c)| MibRecord::new(vec![i as f64], *c))
                .collect(),
            "t",
        )
        .unwrap()
    }

    #[test]
    fn subsample_keeps_proportions() {
        use TrafficClass::{Normal as A, TcpSyn as B};
        let mut classes = vec![A; 80];
        classes.extend(vec![B; 20]);
        let ds = labelled(&classes);
        let s = stratified_subsample(&ds, 50, 2, 5).unwrap();
        assert_eq!(s.census().get(A), 40);
        assert_eq!(s.census().get(B), 10);
        let tiny = stratified_subsample(&ds, 5, 3, 5).unwrap();
        assert_eq!(tiny.census().get(B), 3);
        assert_eq!(stratified_subsample(&ds, 500, 2, 5).unwrap(), ds);
        assert_eq!(stratified_subsample(&ds, 50, 2, 5).unwrap(), s);
    }

    #[test]
    fn exact_two_by_two() {
        use TrafficClass::{Normal as A, TcpSyn as B};
        let ds = labelled(&[A, B, A, B]);
        let plan = stratified_folds(&ds, 2, 9).unwrap();
        for f in plan.folds() {
            let mut cls: Vec<_> = f.iter().map(|&i| ds.records()[i].label()).collect();
            cls.sort();
            assert_eq!(cls, vec![A, B]);
        }
    }

    #[test]
    fn k_bounds() {
        use TrafficClass::{Normal as A, TcpSyn as B};
        let ds = labelled(&[A, B, A, B, A]);
        assert!(matches!(stratified_folds(&ds, 1, 0), Err(Error::KOutOfRange { k: 1, max: 2 })));
        assert!(matches!(stratified_folds(&ds, 3, 0), Err(Error::KOutOfRange { k: 3, max: 2 })));
        assert!(stratified_folds(&ds, 2, 0).is_ok());
    }

    #[test]
    fn train_is_complement() {
        use TrafficClass::{Normal as A, TcpSyn as B};
        let ds = labelled(&[A, B, A, B, A, B, A]);
        let plan = stratified_folds(&ds, 3, 4).unwrap();
        for f in 0..3 {
            let mut all: Vec<usize> = plan.train(f);
            all.extend_from_slice(plan.test(f));
            all.sort();
            assert_eq!(all, (0..7).collect::<Vec<_>>());
        }
    }

    #[test]
    fn order_of_input_does_not_change_fold_contents() {
        use TrafficClass::{Normal as A, TcpSyn as B};
        let ds = labelled(&[A, B, A, B, A, B, A, B]);
        let rev: Vec<usize> = (0..ds.len()).rev().collect();
        let ds2 = ds.select_rows(&rev);
        let p1 = stratified_folds(&ds, 2, 3).unwrap();
        let p2 = stratified_folds(&ds2, 2, 3).unwrap();
        for (a, b) in p1.folds().iter().zip(p2.folds()) {
            let fa: Vec<&[f64]> = a.iter().map(|&i| ds.records()[i].features()).collect();
            let fb: Vec<&[f64]> = b.iter().map(|&i| ds2.records()[i].features()).collect();
            assert_eq!(fa, fb);
        }
    }
}

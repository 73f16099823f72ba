//! Multi-class ReliefF.
//!
//! For each sampled instance R the k nearest hits (same class) and, for every
//! other class C, the k nearest misses are found under the Manhattan distance
//! on range-normalized features. Each attribute weight moves down by the mean
//! hit difference and up by the prior-weighted mean miss difference, divided
//! by the number of sampled instances.
//!
//! Candidates whose feature vector equals R's are skipped: an exact duplicate
//! carries no information about which attribute separates classes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FeatureScore, Ranking};
use crate::dataset::{Dataset, NUM_CLASSES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleCount {
    All,
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReliefConfig {
    pub k: usize,
    pub samples: SampleCount,
    pub seed: u64,
}

impl Default for ReliefConfig {
    fn default() -> Self {
        ReliefConfig {
            k: 10,
            samples: SampleCount::All,
            seed: 1,
        }
    }
}

pub fn relieff(ds: &Dataset, cfg: &ReliefConfig) -> Result<Ranking> {
    ds.require_non_empty()?;
    let census = ds.census();
    if census.present().len() < 2 {
        return Err(Error::SingleClass);
    }
    if cfg.k == 0 {
        return Err(Error::InvalidConfig("ReliefF needs k >= 1".into()));
    }
    let n = ds.len();
    let width = ds.width();

    let sampled: Vec<usize> = match cfg.samples {
        SampleCount::All => (0..n).collect(),
        SampleCount::Count(m) => {
            if m == 0 || m > n {
                return Err(Error::NOutOfRange { n: m, max: n });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut idx = rand::seq::index::sample(&mut rng, n, m).into_vec();
            idx.sort_unstable();
            idx
        }
    };

    let inv_range: Vec<f64> = (0..width)
        .map(|j| {
            let (lo, hi) = ds
                .column(j)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi > lo {
                1.0 / (hi - lo)
            } else {
                0.0
            }
        })
        .collect();
    let rows: Vec<&[f64]> = ds.records().iter().map(|r| r.features()).collect();
    let labels: Vec<usize> = ds.records().iter().map(|r| r.label().index()).collect();
    let prior: Vec<f64> = census
        .counts()
        .iter()
        .map(|&c| c as f64 / n as f64)
        .collect();

    let m = sampled.len() as f64;
    let mut weights = vec![0.0; width];
    let mut by_class: Vec<Vec<(f64, usize)>> = vec![Vec::new(); NUM_CLASSES];
    let mut mean_diff = vec![0.0; width];

    for &r in &sampled {
        let x = rows[r];
        for v in by_class.iter_mut() {
            v.clear();
        }
        for (i, y) in rows.iter().enumerate() {
            if i == r || *y == x {
                continue;
            }
            let d: f64 = x
                .iter()
                .zip(*y)
                .zip(&inv_range)
                .map(|((a, b), s)| (a - b).abs() * s)
                .sum();
            by_class[labels[i]].push((d, i));
        }
        let own = labels[r];
        let miss_mass = 1.0 - prior[own];
        for (class, cands) in by_class.iter_mut().enumerate() {
            if cands.is_empty() {
                continue;
            }
            let take = cfg.k.min(cands.len());
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if take < cands.len() {
                cands.select_nth_unstable_by(take - 1, cmp);
            }
            let nearest = &mut cands[..take];
            nearest.sort_unstable_by(cmp);

            mean_diff.iter_mut().for_each(|v| *v = 0.0);
            for &(_, i) in nearest.iter() {
                for (j, md) in mean_diff.iter_mut().enumerate() {
                    *md += (x[j] - rows[i][j]).abs() * inv_range[j];
                }
            }
            let scale = if class == own {
                -1.0 / take as f64
            } else {
                prior[class] / miss_mass / take as f64
            };
            for (w, md) in weights.iter_mut().zip(&mean_diff) {
                *w += scale * md / m;
            }
        }
    }

    let scores = ds
        .schema()
        .iter()
        .zip(weights)
        .map(|(&feature, w)| FeatureScore {
            feature,
            score: w.clamp(-1.0, 1.0),
        })
        .collect();
    Ok(Ranking::new("relieff", scores))
}

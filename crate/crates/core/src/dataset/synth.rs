//! Seeded synthetic MIB traffic.
//!
//! Every counter is drawn as `round(exp(ln(base) + s * shift + noise * z))`
//! with `z ~ N(0, 1)`. `base` is a normal-traffic level per counter and
//! `shift` a per-class log-scale offset, so separability `s = 0` makes all
//! classes share one distribution while `s = 1` gives each attack its own
//! signature on the counters of the protocol it floods.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::schema::{FeatureId, TrafficClass, NUM_CLASSES, NUM_FEATURES};
use super::{Dataset, MibRecord};
use crate::error::{Error, Result};

/// Record counts of the reference capture, in class declaration order.
pub const TABLE1_CENSUS: [usize; NUM_CLASSES] = [600, 960, 773, 632, 573, 780, 480, 200];

/// Mean counter values per sampling interval under normal traffic.
const BASELINE: [f64; NUM_FEATURES] = [
    2.0e5, 1.5e5, 4.0, 800.0, 20.0, 1.0, 700.0, 10.0, // IF
    5.0, 400.0, 380.0, 10.0, 3.0, 15.0, 2.0, 8.0, // TCP
    60.0, 55.0, 1.0, 4.0, // UDP
    900.0, 850.0, 820.0, 4.0, 1.0, 30.0, 1.0, 1.0, // IP
    6.0, 3.0, 6.0, 3.0, 3.0, 3.0, // ICMP
];

/// Log-scale offsets applied to selected counters for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProfile {
    pub shifts: Vec<(FeatureId, f64)>,
}

impl ClassProfile {
    fn from_pairs(pairs: &[(usize, f64)]) -> ClassProfile {
        ClassProfile {
            shifts: pairs
                .iter()
                .map(|&(i, s)| (FeatureId::new(i).expect("static index"), s))
                .collect(),
        }
    }

    fn shift_vector(&self) -> [f64; NUM_FEATURES] {
        let mut v = [0.0; NUM_FEATURES];
        for (f, s) in &self.shifts {
            v[f.index() - 1] += s;
        }
        v
    }
}

fn default_profiles() -> Vec<ClassProfile> {
    vec![
        // Normal
        ClassProfile::from_pairs(&[]),
        // TCP-SYN: half-open handshakes answered with resets
        ClassProfile::from_pairs(&[
            (9, 3.0),
            (12, 3.0),
            (10, 1.5),
            (11, 1.2),
            (4, 1.2),
            (21, 1.2),
            (26, 1.5),
        ]),
        // UDP flood: datagrams to closed ports trigger ICMP unreachables
        ClassProfile::from_pairs(&[
            (17, 3.0),
            (20, 2.5),
            (1, 1.5),
            (3, 2.0),
            (21, 1.5),
            (22, 1.5),
            (24, 2.0),
            (32, 2.0),
            (31, 1.5),
        ]),
        // ICMP echo flood
        ClassProfile::from_pairs(&[
            (33, 3.5),
            (34, 3.5),
            (29, 3.0),
            (31, 3.0),
            (7, 2.0),
            (21, 1.0),
            (23, 1.0),
            (26, 2.0),
        ]),
        // HTTP flood: full connections carrying requests and responses
        ClassProfile::from_pairs(&[(10, 2.0), (11, 2.0), (2, 2.0), (14, 1.5), (7, 2.5), (23, 1.5)]),
        // Slowloris: many idle established connections
        ClassProfile::from_pairs(&[(14, 2.5), (12, 1.0), (1, -0.8), (7, -1.5), (15, 1.5), (24, 1.5)]),
        // Slowpost: established connections trickling bodies
        ClassProfile::from_pairs(&[(14, 2.0), (1, 1.0), (3, 2.0), (13, 2.0), (2, -0.8), (26, 2.0)]),
        // Brute force: short-lived login sessions
        ClassProfile::from_pairs(&[(12, 1.5), (15, 2.5), (9, 1.5), (24, 2.0)]),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Records per class in declaration order.
    pub counts: [usize; NUM_CLASSES],
    /// 0 = indistinguishable classes, 1 = full class signatures.
    pub separability: f64,
    /// Standard deviation of the log-normal noise.
    pub noise: f64,
    pub baseline: [f64; NUM_FEATURES],
    pub profiles: Vec<ClassProfile>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            counts: TABLE1_CENSUS,
            separability: 1.0,
            noise: 0.35,
            baseline: BASELINE,
            profiles: default_profiles(),
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_separability(mut self, s: f64) -> Self {
        self.separability = s;
        self
    }

    pub fn with_counts(mut self, counts: [usize; NUM_CLASSES]) -> Self {
        self.counts = counts;
        self
    }

    /// The same class proportions scaled to roughly `total` records, with at
    /// least `min_per_class` records in every class.
    pub fn scaled(mut self, total: usize, min_per_class: usize) -> Self {
        let full: usize = TABLE1_CENSUS.iter().sum();
        for (c, &n) in self.counts.iter_mut().zip(&TABLE1_CENSUS) {
            *c = (n * total / full).max(min_per_class);
        }
        self
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.total() == 0 {
            return Err(Error::InvalidCount("total record count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.separability) {
            return Err(Error::InvalidConfig(format!(
                "separability {} outside [0, 1]",
                self.separability
            )));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::InvalidConfig(format!("noise {} must be >= 0", self.noise)));
        }
        if self.profiles.len() != NUM_CLASSES {
            return Err(Error::InvalidConfig(format!(
                "expected {NUM_CLASSES} class profiles, got {}",
                self.profiles.len()
            )));
        }
        if self.baseline.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::InvalidConfig("baseline levels must be positive".into()));
        }
        Ok(())
    }

    fn source_tag(&self) -> String {
        format!(
            "synth:seed={},s={},noise={},counts={}",
            self.seed,
            self.separability,
            self.noise,
            self.counts.map(|c| c.to_string()).join("/")
        )
    }
}

pub fn synthesize(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut labels: Vec<TrafficClass> = TrafficClass::ALL
        .iter()
        .zip(cfg.counts)
        .flat_map(|(&c, n)| std::iter::repeat_n(c, n))
        .collect();
    labels.shuffle(&mut rng);

    let log_base = cfg.baseline.map(f64::ln);
    let shifts: Vec<[f64; NUM_FEATURES]> =
        cfg.profiles.iter().map(ClassProfile::shift_vector).collect();

    let records = labels
        .into_iter()
        .map(|label| {
            let shift = &shifts[label.index()];
            let features = (0..NUM_FEATURES)
                .map(|j| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (log_base[j] + cfg.separability * shift[j] + cfg.noise * z)
                        .exp()
                        .round()
                })
                .collect();
            MibRecord::new(features, label)
        })
        .collect();
    Dataset::new(FeatureId::all(), records, cfg.source_tag())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::write_csv;

    #[test]
    fn default_census_matches_reference() {
        let ds = synthesize(&SynthConfig::default()).unwrap();
        assert_eq!(ds.len(), 4998);
        assert_eq!(ds.census().counts(), &TABLE1_CENSUS);
        assert!(ds.records().iter().all(|r| r.features().iter().all(|v| *v >= 0.0)));
    }

    #[test]
    fn deterministic_bytes() {
        let cfg = SynthConfig::default().scaled(500, 5);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_csv(&synthesize(&cfg).unwrap(), &mut a).unwrap();
        write_csv(&synthesize(&cfg).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let mut c = Vec::new();
        write_csv(&synthesize(&cfg.with_seed(7)).unwrap(), &mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn icmp_flood_inflates_icmp_counters() {
        let ds = synthesize(&SynthConfig::default().scaled(1000, 20)).unwrap();
        let echo = FeatureId::from_name("icmpInEchos").unwrap().index() - 1;
        let mean = |class: TrafficClass| {
            let v: Vec<f64> = ds
                .records()
                .iter()
                .filter(|r| r.label() == class)
                .map(|r| r.features()[echo])
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean(TrafficClass::IcmpEcho) > 10.0 * mean(TrafficClass::Normal));
    }

    #[test]
    fn invalid_configs() {
        let cfg = SynthConfig::default().with_counts([0; NUM_CLASSES]);
        assert!(matches!(synthesize(&cfg), Err(Error::InvalidCount(_))));
        let cfg = SynthConfig::default().with_separability(1.5);
        assert!(matches!(synthesize(&cfg), Err(Error::InvalidConfig(_))));
    }
}

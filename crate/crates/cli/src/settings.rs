//! Flat `key = value` configuration shared by every command.
//!
//! ```text
//! # comments start with '#'
//! dataset.path = data.csv
//! seed = 42
//! cv.k = 10
//! cell.1.classifier = bayes
//! cell.1.selector = infogain-top:5
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mibids::dataset::{SynthConfig, NUM_CLASSES, TABLE1_CENSUS};
use mibids::featsel::{GaConfig, ReliefConfig, SampleCount};
use mibids::learn::{
    BatchMode, BayesConfig, ClassifierConfig, ClassifierKind, ClassifierSpec, KernelSpec,
    MlpTrainConfig, SvmConfig,
};
use mibids::{Error, Result};

/// Keys accepted outside `cell.N.*`.
pub const KEYS: &[&str] = &[
    "dataset.path",
    "synth.seed",
    "synth.separability",
    "synth.noise",
    "synth.counts",
    "synth.total",
    "synth.min_per_class",
    "seed",
    "cv.k",
    "out.dir",
    "matrix",
    "bayes.alpha",
    "bayes.bins",
    "mlp.learning_rate",
    "mlp.momentum",
    "mlp.epochs",
    "mlp.hidden",
    "mlp.init",
    "mlp.beta",
    "mlp.batch",
    "svm.c",
    "svm.kernel",
    "svm.tol",
    "svm.max_iter",
    "ga.population",
    "ga.generations",
    "ga.crossover",
    "ga.mutation",
    "wrapper.folds",
    "wrapper.sample",
    "wrapper.mlp.epochs",
    "relieff.k",
    "relieff.samples",
    "rank.bins",
];

/// Keys accepted under `cell.N.`.
pub const CELL_KEYS: &[&str] = &["classifier", "selector", "name", "table"];

/// Default records used for wrapper fitness by the SVM and MLP searches.
pub const WRAPPER_SAMPLE: usize = 1000;
/// Default training epochs of the MLP inside wrapper fitness.
pub const WRAPPER_MLP_EPOCHS: usize = 20;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
    base_dir: PathBuf,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`", no + 1)))?;
            let key = k.trim();
            if s.values.contains_key(key) {
                return Err(invalid(format!("line {}: duplicate key `{key}`", no + 1)));
            }
            s.set(key, v.trim())?;
        }
        Ok(s)
    }

    /// Reads a file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Settings> {
        let mut s = Settings::parse(&std::fs::read_to_string(path)?)?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        check_key(key)?;
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| invalid(format!("override `{kv}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        self.base_dir.join(p)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| invalid(format!("`{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Sorted cell numbers that have at least one `cell.N.*` key.
    pub fn cell_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .values
            .keys()
            .filter_map(|k| k.strip_prefix("cell.")?.split('.').next()?.parse().ok())
            .collect();
        ids.dedup();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn synth_config(&self) -> Result<SynthConfig> {
        let mut cfg = SynthConfig::default();
        if let Some(raw) = self.raw("synth.counts") {
            let counts: Vec<i64> = raw
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse()
                        .map_err(|_| invalid(format!("synth.counts: bad count `{c}`")))
                })
                .collect::<Result<_>>()?;
            if counts.len() != NUM_CLASSES {
                return Err(invalid(format!("synth.counts needs {NUM_CLASSES} values")));
            }
            if let Some(n) = counts.iter().find(|c| **c < 0) {
                return Err(invalid(format!("synth.counts: negative count {n}")));
            }
            let mut arr = [0usize; NUM_CLASSES];
            for (a, c) in arr.iter_mut().zip(counts) {
                *a = c as usize;
            }
            cfg = cfg.with_counts(arr);
        }
        if let Some(total) = self.get::<i64>("synth.total")? {
            if total <= 0 {
                return Err(invalid(format!("synth.total must be positive, got {total}")));
            }
            let min = self.get_or("synth.min_per_class", 10usize)?;
            if self.raw("synth.counts").is_some() {
                return Err(invalid("synth.total and synth.counts are exclusive"));
            }
            cfg = cfg.with_counts(TABLE1_CENSUS).scaled(total as usize, min);
        }
        cfg.separability = self.get_or("synth.separability", cfg.separability)?;
        cfg.noise = self.get_or("synth.noise", cfg.noise)?;
        cfg.seed = self.get_or("synth.seed", cfg.seed)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn classifier_spec(&self, kind: ClassifierKind, seed: u64) -> Result<ClassifierSpec> {
        let config = match kind {
            ClassifierKind::Bayes => {
                let d = BayesConfig::default();
                ClassifierConfig::Bayes(BayesConfig {
                    alpha: self.get_or("bayes.alpha", d.alpha)?,
                    bins: self.get_or("bayes.bins", d.bins)?,
                })
            }
            ClassifierKind::Mlp => {
                let d = MlpTrainConfig::default();
                let hidden = match self.raw("mlp.hidden") {
                    None | Some("auto") => None,
                    Some(h) => Some(
                        h.split('-')
                            .map(|x| {
                                x.trim()
                                    .parse()
                                    .map_err(|_| invalid(format!("mlp.hidden: bad size `{x}`")))
                            })
                            .collect::<Result<Vec<usize>>>()?,
                    ),
                };
                let batch = match self.raw("mlp.batch") {
                    None | Some("stochastic") => BatchMode::Stochastic,
                    Some("full") => BatchMode::Full,
                    Some(o) => return Err(invalid(format!("mlp.batch: unknown mode `{o}`"))),
                };
                let cfg = MlpTrainConfig {
                    learning_rate: self.get_or("mlp.learning_rate", d.learning_rate)?,
                    momentum: self.get_or("mlp.momentum", d.momentum)?,
                    epochs: self.get_or("mlp.epochs", d.epochs)?,
                    hidden,
                    init_scale: self.get_or("mlp.init", d.init_scale)?,
                    beta: self.get_or("mlp.beta", d.beta)?,
                    batch,
                };
                cfg.validate()?;
                ClassifierConfig::Mlp(cfg)
            }
            ClassifierKind::Svm => {
                let d = SvmConfig::default();
                let kernel = match self.raw("svm.kernel") {
                    None => d.kernel,
                    Some(k) => KernelSpec::parse(k)?,
                };
                let cfg = SvmConfig {
                    c: self.get_or("svm.c", d.c)?,
                    kernel,
                    tol: self.get_or("svm.tol", d.tol)?,
                    max_iter: self.get_or("svm.max_iter", d.max_iter)?,
                };
                cfg.validate()?;
                ClassifierConfig::Svm(cfg)
            }
        };
        Ok(ClassifierSpec { config, seed })
    }

    /// The classifier used inside wrapper fitness: identical to the
    /// evaluated one except for MLP epochs.
    pub fn wrapper_spec(&self, kind: ClassifierKind, seed: u64) -> Result<ClassifierSpec> {
        let mut spec = self.classifier_spec(kind, seed)?;
        if let ClassifierConfig::Mlp(cfg) = &mut spec.config {
            cfg.epochs = self.get_or("wrapper.mlp.epochs", WRAPPER_MLP_EPOCHS)?;
        }
        Ok(spec)
    }

    /// Records used for wrapper fitness; `None` means the whole dataset.
    pub fn wrapper_sample(&self, kind: ClassifierKind) -> Result<Option<usize>> {
        match self.raw("wrapper.sample") {
            None | Some("auto") => Ok(match kind {
                ClassifierKind::Bayes => None,
                _ => Some(WRAPPER_SAMPLE),
            }),
            Some("all") => Ok(None),
            Some(_) => Ok(Some(self.get::<usize>("wrapper.sample")?.unwrap())),
        }
    }

    pub fn ga_config(&self, seed: u64) -> Result<GaConfig> {
        let d = GaConfig::default();
        let cfg = GaConfig {
            population: self.get_or("ga.population", d.population)?,
            generations: self.get_or("ga.generations", d.generations)?,
            crossover: self.get_or("ga.crossover", d.crossover)?,
            mutation: self.get_or("ga.mutation", d.mutation)?,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn relief_config(&self, seed: u64) -> Result<ReliefConfig> {
        let d = ReliefConfig::default();
        let samples = match self.raw("relieff.samples") {
            None | Some("all") => SampleCount::All,
            Some(_) => SampleCount::Count(self.get("relieff.samples")?.unwrap()),
        };
        Ok(ReliefConfig {
            k: self.get_or("relieff.k", d.k)?,
            samples,
            seed,
        })
    }
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        return Ok(());
    }
    if let Some(rest) = key.strip_prefix("cell.") {
        if let Some((n, field)) = rest.split_once('.') {
            if n.parse::<u32>().is_ok() && CELL_KEYS.contains(&field) {
                return Ok(());
            }
        }
    }
    Err(invalid(format!("unknown key `{key}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let s = Settings::parse("# c\n seed = 7 # trailing\n\ncv.k=5\n").unwrap();
        assert_eq!(s.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(s.get_or("cv.k", 10usize).unwrap(), 5);
        assert_eq!(s.get_or("ga.population", 20usize).unwrap(), 20);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert!(Settings::parse("sed = 1").is_err());
        assert!(Settings::parse("seed = 1\nseed = 2").is_err());
        assert!(Settings::parse("seed").is_err());
        assert!(Settings::parse("cell.x.classifier = svm").is_err());
        assert!(Settings::parse("cell.1.colour = red").is_err());
        let s = Settings::parse("seed = abc").unwrap();
        assert!(s.get::<u64>("seed").is_err());
    }

    #[test]
    fn cell_ids_sorted_unique() {
        let s = Settings::parse(
            "cell.10.classifier = svm\ncell.2.classifier = mlp\ncell.2.selector = none\n",
        )
        .unwrap();
        assert_eq!(s.cell_ids(), vec![2, 10]);
    }

    #[test]
    fn synth_counts() {
        let s = Settings::parse("synth.counts = 1,2,3,4,5,6,7,8").unwrap();
        assert_eq!(s.synth_config().unwrap().counts, [1, 2, 3, 4, 5, 6, 7, 8]);
        let neg = Settings::parse("synth.counts = 1,2,-3,4,5,6,7,8").unwrap();
        assert!(matches!(neg.synth_config(), Err(Error::InvalidConfig(_))));
        let short = Settings::parse("synth.counts = 1,2").unwrap();
        assert!(short.synth_config().is_err());
        let scaled = Settings::parse("synth.total = 500").unwrap();
        assert!(scaled.synth_config().unwrap().counts.iter().sum::<usize>() >= 490);
    }

    #[test]
    fn classifier_overrides() {
        let s = Settings::parse("mlp.epochs = 3\nmlp.hidden = 4-3\nsvm.kernel = rbf:2\n").unwrap();
        let mlp = s.classifier_spec(ClassifierKind::Mlp, 1).unwrap();
        match mlp.config {
            ClassifierConfig::Mlp(c) => {
                assert_eq!(c.epochs, 3);
                assert_eq!(c.hidden, Some(vec![4, 3]));
            }
            _ => unreachable!(),
        }
        let svm = s.classifier_spec(ClassifierKind::Svm, 1).unwrap();
        assert!(svm.describe().contains("rbf:2"));
        match s.wrapper_spec(ClassifierKind::Mlp, 1).unwrap().config {
            ClassifierConfig::Mlp(c) => assert_eq!(c.epochs, WRAPPER_MLP_EPOCHS),
            _ => unreachable!(),
        }
        assert!(Settings::parse("svm.c = -1").unwrap().classifier_spec(ClassifierKind::Svm, 0).is_err());
    }

    #[test]
    fn wrapper_sample_defaults() {
        let s = Settings::default();
        assert_eq!(s.wrapper_sample(ClassifierKind::Bayes).unwrap(), None);
        assert_eq!(s.wrapper_sample(ClassifierKind::Svm).unwrap(), Some(WRAPPER_SAMPLE));
        let all = Settings::parse("wrapper.sample = all").unwrap();
        assert_eq!(all.wrapper_sample(ClassifierKind::Mlp).unwrap(), None);
        let n = Settings::parse("wrapper.sample = 300").unwrap();
        assert_eq!(n.wrapper_sample(ClassifierKind::Bayes).unwrap(), Some(300));
    }
}

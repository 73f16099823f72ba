//! The three classifiers behind one fit/predict contract.

mod bayes;
mod codec;
mod kernel;
mod mlp;
mod svm;

use std::fmt;
use std::str::FromStr;

pub use bayes::{bayes_fit, BayesConfig, BayesModel};
pub use kernel::{kernel_eval, KernelSpec};
pub use mlp::{mlp_fit, sigmoid, BatchMode, MlpModel, MlpTrainConfig, Network};
pub use svm::{svm_fit_binary, svm_fit_multi, SvmBinaryModel, SvmConfig, SvmMultiModel};

use crate::dataset::{Dataset, FeatureId, TrafficClass};
use crate::error::{Error, Result};

/// A predicted class with the per-class scores it was chosen from
/// (posteriors, output activations or decision values).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: TrafficClass,
    pub classes: Vec<TrafficClass>,
    pub scores: Vec<f64>,
}

impl Prediction {
    /// Highest score wins; equal scores go to the class declared first.
    pub(crate) fn argmax(classes: &[TrafficClass], scores: Vec<f64>) -> Prediction {
        let mut best = 0;
        for (i, s) in scores.iter().enumerate().skip(1) {
            if *s > scores[best] {
                best = i;
            }
        }
        Prediction {
            class: classes[best],
            classes: classes.to_vec(),
            scores,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Bayes,
    Mlp,
    Svm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Bayes, ClassifierKind::Mlp, ClassifierKind::Svm];

    pub fn id(self) -> &'static str {
        match self {
            ClassifierKind::Bayes => "bayes",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::Svm => "svm",
        }
    }

    /// Name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::Bayes => "BayesNet",
            ClassifierKind::Mlp => "MLP",
            ClassifierKind::Svm => "SVM",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bayes" | "bayesnet" => Ok(ClassifierKind::Bayes),
            "mlp" => Ok(ClassifierKind::Mlp),
            "svm" => Ok(ClassifierKind::Svm),
            other => Err(Error::InvalidConfig(format!("unknown classifier `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierConfig {
    Bayes(BayesConfig),
    Mlp(MlpTrainConfig),
    Svm(SvmConfig),
}

/// Everything needed to train a model reproducibly.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSpec {
    pub config: ClassifierConfig,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn default_for(kind: ClassifierKind, seed: u64) -> ClassifierSpec {
        let config = match kind {
            ClassifierKind::Bayes => ClassifierConfig::Bayes(BayesConfig::default()),
            ClassifierKind::Mlp => ClassifierConfig::Mlp(MlpTrainConfig::default()),
            ClassifierKind::Svm => ClassifierConfig::Svm(SvmConfig::default()),
        };
        ClassifierSpec { config, seed }
    }

    pub fn bayes(seed: u64) -> ClassifierSpec {
        Self::default_for(ClassifierKind::Bayes, seed)
    }

    pub fn mlp(seed: u64) -> ClassifierSpec {
        Self::default_for(ClassifierKind::Mlp, seed)
    }

    pub fn svm(seed: u64) -> ClassifierSpec {
        Self::default_for(ClassifierKind::Svm, seed)
    }

    pub fn with_seed(&self, seed: u64) -> ClassifierSpec {
        ClassifierSpec {
            config: self.config.clone(),
            seed,
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self.config {
            ClassifierConfig::Bayes(_) => ClassifierKind::Bayes,
            ClassifierConfig::Mlp(_) => ClassifierKind::Mlp,
            ClassifierConfig::Svm(_) => ClassifierKind::Svm,
        }
    }

    pub fn fit(&self, ds: &Dataset) -> Result<TrainedModel> {
        Ok(match &self.config {
            ClassifierConfig::Bayes(c) => TrainedModel::Bayes(bayes_fit(ds, c)?),
            ClassifierConfig::Mlp(c) => TrainedModel::Mlp(mlp_fit(ds, c, self.seed)?),
            ClassifierConfig::Svm(c) => TrainedModel::Svm(svm_fit_multi(ds, c)?),
        })
    }

    /// One-line description used in report provenance.
    pub fn describe(&self) -> String {
        match &self.config {
            ClassifierConfig::Bayes(c) => format!("bayes alpha={} bins={}", c.alpha, c.bins),
            ClassifierConfig::Mlp(c) => format!(
                "mlp lr={} momentum={} epochs={} hidden={} init={} beta={} seed={}",
                c.learning_rate,
                c.momentum,
                c.epochs,
                c.hidden
                    .as_ref()
                    .map(|h| h.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-"))
                    .unwrap_or_else(|| "auto".into()),
                c.init_scale,
                c.beta,
                self.seed
            ),
            ClassifierConfig::Svm(c) => {
                format!("svm C={} kernel={} tol={}", c.c, c.kernel, c.tol)
            }
        }
    }
}

/// A fitted classifier of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Bayes(BayesModel),
    Mlp(MlpModel),
    Svm(SvmMultiModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedModel::Bayes(_) => ClassifierKind::Bayes,
            TrainedModel::Mlp(_) => ClassifierKind::Mlp,
            TrainedModel::Svm(_) => ClassifierKind::Svm,
        }
    }

    pub fn schema(&self) -> &[FeatureId] {
        match self {
            TrainedModel::Bayes(m) => m.schema(),
            TrainedModel::Mlp(m) => m.schema(),
            TrainedModel::Svm(m) => m.schema(),
        }
    }

    pub fn classes(&self) -> &[TrafficClass] {
        match self {
            TrainedModel::Bayes(m) => m.classes(),
            TrainedModel::Mlp(m) => m.classes(),
            TrainedModel::Svm(m) => m.classes(),
        }
    }

    /// Features must follow the model's schema order.
    pub fn predict_detailed(&self, features: &[f64]) -> Result<Prediction> {
        match self {
            TrainedModel::Bayes(m) => m.predict(features),
            TrainedModel::Mlp(m) => m.predict(features),
            TrainedModel::Svm(m) => m.predict(features),
        }
    }

    pub fn predict(&self, features: &[f64]) -> Result<TrafficClass> {
        Ok(self.predict_detailed(features)?.class)
    }

    pub fn to_text(&self) -> String {
        let mut w = codec::Writer::new();
        match self {
            TrainedModel::Bayes(m) => m.write(&mut w),
            TrainedModel::Mlp(m) => m.write(&mut w),
            TrainedModel::Svm(m) => m.write(&mut w),
        }
        w.finish()
    }

    pub fn from_text(text: &str) -> Result<TrainedModel> {
        let mut r = codec::Reader::new(text);
        match r.header()?.as_str() {
            "bayes" => Ok(TrainedModel::Bayes(BayesModel::read(&mut r)?)),
            "mlp" => Ok(TrainedModel::Mlp(MlpModel::read(&mut r)?)),
            "svm" => Ok(TrainedModel::Svm(SvmMultiModel::read(&mut r)?)),
            other => Err(Error::ModelFormat(format!("unknown model kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synthesize, SynthConfig};

    #[test]
    fn argmax_ties_go_to_declaration_order() {
        let classes = [TrafficClass::TcpSyn, TrafficClass::UdpFlood, TrafficClass::Slowpost];
        let p = Prediction::argmax(&classes, vec![0.2, 0.5, 0.5]);
        assert_eq!(p.class, TrafficClass::UdpFlood);
        let p = Prediction::argmax(&classes, vec![-3.0, -2.0, -5.0]);
        assert_eq!(p.class, TrafficClass::UdpFlood);
    }

    #[test]
    fn every_model_round_trips_through_text() {
        let ds = synthesize(&SynthConfig::default().scaled(160, 8)).unwrap();
        let specs = [
            ClassifierSpec::bayes(1),
            ClassifierSpec {
                config: ClassifierConfig::Mlp(MlpTrainConfig { epochs: 5, ..Default::default() }),
                seed: 1,
            },
            ClassifierSpec::svm(1),
            ClassifierSpec {
                config: ClassifierConfig::Svm(SvmConfig {
                    kernel: KernelSpec::Rbf { sigma: 2.0 },
                    ..Default::default()
                }),
                seed: 1,
            },
        ];
        for spec in specs {
            let model = spec.fit(&ds).unwrap();
            let text = model.to_text();
            let back = TrainedModel::from_text(&text).unwrap();
            assert_eq!(back, model, "{}", spec.describe());
            assert_eq!(back.to_text(), text);
            for r in ds.records().iter().take(20) {
                assert_eq!(
                    back.predict_detailed(r.features()).unwrap(),
                    model.predict_detailed(r.features()).unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_garbage_model_text() {
        assert!(TrainedModel::from_text("").is_err());
        assert!(TrainedModel::from_text("mibids-model 2\nkind bayes\n").is_err());
        assert!(TrainedModel::from_text("mibids-model 1\nkind knn\n").is_err());
        let good = ClassifierSpec::bayes(0)
            .fit(&synthesize(&SynthConfig::default().scaled(100, 5)).unwrap())
            .unwrap()
            .to_text();
        let truncated: String = good.lines().take(8).collect::<Vec<_>>().join("\n");
        assert!(TrainedModel::from_text(&truncated).is_err());
    }

    #[test]
    fn classifier_ids() {
        for k in ClassifierKind::ALL {
            assert_eq!(k.id().parse::<ClassifierKind>().unwrap(), k);
        }
        assert!("knn".parse::<ClassifierKind>().is_err());
    }
}

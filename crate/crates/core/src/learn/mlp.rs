//! Multi-layer perceptron with logistic units, trained by backpropagation of
//! the squared error with momentum.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::codec::{self, Reader, Writer};
use super::Prediction;
use crate::dataset::{fit_standardize, Dataset, FeatureId, StandardizeModel, TrafficClass};
use crate::error::{Error, Result};

/// `1 / (1 + e^(-beta x))`, evaluated without overflow for any finite input.
pub fn sigmoid(x: f64, beta: f64) -> f64 {
    let z = beta * x;
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    /// Update after every record.
    Stochastic,
    /// One update per epoch from the mean gradient.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpTrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    /// Hidden layer widths; `None` gives one layer of `ceil((inputs + classes) / 2)`.
    pub hidden: Option<Vec<usize>>,
    /// Initial weights are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub beta: f64,
    pub batch: BatchMode,
}

impl Default for MlpTrainConfig {
    fn default() -> Self {
        MlpTrainConfig {
            learning_rate: 0.3,
            momentum: 0.2,
            epochs: 500,
            hidden: None,
            init_scale: 0.5,
            beta: 1.0,
            batch: BatchMode::Stochastic,
        }
    }
}

impl MlpTrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {} must be >= 0", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} outside [0, 1)", self.momentum));
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta {} must be positive", self.beta));
        }
        if let Some(h) = &self.hidden {
            if h.is_empty() || h.contains(&0) {
                return bad("hidden layers must be non-empty with positive widths".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// Row-major `[output][input]`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

/// Fully connected logistic network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
    beta: f64,
}

impl Network {
    /// Layer sizes from input to output, weights uniform in `[-scale, scale]`.
    pub fn random(sizes: &[usize], scale: f64, beta: f64, rng: &mut impl Rng) -> Network {
        assert!(sizes.len() >= 2, "need at least an input and an output layer");
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (inputs, outputs) = (w[0], w[1]);
                let mut draw = || rng.random_range(-scale..=scale);
                let weights = (0..inputs * outputs).map(|_| draw()).collect();
                let bias = (0..outputs).map(|_| draw()).collect();
                Layer {
                    inputs,
                    outputs,
                    weights,
                    bias,
                }
            })
            .collect();
        Network { layers, beta }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    /// Activations of every layer, input first.
    fn forward_all(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for l in &self.layers {
            let a = acts.last().unwrap();
            let out = (0..l.outputs)
                .map(|o| {
                    let row = &l.weights[o * l.inputs..(o + 1) * l.inputs];
                    let z = l.bias[o] + row.iter().zip(a).map(|(w, v)| w * v).sum::<f64>();
                    sigmoid(z, self.beta)
                })
                .collect();
            acts.push(out);
        }
        acts
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_all(x).pop().unwrap()
    }

    /// `0.5 * sum (output - target)^2`
    pub fn loss(&self, x: &[f64], target: &[f64]) -> f64 {
        self.forward(x)
            .iter()
            .zip(target)
            .map(|(o, t)| 0.5 * (o - t) * (o - t))
            .sum()
    }

    /// All weights and biases, layer by layer, weights before biases.
    pub fn parameters(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn set_parameters(&mut self, p: &[f64]) {
        let mut it = p.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *w = it.next().expect("parameter vector too short");
            }
        }
        assert!(it.next().is_none(), "parameter vector too long");
    }

    /// Gradient of `loss` with respect to `parameters()`, same layout.
    pub fn gradient(&self, x: &[f64], target: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.parameters().len()];
        self.accumulate_gradient(x, target, 1.0, &mut g);
        g
    }

    fn accumulate_gradient(&self, x: &[f64], target: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let acts = self.forward_all(x);
        let out = acts.last().unwrap();
        let loss = out
            .iter()
            .zip(target)
            .map(|(o, t)| 0.5 * (o - t) * (o - t))
            .sum();
        // dE/dz for the output layer; F'(z) = beta F (1 - F)
        let mut delta: Vec<f64> = out
            .iter()
            .zip(target)
            .map(|(o, t)| (o - t) * self.beta * o * (1.0 - o))
            .collect();

        let offsets = self.offsets();
        for (li, l) in self.layers.iter().enumerate().rev() {
            let a = &acts[li];
            let base = offsets[li];
            for o in 0..l.outputs {
                let d = delta[o] * scale;
                let row = &mut grad[base + o * l.inputs..base + (o + 1) * l.inputs];
                for (g, v) in row.iter_mut().zip(a) {
                    *g += d * v;
                }
                grad[base + l.weights.len() + o] += d;
            }
            if li > 0 {
                delta = (0..l.inputs)
                    .map(|i| {
                        let back: f64 = (0..l.outputs)
                            .map(|o| l.weights[o * l.inputs + i] * delta[o])
                            .sum();
                        back * self.beta * a[i] * (1.0 - a[i])
                    })
                    .collect();
            }
        }
        loss
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.layers.len());
        let mut acc = 0;
        for l in &self.layers {
            off.push(acc);
            acc += l.weights.len() + l.bias.len();
        }
        off
    }

    fn apply_step(&mut self, grad: &[f64], velocity: &mut [f64], lr: f64, momentum: f64) {
        let mut k = 0;
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                velocity[k] = momentum * velocity[k] - lr * grad[k];
                *w += velocity[k];
                k += 1;
            }
        }
    }

    /// Trains on `(input, target)` pairs; returns the mean loss of each epoch
    /// as measured during that epoch's pass.
    pub fn train(
        &mut self,
        inputs: &[Vec<f64>],
        targets: &[Vec<f64>],
        cfg: &MlpTrainConfig,
        rng: &mut impl Rng,
    ) -> Vec<f64> {
        let np = self.parameters().len();
        let mut velocity = vec![0.0; np];
        let mut grad = vec![0.0; np];
        let mut order: Vec<usize> = (0..inputs.len()).collect();
        let mut history = Vec::with_capacity(cfg.epochs);
        let n = inputs.len() as f64;
        for _ in 0..cfg.epochs {
            let mut total = 0.0;
            match cfg.batch {
                BatchMode::Stochastic => {
                    order.shuffle(rng);
                    for &i in &order {
                        grad.iter_mut().for_each(|g| *g = 0.0);
                        total += self.accumulate_gradient(&inputs[i], &targets[i], 1.0, &mut grad);
                        self.apply_step(&grad, &mut velocity, cfg.learning_rate, cfg.momentum);
                    }
                }
                BatchMode::Full => {
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for (x, t) in inputs.iter().zip(targets) {
                        total += self.accumulate_gradient(x, t, 1.0 / n, &mut grad);
                    }
                    self.apply_step(&grad, &mut velocity, cfg.learning_rate, cfg.momentum);
                }
            }
            history.push(total / n);
        }
        history
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    classes: Vec<TrafficClass>,
    schema: Vec<FeatureId>,
    standardize: StandardizeModel,
    network: Network,
}

pub fn mlp_fit(ds: &Dataset, cfg: &MlpTrainConfig, seed: u64) -> Result<MlpModel> {
    cfg.validate()?;
    ds.require_non_empty()?;
    let classes = ds.census().present();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let standardize = fit_standardize(ds)?;
    let inputs: Vec<Vec<f64>> = ds
        .records()
        .iter()
        .map(|r| standardize.transform(r.features()))
        .collect();
    let targets: Vec<Vec<f64>> = ds
        .records()
        .iter()
        .map(|r| classes.iter().map(|c| f64::from(*c == r.label())).collect())
        .collect();

    let mut sizes = vec![ds.width()];
    match &cfg.hidden {
        Some(h) => sizes.extend(h),
        None => sizes.push((ds.width() + classes.len()).div_ceil(2)),
    }
    sizes.push(classes.len());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut network = Network::random(&sizes, cfg.init_scale, cfg.beta, &mut rng);
    network.train(&inputs, &targets, cfg, &mut rng);
    Ok(MlpModel {
        classes,
        schema: ds.schema().to_vec(),
        standardize,
        network,
    })
}

impl MlpModel {
    pub fn classes(&self) -> &[TrafficClass] {
        &self.classes
    }

    pub fn schema(&self) -> &[FeatureId] {
        &self.schema
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        if features.len() != self.schema.len() {
            return Err(Error::WidthMismatch {
                expected: self.schema.len(),
                got: features.len(),
            });
        }
        let out = self.network.forward(&self.standardize.transform(features));
        Ok(Prediction::argmax(&self.classes, out))
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        codec::header(w, "mlp");
        w.classes(&self.classes);
        w.schema(&self.schema);
        w.floats("mean", self.standardize.mean());
        w.floats("std", self.standardize.std());
        w.floats("beta", [&self.network.beta]);
        w.line("sizes", self.network.sizes());
        for (i, l) in self.network.layers.iter().enumerate() {
            w.floats(&format!("weights{i}"), &l.weights);
            w.floats(&format!("bias{i}"), &l.bias);
        }
        w.line::<&str>("end", []);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<MlpModel> {
        let classes = r.classes()?;
        let schema = r.schema()?;
        let mean = r.floats("mean", schema.len())?;
        let std = r.floats("std", schema.len())?;
        let beta = r.single("beta")?;
        let sizes: Vec<usize> = r.parsed("sizes")?;
        if sizes.len() < 2 || sizes[0] != schema.len() || *sizes.last().unwrap() != classes.len() {
            return Err(Error::ModelFormat("layer sizes do not match schema/classes".into()));
        }
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                Ok(Layer {
                    inputs: w[0],
                    outputs: w[1],
                    weights: r.floats(&format!("weights{i}"), w[0] * w[1])?,
                    bias: r.floats(&format!("bias{i}"), w[1])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        r.end()?;
        Ok(MlpModel {
            classes,
            schema,
            standardize: StandardizeModel::from_parts(mean, std),
            network: Network { layers, beta },
        })
    }
}

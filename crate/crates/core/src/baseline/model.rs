//! Multinomial logistic regression over hashed features, trained by seeded SGD.
//!
//! Inputs are L2-normalized feature counts. The training objective is mean
//! cross-entropy plus `l2 / 2 * ||W||^2` (biases are not penalized).

use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::features::{featurize, DEFAULT_DIM};
use crate::container::{self, ContainerError};

pub const FORMAT_VERSION: u32 = 1;
pub const MAGIC: &[u8; 8] = b"CMBASv01";

/// Sparse input: `(feature index, value)` pairs.
pub type SparseInput = Vec<(usize, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyper {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
    /// Hashing dimension; a power of two.
    pub dim: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        Self { learning_rate: 0.5, epochs: 10, l2: 1e-5, seed: 42, dim: DEFAULT_DIM }
    }
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("need at least two classes, found {0}")]
    SingleClass(usize),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyper(String),
    #[error("loss became non-finite in epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("label {0:?} is not in the label set")]
    UnknownLabel(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("model format version {found} is not supported (expected {expected})")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
}

impl From<ContainerError> for BaselineError {
    fn from(e: ContainerError) -> Self {
        match e {
            ContainerError::Io(e) => BaselineError::Io(e),
            other => BaselineError::CorruptModel(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    pub label_set: Vec<String>,
    pub hyper: Hyper,
    /// Class-major: `weights[c * dim + j]`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    /// Mean objective after each completed epoch.
    pub epoch_losses: Vec<f64>,
}

/// In-place softmax.
fn softmax(scores: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
}

fn class_scores(weights: &[f64], bias: &[f64], dim: usize, x: &[(usize, f64)], scale: f64) -> Vec<f64> {
    bias.iter()
        .enumerate()
        .map(|(c, b)| b + scale * x.iter().map(|&(j, v)| weights[c * dim + j] * v).sum::<f64>())
        .collect()
}

/// Mean cross-entropy plus L2 penalty, with its gradient with respect to the
/// weights (class-major) and the biases.
pub fn loss_and_gradient(
    weights: &[f64],
    bias: &[f64],
    dim: usize,
    data: &[(SparseInput, usize)],
    l2: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let k = bias.len();
    let n = data.len() as f64;
    let mut grad_w: Vec<f64> = weights.iter().map(|w| l2 * w).collect();
    let mut grad_b = vec![0.0; k];
    let mut loss = 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    for (x, y) in data {
        let mut p = class_scores(weights, bias, dim, x, 1.0);
        softmax(&mut p);
        loss -= p[*y].ln() / n;
        for (c, pc) in p.iter().enumerate() {
            let coeff = (pc - if c == *y { 1.0 } else { 0.0 }) / n;
            grad_b[c] += coeff;
            for &(j, v) in x {
                grad_w[c * dim + j] += coeff * v;
            }
        }
    }
    (loss, grad_w, grad_b)
}

fn validate_hyper(h: &Hyper) -> Result<(), BaselineError> {
    let bad = |m: String| Err(BaselineError::InvalidHyper(m));
    if !(h.learning_rate > 0.0 && h.learning_rate.is_finite()) {
        return bad(format!("learning_rate {}", h.learning_rate));
    }
    if h.epochs == 0 {
        return bad("epochs must be at least 1".into());
    }
    if !(h.l2 >= 0.0 && h.l2 * h.learning_rate < 1.0) {
        return bad(format!("l2 {}", h.l2));
    }
    if !h.dim.is_power_of_two() {
        return bad(format!("dim {} is not a power of two", h.dim));
    }
    Ok(())
}

/// Trains on `(text, label)` pairs. `label_set` fixes the class order.
pub fn train_baseline<T: AsRef<str>, L: AsRef<str>>(
    examples: &[(T, L)],
    label_set: &[String],
    hyper: &Hyper,
) -> Result<BaselineModel, BaselineError> {
    validate_hyper(hyper)?;
    if examples.is_empty() {
        return Err(BaselineError::EmptyTrainingSet);
    }
    let data = examples
        .iter()
        .map(|(text, label)| {
            let y = label_set
                .iter()
                .position(|l| l == label.as_ref())
                .ok_or_else(|| BaselineError::UnknownLabel(label.as_ref().to_owned()))?;
            Ok((featurize(text.as_ref(), hyper.dim).normalized(), y))
        })
        .collect::<Result<Vec<_>, BaselineError>>()?;
    let mut present: Vec<usize> = data.iter().map(|(_, y)| *y).collect();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(BaselineError::SingleClass(present.len()));
    }
    let sgd = Sgd::new(label_set.len(), hyper);
    sgd.run(&data, label_set)
}

/// Plain SGD with the weight vector stored as `scale * raw` so the L2 shrink
/// is O(1) per step.
struct Sgd {
    hyper: Hyper,
    k: usize,
    raw: Vec<f64>,
    scale: f64,
    bias: Vec<f64>,
}

impl Sgd {
    fn new(k: usize, hyper: &Hyper) -> Self {
        Self { hyper: *hyper, k, raw: vec![0.0; k * hyper.dim], scale: 1.0, bias: vec![0.0; k] }
    }

    fn step(&mut self, x: &[(usize, f64)], y: usize) {
        let Hyper { learning_rate: lr, l2, dim, .. } = self.hyper;
        let mut p = class_scores(&self.raw, &self.bias, dim, x, self.scale);
        softmax(&mut p);
        self.scale *= 1.0 - lr * l2;
        if self.scale < 1e-9 {
            self.fold_scale();
        }
        for (c, pc) in p.iter().enumerate() {
            let coeff = pc - if c == y { 1.0 } else { 0.0 };
            if coeff == 0.0 {
                continue;
            }
            self.bias[c] -= lr * coeff;
            let step = lr * coeff / self.scale;
            for &(j, v) in x {
                self.raw[c * dim + j] -= step * v;
            }
        }
    }

    fn fold_scale(&mut self) {
        for w in &mut self.raw {
            *w *= self.scale;
        }
        self.scale = 1.0;
    }

    fn objective(&self, data: &[(SparseInput, usize)]) -> f64 {
        let n = data.len() as f64;
        let penalty = 0.5 * self.hyper.l2 * self.scale * self.scale * self.raw.iter().map(|w| w * w).sum::<f64>();
        let ce: f64 = data
            .iter()
            .map(|(x, y)| {
                let mut p = class_scores(&self.raw, &self.bias, self.hyper.dim, x, self.scale);
                softmax(&mut p);
                -p[*y].ln()
            })
            .sum();
        ce / n + penalty
    }

    fn run(mut self, data: &[(SparseInput, usize)], label_set: &[String]) -> Result<BaselineModel, BaselineError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.hyper.seed);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut losses = Vec::with_capacity(self.hyper.epochs);
        let mut best: Option<(Vec<f64>, Vec<f64>)> = None;

        for epoch in 1..=self.hyper.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                self.step(&data[i].0, data[i].1);
            }
            self.fold_scale();
            let loss = self.objective(data);
            if !loss.is_finite() {
                return Err(BaselineError::NonFiniteLoss { epoch });
            }
            if let Some(&prev) = losses.last() {
                if loss > prev {
                    log::warn!("epoch {epoch}: objective rose from {prev:.6} to {loss:.6}; stopping early");
                    let (raw, bias) = best.take().expect("previous epoch kept");
                    self.raw = raw;
                    self.bias = bias;
                    break;
                }
            }
            losses.push(loss);
            if epoch < self.hyper.epochs {
                best = Some((self.raw.clone(), self.bias.clone()));
            }
        }
        debug_assert_eq!(self.bias.len(), self.k);
        Ok(BaselineModel {
            label_set: label_set.to_vec(),
            hyper: self.hyper,
            weights: self.raw,
            bias: self.bias,
            epoch_losses: losses,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct StoredModel {
    version: u32,
    label_set: Vec<String>,
    hyper: Hyper,
    bias: Vec<f64>,
    /// Non-zero weight columns: `(feature index, weight per class)`.
    columns: Vec<(u32, Vec<f64>)>,
    epoch_losses: Vec<f64>,
}

impl BaselineModel {
    /// Builds a model from explicit parameters (class-major weights).
    pub fn from_parameters(
        label_set: Vec<String>,
        hyper: Hyper,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self, BaselineError> {
        let k = label_set.len();
        if bias.len() != k || weights.len() != k * hyper.dim || !hyper.dim.is_power_of_two() {
            return Err(BaselineError::InvalidHyper("parameter shapes do not match".into()));
        }
        if weights.iter().chain(&bias).any(|w| !w.is_finite()) {
            return Err(BaselineError::InvalidHyper("non-finite parameter".into()));
        }
        Ok(Self { label_set, hyper, weights, bias, epoch_losses: Vec::new() })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn scores(&self, text: &str) -> Vec<f64> {
        let x = featurize(text, self.hyper.dim).normalized();
        class_scores(&self.weights, &self.bias, self.hyper.dim, &x, 1.0)
    }

    /// Highest-scoring label; ties go to the earlier label.
    pub fn predict(&self, text: &str) -> &str {
        let scores = self.scores(text);
        let mut best = 0;
        for (c, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = c;
            }
        }
        &self.label_set[best]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let dim = self.hyper.dim;
        let k = self.label_set.len();
        let columns = (0..dim)
            .filter_map(|j| {
                let col: Vec<f64> = (0..k).map(|c| self.weights[c * dim + j]).collect();
                col.iter().any(|w| *w != 0.0).then_some((j as u32, col))
            })
            .collect();
        let stored = StoredModel {
            version: FORMAT_VERSION,
            label_set: self.label_set.clone(),
            hyper: self.hyper,
            bias: self.bias.clone(),
            columns,
            epoch_losses: self.epoch_losses.clone(),
        };
        container::encode(MAGIC, &serde_json::to_vec(&stored).expect("model serializes"))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BaselineError> {
        let payload = container::decode(MAGIC, bytes)?;
        #[derive(Deserialize)]
        struct Header {
            version: u32,
        }
        let corrupt = |e: serde_json::Error| BaselineError::CorruptModel(e.to_string());
        let version = serde_json::from_slice::<Header>(payload).map_err(corrupt)?.version;
        if version != FORMAT_VERSION {
            return Err(BaselineError::FormatVersionMismatch { found: version, expected: FORMAT_VERSION });
        }
        let stored: StoredModel = serde_json::from_slice(payload).map_err(corrupt)?;
        let dim = stored.hyper.dim;
        let k = stored.label_set.len();
        if !dim.is_power_of_two() || stored.bias.len() != k {
            return Err(BaselineError::CorruptModel("inconsistent shapes".into()));
        }
        let mut weights = vec![0.0; k * dim];
        for (j, col) in stored.columns {
            let j = j as usize;
            if j >= dim || col.len() != k {
                return Err(BaselineError::CorruptModel(format!("bad weight column {j}")));
            }
            for (c, w) in col.into_iter().enumerate() {
                weights[c * dim + j] = w;
            }
        }
        let mut model = Self::from_parameters(stored.label_set, stored.hyper, weights, stored.bias)
            .map_err(|e| BaselineError::CorruptModel(e.to_string()))?;
        model.epoch_losses = stored.epoch_losses;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), BaselineError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BaselineError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

//! Multi-label text classifier over frozen word vectors whose penultimate
//! dense layer doubles as a fixed-width text embedding.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{
    bce_grad, bce_loss, read_checkpoint, write_checkpoint, Activation, Conv1d, Dense, Dropout,
    Flatten, Layer, MaxPool1d, Network, Sgd, Tensor,
};
use crate::text::{embed_matrix, split_paragraphs, tokenize, Document, WordVectorTable};

pub const DEFAULT_SEQUENCE_LENGTH: usize = 1000;
pub const DEFAULT_EMBEDDING_DIM: usize = 256;
pub const DEFAULT_LABEL_COUNT: usize = 50;

const CHECKPOINT_KIND: &str = "text-cnn";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvStage {
    pub filters: usize,
    pub width: usize,
    pub pool: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CnnConfig {
    /// Token positions per document; shorter texts are zero-padded, longer
    /// ones keep their head.
    pub sequence_length: usize,
    pub stages: Vec<ConvStage>,
    pub embedding_dim: usize,
    pub label_count: usize,
    pub dropout: f64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for CnnConfig {
    fn default() -> Self {
        Self {
            sequence_length: DEFAULT_SEQUENCE_LENGTH,
            stages: vec![
                ConvStage { filters: 128, width: 5, pool: 2 },
                ConvStage { filters: 128, width: 5, pool: 2 },
            ],
            embedding_dim: DEFAULT_EMBEDDING_DIM,
            label_count: DEFAULT_LABEL_COUNT,
            dropout: 0.5,
            epochs: 10,
            learning_rate: 0.01,
        }
    }
}

impl CnnConfig {
    /// Sequence length remaining after the final pooling stage.
    fn final_length(&self) -> Result<usize> {
        let mut len = self.sequence_length;
        for (i, s) in self.stages.iter().enumerate() {
            if len < s.width {
                return Err(Error::Config(format!(
                    "stage {i}: window {} exceeds remaining length {len}",
                    s.width
                )));
            }
            let conv_out = len - s.width + 1;
            if conv_out < s.pool {
                return Err(Error::Config(format!(
                    "stage {i}: pool {} exceeds conv output {conv_out}",
                    s.pool
                )));
            }
            len = conv_out / s.pool;
        }
        Ok(len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Config("at least one conv stage required".into()));
        }
        if self.stages.iter().any(|s| s.filters == 0 || s.width == 0 || s.pool == 0) {
            return Err(Error::Config("stage filters, width, and pool must be >= 1".into()));
        }
        if self.sequence_length == 0 || self.embedding_dim == 0 || self.label_count == 0 {
            return Err(Error::Config(
                "sequence_length, embedding_dim, and label_count must be >= 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!("dropout must be in [0, 1), got {}", self.dropout)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        self.final_length().map(|_| ())
    }

    /// Input width of the first dense layer.
    pub fn flat_features(&self) -> Result<usize> {
        Ok(self.final_length()? * self.stages.last().expect("validated").filters)
    }
}

/// The classifier's output space: the K most frequent corpus labels, ties
/// broken lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSpace {
    labels: Vec<String>,
    freqs: Vec<u32>,
    index: HashMap<String, usize>,
}

impl LabelSpace {
    pub fn select(corpus: &[Document], k: usize) -> Result<Self> {
        let mut freq: HashMap<&str, u32> = HashMap::new();
        for doc in corpus {
            let distinct: HashSet<&str> = doc.labels.iter().map(String::as_str).collect();
            for label in distinct {
                *freq.entry(label).or_insert(0) += 1;
            }
        }
        if freq.len() < k {
            return Err(Error::Data(format!(
                "corpus has {} distinct labels, need {k}",
                freq.len()
            )));
        }
        let mut by_freq: Vec<(&str, u32)> = freq.into_iter().collect();
        by_freq.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        by_freq.truncate(k);
        let labels = by_freq.iter().map(|(l, _)| l.to_string()).collect();
        let freqs = by_freq.iter().map(|(_, f)| *f).collect();
        Ok(Self::from_parts(labels, freqs))
    }

    pub fn from_parts(labels: Vec<String>, freqs: Vec<u32>) -> Self {
        assert_eq!(labels.len(), freqs.len());
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Self { labels, freqs, index }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn freqs(&self) -> &[u32] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn target_vector(&self, labels: &[String]) -> Vec<f64> {
        let mut t = vec![0.0; self.labels.len()];
        for l in labels {
            if let Some(i) = self.index_of(l) {
                t[i] = 1.0;
            }
        }
        t
    }

    pub fn median_freq(&self) -> f64 {
        assert!(!self.freqs.is_empty());
        let mut sorted = self.freqs.clone();
        sorted.sort_unstable();
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0
        }
    }

    /// Median-ratio weight clamped to [1, 10]; `None` means the instance has
    /// no selected label and is excluded from training.
    pub fn sample_weight(&self, labels: &[String]) -> Option<f64> {
        let median = self.median_freq();
        labels
            .iter()
            .filter_map(|l| self.index_of(l))
            .map(|i| median / self.freqs[i] as f64)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
            .map(|r| r.clamp(1.0, 10.0))
    }
}

/// Labels whose probability strictly exceeds 0.5.
pub fn threshold_mask(probs: &[f64]) -> Vec<bool> {
    probs.iter().map(|&p| p > 0.5).collect()
}

pub struct TextCnn {
    pub config: CnnConfig,
    pub labels: LabelSpace,
    vector_dim: usize,
    net: Network,
}

impl TextCnn {
    pub fn new(config: CnnConfig, labels: LabelSpace, vector_dim: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        if labels.len() != config.label_count {
            return Err(Error::Config(format!(
                "label space has {} labels, config expects {}",
                labels.len(),
                config.label_count
            )));
        }
        if vector_dim == 0 {
            return Err(Error::Config("word vector dimension must be >= 1".into()));
        }
        let flat = config.flat_features()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::new();
        let mut in_dim = vector_dim;
        for s in &config.stages {
            layers.push(Layer::Conv1d(Conv1d::new(in_dim, s.width, s.filters, &mut rng)));
            layers.push(Layer::MaxPool1d(MaxPool1d::new(s.pool)));
            in_dim = s.filters;
        }
        layers.push(Layer::Flatten(Flatten::new()));
        layers.push(Layer::Dense(Dense::new(flat, config.embedding_dim, Activation::Relu, &mut rng)));
        layers.push(Layer::Dropout(Dropout::new(config.dropout)));
        layers.push(Layer::Dense(Dense::new(
            config.embedding_dim,
            config.label_count,
            Activation::Sigmoid,
            &mut rng,
        )));
        Ok(Self { config, labels, vector_dim, net: Network::new(layers) })
    }

    pub fn vector_dim(&self) -> usize {
        self.vector_dim
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    fn input(&self, tokens: &[String], vectors: &WordVectorTable) -> Tensor {
        Tensor::from(&embed_matrix(tokens, vectors, self.config.sequence_length))
    }

    pub fn probabilities(&self, tokens: &[String], vectors: &WordVectorTable) -> Result<Vec<f64>> {
        self.check_vectors(vectors)?;
        Ok(self.net.infer(&self.input(tokens, vectors))?.into_data())
    }

    pub fn predict_mask(&self, tokens: &[String], vectors: &WordVectorTable) -> Result<Vec<bool>> {
        Ok(threshold_mask(&self.probabilities(tokens, vectors)?))
    }

    pub fn predict_labels(
        &self,
        tokens: &[String],
        vectors: &WordVectorTable,
    ) -> Result<Vec<String>> {
        let mask = self.predict_mask(tokens, vectors)?;
        Ok(self
            .labels
            .labels()
            .iter()
            .zip(mask)
            .filter(|(_, m)| *m)
            .map(|(l, _)| l.clone())
            .collect())
    }

    /// Activation of the dense layer feeding the classifier head, in
    /// inference mode.
    pub fn embed(&self, tokens: &[String], vectors: &WordVectorTable) -> Result<Vec<f64>> {
        self.check_vectors(vectors)?;
        let upto = 2 * self.config.stages.len() + 2;
        Ok(self.net.infer_prefix(&self.input(tokens, vectors), upto)?.into_data())
    }

    /// Mean of per-paragraph embeddings; texts without a paragraph fall back
    /// to embedding the whole (empty) token sequence.
    pub fn embed_paragraph_mean(&self, text: &str, vectors: &WordVectorTable) -> Result<Vec<f64>> {
        let paragraphs = split_paragraphs(text);
        if paragraphs.is_empty() {
            return self.embed(&[], vectors);
        }
        let mut mean = vec![0.0; self.config.embedding_dim];
        for p in &paragraphs {
            let v = self.embed(&tokenize(p), vectors)?;
            for (m, x) in mean.iter_mut().zip(&v) {
                *m += x;
            }
        }
        let n = paragraphs.len() as f64;
        for m in &mut mean {
            *m /= n;
        }
        Ok(mean)
    }

    fn check_vectors(&self, vectors: &WordVectorTable) -> Result<()> {
        if vectors.dim() != self.vector_dim {
            return Err(Error::Config(format!(
                "word vectors have dimension {}, model expects {}",
                vectors.dim(),
                self.vector_dim
            )));
        }
        Ok(())
    }

    /// Weighted BCE SGD over the labeled corpus. Documents with no selected
    /// label are dropped up front. Returns the weighted mean loss per epoch.
    pub fn train(
        &mut self,
        corpus: &[Document],
        vectors: &WordVectorTable,
        seed: u64,
    ) -> Result<Vec<f64>> {
        self.check_vectors(vectors)?;
        let mut instances = Vec::new();
        for doc in corpus {
            if let Some(weight) = self.labels.sample_weight(&doc.labels) {
                let tokens = tokenize(&doc.text);
                let target = self.labels.target_vector(&doc.labels);
                instances.push((tokens, target, weight));
            }
        }
        if instances.is_empty() {
            return Err(Error::Data("no document carries a selected label".into()));
        }
        let sgd = Sgd::new(self.config.learning_rate);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..instances.len()).collect();
        let mut losses = Vec::with_capacity(self.config.epochs);
        for _ in 0..self.config.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            let mut denom = 0.0;
            for &i in &order {
                let (tokens, target, weight) = &instances[i];
                let x = self.input(tokens, vectors);
                let out = self.net.forward_train(&x, &mut rng)?;
                let loss = bce_loss(out.data(), target)?;
                let grad = bce_grad(out.data(), target)?;
                self.net.zero_grads();
                self.net.backward(Tensor::vector(grad))?;
                sgd.step(&mut self.net, *weight);
                total += weight * loss;
                denom += weight;
            }
            losses.push(total / denom);
        }
        Ok(losses)
    }

    pub fn save(&self, path: &Path, extra: &serde_json::Value) -> Result<()> {
        let meta = serde_json::json!({
            "kind": CHECKPOINT_KIND,
            "config": self.config,
            "labels": self.labels.labels(),
            "freqs": self.labels.freqs(),
            "vector_dim": self.vector_dim,
            "meta": extra,
        });
        let blocks = self.net.param_blocks();
        write_checkpoint(path, &meta, &blocks)
    }

    pub fn load(path: &Path) -> Result<(Self, serde_json::Value)> {
        let (meta, blocks) = read_checkpoint(path)?;
        let bad = |what: &str| Error::Data(format!("{}: {what}", path.display()));
        if meta.get("kind").and_then(|k| k.as_str()) != Some(CHECKPOINT_KIND) {
            return Err(bad("not a classifier checkpoint"));
        }
        let config: CnnConfig = serde_json::from_value(
            meta.get("config").cloned().ok_or_else(|| bad("missing config"))?,
        )
        .map_err(|e| bad(&format!("bad config: {e}")))?;
        let labels: Vec<String> = serde_json::from_value(
            meta.get("labels").cloned().ok_or_else(|| bad("missing labels"))?,
        )
        .map_err(|e| bad(&format!("bad labels: {e}")))?;
        let freqs: Vec<u32> =
            serde_json::from_value(meta.get("freqs").cloned().ok_or_else(|| bad("missing freqs"))?)
                .map_err(|e| bad(&format!("bad freqs: {e}")))?;
        if labels.len() != freqs.len() {
            return Err(bad("labels and freqs disagree"));
        }
        let vector_dim = meta
            .get("vector_dim")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| bad("missing vector_dim"))? as usize;
        let mut model = Self::new(config, LabelSpace::from_parts(labels, freqs), vector_dim, 0)?;
        model.net.set_param_blocks(&blocks)?;
        let extra = meta.get("meta").cloned().unwrap_or(serde_json::Value::Null);
        Ok((model, extra))
    }
}

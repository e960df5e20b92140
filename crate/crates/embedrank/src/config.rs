//! Pipeline configuration: one TOML file drives every subcommand, with
//! command-line overrides layered on top. The effective config is hashed
//! into each artifact header so outputs can be traced to their settings.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embedder::CnnConfig;
use crate::error::{Error, Result};
use crate::eval::Metric;
use crate::ranking::{DrmmConfig, HistogramMode, BM25_B, BM25_K1};

/// The five ranking back-ends selectable via `--mode`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreMode {
    Bm25,
    DrmmTerm,
    DrmmPara,
    Cosine,
    Combined,
}

impl ScoreMode {
    pub const ALL: [ScoreMode; 5] = [
        ScoreMode::Bm25,
        ScoreMode::DrmmTerm,
        ScoreMode::DrmmPara,
        ScoreMode::Cosine,
        ScoreMode::Combined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScoreMode::Bm25 => "bm25",
            ScoreMode::DrmmTerm => "drmm-term",
            ScoreMode::DrmmPara => "drmm-para",
            ScoreMode::Cosine => "cosine",
            ScoreMode::Combined => "combined",
        }
    }
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScoreMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode {s:?}; expected one of bm25, drmm-term, drmm-para, cosine, combined")))
    }
}

/// How a whole document is reduced to one vector for cosine scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocEmbedding {
    /// Embed the head-truncated token sequence directly.
    Truncate,
    /// Average the per-paragraph embeddings.
    ParagraphMean,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub word_vectors: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub topics: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bm25Config {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Config {
    fn default() -> Self {
        Self { k1: BM25_K1, b: BM25_B }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Triplets drawn per query, uniformly with replacement.
    pub per_query: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { per_query: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankConfig {
    /// Maximum run entries per query.
    pub cutoff: usize,
    /// BM25 candidate pool fed to the other scorers.
    pub pool_size: usize,
    /// Score every document instead of a BM25 candidate pool.
    pub full_scan: bool,
    /// Components summed by the `combined` mode.
    pub ensemble: Vec<ScoreMode>,
    /// Z-normalize each component's scores before summing.
    pub znorm: bool,
}

impl Default for RankConfig {
    fn default() -> Self {
        Self {
            cutoff: 1000,
            pool_size: 1000,
            full_scan: false,
            ensemble: vec![ScoreMode::DrmmTerm, ScoreMode::DrmmPara, ScoreMode::Cosine],
            znorm: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub doc_embedding: DocEmbedding,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self { doc_embedding: DocEmbedding::Truncate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub metrics: Vec<String>,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self { metrics: vec!["MAP".into(), "P@20".into(), "nDCG@20".into()] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub paths: PathsConfig,
    pub cnn: CnnConfig,
    pub drmm: DrmmConfig,
    pub sampling: SamplingConfig,
    pub bm25: Bm25Config,
    pub rank: RankConfig,
    pub embed: EmbedConfig,
    pub evaluate: EvaluateConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            output_dir: PathBuf::from("artifacts"),
            paths: PathsConfig::default(),
            cnn: CnnConfig::default(),
            drmm: DrmmConfig::default(),
            sampling: SamplingConfig::default(),
            bm25: Bm25Config::default(),
            rank: RankConfig::default(),
            embed: EmbedConfig::default(),
            evaluate: EvaluateConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let config = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("config {}: {e}", p.display())))?;
                toml::from_str(&text)
                    .map_err(|e| Error::Config(format!("config {}: {e}", p.display())))?
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.cnn.validate()?;
        self.drmm.validate()?;
        if !(self.bm25.k1 >= 0.0 && self.bm25.k1.is_finite()) {
            return Err(Error::Config(format!("bm25.k1 must be >= 0, got {}", self.bm25.k1)));
        }
        if !(0.0..=1.0).contains(&self.bm25.b) {
            return Err(Error::Config(format!("bm25.b must be in [0, 1], got {}", self.bm25.b)));
        }
        if self.sampling.per_query == 0 {
            return Err(Error::Config("sampling.per_query must be >= 1".into()));
        }
        if self.rank.cutoff == 0 || self.rank.pool_size == 0 {
            return Err(Error::Config("rank.cutoff and rank.pool_size must be >= 1".into()));
        }
        if self.rank.ensemble.is_empty() {
            return Err(Error::Config("rank.ensemble must list at least one component".into()));
        }
        for (i, m) in self.rank.ensemble.iter().enumerate() {
            if *m == ScoreMode::Combined {
                return Err(Error::Config("rank.ensemble cannot contain combined".into()));
            }
            if self.rank.ensemble[..i].contains(m) {
                return Err(Error::Config(format!("rank.ensemble lists {m} twice")));
            }
        }
        for metric in &self.evaluate.metrics {
            metric.parse::<Metric>()?;
        }
        for (name, path) in [
            ("word_vectors", &self.paths.word_vectors),
            ("corpus", &self.paths.corpus),
            ("topics", &self.paths.topics),
            ("qrels", &self.paths.qrels),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(Error::Data(format!(
                        "paths.{name}: {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }

    /// First 16 hex chars of the SHA-256 of the effective config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in &digest[..8] {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }

    /// Header lines stamped into every artifact.
    pub fn header_lines(&self) -> Vec<String> {
        vec![format!("config_hash={}", self.hash()), format!("seed={}", self.seed)]
    }

    pub fn meta_json(&self) -> serde_json::Value {
        serde_json::json!({"config_hash": self.hash(), "seed": self.seed})
    }

    fn required(&self, name: &str, path: &Option<PathBuf>) -> Result<PathBuf> {
        path.clone().ok_or_else(|| Error::Config(format!("paths.{name} is not set")))
    }

    pub fn word_vectors_path(&self) -> Result<PathBuf> {
        self.required("word_vectors", &self.paths.word_vectors)
    }

    pub fn corpus_path(&self) -> Result<PathBuf> {
        self.required("corpus", &self.paths.corpus)
    }

    pub fn topics_path(&self) -> Result<PathBuf> {
        self.required("topics", &self.paths.topics)
    }

    pub fn qrels_path(&self) -> Result<PathBuf> {
        self.required("qrels", &self.paths.qrels)
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        self.artifact("embedder.ckpt")
    }

    pub fn embeddings_path(&self) -> PathBuf {
        self.artifact("embeddings.jsonl")
    }

    pub fn paragraph_embeddings_path(&self) -> PathBuf {
        self.artifact("paragraph-embeddings.jsonl")
    }

    pub fn index_path(&self) -> PathBuf {
        self.artifact("index.json")
    }

    pub fn triplets_path(&self) -> PathBuf {
        self.artifact("triplets.csv")
    }

    pub fn drmm_model_path(&self, mode: HistogramMode) -> PathBuf {
        match mode {
            HistogramMode::Term => self.artifact("drmm-term.model"),
            HistogramMode::Paragraph => self.artifact("drmm-para.model"),
        }
    }

    pub fn run_path(&self, mode: ScoreMode) -> PathBuf {
        self.artifact(&format!("run-{mode}.txt"))
    }
}

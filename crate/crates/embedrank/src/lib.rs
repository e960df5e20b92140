//! Distant-supervision text retrieval toolkit.
//!
//! The pipeline has two phases. First, a small convolutional network is
//! trained to predict document labels from raw text on top of frozen
//! pre-trained word vectors; the penultimate dense layer of that network is
//! then used as a text embedding. Second, documents are ranked against long
//! natural-language queries with four scorers — BM25, a term-level deep
//! relevance matching model (DRMM), a paragraph-level DRMM over the learned
//! embeddings, and direct cosine similarity of whole-text embeddings — plus
//! an ensemble that sums their scores. Runs are written in TREC format and
//! scored with MAP, P@K and nDCG@K; the classifier itself is scored with
//! per-instance multi-label precision/recall/F1/accuracy.
//!
//! Module map:
//!
//! - [`text`]: tokenization, paragraph splitting, vocabulary/IDF statistics,
//!   word-vector loading and fixed-length embedding matrices.
//! - [`nn`]: a minimal dense/conv1d network kernel with explicit forward and
//!   backward passes, SGD and a finite-difference gradient checker.
//! - [`embedder`]: the multi-label text CNN and its penultimate-layer
//!   embedding.
//! - [`ranking`]: BM25 inverted index, similarity histograms, DRMM scoring
//!   and triplet training, ensembles and run-list production.
//! - [`eval`]: qrels, retrieval metrics and multi-label classification
//!   metrics.
//! - [`synthetic`]: seeded generators for planted-topic corpora used by the
//!   test suites and for demos.
//! - [`config`]: the TOML pipeline configuration shared by all CLI
//!   subcommands.

pub mod config;
pub mod embedder;
pub mod error;
pub mod eval;
pub mod nn;
pub mod ranking;
pub mod synthetic;
pub mod text;

pub use error::{Error, Result};

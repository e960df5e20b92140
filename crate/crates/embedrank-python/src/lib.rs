//! Python surface of the retrieval toolkit.
//!
//! Thin by design: plain lists, dicts and tuples cross the boundary, the
//! numeric work happens in the Rust library. Ranked lists are lists of doc
//! ids in rank order; qrels are `{doc_id: grade}` dicts (nested under query
//! ids for the multi-query forms); match units are
//! `(key | None, vector, idf, count)` tuples; model configuration is passed
//! as a JSON string with the same fields as the TOML config files.

use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyFileNotFoundError, PyIOError, PyKeyError, PyValueError};
use pyo3::prelude::*;

use embedrank::embedder::{CnnConfig, LabelSpace};
use embedrank::eval::{LabelMatrixPair, Qrels};
use embedrank::ranking::{
    DrmmConfig, DrmmModel, HistogramMode, InvertedIndex, MatchUnit, RunEntry, RunList, Triplet,
};
use embedrank::text::{Document, WordVectorTable};
use embedrank::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::MissingArtifact(..) => PyFileNotFoundError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<HistogramMode> {
    match mode {
        "term" => Ok(HistogramMode::Term),
        "paragraph" => Ok(HistogramMode::Paragraph),
        other => Err(PyValueError::new_err(format!(
            "unknown histogram mode {other:?}; expected \"term\" or \"paragraph\""
        ))),
    }
}

/// (key | None, vector, idf, count) on the Python side.
type UnitTuple = (Option<String>, Vec<f64>, f64, u32);

fn units_from(tuples: Vec<UnitTuple>) -> Vec<MatchUnit> {
    tuples
        .into_iter()
        .map(|(key, vec, idf, count)| MatchUnit { key, vec, idf, count })
        .collect()
}

fn unit_maps_from(
    maps: HashMap<String, Vec<UnitTuple>>,
) -> HashMap<String, Vec<MatchUnit>> {
    maps.into_iter().map(|(k, v)| (k, units_from(v))).collect()
}

fn docs_from(docs: Vec<(String, String, Vec<String>)>) -> Vec<Document> {
    docs.into_iter().map(|(id, text, labels)| Document { id, text, labels }).collect()
}

/// Ranked doc ids become a run list; the synthetic scores only encode order.
fn run_from(query_id: &str, ranked: Vec<String>) -> RunList {
    let entries = ranked
        .into_iter()
        .enumerate()
        .map(|(i, doc_id)| RunEntry { doc_id, score: -(i as f64) })
        .collect();
    RunList { query_id: query_id.to_string(), entries }
}

fn qrels_single(grades: &HashMap<String, u32>) -> PyResult<Qrels> {
    if grades.is_empty() {
        return Err(PyValueError::new_err("qrels must judge at least one document"));
    }
    let mut qrels = Qrels::new();
    for (doc, &g) in grades {
        qrels.insert("q", doc, g);
    }
    Ok(qrels)
}

fn qrels_nested(grades: &HashMap<String, HashMap<String, u32>>) -> PyResult<Qrels> {
    let mut qrels = Qrels::new();
    for (qid, judged) in grades {
        if judged.is_empty() {
            return Err(PyValueError::new_err(format!("query {qid:?} has an empty judgment set")));
        }
        for (doc, &g) in judged {
            qrels.insert(qid, doc, g);
        }
    }
    Ok(qrels)
}

// --- text ------------------------------------------------------------------

#[pyfunction]
#[pyo3(name = "tokenize")]
fn py_tokenize(text: &str) -> Vec<String> {
    embedrank::text::tokenize(text)
}

#[pyfunction]
#[pyo3(name = "split_paragraphs")]
fn py_split_paragraphs(text: &str) -> Vec<String> {
    embedrank::text::split_paragraphs(text)
}

// --- similarity and matching features ---------------------------------------

#[pyfunction]
#[pyo3(name = "cosine_sim")]
fn py_cosine_sim(u: Vec<f64>, v: Vec<f64>) -> PyResult<Option<f64>> {
    if u.len() != v.len() {
        return Err(PyValueError::new_err(format!(
            "vector lengths differ: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(embedrank::ranking::cosine_sim(&u, &v))
}

#[pyfunction]
#[pyo3(name = "gating_weights")]
fn py_gating_weights(idfs: Vec<f64>, w: f64) -> PyResult<Vec<f64>> {
    embedrank::ranking::gating_weights(&idfs, w).map_err(to_py)
}

#[pyfunction]
#[pyo3(name = "hinge_loss")]
fn py_hinge_loss(s_pos: f64, s_neg: f64, margin: f64) -> f64 {
    embedrank::ranking::hinge_loss(s_pos, s_neg, margin)
}

#[pyfunction]
#[pyo3(name = "bin_index", signature = (s, bins = 30, mode = "term"))]
fn py_bin_index(s: f64, bins: usize, mode: &str) -> PyResult<usize> {
    let mode = parse_mode(mode)?;
    if bins < 2 {
        return Err(PyValueError::new_err("bins must be >= 2"));
    }
    if !(-1.0..=1.0).contains(&s) {
        return Err(PyValueError::new_err(format!("similarity {s} outside [-1, 1]")));
    }
    Ok(embedrank::ranking::bin_index(s, bins, mode))
}

/// `doc_units` is a list of (vector, count, exact_match) tuples.
#[pyfunction]
#[pyo3(name = "interaction_histogram", signature = (query_vec, doc_units, bins = 30, mode = "term"))]
fn py_interaction_histogram(
    query_vec: Vec<f64>,
    doc_units: Vec<(Vec<f64>, u32, bool)>,
    bins: usize,
    mode: &str,
) -> PyResult<Vec<f64>> {
    let mode = parse_mode(mode)?;
    if bins < 2 {
        return Err(PyValueError::new_err("bins must be >= 2"));
    }
    for (v, _, _) in &doc_units {
        if v.len() != query_vec.len() {
            return Err(PyValueError::new_err(format!(
                "doc unit vector length {} does not match query vector length {}",
                v.len(),
                query_vec.len()
            )));
        }
    }
    Ok(embedrank::ranking::interaction_histogram(
        &query_vec,
        doc_units.iter().map(|(v, c, e)| (v.as_slice(), *c, *e)),
        bins,
        mode,
    ))
}

// --- retrieval metrics -------------------------------------------------------

#[pyfunction]
#[pyo3(name = "precision_at_k")]
fn py_precision_at_k(
    ranked: Vec<String>,
    qrels: HashMap<String, u32>,
    k: usize,
) -> PyResult<f64> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be >= 1"));
    }
    Ok(embedrank::eval::precision_at_k(&run_from("q", ranked), &qrels_single(&qrels)?, k))
}

#[pyfunction]
#[pyo3(name = "average_precision")]
fn py_average_precision(ranked: Vec<String>, qrels: HashMap<String, u32>) -> PyResult<f64> {
    embedrank::eval::average_precision(&run_from("q", ranked), &qrels_single(&qrels)?)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(name = "ndcg_at_k")]
fn py_ndcg_at_k(ranked: Vec<String>, qrels: HashMap<String, u32>, k: usize) -> PyResult<f64> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be >= 1"));
    }
    Ok(embedrank::eval::ndcg_at_k(&run_from("q", ranked), &qrels_single(&qrels)?, k))
}

fn runs_from(runs: &HashMap<String, Vec<String>>) -> Vec<RunList> {
    let mut qids: Vec<&String> = runs.keys().collect();
    qids.sort();
    qids.into_iter().map(|qid| run_from(qid, runs[qid].clone())).collect()
}

#[pyfunction]
#[pyo3(name = "mean_average_precision")]
fn py_mean_average_precision(
    runs: HashMap<String, Vec<String>>,
    qrels: HashMap<String, HashMap<String, u32>>,
) -> PyResult<f64> {
    embedrank::eval::mean_average_precision(&runs_from(&runs), &qrels_nested(&qrels)?)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(name = "mean_precision_at_k")]
fn py_mean_precision_at_k(
    runs: HashMap<String, Vec<String>>,
    qrels: HashMap<String, HashMap<String, u32>>,
    k: usize,
) -> PyResult<f64> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be >= 1"));
    }
    Ok(embedrank::eval::mean_precision_at_k(&runs_from(&runs), &qrels_nested(&qrels)?, k))
}

#[pyfunction]
#[pyo3(name = "mean_ndcg_at_k")]
fn py_mean_ndcg_at_k(
    runs: HashMap<String, Vec<String>>,
    qrels: HashMap<String, HashMap<String, u32>>,
    k: usize,
) -> PyResult<f64> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be >= 1"));
    }
    Ok(embedrank::eval::mean_ndcg_at_k(&runs_from(&runs), &qrels_nested(&qrels)?, k))
}

/// Instance-averaged multi-label metrics as a dict with keys
/// precision/recall/f1/accuracy. `conventional=False` uses the printed-form
/// denominators (precision over the true set, recall over the predicted
/// set); `conventional=True` swaps them.
#[pyfunction]
#[pyo3(name = "multilabel_metrics", signature = (pred, truth, conventional = false))]
fn py_multilabel_metrics(
    pred: Vec<Vec<bool>>,
    truth: Vec<Vec<bool>>,
    conventional: bool,
) -> PyResult<HashMap<&'static str, f64>> {
    let pair = LabelMatrixPair::new(pred, truth).map_err(to_py)?;
    let m = embedrank::eval::multilabel_metrics(&pair, conventional);
    Ok(HashMap::from([
        ("precision", m.precision),
        ("recall", m.recall),
        ("f1", m.f1),
        ("accuracy", m.accuracy),
    ]))
}

// --- triplets ----------------------------------------------------------------

/// Returns (query_id, relevant_doc, nonrelevant_doc) triples drawn per query.
#[pyfunction]
#[pyo3(name = "sample_triplets", signature = (qrels, per_query, seed, corpus_doc_ids = None))]
fn py_sample_triplets(
    qrels: HashMap<String, HashMap<String, u32>>,
    per_query: usize,
    seed: u64,
    corpus_doc_ids: Option<Vec<String>>,
) -> PyResult<Vec<(String, String, String)>> {
    if per_query == 0 {
        return Err(PyValueError::new_err("per_query must be >= 1"));
    }
    let qrels = qrels_nested(&qrels)?;
    let (triplets, _stats) =
        embedrank::ranking::sample_triplets(&qrels, corpus_doc_ids.as_deref(), per_query, seed);
    Ok(triplets.into_iter().map(|t| (t.query_id, t.rel_doc, t.nonrel_doc)).collect())
}

// --- word vectors --------------------------------------------------------------

/// Frozen token -> vector table; unknown tokens read as the zero vector.
#[pyclass(frozen)]
struct WordVectors {
    inner: WordVectorTable,
}

#[pymethods]
impl WordVectors {
    /// Loads the text format: `token v1 v2 ... vd`, one entry per line.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: WordVectorTable::load(&path).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_entries(dim: usize, entries: Vec<(String, Vec<f64>)>) -> PyResult<Self> {
        for (token, vec) in &entries {
            if vec.len() != dim {
                return Err(PyValueError::new_err(format!(
                    "vector for {token:?} has length {}, expected {dim}",
                    vec.len()
                )));
            }
        }
        Ok(Self { inner: WordVectorTable::from_entries(dim, entries) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, token: &str) -> bool {
        self.inner.contains(token)
    }

    /// The vector for a known token; raises KeyError otherwise.
    fn get(&self, token: &str) -> PyResult<Vec<f64>> {
        if !self.inner.contains(token) {
            return Err(PyKeyError::new_err(token.to_string()));
        }
        Ok(self.inner.get(token).to_vec())
    }
}

// --- BM25 index -----------------------------------------------------------------

/// Inverted index with Okapi BM25 scoring.
#[pyclass(frozen)]
struct Index {
    inner: InvertedIndex,
}

#[pymethods]
impl Index {
    /// Builds from (doc_id, tokens) pairs.
    #[staticmethod]
    fn build(docs: Vec<(String, Vec<String>)>) -> PyResult<Self> {
        let inner = InvertedIndex::build(docs.iter().map(|(id, t)| (id.as_str(), t.as_slice())))
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: InvertedIndex::load(&path).map_err(to_py)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(to_py)
    }

    #[getter]
    fn doc_count(&self) -> usize {
        self.inner.doc_count()
    }

    #[getter]
    fn avg_doc_len(&self) -> f64 {
        self.inner.avg_doc_len()
    }

    fn doc_ids(&self) -> Vec<String> {
        self.inner.doc_ids().to_vec()
    }

    fn df(&self, term: &str) -> usize {
        self.inner.df(term)
    }

    fn bm25_idf(&self, term: &str) -> f64 {
        self.inner.bm25_idf(term)
    }

    fn gating_idf(&self, term: &str) -> f64 {
        self.inner.gating_idf(term)
    }

    fn bm25(&self, query: Vec<String>, doc_id: &str) -> PyResult<f64> {
        self.inner.bm25_score(&query, doc_id).map_err(to_py)
    }

    /// BM25 for every document, aligned with `doc_ids()`.
    fn bm25_all(&self, query: Vec<String>) -> Vec<f64> {
        self.inner.bm25_all(&query)
    }

    /// Ids of the `pool` highest-scoring documents.
    fn pool(&self, query: Vec<String>, pool: usize) -> PyResult<Vec<String>> {
        if pool == 0 {
            return Err(PyValueError::new_err("pool must be >= 1"));
        }
        Ok(self.inner.bm25_pool(&query, pool))
    }
}

// --- text CNN ----------------------------------------------------------------------

/// Multi-label text classifier whose penultimate layer embeds text.
#[pyclass]
struct TextCnn {
    inner: embedrank::embedder::TextCnn,
}

#[pymethods]
impl TextCnn {
    /// Trains a fresh model. `config_json` carries the same fields as the
    /// `[cnn]` TOML table; docs are (id, text, labels) triples. Returns the
    /// model and the per-epoch training losses.
    #[staticmethod]
    fn train(
        config_json: &str,
        docs: Vec<(String, String, Vec<String>)>,
        vectors: PyRef<'_, WordVectors>,
        seed: u64,
    ) -> PyResult<(Self, Vec<f64>)> {
        let config: CnnConfig = serde_json::from_str(config_json)
            .map_err(|e| PyValueError::new_err(format!("bad cnn config: {e}")))?;
        let docs = docs_from(docs);
        let labels = LabelSpace::select(&docs, config.label_count).map_err(to_py)?;
        let mut inner =
            embedrank::embedder::TextCnn::new(config, labels, vectors.inner.dim(), seed)
                .map_err(to_py)?;
        let losses = inner.train(&docs, &vectors.inner, seed).map_err(to_py)?;
        Ok((Self { inner }, losses))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let (inner, _meta) = embedrank::embedder::TextCnn::load(&path).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path, &serde_json::Value::Null).map_err(to_py)
    }

    #[getter]
    fn embedding_dim(&self) -> usize {
        self.inner.config.embedding_dim
    }

    /// Selected label names, most frequent first.
    fn labels(&self) -> Vec<String> {
        self.inner.labels.labels().to_vec()
    }

    fn probabilities(
        &self,
        tokens: Vec<String>,
        vectors: PyRef<'_, WordVectors>,
    ) -> PyResult<Vec<f64>> {
        self.inner.probabilities(&tokens, &vectors.inner).map_err(to_py)
    }

    fn predict_labels(
        &self,
        tokens: Vec<String>,
        vectors: PyRef<'_, WordVectors>,
    ) -> PyResult<Vec<String>> {
        self.inner.predict_labels(&tokens, &vectors.inner).map_err(to_py)
    }

    /// Penultimate-layer text embedding (inference mode, dropout off).
    fn embed(&self, tokens: Vec<String>, vectors: PyRef<'_, WordVectors>) -> PyResult<Vec<f64>> {
        self.inner.embed(&tokens, &vectors.inner).map_err(to_py)
    }

    /// Mean of per-paragraph embeddings of `text`.
    fn embed_paragraph_mean(
        &self,
        text: &str,
        vectors: PyRef<'_, WordVectors>,
    ) -> PyResult<Vec<f64>> {
        self.inner.embed_paragraph_mean(text, &vectors.inner).map_err(to_py)
    }
}

// --- DRMM ---------------------------------------------------------------------------

/// Relevance matcher over interaction histograms with idf-gated combination.
#[pyclass]
struct Drmm {
    inner: DrmmModel,
}

#[pymethods]
impl Drmm {
    /// Trains a fresh model on (query_id, rel_doc, nonrel_doc) triples.
    /// `config_json` carries the same fields as the `[drmm]` TOML table;
    /// `queries` and `docs` map ids to lists of match-unit tuples. Returns
    /// the model and the mean hinge loss per epoch.
    #[staticmethod]
    fn train(
        config_json: &str,
        triplets: Vec<(String, String, String)>,
        queries: HashMap<String, Vec<UnitTuple>>,
        docs: HashMap<String, Vec<UnitTuple>>,
        seed: u64,
    ) -> PyResult<(Self, Vec<f64>)> {
        let config: DrmmConfig = serde_json::from_str(config_json)
            .map_err(|e| PyValueError::new_err(format!("bad drmm config: {e}")))?;
        let triplets: Vec<Triplet> = triplets
            .into_iter()
            .map(|(query_id, rel_doc, nonrel_doc)| Triplet { query_id, rel_doc, nonrel_doc })
            .collect();
        let (inner, losses) = embedrank::ranking::train_drmm(
            config,
            &triplets,
            &unit_maps_from(queries),
            &unit_maps_from(docs),
            seed,
        )
        .map_err(to_py)?;
        Ok((Self { inner }, losses))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let (inner, _meta) = DrmmModel::load(&path).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path, &serde_json::Value::Null).map_err(to_py)
    }

    /// The model's configuration as a JSON string.
    fn config_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.config)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn idf_scale(&self) -> f64 {
        self.inner.idf_scale
    }

    fn score(&self, query: Vec<UnitTuple>, doc: Vec<UnitTuple>) -> PyResult<f64> {
        self.inner.score(&units_from(query), &units_from(doc)).map_err(to_py)
    }
}

// --- synthetic corpora ------------------------------------------------------------------

/// Planted-topic retrieval collection:
/// (docs, queries, qrels, vectors) where docs are (id, text, labels),
/// queries are (id, text) and qrels is {query_id: {doc_id: grade}}.
#[pyfunction]
#[pyo3(name = "synthetic_retrieval_dataset")]
fn py_synthetic_retrieval_dataset(
    seed: u64,
    n_docs: usize,
    n_queries: usize,
    topics: usize,
) -> PyResult<(
    Vec<(String, String, Vec<String>)>,
    Vec<(String, String)>,
    HashMap<String, HashMap<String, u32>>,
    WordVectors,
)> {
    if !(1..=embedrank::synthetic::MAX_CENTERS).contains(&topics) {
        return Err(PyValueError::new_err(format!(
            "topics must be in 1..={}",
            embedrank::synthetic::MAX_CENTERS
        )));
    }
    if n_docs < topics || n_queries == 0 {
        return Err(PyValueError::new_err("need at least one document per topic and one query"));
    }
    let data = embedrank::synthetic::retrieval_dataset(seed, n_docs, n_queries, topics);
    let docs = data.docs.into_iter().map(|d| (d.id, d.text, d.labels)).collect();
    let queries = data.queries.into_iter().map(|q| (q.id, q.text)).collect();
    let mut qrels: HashMap<String, HashMap<String, u32>> = HashMap::new();
    for qid in data.qrels.queries() {
        qrels.insert(qid.clone(), data.qrels.judged(qid).unwrap().clone().into_iter().collect());
    }
    Ok((docs, queries, qrels, WordVectors { inner: data.vectors }))
}

/// Multi-label corpus with held-out test vocabulary:
/// (train, test, label_names, vectors) where documents are (id, text, labels).
#[pyfunction]
#[pyo3(name = "synthetic_classification_dataset")]
fn py_synthetic_classification_dataset(
    seed: u64,
    n_train: usize,
    n_test: usize,
    labels: usize,
) -> PyResult<(
    Vec<(String, String, Vec<String>)>,
    Vec<(String, String, Vec<String>)>,
    Vec<String>,
    WordVectors,
)> {
    if !(1..=embedrank::synthetic::MAX_CENTERS).contains(&labels) {
        return Err(PyValueError::new_err(format!(
            "labels must be in 1..={}",
            embedrank::synthetic::MAX_CENTERS
        )));
    }
    let data = embedrank::synthetic::classification_dataset(seed, n_train, n_test, labels);
    let pack = |docs: Vec<Document>| -> Vec<(String, String, Vec<String>)> {
        docs.into_iter().map(|d| (d.id, d.text, d.labels)).collect()
    };
    Ok((pack(data.train), pack(data.test), data.labels, WordVectors { inner: data.vectors }))
}

// --- gradient checking -------------------------------------------------------------------

/// Central-difference check of every network block over `seeds` seeds.
/// Returns (block_name, parameter_count, max_relative_error, passed) rows.
#[pyfunction]
#[pyo3(name = "gradient_check", signature = (seeds = 20))]
fn py_gradient_check(seeds: u64) -> PyResult<Vec<(String, usize, f64, bool)>> {
    if seeds == 0 {
        return Err(PyValueError::new_err("seeds must be >= 1"));
    }
    let blocks = embedrank::nn::cnn_suite(seeds).map_err(to_py)?;
    Ok(blocks
        .into_iter()
        .map(|b| {
            let passed = b.passed();
            (b.name.to_string(), b.params, b.max_rel_err, passed)
        })
        .collect())
}

#[pymodule]
fn _embedrank(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("GRADCHECK_TOL", embedrank::nn::GRADCHECK_TOL)?;
    m.add("DEFAULT_BINS", embedrank::ranking::DEFAULT_BINS)?;
    m.add("DEFAULT_MARGIN", embedrank::ranking::DEFAULT_MARGIN)?;
    m.add("BM25_K1", embedrank::ranking::BM25_K1)?;
    m.add("BM25_B", embedrank::ranking::BM25_B)?;

    m.add_function(wrap_pyfunction!(py_tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(py_split_paragraphs, m)?)?;
    m.add_function(wrap_pyfunction!(py_cosine_sim, m)?)?;
    m.add_function(wrap_pyfunction!(py_gating_weights, m)?)?;
    m.add_function(wrap_pyfunction!(py_hinge_loss, m)?)?;
    m.add_function(wrap_pyfunction!(py_bin_index, m)?)?;
    m.add_function(wrap_pyfunction!(py_interaction_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(py_precision_at_k, m)?)?;
    m.add_function(wrap_pyfunction!(py_average_precision, m)?)?;
    m.add_function(wrap_pyfunction!(py_ndcg_at_k, m)?)?;
    m.add_function(wrap_pyfunction!(py_mean_average_precision, m)?)?;
    m.add_function(wrap_pyfunction!(py_mean_precision_at_k, m)?)?;
    m.add_function(wrap_pyfunction!(py_mean_ndcg_at_k, m)?)?;
    m.add_function(wrap_pyfunction!(py_multilabel_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(py_sample_triplets, m)?)?;
    m.add_function(wrap_pyfunction!(py_synthetic_retrieval_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(py_synthetic_classification_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(py_gradient_check, m)?)?;

    m.add_class::<WordVectors>()?;
    m.add_class::<Index>()?;
    m.add_class::<TextCnn>()?;
    m.add_class::<Drmm>()?;
    Ok(())
}

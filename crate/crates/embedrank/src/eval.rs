//! Classification and ranked-retrieval evaluation.
//!
//! The multi-label formulas follow the unusual printed convention: per
//! instance, precision divides the intersection by the TRUE label count and
//! recall by the PREDICTED count (the reverse of common usage). The
//! `conventional` switch swaps the two denominators back.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ranking::RunList;

/// Graded relevance judgments: query id -> doc id -> grade. Grade 0 is an
/// explicit non-relevance judgment; absent docs are unjudged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    queries: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) {
        self.queries
            .entry(query_id.to_string())
            .or_default()
            .insert(doc_id.to_string(), grade);
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> Option<u32> {
        self.queries.get(query_id)?.get(doc_id).copied()
    }

    pub fn contains_query(&self, query_id: &str) -> bool {
        self.queries.contains_key(query_id)
    }

    pub fn query_count(&self) -> usize {
        self.queries.len()
    }

    pub fn queries(&self) -> impl Iterator<Item = &String> {
        self.queries.keys()
    }

    /// All judged (doc, grade) pairs for a query, sorted by doc id.
    pub fn judged(&self, query_id: &str) -> Option<&BTreeMap<String, u32>> {
        self.queries.get(query_id)
    }

    pub fn relevant_count(&self, query_id: &str) -> usize {
        self.queries
            .get(query_id)
            .map_or(0, |docs| docs.values().filter(|&&g| g > 0).count())
    }

    /// Parses `<qid> <iter> <docid> <grade>` lines; `#` comments and blank
    /// lines are skipped. A repeated (query, doc) pair keeps the last grade.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut qrels = Qrels::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected 4 fields, found {}", fields.len()),
                ));
            }
            let grade: u32 = fields[3]
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad grade {:?}", fields[3])))?;
            qrels.insert(fields[0], fields[2], grade);
        }
        if qrels.queries.is_empty() {
            return Err(Error::Data(format!("{}: empty qrels", path.display())));
        }
        Ok(qrels)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        use std::io::Write;
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        for (qid, docs) in &self.queries {
            for (doc, grade) in docs {
                writeln!(w, "{qid} 0 {doc} {grade}").map_err(|e| Error::io(path, e))?;
            }
        }
        Ok(())
    }
}

/// Paired binary prediction/truth matrices, N instances by K labels.
#[derive(Debug, Clone)]
pub struct LabelMatrixPair {
    pred: Vec<Vec<bool>>,
    truth: Vec<Vec<bool>>,
}

impl LabelMatrixPair {
    pub fn new(pred: Vec<Vec<bool>>, truth: Vec<Vec<bool>>) -> Result<Self> {
        if pred.len() != truth.len() || pred.is_empty() {
            return Err(Error::Shape(format!(
                "{} prediction rows vs {} truth rows",
                pred.len(),
                truth.len()
            )));
        }
        let k = pred[0].len();
        if pred.iter().chain(&truth).any(|row| row.len() != k) {
            return Err(Error::Shape("ragged label matrix".into()));
        }
        Ok(Self { pred, truth })
    }

    pub fn instances(&self) -> usize {
        self.pred.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultilabelMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

/// Instance-averaged multi-label metrics. With `conventional = false` the
/// printed-form denominators are used (precision over the true set, recall
/// over the predicted set); `conventional = true` swaps them. Zero-denominator
/// terms contribute 0, except accuracy of two empty sets which contributes 1.
pub fn multilabel_metrics(pair: &LabelMatrixPair, conventional: bool) -> MultilabelMetrics {
    let n = pair.instances() as f64;
    let (mut p_sum, mut r_sum, mut f_sum, mut a_sum) = (0.0, 0.0, 0.0, 0.0);
    for (y, z) in pair.pred.iter().zip(&pair.truth) {
        let pred = y.iter().filter(|&&b| b).count() as f64;
        let truth = z.iter().filter(|&&b| b).count() as f64;
        let inter = y.iter().zip(z).filter(|(&a, &b)| a && b).count() as f64;
        let union = pred + truth - inter;
        let (p_den, r_den) = if conventional { (pred, truth) } else { (truth, pred) };
        if p_den > 0.0 {
            p_sum += inter / p_den;
        }
        if r_den > 0.0 {
            r_sum += inter / r_den;
        }
        if pred + truth > 0.0 {
            f_sum += 2.0 * inter / (pred + truth);
        }
        a_sum += if union > 0.0 { inter / union } else { 1.0 };
    }
    MultilabelMetrics {
        precision: p_sum / n,
        recall: r_sum / n,
        f1: f_sum / n,
        accuracy: a_sum / n,
    }
}

/// Fraction of the top K that is relevant (grade > 0). Positions past the end
/// of the run count as non-relevant; unjudged docs count as non-relevant.
pub fn precision_at_k(run: &RunList, qrels: &Qrels, k: usize) -> f64 {
    assert!(k >= 1);
    let hits = run
        .entries
        .iter()
        .take(k)
        .filter(|e| qrels.grade(&run.query_id, &e.doc_id).unwrap_or(0) > 0)
        .count();
    hits as f64 / k as f64
}

/// Average precision: mean of P@k over the rank positions holding relevant
/// docs, divided by the TOTAL number of relevant docs in the qrels. 0 when
/// the query has no relevant docs.
pub fn average_precision(run: &RunList, qrels: &Qrels) -> Result<f64> {
    if !qrels.contains_query(&run.query_id) {
        return Err(Error::UnknownQuery(run.query_id.clone()));
    }
    let total_relevant = qrels.relevant_count(&run.query_id);
    if total_relevant == 0 {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, entry) in run.entries.iter().enumerate() {
        if qrels.grade(&run.query_id, &entry.doc_id).unwrap_or(0) > 0 {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / total_relevant as f64)
}

pub fn mean_average_precision(runs: &[RunList], qrels: &Qrels) -> Result<f64> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("runs"));
    }
    let mut sum = 0.0;
    for run in runs {
        sum += average_precision(run, qrels)?;
    }
    Ok(sum / runs.len() as f64)
}

fn dcg(grades: impl Iterator<Item = u32>) -> f64 {
    grades
        .enumerate()
        .map(|(i, g)| (2f64.powi(g as i32) - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

/// nDCG@K with gain 2^grade - 1 and log2 position discount. The ideal DCG
/// ranks all judged docs by descending grade; a query with no relevant doc
/// (or absent from the qrels) scores 0.
pub fn ndcg_at_k(run: &RunList, qrels: &Qrels, k: usize) -> f64 {
    assert!(k >= 1);
    let Some(judged) = qrels.judged(&run.query_id) else { return 0.0 };
    let mut ideal: Vec<u32> = judged.values().copied().collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(ideal.into_iter().take(k));
    if idcg == 0.0 {
        return 0.0;
    }
    let actual = dcg(
        run.entries
            .iter()
            .take(k)
            .map(|e| qrels.grade(&run.query_id, &e.doc_id).unwrap_or(0)),
    );
    actual / idcg
}

pub fn mean_precision_at_k(runs: &[RunList], qrels: &Qrels, k: usize) -> f64 {
    if runs.is_empty() {
        return 0.0;
    }
    runs.iter().map(|r| precision_at_k(r, qrels, k)).sum::<f64>() / runs.len() as f64
}

pub fn mean_ndcg_at_k(runs: &[RunList], qrels: &Qrels, k: usize) -> f64 {
    if runs.is_empty() {
        return 0.0;
    }
    runs.iter().map(|r| ndcg_at_k(r, qrels, k)).sum::<f64>() / runs.len() as f64
}

/// A retrieval metric selected by name: `MAP`, `P@<k>`, or `nDCG@<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Map,
    PrecisionAt(usize),
    NdcgAt(usize),
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("map") {
            return Ok(Metric::Map);
        }
        let bad = || Error::Config(format!("unknown metric {s:?} (expected MAP, P@<k>, or nDCG@<k>)"));
        if let Some(k) = s.strip_prefix("P@").or_else(|| s.strip_prefix("p@")) {
            return k.parse::<usize>().ok().filter(|&k| k >= 1).map(Metric::PrecisionAt).ok_or_else(bad);
        }
        for prefix in ["nDCG@", "ndcg@", "NDCG@"] {
            if let Some(k) = s.strip_prefix(prefix) {
                return k.parse::<usize>().ok().filter(|&k| k >= 1).map(Metric::NdcgAt).ok_or_else(bad);
            }
        }
        Err(bad())
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Map => write!(f, "MAP"),
            Metric::PrecisionAt(k) => write!(f, "P@{k}"),
            Metric::NdcgAt(k) => write!(f, "nDCG@{k}"),
        }
    }
}

/// Requires every run query to be judged (the strict contract of the
/// `evaluate` surface).
pub fn validate_runs_against_qrels(runs: &[RunList], qrels: &Qrels) -> Result<()> {
    for run in runs {
        if !qrels.contains_query(&run.query_id) {
            return Err(Error::UnknownQuery(run.query_id.clone()));
        }
    }
    Ok(())
}

/// Evaluates the requested metrics; the report map holds exactly the
/// requested keys, in request order.
pub fn retrieval_report(
    runs: &[RunList],
    qrels: &Qrels,
    metrics: &[Metric],
) -> Result<serde_json::Map<String, serde_json::Value>> {
    validate_runs_against_qrels(runs, qrels)?;
    let mut report = serde_json::Map::new();
    for metric in metrics {
        let value = match metric {
            Metric::Map => mean_average_precision(runs, qrels)?,
            Metric::PrecisionAt(k) => mean_precision_at_k(runs, qrels, *k),
            Metric::NdcgAt(k) => mean_ndcg_at_k(runs, qrels, *k),
        };
        report.insert(metric.to_string(), serde_json::json!(value));
    }
    Ok(report)
}

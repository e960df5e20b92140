//! Scoring back-ends (BM25, term- and paragraph-level relevance matching,
//! cosine), ensemble combination, triplet sampling, and ranked-list
//! production with TREC-style run file IO.

pub mod drmm;
pub mod histogram;
pub mod index;
pub mod triplets;

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub use drmm::{
    gating_weights, hinge_gradcheck, hinge_loss, train_drmm, DrmmConfig, DrmmModel, MatchUnit,
    ParagraphGating, DEFAULT_MARGIN,
};
pub use histogram::{bin_index, interaction_counts, interaction_histogram, HistogramMode, DEFAULT_BINS};
pub use index::{InvertedIndex, BM25_B, BM25_K1};
pub use triplets::{read_triplets, sample_triplets, write_triplets, Triplet, TripletStats};

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub doc_id: String,
    pub score: f64,
}

/// One query's ranked retrieval output: scores non-increasing, ties broken by
/// ascending doc id, doc ids unique.
#[derive(Debug, Clone, PartialEq)]
pub struct RunList {
    pub query_id: String,
    pub entries: Vec<RunEntry>,
}

/// Cosine similarity, or `None` when either vector is all-zero (the
/// similarity is undefined and the caller must skip the pair).
pub fn cosine_sim(u: &[f64], v: &[f64]) -> Option<f64> {
    assert_eq!(u.len(), v.len(), "cosine of vectors with different lengths");
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return None;
    }
    Some((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Arithmetic sum of component scores.
pub fn ensemble_score(scores: &[f64]) -> f64 {
    assert!(!scores.is_empty(), "ensemble of zero components");
    assert!(scores.iter().all(|s| s.is_finite()), "non-finite component score");
    scores.iter().sum()
}

/// In-place z-score normalization (population variance). A constant slice
/// becomes all zeros.
pub fn z_normalize(scores: &mut [f64]) {
    if scores.is_empty() {
        return;
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    for s in scores.iter_mut() {
        *s = if std == 0.0 { 0.0 } else { (*s - mean) / std };
    }
}

/// Combines per-candidate component scores into ensemble scores. `None`
/// components (undefined similarity) contribute nothing; a candidate with no
/// defined component stays `None`. With `znorm`, each component is z-score
/// normalized over its defined candidates first.
pub fn combine_scores(components: &[Vec<Option<f64>>], znorm: bool) -> Vec<Option<f64>> {
    assert!(!components.is_empty());
    let n = components[0].len();
    assert!(components.iter().all(|c| c.len() == n), "component length mismatch");
    let mut prepared: Vec<Vec<Option<f64>>> = components.to_vec();
    if znorm {
        for comp in &mut prepared {
            let mut defined: Vec<f64> = comp.iter().filter_map(|s| *s).collect();
            z_normalize(&mut defined);
            let mut it = defined.into_iter();
            for slot in comp.iter_mut() {
                if slot.is_some() {
                    *slot = it.next();
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            let parts: Vec<f64> = prepared.iter().filter_map(|c| c[i]).collect();
            if parts.is_empty() {
                None
            } else {
                Some(ensemble_score(&parts))
            }
        })
        .collect()
}

/// Builds a ranked list: top-`cutoff` candidates by descending score, ties by
/// ascending doc id. Candidates with undefined scores are dropped.
pub fn rank(
    query_id: &str,
    scored: impl IntoIterator<Item = (String, Option<f64>)>,
    cutoff: usize,
) -> RunList {
    assert!(cutoff >= 1, "cutoff must be at least 1");
    let mut entries: Vec<RunEntry> = scored
        .into_iter()
        .filter_map(|(doc_id, score)| score.map(|score| RunEntry { doc_id, score }))
        .collect();
    assert!(entries.iter().all(|e| e.score.is_finite()), "non-finite score in rank()");
    entries.sort_by(|a, b| {
        b.score.partial_cmp(&a.score).unwrap().then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    entries.truncate(cutoff);
    RunList { query_id: query_id.to_string(), entries }
}

/// Writes runs in TREC format: `<qid> Q0 <docid> <rank> <score> <tag>`.
/// `header` lines are emitted first, prefixed with `# `.
pub fn write_run(path: &Path, runs: &[RunList], tag: &str, header: &[String]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for line in header {
        writeln!(w, "# {line}").map_err(io)?;
    }
    for run in runs {
        for (i, entry) in run.entries.iter().enumerate() {
            writeln!(w, "{} Q0 {} {} {:.6} {}", run.query_id, entry.doc_id, i + 1, entry.score, tag)
                .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Reads a TREC run file. `#` comment lines and blank lines are skipped;
/// entries are re-sorted by (descending score, ascending doc id) per query so
/// the in-memory invariant holds even for hand-written files. Queries keep
/// first-appearance order.
pub fn read_run(path: &Path) -> Result<Vec<RunList>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut runs: Vec<RunList> = Vec::new();
    let mut by_query: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::parse(path, lineno, format!("expected 6 fields, found {}", fields.len())));
        }
        fields[3]
            .parse::<u64>()
            .map_err(|_| Error::parse(path, lineno, format!("bad rank {:?}", fields[3])))?;
        let score: f64 = fields[4]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad score {:?}", fields[4])))?;
        if !score.is_finite() {
            return Err(Error::parse(path, lineno, "non-finite score"));
        }
        let qid = fields[0].to_string();
        let entry = RunEntry { doc_id: fields[2].to_string(), score };
        match by_query.get(&qid) {
            Some(&i) => runs[i].entries.push(entry),
            None => {
                by_query.insert(qid.clone(), runs.len());
                runs.push(RunList { query_id: qid, entries: vec![entry] });
            }
        }
    }
    for run in &mut runs {
        run.entries.sort_by(|a, b| {
            b.score.partial_cmp(&a.score).unwrap().then_with(|| a.doc_id.cmp(&b.doc_id))
        });
        let mut seen = std::collections::HashSet::new();
        for e in &run.entries {
            if !seen.insert(e.doc_id.as_str()) {
                return Err(Error::Data(format!(
                    "{}: duplicate doc {} for query {}",
                    path.display(),
                    e.doc_id,
                    run.query_id
                )));
            }
        }
    }
    Ok(runs)
}

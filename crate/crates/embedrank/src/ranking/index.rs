//! Inverted index with Okapi BM25 scoring.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// Term postings plus document statistics. Postings are sorted by external
/// doc id (ascending string order); documents keep corpus order internally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvertedIndex {
    /// Free-form provenance record stamped by the producing command.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub meta: serde_json::Value,
    doc_ids: Vec<String>,
    doc_lens: Vec<u32>,
    postings: BTreeMap<String, Vec<Posting>>,
    #[serde(skip)]
    doc_lookup: HashMap<String, u32>,
}

impl InvertedIndex {
    pub fn build<'a, I>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a [String])>,
    {
        let mut index = Self {
            meta: serde_json::Value::Null,
            doc_ids: Vec::new(),
            doc_lens: Vec::new(),
            postings: BTreeMap::new(),
            doc_lookup: HashMap::new(),
        };
        for (id, tokens) in docs {
            let doc = index.doc_ids.len() as u32;
            if index.doc_lookup.insert(id.to_string(), doc).is_some() {
                return Err(Error::Data(format!("duplicate doc id {id:?} in index input")));
            }
            index.doc_ids.push(id.to_string());
            index.doc_lens.push(tokens.len() as u32);
            let mut counts: HashMap<&str, u32> = HashMap::new();
            for t in tokens {
                *counts.entry(t.as_str()).or_insert(0) += 1;
            }
            for (term, tf) in counts {
                index.postings.entry(term.to_string()).or_default().push(Posting { doc, tf });
            }
        }
        if index.doc_ids.is_empty() {
            return Err(Error::EmptyInput("index corpus"));
        }
        let ids = &index.doc_ids;
        for plist in index.postings.values_mut() {
            plist.sort_by(|a, b| ids[a.doc as usize].cmp(&ids[b.doc as usize]));
        }
        Ok(index)
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn contains_doc(&self, doc_id: &str) -> bool {
        self.doc_lookup.contains_key(doc_id)
    }

    pub fn doc_len(&self, doc_id: &str) -> Option<u32> {
        self.doc_lookup.get(doc_id).map(|&i| self.doc_lens[i as usize])
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.doc_lens.iter().map(|&l| l as u64).sum::<u64>() as f64 / self.doc_ids.len() as f64
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn postings(&self, term: &str) -> Option<&[Posting]> {
        self.postings.get(term).map(Vec::as_slice)
    }

    /// Okapi idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
    pub fn bm25_idf(&self, term: &str) -> f64 {
        let n = self.doc_count() as f64;
        let df = self.df(term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Smoothed idf for gating: ln((N + 1) / (df + 1)) + 1.
    pub fn gating_idf(&self, term: &str) -> f64 {
        let n = self.doc_count() as f64;
        let df = self.df(term) as f64;
        ((n + 1.0) / (df + 1.0)).ln() + 1.0
    }

    fn tf_in(&self, term: &str, doc: u32) -> u32 {
        let Some(plist) = self.postings.get(term) else { return 0 };
        let target = &self.doc_ids[doc as usize];
        plist
            .binary_search_by(|p| self.doc_ids[p.doc as usize].as_str().cmp(target))
            .map(|i| plist[i].tf)
            .unwrap_or(0)
    }

    /// BM25 score of one document for a query, summed over query token
    /// occurrences (a repeated query term contributes once per occurrence).
    pub fn bm25_score(&self, query: &[String], doc_id: &str) -> Result<f64> {
        self.bm25_score_with(query, doc_id, BM25_K1, BM25_B)
    }

    pub fn bm25_score_with(&self, query: &[String], doc_id: &str, k1: f64, b: f64) -> Result<f64> {
        let &doc = self
            .doc_lookup
            .get(doc_id)
            .ok_or_else(|| Error::UnknownDoc(doc_id.to_string()))?;
        let len_norm = k1 * (1.0 - b + b * self.doc_lens[doc as usize] as f64 / self.avg_doc_len());
        let mut score = 0.0;
        for term in query {
            let tf = self.tf_in(term, doc) as f64;
            if tf == 0.0 {
                continue;
            }
            score += self.bm25_idf(term) * tf * (k1 + 1.0) / (tf + len_norm);
        }
        Ok(score)
    }

    /// BM25 scores for every document, via postings traversal. Documents that
    /// match no query term score 0.
    pub fn bm25_all(&self, query: &[String]) -> Vec<f64> {
        self.bm25_all_with(query, BM25_K1, BM25_B)
    }

    pub fn bm25_all_with(&self, query: &[String], k1: f64, b: f64) -> Vec<f64> {
        let mut scores = vec![0.0; self.doc_count()];
        let avg = self.avg_doc_len();
        for term in query {
            let Some(plist) = self.postings.get(term) else { continue };
            let idf = self.bm25_idf(term);
            for p in plist {
                let tf = p.tf as f64;
                let len_norm = k1 * (1.0 - b + b * self.doc_lens[p.doc as usize] as f64 / avg);
                scores[p.doc as usize] += idf * tf * (k1 + 1.0) / (tf + len_norm);
            }
        }
        scores
    }

    /// The `pool` highest-BM25 doc ids (ties by ascending doc id); the
    /// candidate pool for the slower scorers.
    pub fn bm25_pool(&self, query: &[String], pool: usize) -> Vec<String> {
        self.bm25_pool_with(query, pool, BM25_K1, BM25_B)
    }

    pub fn bm25_pool_with(&self, query: &[String], pool: usize, k1: f64, b: f64) -> Vec<String> {
        let scores = self.bm25_all_with(query, k1, b);
        let mut order: Vec<usize> = (0..self.doc_count()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .unwrap()
                .then_with(|| self.doc_ids[a].cmp(&self.doc_ids[b]))
        });
        order.truncate(pool);
        order.into_iter().map(|i| self.doc_ids[i].clone()).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer(BufWriter::new(file), self)
            .map_err(|e| Error::Data(format!("{}: cannot serialize index: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingArtifact(path.to_path_buf(), "index".into())
            } else {
                Error::io(path, e)
            }
        })?;
        let mut index: Self = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::Data(format!("{}: corrupt index: {e}", path.display())))?;
        index.doc_lookup = index
            .doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();
        Ok(index)
    }
}

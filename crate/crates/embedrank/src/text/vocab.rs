//! Vocabulary with document-frequency statistics.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct TokenStat {
    id: u32,
    df: u32,
}

/// Token ids and document frequencies over a corpus.
///
/// Ids are assigned contiguously from 1 in order of first appearance; id 0
/// is reserved for padding. `df(t)` counts documents containing `t` at
/// least once, so `0 <= df(t) <= doc_count` always holds.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    stats: HashMap<String, TokenStat>,
    doc_count: u64,
}

impl Vocabulary {
    /// Builds the vocabulary from tokenized documents.
    pub fn build<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut vocab = Vocabulary::default();
        for doc in docs {
            vocab.add_document(doc);
        }
        vocab
    }

    /// Adds one document, counting each distinct token once.
    pub fn add_document(&mut self, tokens: &[String]) {
        self.doc_count += 1;
        let mut seen: std::collections::HashSet<&str> = std::collections::HashSet::new();
        for token in tokens {
            if !seen.insert(token.as_str()) {
                continue;
            }
            let next_id = self.stats.len() as u32 + 1;
            let stat = self
                .stats
                .entry(token.clone())
                .or_insert(TokenStat { id: next_id, df: 0 });
            stat.df += 1;
        }
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    pub fn distinct_tokens(&self) -> usize {
        self.stats.len()
    }

    /// Document frequency; 0 for unseen tokens.
    pub fn df(&self, token: &str) -> u32 {
        self.stats.get(token).map_or(0, |s| s.df)
    }

    /// Token id (contiguous from 1; 0 is the padding id), or None if unseen.
    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.stats.get(token).map(|s| s.id)
    }

    /// Smoothed inverse document frequency: `ln((N + 1) / (df + 1)) + 1`.
    ///
    /// Strictly positive and defined for unseen tokens (df = 0), which keeps
    /// softmax gating weights ordered by rarity. Fails when the vocabulary
    /// was built from an empty corpus.
    pub fn idf(&self, token: &str) -> Result<f64> {
        if self.doc_count == 0 {
            return Err(Error::Invalid(
                "idf undefined for an empty corpus (doc_count = 0)".into(),
            ));
        }
        let n = self.doc_count as f64;
        let df = self.df(token) as f64;
        Ok(((n + 1.0) / (df + 1.0)).ln() + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seqs(docs: &[&[&str]]) -> Vec<Vec<String>> {
        docs.iter()
            .map(|d| d.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn df_counts_documents_not_occurrences() {
        let docs = seqs(&[&["a", "b"], &["a"]]);
        let vocab = Vocabulary::build(docs.iter().map(|d| d.as_slice()));
        assert_eq!(vocab.doc_count(), 2);
        assert_eq!(vocab.df("a"), 2);
        assert_eq!(vocab.df("b"), 1);

        let docs = seqs(&[&["a", "a"]]);
        let vocab = Vocabulary::build(docs.iter().map(|d| d.as_slice()));
        assert_eq!(vocab.df("a"), 1);
    }

    #[test]
    fn empty_corpus() {
        let vocab = Vocabulary::build(std::iter::empty());
        assert_eq!(vocab.doc_count(), 0);
        assert_eq!(vocab.distinct_tokens(), 0);
        assert!(vocab.idf("a").is_err());
    }

    #[test]
    fn ids_contiguous_from_one() {
        let docs = seqs(&[&["x", "y"], &["z", "x"]]);
        let vocab = Vocabulary::build(docs.iter().map(|d| d.as_slice()));
        assert_eq!(vocab.token_id("x"), Some(1));
        assert_eq!(vocab.token_id("y"), Some(2));
        assert_eq!(vocab.token_id("z"), Some(3));
        assert_eq!(vocab.token_id("pad-or-unknown"), None);
    }

    #[test]
    fn idf_examples() {
        let docs = seqs(&[&["a", "b"], &["a"]]);
        let vocab = Vocabulary::build(docs.iter().map(|d| d.as_slice()));
        // N=2, df=1 -> ln(3/2)+1; N=2, df=2 -> 1.0
        assert!((vocab.idf("b").unwrap() - (1.5f64.ln() + 1.0)).abs() < 1e-12);
        assert!((vocab.idf("a").unwrap() - 1.0).abs() < 1e-12);

        let nine: Vec<Vec<String>> = (0..9).map(|i| vec![format!("t{i}")]).collect();
        let vocab = Vocabulary::build(nine.iter().map(|d| d.as_slice()));
        assert!((vocab.idf("unseen").unwrap() - (10f64.ln() + 1.0)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn df_bounded_by_doc_count(docs in proptest::collection::vec(
            proptest::collection::vec("[a-e]", 0..8), 0..12)) {
            let vocab = Vocabulary::build(docs.iter().map(|d| d.as_slice()));
            for doc in &docs {
                for token in doc {
                    prop_assert!(u64::from(vocab.df(token)) <= vocab.doc_count());
                    prop_assert!(vocab.df(token) >= 1);
                }
            }
        }

        // idf must be strictly decreasing in df for a fixed corpus size.
        #[test]
        fn idf_strictly_decreasing_in_df(n in 1u64..50) {
            let mut docs = Vec::new();
            for i in 0..n {
                // "common" is in every doc, "rare" only in the first.
                let mut d = vec!["common".to_string()];
                if i == 0 {
                    d.push("rare".to_string());
                }
                docs.push(d);
            }
            let vocab = Vocabulary::build(docs.iter().map(|d| d.as_slice()));
            let unseen = vocab.idf("never").unwrap();
            let rare = vocab.idf("rare").unwrap();
            let common = vocab.idf("common").unwrap();
            prop_assert!(unseen > rare || n == 1);
            prop_assert!(rare > common || n == 1);
        }
    }
}

//! Seeded generators for self-contained experiments: a topical retrieval
//! collection whose queries and documents share meaning but little
//! vocabulary, and a multi-label corpus built from synonym families.
//!
//! Both plant their signal in the word-vector geometry: tokens of one topic
//! (or label) cluster around a dedicated axis, so vector-based scorers can
//! bridge vocabulary gaps that defeat purely lexical ones.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::Qrels;
use crate::text::{Document, WordVectorTable};

pub const VECTOR_DIM: usize = 16;
/// Topic/label axes use the first 10 coordinates; background tokens live in
/// the remaining subspace, keeping them nearly orthogonal to every topic.
pub const MAX_CENTERS: usize = 10;

#[derive(Debug, Clone)]
pub struct RetrievalDataset {
    pub docs: Vec<Document>,
    /// Multi-paragraph topical queries, carried as unlabeled documents.
    pub queries: Vec<Document>,
    /// Complete judgments: grade 2 for same-topic pairs, 0 otherwise.
    pub qrels: Qrels,
    pub vectors: WordVectorTable,
}

#[derive(Debug, Clone)]
pub struct ClassificationDataset {
    pub train: Vec<Document>,
    pub test: Vec<Document>,
    pub labels: Vec<String>,
    pub vectors: WordVectorTable,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Unit vector near the `center` axis: the clustered identity of one topic's
/// tokens.
fn topical_vector(rng: &mut ChaCha8Rng, center: usize, spread: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..VECTOR_DIM).map(|_| spread * gauss(rng)).collect();
    v[center] += 1.0;
    normalize(v)
}

/// Unit vector in the background subspace, orthogonal to all topic axes up
/// to each topical vector's own noise.
fn background_vector(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = vec![0.0; VECTOR_DIM];
    for x in v.iter_mut().skip(MAX_CENTERS) {
        *x = gauss(rng);
    }
    normalize(v)
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &'a [String]) -> &'a str {
    &pool[rng.random_range(0..pool.len())]
}

struct TopicVocab {
    doc_side: Vec<String>,
    query_side: Vec<String>,
    shared: Vec<String>,
}

/// Topical retrieval collection. Documents of a topic draw mostly from that
/// topic's document-side vocabulary, queries from a disjoint query-side
/// vocabulary, with a thin band of shared tokens and a global background
/// pool. Lexical overlap between a query and its relevant documents is
/// therefore limited to shared and background tokens, while all topical
/// tokens share one vector cluster.
pub fn retrieval_dataset(
    seed: u64,
    n_docs: usize,
    n_queries: usize,
    topics: usize,
) -> RetrievalDataset {
    assert!((1..=MAX_CENTERS).contains(&topics), "topics must be in 1..={MAX_CENTERS}");
    assert!(n_docs >= topics && n_queries >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut vectors = Vec::new();
    let mut vocab = Vec::with_capacity(topics);
    for t in 0..topics {
        let mut side = |prefix: &str, count: usize| -> Vec<String> {
            (0..count)
                .map(|j| {
                    let word = format!("t{t}{prefix}{j}");
                    vectors.push((word.clone(), topical_vector(&mut rng, t, 0.35)));
                    word
                })
                .collect()
        };
        vocab.push(TopicVocab {
            doc_side: side("d", 12),
            query_side: side("q", 8),
            shared: side("s", 2),
        });
    }
    let background: Vec<String> = (0..240)
        .map(|j| {
            let word = format!("bg{j}");
            vectors.push((word.clone(), background_vector(&mut rng)));
            word
        })
        .collect();

    let mut docs = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let topic = i % topics;
        let v = &vocab[topic];
        let n_paras = rng.random_range(2..=4);
        let mut paras = Vec::with_capacity(n_paras);
        for _ in 0..n_paras {
            let len = rng.random_range(28..=34);
            let mut words = Vec::with_capacity(len);
            for _ in 0..len {
                let roll: f64 = rng.random();
                let pool = if roll < 0.60 {
                    &v.doc_side
                } else if roll < 0.63 {
                    &v.shared
                } else {
                    &background
                };
                words.push(pick(&mut rng, pool).to_string());
            }
            paras.push(words.join(" "));
        }
        docs.push(Document {
            id: format!("d{i:04}"),
            text: paras.join("\n\n"),
            labels: vec![format!("topic{topic}")],
        });
    }

    let mut queries = Vec::with_capacity(n_queries);
    let mut qrels = Qrels::new();
    for qi in 0..n_queries {
        let topic = qi % topics;
        let v = &vocab[topic];
        let mut paras = Vec::with_capacity(3);
        for _ in 0..3 {
            let len = rng.random_range(26..=32);
            let mut words = Vec::with_capacity(len);
            for _ in 0..len {
                let roll: f64 = rng.random();
                let pool = if roll < 0.55 {
                    &v.query_side
                } else if roll < 0.60 {
                    &v.shared
                } else {
                    &background
                };
                words.push(pick(&mut rng, pool).to_string());
            }
            paras.push(words.join(" "));
        }
        let qid = format!("q{qi:02}");
        for doc in &docs {
            let grade = if doc.labels[0] == format!("topic{topic}") { 2 } else { 0 };
            qrels.insert(&qid, &doc.id, grade);
        }
        queries.push(Document { id: qid, text: paras.join("\n\n"), labels: Vec::new() });
    }

    RetrievalDataset { docs, queries, qrels, vectors: WordVectorTable::from_entries(VECTOR_DIM, vectors) }
}

/// Multi-label corpus where each label owns a family of 12 interchangeable
/// tokens with clustered vectors. Training documents draw from the first 8
/// members of each family and test documents from the remaining 4, so no
/// label-bearing token seen at test time ever occurs in training text.
/// Token-identity features therefore cannot transfer at all, while the
/// shared vector cluster transfers perfectly.
pub fn classification_dataset(
    seed: u64,
    n_train: usize,
    n_test: usize,
    labels: usize,
) -> ClassificationDataset {
    assert!((1..=MAX_CENTERS).contains(&labels), "labels must be in 1..={MAX_CENTERS}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut vectors = Vec::new();
    let families: Vec<Vec<String>> = (0..labels)
        .map(|l| {
            (0..12)
                .map(|j| {
                    let word = format!("l{l}w{j}");
                    vectors.push((word.clone(), topical_vector(&mut rng, l, 0.15)));
                    word
                })
                .collect()
        })
        .collect();
    let background: Vec<String> = (0..150)
        .map(|j| {
            let word = format!("bg{j}");
            vectors.push((word.clone(), background_vector(&mut rng)));
            word
        })
        .collect();
    let label_names: Vec<String> = (0..labels).map(|l| format!("code{l:02}")).collect();

    let make_doc = |id: String, rng: &mut ChaCha8Rng, family_slice: std::ops::Range<usize>| -> Document {
        let mut doc_labels = vec![rng.random_range(0..labels)];
        if labels > 1 && rng.random::<f64>() < 0.3 {
            let mut second = rng.random_range(0..labels - 1);
            if second >= doc_labels[0] {
                second += 1;
            }
            doc_labels.push(second);
        }
        let mut words = Vec::new();
        for &l in &doc_labels {
            let members = &families[l][family_slice.clone()];
            for idx in rand::seq::index::sample(rng, members.len(), 4) {
                words.push(members[idx].clone());
            }
        }
        for _ in 0..25 {
            words.push(pick(rng, &background).to_string());
        }
        words.shuffle(rng);
        Document {
            id,
            text: words.join(" "),
            labels: doc_labels.iter().map(|&l| label_names[l].clone()).collect(),
        }
    };

    let train: Vec<Document> =
        (0..n_train).map(|i| make_doc(format!("tr{i:04}"), &mut rng, 0..8)).collect();
    let test = (0..n_test).map(|i| make_doc(format!("te{i:04}"), &mut rng, 8..12)).collect();
    ClassificationDataset {
        train,
        test,
        labels: label_names,
        vectors: WordVectorTable::from_entries(VECTOR_DIM, vectors),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{split_paragraphs, tokenize};

    #[test]
    fn retrieval_dataset_is_deterministic() {
        let a = retrieval_dataset(3, 40, 6, 4);
        let b = retrieval_dataset(3, 40, 6, 4);
        assert_eq!(a.docs, b.docs);
        assert_eq!(a.queries, b.queries);
        let c = retrieval_dataset(4, 40, 6, 4);
        assert_ne!(a.docs, c.docs);
    }

    #[test]
    fn retrieval_dataset_has_full_judgments_and_topical_structure() {
        let data = retrieval_dataset(11, 60, 8, 5);
        assert_eq!(data.docs.len(), 60);
        assert_eq!(data.queries.len(), 8);
        assert_eq!(data.qrels.query_count(), 8);
        for q in &data.queries {
            assert_eq!(split_paragraphs(&q.text).len(), 3);
            let judged = data.qrels.judged(&q.id).unwrap();
            assert_eq!(judged.len(), 60);
            let relevant = judged.values().filter(|&&g| g == 2).count();
            assert_eq!(relevant, 12, "each of 5 topics holds 60/5 docs");
            assert!(judged.values().all(|&g| g == 2 || g == 0));
        }
        for d in &data.docs {
            assert_eq!(d.labels.len(), 1);
            let n_paras = split_paragraphs(&d.text).len();
            assert!((2..=4).contains(&n_paras));
        }
    }

    #[test]
    fn every_generated_token_has_a_vector() {
        let data = retrieval_dataset(5, 30, 4, 3);
        for doc in data.docs.iter().chain(&data.queries) {
            for token in tokenize(&doc.text) {
                assert!(data.vectors.contains(&token), "missing vector for {token}");
            }
        }
        let cls = classification_dataset(5, 20, 10, 6);
        for doc in cls.train.iter().chain(&cls.test) {
            for token in tokenize(&doc.text) {
                assert!(cls.vectors.contains(&token), "missing vector for {token}");
            }
        }
    }

    #[test]
    fn queries_share_no_topical_vocabulary_with_documents() {
        let data = retrieval_dataset(7, 30, 4, 3);
        for (qi, q) in data.queries.iter().enumerate() {
            let topic = qi % 3;
            for token in tokenize(&q.text) {
                assert!(
                    !token.starts_with(&format!("t{topic}d")),
                    "query used a document-side token {token}"
                );
            }
        }
    }

    #[test]
    fn same_topic_tokens_cluster_and_cross_topic_tokens_do_not() {
        let data = retrieval_dataset(13, 30, 4, 3);
        let cos = |a: &str, b: &str| {
            crate::ranking::cosine_sim(data.vectors.get(a), data.vectors.get(b)).unwrap()
        };
        // Document-side and query-side tokens of one topic align.
        assert!(cos("t0d0", "t0q0") > 0.5, "{}", cos("t0d0", "t0q0"));
        assert!(cos("t1d3", "t1q2") > 0.5);
        // Different topics stay apart.
        assert!(cos("t0d0", "t1d0") < 0.4);
        // Background tokens stay off every topic axis.
        assert!(cos("bg0", "t0d0").abs() < 0.4);
    }

    #[test]
    fn classification_dataset_shapes_and_labels() {
        let data = classification_dataset(9, 50, 20, 10);
        assert_eq!(data.train.len(), 50);
        assert_eq!(data.test.len(), 20);
        assert_eq!(data.labels.len(), 10);
        for doc in data.train.iter().chain(&data.test) {
            assert!((1..=2).contains(&doc.labels.len()));
            for l in &doc.labels {
                assert!(data.labels.contains(l));
            }
            // 4 family tokens per label plus 25 background tokens.
            let expected = 4 * doc.labels.len() + 25;
            assert_eq!(tokenize(&doc.text).len(), expected);
        }
        let again = classification_dataset(9, 50, 20, 10);
        assert_eq!(data.train, again.train);
        assert_eq!(data.test, again.test);
    }

    #[test]
    fn classification_test_docs_use_held_out_family_members() {
        let data = classification_dataset(21, 80, 40, 6);
        let family_index = |token: &str| -> Option<usize> {
            let rest = token.strip_prefix('l')?;
            let w = rest.find('w')?;
            rest[w + 1..].parse().ok()
        };
        let mut train_tokens = std::collections::HashSet::new();
        for doc in &data.train {
            for token in tokenize(&doc.text) {
                if let Some(j) = family_index(&token) {
                    assert!(j < 8, "training doc used held-out token {token}");
                }
                train_tokens.insert(token);
            }
        }
        for doc in &data.test {
            for token in tokenize(&doc.text) {
                if let Some(j) = family_index(&token) {
                    assert!(j >= 8, "test doc used training-side token {token}");
                    assert!(!train_tokens.contains(&token));
                }
            }
        }
    }

    #[test]
    fn vectors_are_unit_length() {
        let data = retrieval_dataset(2, 30, 4, 3);
        for token in ["t0d0", "t2q1", "bg17"] {
            let norm: f64 = data.vectors.get(token).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12, "{token}: {norm}");
        }
    }
}

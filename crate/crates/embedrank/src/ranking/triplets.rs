//! Pairwise training triplets drawn from graded judgments.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::Qrels;

const CSV_HEADER: &str = "query_id,rel_docid,nonrel_docid";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet {
    pub query_id: String,
    pub rel_doc: String,
    pub nonrel_doc: String,
}

#[derive(Debug, Clone, Default)]
pub struct TripletStats {
    pub eligible_queries: usize,
    pub skipped_queries: Vec<String>,
    /// Corpus docs treated as non-relevant because they carry no judgment.
    pub unjudged_as_nonrel: usize,
}

/// Draws exactly `per_query` triplets per eligible query, uniformly with
/// replacement from the relevant × non-relevant pairs. The fixed count
/// over-samples sparse queries and sub-samples rich ones. When
/// `corpus_doc_ids` is given, unjudged corpus docs join the non-relevant
/// pool; queries lacking either pool are skipped with a warning.
pub fn sample_triplets(
    qrels: &Qrels,
    corpus_doc_ids: Option<&[String]>,
    per_query: usize,
    seed: u64,
) -> (Vec<Triplet>, TripletStats) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    let mut stats = TripletStats::default();
    for qid in qrels.queries() {
        let judged = qrels.judged(qid).expect("listed query must be judged");
        let rel: Vec<&String> = judged.iter().filter(|(_, &g)| g > 0).map(|(d, _)| d).collect();
        let mut nonrel: Vec<&String> =
            judged.iter().filter(|(_, &g)| g == 0).map(|(d, _)| d).collect();
        if let Some(corpus) = corpus_doc_ids {
            let before = nonrel.len();
            nonrel.extend(corpus.iter().filter(|d| qrels.grade(qid, d).is_none()));
            nonrel.sort_unstable();
            stats.unjudged_as_nonrel += nonrel.len() - before;
        }
        if rel.is_empty() || nonrel.is_empty() {
            log::warn!(
                "query {qid}: no {} docs, skipped for triplet sampling",
                if rel.is_empty() { "relevant" } else { "non-relevant" }
            );
            stats.skipped_queries.push(qid.clone());
            continue;
        }
        stats.eligible_queries += 1;
        for _ in 0..per_query {
            let r = rel[rng.random_range(0..rel.len())];
            let n = nonrel[rng.random_range(0..nonrel.len())];
            triplets.push(Triplet {
                query_id: qid.clone(),
                rel_doc: r.clone(),
                nonrel_doc: n.clone(),
            });
        }
    }
    (triplets, stats)
}

/// CSV with a `# `-prefixed metadata header block, then a column header row.
pub fn write_triplets(path: &Path, triplets: &[Triplet], header: &[String]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for line in header {
        writeln!(w, "# {line}").map_err(io)?;
    }
    writeln!(w, "{CSV_HEADER}").map_err(io)?;
    for t in triplets {
        for field in [&t.query_id, &t.rel_doc, &t.nonrel_doc] {
            if field.contains(',') || field.contains('\n') {
                return Err(Error::Data(format!("id {field:?} cannot be written as CSV")));
            }
        }
        writeln!(w, "{},{},{}", t.query_id, t.rel_doc, t.nonrel_doc).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_triplets(path: &Path) -> Result<Vec<Triplet>> {
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingArtifact(path.to_path_buf(), "sample-triplets".into())
        } else {
            Error::io(path, e)
        }
    })?;
    let mut triplets = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed == CSV_HEADER {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(path, lineno, "expected query_id,rel_docid,nonrel_docid"));
        }
        triplets.push(Triplet {
            query_id: fields[0].to_string(),
            rel_doc: fields[1].to_string(),
            nonrel_doc: fields[2].to_string(),
        });
    }
    if triplets.is_empty() {
        return Err(Error::Data(format!("{}: no triplets", path.display())));
    }
    Ok(triplets)
}

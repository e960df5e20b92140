//! JSONL corpus loading.

use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One corpus record: a document (or query) with optional label annotations.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

/// Reads a corpus file: one JSON object per line, blank lines ignored.
/// Duplicate ids are rejected.
pub fn read_corpus(path: &Path) -> Result<Vec<Document>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let docs = read_corpus_lines(BufReader::new(file), path)?;
    if docs.is_empty() {
        return Err(Error::Data(format!("{}: empty corpus", path.display())));
    }
    Ok(docs)
}

/// Same as [`read_corpus`] but over any reader; `path` is only used in error
/// messages. An empty stream yields an empty vec.
pub fn read_corpus_lines<R: BufRead>(reader: R, path: &Path) -> Result<Vec<Document>> {
    let mut docs: Vec<Document> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if doc.id.is_empty() {
            return Err(Error::parse(path, lineno, "empty document id"));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::parse(path, lineno, format!("duplicate id {:?}", doc.id)));
        }
        docs.push(doc);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_jsonl_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(
            &path,
            concat!(
                r#"{"id":"d1","text":"chest pain","labels":["401.9"]}"#,
                "\n\n",
                r#"{"id":"d2","text":"fever"}"#,
                "\n",
            ),
        )
        .unwrap();
        let docs = read_corpus(&path).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].id, "d1");
        assert_eq!(docs[0].labels, vec!["401.9"]);
        assert_eq!(docs[1].text, "fever");
        assert!(docs[1].labels.is_empty());
    }

    #[test]
    fn rejects_duplicate_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(
            &path,
            concat!(r#"{"id":"d1","text":"a"}"#, "\n", r#"{"id":"d1","text":"b"}"#, "\n"),
        )
        .unwrap();
        let err = read_corpus(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn reports_line_of_malformed_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, concat!(r#"{"id":"d1","text":"a"}"#, "\n", "not json\n")).unwrap();
        let err = read_corpus(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(read_corpus(&path).is_err());
    }
}

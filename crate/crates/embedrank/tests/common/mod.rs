//! On-disk fixtures and process helpers shared by the integration suites.

#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

use embedrank::synthetic::RetrievalDataset;
use embedrank::text::{Document, WordVectorTable};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_embedrank"))
}

/// Runs the binary in `dir` with `--config config.toml` plus `args`.
/// Returns (exit code, stdout, stderr).
pub fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = bin()
        .current_dir(dir)
        .arg("--config")
        .arg("config.toml")
        .args(args)
        .output()
        .expect("binary spawns");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn run_ok(dir: &Path, args: &[&str]) -> String {
    let (code, stdout, stderr) = run_in(dir, args);
    assert_eq!(code, 0, "{args:?} failed: {stderr}");
    stdout
}

pub fn write_corpus(path: &Path, docs: &[Document]) {
    let mut text = String::new();
    for doc in docs {
        text.push_str(&serde_json::to_string(doc).unwrap());
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

/// Plain-text word vector table, sorted by token so output is deterministic.
pub fn write_vectors(path: &Path, table: &WordVectorTable) {
    let mut entries: Vec<(&str, &[f64])> = table.entries().collect();
    entries.sort_by_key(|(token, _)| *token);
    let mut text = String::new();
    for (token, vec) in entries {
        text.push_str(token);
        for v in vec {
            text.push(' ');
            text.push_str(&v.to_string());
        }
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

/// Writes corpus.jsonl, topics.jsonl, qrels.txt and vecs.txt into `dir`.
pub fn write_retrieval_dataset(dir: &Path, data: &RetrievalDataset) {
    write_corpus(&dir.join("corpus.jsonl"), &data.docs);
    write_corpus(&dir.join("topics.jsonl"), &data.queries);
    data.qrels.save(&dir.join("qrels.txt")).unwrap();
    write_vectors(&dir.join("vecs.txt"), &data.vectors);
}

pub fn doc(id: &str, text: &str, labels: &[&str]) -> Document {
    Document {
        id: id.to_string(),
        text: text.to_string(),
        labels: labels.iter().map(|s| s.to_string()).collect(),
    }
}

/// Snapshot of every file under `dir`, keyed by relative path.
pub fn dir_snapshot(dir: &Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    let mut files = std::collections::BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        for entry in std::fs::read_dir(&current).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

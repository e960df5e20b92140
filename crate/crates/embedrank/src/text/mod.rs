//! Text primitives: tokenization, paragraph splitting, vocabulary and IDF
//! statistics, pre-trained word vectors and fixed-length embedding matrices.

mod corpus;
mod vectors;
mod vocab;

pub use corpus::{read_corpus, read_corpus_lines, Document};
pub use vectors::{embed_matrix, EmbeddingMatrix, WordVectorTable, DEFAULT_DIM};
pub use vocab::Vocabulary;

/// Lowercases and splits on runs of non-alphanumeric characters. Numerals
/// are kept as tokens; empty input yields an empty sequence.
///
/// Lowercasing happens before the split so that case mappings which expand
/// into combining marks cannot leave non-alphanumeric bytes inside a token.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Splits text into paragraphs on blank lines (one or more lines that are
/// empty after trimming). Paragraphs are trimmed; empty ones are dropped.
pub fn split_paragraphs(text: &str) -> Vec<String> {
    let mut paragraphs = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            flush_paragraph(&mut current, &mut paragraphs);
        } else {
            current.push(line);
        }
    }
    flush_paragraph(&mut current, &mut paragraphs);
    paragraphs
}

fn flush_paragraph(lines: &mut Vec<&str>, out: &mut Vec<String>) {
    if lines.is_empty() {
        return;
    }
    let text = lines.join("\n").trim().to_string();
    if !text.is_empty() {
        out.push(text);
    }
    lines.clear();
}

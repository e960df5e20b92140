//! Pre-trained word vector tables and token-sequence embedding matrices.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Word vector dimensionality used when none is specified.
pub const DEFAULT_DIM: usize = 200;

/// A read-only table of pre-trained word vectors.
///
/// Lookups for unknown tokens return the zero vector of the table's
/// dimensionality; the table itself is never mutated after loading.
#[derive(Debug, Clone)]
pub struct WordVectorTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    zero: Vec<f64>,
}

impl WordVectorTable {
    /// Loads a plain-text table: one `token v1 v2 ... vD` line per word,
    /// whitespace-separated. The dimensionality is inferred from the first
    /// line and every later line must match it.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut dim: Option<usize> = None;
        let mut vectors = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts
                .next()
                .ok_or_else(|| Error::parse(path, lineno, "empty line"))?;
            let values: Vec<f64> = parts
                .map(|p| {
                    p.parse::<f64>().map_err(|_| {
                        Error::parse(path, lineno, format!("bad vector component {p:?}"))
                    })
                })
                .collect::<Result<_>>()?;
            if values.is_empty() {
                return Err(Error::parse(path, lineno, "token without vector components"));
            }
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::parse(
                        path,
                        lineno,
                        format!("expected {d} components, found {}", values.len()),
                    ));
                }
                Some(_) => {}
            }
            vectors.insert(token.to_string(), values);
        }
        let dim = dim.ok_or_else(|| Error::Data(format!("{}: no word vectors", path.display())))?;
        Ok(Self { dim, vectors, zero: vec![0.0; dim] })
    }

    /// Builds a table in memory; every entry must have the same length.
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut vectors = HashMap::new();
        for (token, vec) in entries {
            assert_eq!(vec.len(), dim, "word vector length mismatch");
            vectors.insert(token.into(), vec);
        }
        Self { dim, vectors, zero: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    /// The vector for `token`, or the zero vector if the token is unknown.
    pub fn get(&self, token: &str) -> &[f64] {
        self.vectors.get(token).map_or(&self.zero, Vec::as_slice)
    }

    /// All (token, vector) entries, in no particular order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(t, v)| (t.as_str(), v.as_slice()))
    }
}

/// A fixed-width stack of word vectors: `len` positions of `dim` components,
/// stored position-major so any window of consecutive positions is one
/// contiguous slice.
pub struct EmbeddingMatrix {
    dim: usize,
    len: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(dim: usize, len: usize) -> Self {
        Self { dim, len, data: vec![0.0; dim * len] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of positions (columns).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn position_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Positions `i .. i + width` as one contiguous slice.
    pub fn window(&self, i: usize, width: usize) -> &[f64] {
        &self.data[i * self.dim..(i + width) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Stacks the vectors for `tokens` into an `n`-position matrix: longer inputs
/// keep their first `n` tokens, shorter ones are zero-padded on the right.
pub fn embed_matrix(tokens: &[String], table: &WordVectorTable, n: usize) -> EmbeddingMatrix {
    assert!(n >= 1, "sequence length must be at least 1");
    let mut m = EmbeddingMatrix::zeros(table.dim(), n);
    for (i, token) in tokens.iter().take(n).enumerate() {
        m.position_mut(i).copy_from_slice(table.get(token));
    }
    m
}

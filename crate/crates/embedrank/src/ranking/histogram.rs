//! Log-count histograms of query-unit/document-unit cosine interactions, the
//! input features of the matching network.

use super::cosine_sim;

pub const DEFAULT_BINS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistogramMode {
    /// Last bin reserved for exact lexical matches; the remaining B-1 bins
    /// cover cosines in [-1, 1) right-open (the final cosine bin absorbs 1.0).
    Term,
    /// All B bins cover cosines in [-1, 1]; last bin right-closed; no exact
    /// bin.
    Paragraph,
}

impl HistogramMode {
    /// Number of bins that hold cosine values (the exact bin excluded).
    pub fn cosine_bins(self, bins: usize) -> usize {
        match self {
            HistogramMode::Term => bins - 1,
            HistogramMode::Paragraph => bins,
        }
    }
}

/// The 0-based cosine bin for similarity `s` in [-1, 1]. Bins are uniform
/// with right-open intervals; the last cosine bin is right-closed. The
/// arithmetic shortcut floor((s+1)/2 * nbins) is corrected against the exact
/// bin edges so boundary values always obey the interval semantics.
pub fn bin_index(s: f64, bins: usize, mode: HistogramMode) -> usize {
    assert!(bins >= 2, "histogram needs at least 2 bins");
    debug_assert!((-1.0..=1.0).contains(&s), "cosine {s} out of range");
    let nbins = mode.cosine_bins(bins);
    let edge = |k: usize| -1.0 + 2.0 * k as f64 / nbins as f64;
    let raw = (((s + 1.0) / 2.0) * nbins as f64).floor() as isize;
    let mut idx = raw.clamp(0, nbins as isize - 1) as usize;
    while idx > 0 && s < edge(idx) {
        idx -= 1;
    }
    while idx + 1 < nbins && s >= edge(idx + 1) {
        idx += 1;
    }
    idx
}

/// Raw interaction counts for one query unit against a document's units.
/// Each doc unit is (vector, multiplicity, exact-lexical-match). In term
/// mode exact matches land in the reserved final bin regardless of vectors;
/// all other pairs are binned by cosine, and pairs where either vector is
/// all-zero are skipped (their cosine is undefined). Paragraph mode has no
/// exact bin and ignores the flag.
pub fn interaction_counts<'a, I>(
    query_vec: &[f64],
    doc_units: I,
    bins: usize,
    mode: HistogramMode,
) -> Vec<u64>
where
    I: IntoIterator<Item = (&'a [f64], u32, bool)>,
{
    assert!(bins >= 2);
    let mut counts = vec![0u64; bins];
    for (vec, count, exact) in doc_units {
        if exact && mode == HistogramMode::Term {
            counts[bins - 1] += count as u64;
            continue;
        }
        let Some(s) = cosine_sim(query_vec, vec) else { continue };
        counts[bin_index(s, bins, mode)] += count as u64;
    }
    counts
}

/// ln(1 + count) per bin.
pub fn interaction_histogram<'a, I>(
    query_vec: &[f64],
    doc_units: I,
    bins: usize,
    mode: HistogramMode,
) -> Vec<f64>
where
    I: IntoIterator<Item = (&'a [f64], u32, bool)>,
{
    interaction_counts(query_vec, doc_units, bins, mode)
        .into_iter()
        .map(|c| (1.0 + c as f64).ln())
        .collect()
}

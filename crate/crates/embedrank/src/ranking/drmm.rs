//! Relevance matching over match histograms: per-unit feed-forward gains
//! combined through an idf-gated softmax, trained with a pairwise hinge.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Activation, Dense, Layer, Network, Tensor};
use crate::ranking::histogram::{interaction_histogram, HistogramMode, DEFAULT_BINS};
use crate::ranking::triplets::Triplet;

pub const DEFAULT_MARGIN: f64 = 0.1;

/// One side of a match: a query term, a document term (with multiplicity),
/// or a paragraph vector. `key` is the lexical identity used for exact-match
/// detection; paragraph units carry no key.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchUnit {
    pub key: Option<String>,
    pub vec: Vec<f64>,
    pub idf: f64,
    pub count: u32,
}

impl MatchUnit {
    pub fn term(token: impl Into<String>, vec: Vec<f64>, idf: f64, count: u32) -> Self {
        Self { key: Some(token.into()), vec, idf, count }
    }

    pub fn paragraph(vec: Vec<f64>, idf: f64) -> Self {
        Self { key: None, vec, idf, count: 1 }
    }
}

fn is_exact(q: &MatchUnit, d: &MatchUnit) -> bool {
    matches!((&q.key, &d.key), (Some(a), Some(b)) if a == b)
}

/// How paragraph-level query units are weighted when combining gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParagraphGating {
    Uniform,
    /// Softmax over each paragraph's maximum term idf, scaled by the learned
    /// gating weight.
    MaxIdf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrmmConfig {
    pub bins: usize,
    /// Hidden layer widths of the gain network; tanh units, scalar identity
    /// output.
    pub hidden: Vec<usize>,
    pub margin: f64,
    pub mode: HistogramMode,
    pub paragraph_gating: ParagraphGating,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Keeps the gating weight at its initial value during training.
    pub freeze_idf_scale: bool,
}

impl Default for DrmmConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            hidden: vec![5],
            margin: DEFAULT_MARGIN,
            mode: HistogramMode::Term,
            paragraph_gating: ParagraphGating::Uniform,
            epochs: 5,
            learning_rate: 0.01,
            freeze_idf_scale: false,
        }
    }
}

impl DrmmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::Config(format!("drmm.bins must be >= 2, got {}", self.bins)));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::Config(format!("drmm.margin must be positive, got {}", self.margin)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "drmm.learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::Config("drmm.hidden widths must be >= 1".into()));
        }
        Ok(())
    }
}

/// Softmax attention over idf values: `g_i = exp(w*idf_i) / sum_j exp(w*idf_j)`,
/// computed with max subtraction. `w = 0` yields exactly uniform weights, and
/// shifting every idf by a constant leaves the output unchanged.
pub fn gating_weights(idfs: &[f64], w: f64) -> Result<Vec<f64>> {
    if idfs.is_empty() {
        return Err(Error::EmptyInput("gating idfs"));
    }
    let m = idfs.iter().map(|&x| w * x).fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = idfs.iter().map(|&x| (w * x - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / sum).collect())
}

/// Pairwise ranking hinge: `max(0, margin - s_pos + s_neg)`.
pub fn hinge_loss(s_pos: f64, s_neg: f64, margin: f64) -> f64 {
    (margin - s_pos + s_neg).max(0.0)
}

struct ScoreParts {
    hists: Vec<Vec<f64>>,
    gains: Vec<f64>,
    gates: Vec<f64>,
    idfs: Vec<f64>,
    score: f64,
}

#[derive(Debug, Clone)]
pub struct DrmmModel {
    pub config: DrmmConfig,
    ffn: Network,
    /// Scalar multiplier inside the gating softmax; starts at 1.
    pub idf_scale: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    kind: String,
    version: u32,
    meta: serde_json::Value,
    config: DrmmConfig,
    idf_scale: f64,
    params: Vec<Vec<f64>>,
}

const MODEL_KIND: &str = "drmm";
const MODEL_VERSION: u32 = 1;

impl DrmmModel {
    pub fn new(config: DrmmConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::new();
        let mut in_dim = config.bins;
        for &h in &config.hidden {
            layers.push(Layer::Dense(Dense::new(in_dim, h, Activation::Tanh, &mut rng)));
            in_dim = h;
        }
        layers.push(Layer::Dense(Dense::new(in_dim, 1, Activation::Identity, &mut rng)));
        Ok(Self { config, ffn: Network::new(layers), idf_scale: 1.0 })
    }

    pub fn ffn(&self) -> &Network {
        &self.ffn
    }

    /// Whether the gating softmax (and hence its weight) is in play.
    fn gating_is_soft(&self) -> bool {
        self.config.mode == HistogramMode::Term
            || self.config.paragraph_gating == ParagraphGating::MaxIdf
    }

    fn gates_for(&self, idfs: &[f64]) -> Result<Vec<f64>> {
        if self.gating_is_soft() {
            gating_weights(idfs, self.idf_scale)
        } else {
            Ok(vec![1.0 / idfs.len() as f64; idfs.len()])
        }
    }

    fn score_parts(&self, query: &[MatchUnit], doc: &[MatchUnit]) -> Result<ScoreParts> {
        if query.is_empty() {
            return Err(Error::EmptyInput("query match units"));
        }
        let idfs: Vec<f64> = query.iter().map(|u| u.idf).collect();
        let gates = self.gates_for(&idfs)?;
        let mut hists = Vec::with_capacity(query.len());
        let mut gains = Vec::with_capacity(query.len());
        for q in query {
            let hist = interaction_histogram(
                &q.vec,
                doc.iter().map(|d| (d.vec.as_slice(), d.count, is_exact(q, d))),
                self.config.bins,
                self.config.mode,
            );
            let out = self.ffn.infer(&Tensor::vector(hist.clone()))?;
            gains.push(out.data()[0]);
            hists.push(hist);
        }
        let score = gates.iter().zip(&gains).map(|(g, f)| g * f).sum();
        Ok(ScoreParts { hists, gains, gates, idfs, score })
    }

    pub fn score(&self, query: &[MatchUnit], doc: &[MatchUnit]) -> Result<f64> {
        Ok(self.score_parts(query, doc)?.score)
    }

    /// Adds `sign * dL/dtheta` for one scored side into the network's grad
    /// buffers and returns the matching gating-weight gradient term.
    fn accumulate_side(&mut self, parts: &ScoreParts, sign: f64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for (hist, &gate) in parts.hists.iter().zip(&parts.gates) {
            self.ffn.forward_train(&Tensor::vector(hist.clone()), &mut rng)?;
            self.ffn.backward(Tensor::vector(vec![sign * gate]))?;
        }
        if !self.gating_is_soft() {
            return Ok(0.0);
        }
        let mean_idf: f64 = parts.gates.iter().zip(&parts.idfs).map(|(g, x)| g * x).sum();
        let ds_dw: f64 = parts
            .gains
            .iter()
            .zip(&parts.gates)
            .zip(&parts.idfs)
            .map(|((f, g), x)| f * g * (x - mean_idf))
            .sum();
        Ok(sign * ds_dw)
    }

    /// Computes the hinge for one triplet; when it is active, leaves
    /// `dL/dtheta` in the grad buffers and returns `(loss, Some(dL/dw))`.
    /// An inactive hinge touches nothing.
    fn triplet_gradients(
        &mut self,
        query: &[MatchUnit],
        pos: &[MatchUnit],
        neg: &[MatchUnit],
    ) -> Result<(f64, Option<f64>)> {
        let p = self.score_parts(query, pos)?;
        let n = self.score_parts(query, neg)?;
        let loss = hinge_loss(p.score, n.score, self.config.margin);
        if loss == 0.0 {
            return Ok((loss, None));
        }
        self.ffn.zero_grads();
        let mut dw = self.accumulate_side(&p, -1.0)?;
        dw += self.accumulate_side(&n, 1.0)?;
        Ok((loss, Some(dw)))
    }

    /// One pass of pairwise SGD per epoch over a seeded shuffle of the
    /// triplets. Returns the mean hinge loss of each epoch. Triplets whose
    /// hinge is already zero change no parameter, not even in the last bit.
    pub fn fit(
        &mut self,
        triplets: &[Triplet],
        queries: &HashMap<String, Vec<MatchUnit>>,
        docs: &HashMap<String, Vec<MatchUnit>>,
        seed: u64,
    ) -> Result<Vec<f64>> {
        if triplets.is_empty() {
            return Err(Error::EmptyInput("training triplets"));
        }
        let lr = self.config.learning_rate;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut losses = Vec::with_capacity(self.config.epochs);
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        for _ in 0..self.config.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for &ti in &order {
                let t = &triplets[ti];
                let query = queries
                    .get(&t.query_id)
                    .ok_or_else(|| Error::UnknownQuery(t.query_id.clone()))?;
                let pos =
                    docs.get(&t.rel_doc).ok_or_else(|| Error::UnknownDoc(t.rel_doc.clone()))?;
                let neg = docs
                    .get(&t.nonrel_doc)
                    .ok_or_else(|| Error::UnknownDoc(t.nonrel_doc.clone()))?;
                let (loss, grads) = self.triplet_gradients(query, pos, neg)?;
                total += loss;
                if let Some(dw) = grads {
                    self.ffn.apply_gradients(lr);
                    if !self.config.freeze_idf_scale && self.gating_is_soft() {
                        self.idf_scale -= lr * dw;
                    }
                }
            }
            losses.push(total / triplets.len() as f64);
        }
        Ok(losses)
    }

    pub fn save(&self, path: &Path, meta: &serde_json::Value) -> Result<()> {
        let file = ModelFile {
            kind: MODEL_KIND.into(),
            version: MODEL_VERSION,
            meta: meta.clone(),
            config: self.config.clone(),
            idf_scale: self.idf_scale,
            params: self.ffn.param_blocks().iter().map(|b| b.to_vec()).collect(),
        };
        let json = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::Data(format!("model serialization failed: {e}")))?;
        let mut out = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        out.write_all(json.as_bytes()).and_then(|_| out.write_all(b"\n")).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<(Self, serde_json::Value)> {
        let bytes = std::fs::read(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingArtifact(path.to_path_buf(), "train-drmm".into())
            } else {
                Error::io(path, e)
            }
        })?;
        let file: ModelFile = serde_json::from_slice(&bytes)
            .map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        if file.kind != MODEL_KIND || file.version != MODEL_VERSION {
            return Err(Error::Data(format!(
                "{}: expected {MODEL_KIND} model v{MODEL_VERSION}, got {} v{}",
                path.display(),
                file.kind,
                file.version
            )));
        }
        let mut model = Self::new(file.config, 0)?;
        model.ffn.set_param_blocks(&file.params)?;
        model.idf_scale = file.idf_scale;
        Ok((model, file.meta))
    }
}

/// Central finite-difference check of the full triplet loss: FFN parameters
/// and the gating weight, on a randomly initialized model. Returns the worst
/// relative error. The margin is far above any reachable score gap, keeping
/// the hinge active so the gradient is informative.
pub fn hinge_gradcheck(seed: u64) -> Result<f64> {
    let config = DrmmConfig { bins: 5, hidden: vec![4], margin: 12.0, ..DrmmConfig::default() };
    let mut model = DrmmModel::new(config, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut rand_vec = |dim: usize| -> Vec<f64> {
        (0..dim).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect()
    };
    let query = vec![
        MatchUnit::term("a", rand_vec(3), 1.3, 1),
        MatchUnit::term("b", rand_vec(3), 0.4, 1),
    ];
    let pos = vec![
        MatchUnit::term("a", rand_vec(3), 1.3, 1),
        MatchUnit::term("c", rand_vec(3), 0.7, 2),
    ];
    let neg = vec![
        MatchUnit::term("d", rand_vec(3), 0.6, 1),
        MatchUnit::term("e", rand_vec(3), 1.9, 3),
    ];

    let (loss, dw) = model.triplet_gradients(&query, &pos, &neg)?;
    debug_assert!(loss > 0.0);
    let analytic = model.ffn.grads_flat();
    let dw = dw.expect("active hinge");

    let h = 1e-5;
    let loss_of = |m: &DrmmModel| -> Result<f64> {
        let sp = m.score(&query, &pos)?;
        let sn = m.score(&query, &neg)?;
        Ok(hinge_loss(sp, sn, m.config.margin))
    };
    let mut worst = 0.0_f64;
    for idx in 0..model.ffn.param_count() {
        let orig = model.ffn.param_get(idx);
        model.ffn.param_set(idx, orig + h);
        let up = loss_of(&model)?;
        model.ffn.param_set(idx, orig - h);
        let down = loss_of(&model)?;
        model.ffn.param_set(idx, orig);
        worst = worst.max(crate::nn::relative_error(analytic[idx], (up - down) / (2.0 * h)));
    }
    let orig = model.idf_scale;
    model.idf_scale = orig + h;
    let up = loss_of(&model)?;
    model.idf_scale = orig - h;
    let down = loss_of(&model)?;
    model.idf_scale = orig;
    worst = worst.max(crate::nn::relative_error(dw, (up - down) / (2.0 * h)));
    Ok(worst)
}

/// Builds a fresh model from `config` and `seed` and fits it on the triplets.
pub fn train_drmm(
    config: DrmmConfig,
    triplets: &[Triplet],
    queries: &HashMap<String, Vec<MatchUnit>>,
    docs: &HashMap<String, Vec<MatchUnit>>,
    seed: u64,
) -> Result<(DrmmModel, Vec<f64>)> {
    let mut model = DrmmModel::new(config, seed)?;
    let losses = model.fit(triplets, queries, docs, seed)?;
    Ok((model, losses))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(key: &str, vec: Vec<f64>, idf: f64) -> MatchUnit {
        MatchUnit::term(key, vec, idf, 1)
    }

    fn small_config(bins: usize) -> DrmmConfig {
        DrmmConfig { bins, hidden: vec![4], ..DrmmConfig::default() }
    }

    #[test]
    fn gating_single_unit_is_one() {
        assert_eq!(gating_weights(&[2.7], 1.0).unwrap(), vec![1.0]);
    }

    #[test]
    fn gating_zero_weight_is_exactly_uniform() {
        let g = gating_weights(&[0.2, 5.0, 3.0, 1.1], 0.0).unwrap();
        assert_eq!(g, vec![0.25; 4]);
    }

    #[test]
    fn gating_sums_to_one_and_orders_by_idf() {
        let idfs = [0.3, 2.0, 1.4, 4.9, 0.0];
        for w in [0.5, 1.0, 3.0] {
            let g = gating_weights(&idfs, w).unwrap();
            let sum: f64 = g.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "sum {sum}");
            assert!(g.iter().all(|&x| x > 0.0));
            assert!(g[3] > g[1] && g[1] > g[2] && g[2] > g[0]);
        }
    }

    #[test]
    fn gating_invariant_under_constant_shift() {
        let idfs = [0.3, 2.0, 1.4, 4.9];
        let shifted: Vec<f64> = idfs.iter().map(|x| x + 7.25).collect();
        let a = gating_weights(&idfs, 1.5).unwrap();
        let b = gating_weights(&shifted, 1.5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn gating_rejects_empty_input() {
        assert!(matches!(gating_weights(&[], 1.0), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn hinge_examples() {
        assert_eq!(hinge_loss(0.5, 0.1, 0.1), 0.0);
        assert_eq!(hinge_loss(0.3, 0.3, 0.1), 0.1);
        assert!((hinge_loss(0.0, 0.5, 0.1) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn zeroed_network_scores_zero() {
        let mut model = DrmmModel::new(small_config(5), 3).unwrap();
        for block in model.ffn.param_blocks_mut() {
            block.fill(0.0);
        }
        let q = vec![unit("a", vec![1.0, 0.0], 1.0), unit("b", vec![0.0, 1.0], 2.0)];
        let d = vec![unit("a", vec![1.0, 0.0], 1.0), unit("c", vec![0.5, 0.5], 0.3)];
        assert_eq!(model.score(&q, &d).unwrap(), 0.0);
    }

    #[test]
    fn doc_unit_order_does_not_change_the_score() {
        let model = DrmmModel::new(small_config(7), 11).unwrap();
        let q = vec![unit("a", vec![1.0, 0.0], 1.0), unit("b", vec![0.3, 0.7], 2.0)];
        let mut d = vec![
            unit("a", vec![1.0, 0.0], 1.0),
            unit("c", vec![0.5, 0.5], 0.3),
            unit("d", vec![-0.2, 0.9], 0.8),
        ];
        let s1 = model.score(&q, &d).unwrap();
        d.reverse();
        let s2 = model.score(&q, &d).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn query_unit_order_changes_nothing_beyond_rounding() {
        let model = DrmmModel::new(small_config(7), 11).unwrap();
        let mut q = vec![
            unit("a", vec![1.0, 0.0], 1.0),
            unit("b", vec![0.3, 0.7], 2.0),
            unit("c", vec![-0.5, 0.1], 0.4),
        ];
        let d = vec![unit("a", vec![1.0, 0.0], 1.0), unit("d", vec![-0.2, 0.9], 0.8)];
        let s1 = model.score(&q, &d).unwrap();
        q.swap(0, 2);
        let s2 = model.score(&q, &d).unwrap();
        assert!((s1 - s2).abs() <= 1e-12);
    }

    #[test]
    fn empty_query_units_rejected() {
        let model = DrmmModel::new(small_config(5), 0).unwrap();
        let d = vec![unit("a", vec![1.0], 1.0)];
        assert!(matches!(model.score(&[], &d), Err(Error::EmptyInput(_))));
    }

    fn planted_training_data(
    ) -> (Vec<Triplet>, HashMap<String, Vec<MatchUnit>>, HashMap<String, Vec<MatchUnit>>) {
        // Relevant docs carry the high-idf query token (exact match);
        // non-relevant docs carry an unrelated token. Two query terms with
        // distinct idfs keep the gating gradient non-degenerate.
        let mut queries = HashMap::new();
        queries.insert(
            "q1".to_string(),
            vec![unit("topic", vec![1.0, 0.0], 2.0), unit("filler", vec![0.0, 1.0], 0.5)],
        );
        let mut docs = HashMap::new();
        docs.insert(
            "rel".to_string(),
            vec![unit("topic", vec![1.0, 0.0], 2.0), unit("pad", vec![0.6, 0.8], 0.3)],
        );
        docs.insert("non".to_string(), vec![unit("other", vec![0.3, 0.9], 0.5)]);
        let triplets = vec![Triplet {
            query_id: "q1".into(),
            rel_doc: "rel".into(),
            nonrel_doc: "non".into(),
        }];
        (triplets, queries, docs)
    }

    #[test]
    fn training_separates_planted_pairs() {
        let (triplets, queries, docs) = planted_training_data();
        let config = DrmmConfig {
            bins: 4,
            hidden: vec![3],
            margin: 1.0,
            epochs: 60,
            learning_rate: 0.1,
            ..DrmmConfig::default()
        };
        let (model, losses) = train_drmm(config, &triplets, &queries, &docs, 7).unwrap();
        assert!(losses[losses.len() - 1] < losses[0]);
        let q = &queries["q1"];
        let s_rel = model.score(q, &docs["rel"]).unwrap();
        let s_non = model.score(q, &docs["non"]).unwrap();
        assert!(s_rel > s_non, "{s_rel} vs {s_non}");
    }

    #[test]
    fn inactive_hinge_leaves_every_bit_unchanged() {
        let (triplets, queries, docs) = planted_training_data();
        let config = DrmmConfig { bins: 4, hidden: vec![2], epochs: 3, ..DrmmConfig::default() };
        let mut model = DrmmModel::new(config, 0).unwrap();
        // Hidden unit 0 fires on the exact-match bin; the output layer reads
        // only that unit. Exact match scores ~0.998, the orthogonal doc 0.
        let blocks = vec![
            vec![0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0],
        ];
        model.ffn.set_param_blocks(&blocks).unwrap();
        let before: Vec<u64> = model.ffn.params_flat().iter().map(|p| p.to_bits()).collect();
        let w_before = model.idf_scale.to_bits();
        let losses = model.fit(&triplets, &queries, &docs, 5).unwrap();
        assert_eq!(losses, vec![0.0; 3]);
        let after: Vec<u64> = model.ffn.params_flat().iter().map(|p| p.to_bits()).collect();
        assert_eq!(before, after);
        assert_eq!(w_before, model.idf_scale.to_bits());
    }

    #[test]
    fn zero_epochs_returns_no_losses_and_keeps_init() {
        let (triplets, queries, docs) = planted_training_data();
        let config = DrmmConfig { bins: 4, epochs: 0, ..DrmmConfig::default() };
        let fresh = DrmmModel::new(config.clone(), 9).unwrap();
        let (model, losses) = train_drmm(config, &triplets, &queries, &docs, 9).unwrap();
        assert!(losses.is_empty());
        assert_eq!(fresh.ffn.params_flat(), model.ffn.params_flat());
    }

    #[test]
    fn unknown_ids_are_reported() {
        let (mut triplets, queries, docs) = planted_training_data();
        let config = DrmmConfig { bins: 4, epochs: 1, ..DrmmConfig::default() };
        triplets[0].rel_doc = "ghost".into();
        let err = train_drmm(config.clone(), &triplets, &queries, &docs, 0).unwrap_err();
        assert!(matches!(err, Error::UnknownDoc(d) if d == "ghost"));
        triplets[0].rel_doc = "rel".into();
        triplets[0].query_id = "qx".into();
        let err = train_drmm(config, &triplets, &queries, &docs, 0).unwrap_err();
        assert!(matches!(err, Error::UnknownQuery(q) if q == "qx"));
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        for seed in 0..6 {
            let worst = hinge_gradcheck(seed).unwrap();
            assert!(worst < 1e-4, "seed {seed}: relative error {worst}");
        }
    }

    #[test]
    fn paragraph_uniform_gating_ignores_idf_and_w() {
        let config = DrmmConfig {
            bins: 6,
            mode: HistogramMode::Paragraph,
            paragraph_gating: ParagraphGating::Uniform,
            ..DrmmConfig::default()
        };
        let mut model = DrmmModel::new(config, 4).unwrap();
        let q = vec![
            MatchUnit::paragraph(vec![1.0, 0.0], 5.0),
            MatchUnit::paragraph(vec![0.0, 1.0], 0.1),
        ];
        let d = vec![MatchUnit::paragraph(vec![0.7, 0.7], 1.0)];
        let s1 = model.score(&q, &d).unwrap();
        model.idf_scale = 40.0;
        let s2 = model.score(&q, &d).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn paragraph_max_idf_gating_uses_the_scale() {
        let config = DrmmConfig {
            bins: 6,
            mode: HistogramMode::Paragraph,
            paragraph_gating: ParagraphGating::MaxIdf,
            ..DrmmConfig::default()
        };
        let mut model = DrmmModel::new(config, 4).unwrap();
        let q = vec![
            MatchUnit::paragraph(vec![1.0, 0.0], 5.0),
            MatchUnit::paragraph(vec![0.0, 1.0], 0.1),
        ];
        let d = vec![MatchUnit::paragraph(vec![0.9, 0.2], 1.0)];
        let s1 = model.score(&q, &d).unwrap();
        model.idf_scale = 40.0;
        let s2 = model.score(&q, &d).unwrap();
        assert_ne!(s1, s2);
    }

    #[test]
    fn frozen_scale_stays_at_one() {
        let (triplets, queries, docs) = planted_training_data();
        let config = DrmmConfig {
            bins: 4,
            margin: 5.0,
            epochs: 10,
            learning_rate: 0.1,
            freeze_idf_scale: true,
            ..DrmmConfig::default()
        };
        let (model, _) = train_drmm(config.clone(), &triplets, &queries, &docs, 2).unwrap();
        assert_eq!(model.idf_scale, 1.0);
        let unfrozen = DrmmConfig { freeze_idf_scale: false, ..config };
        let (model, _) = train_drmm(unfrozen, &triplets, &queries, &docs, 2).unwrap();
        assert_ne!(model.idf_scale, 1.0);
    }

    #[test]
    fn save_load_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("drmm-term.model");
        let (triplets, queries, docs) = planted_training_data();
        let config = DrmmConfig { bins: 4, epochs: 4, margin: 2.0, ..DrmmConfig::default() };
        let (model, _) = train_drmm(config, &triplets, &queries, &docs, 13).unwrap();
        let meta = serde_json::json!({"seed": 13, "config_hash": "abc"});
        model.save(&path, &meta).unwrap();
        let first = std::fs::read(&path).unwrap();
        model.save(&path, &meta).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());

        let (loaded, loaded_meta) = DrmmModel::load(&path).unwrap();
        assert_eq!(loaded_meta, meta);
        assert_eq!(loaded.config, model.config);
        assert_eq!(loaded.idf_scale.to_bits(), model.idf_scale.to_bits());
        let a: Vec<u64> = model.ffn.params_flat().iter().map(|p| p.to_bits()).collect();
        let b: Vec<u64> = loaded.ffn.params_flat().iter().map(|p| p.to_bits()).collect();
        assert_eq!(a, b);

        let q = &queries["q1"];
        assert_eq!(
            model.score(q, &docs["rel"]).unwrap().to_bits(),
            loaded.score(q, &docs["rel"]).unwrap().to_bits()
        );
    }

    #[test]
    fn loading_a_missing_model_names_the_artifact() {
        let err = DrmmModel::load(Path::new("/nonexistent/drmm.model")).unwrap_err();
        assert!(matches!(err, Error::MissingArtifact(..)), "{err}");
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let bad_bins = DrmmConfig { bins: 1, ..DrmmConfig::default() };
        assert!(matches!(bad_bins.validate(), Err(Error::Config(_))));
        let bad_margin = DrmmConfig { margin: 0.0, ..DrmmConfig::default() };
        assert!(matches!(bad_margin.validate(), Err(Error::Config(_))));
        let bad_hidden = DrmmConfig { hidden: vec![3, 0], ..DrmmConfig::default() };
        assert!(matches!(bad_hidden.validate(), Err(Error::Config(_))));
    }
}

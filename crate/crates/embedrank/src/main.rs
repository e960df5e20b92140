//! Pipeline driver. Every subcommand loads the TOML config, applies CLI
//! overrides, and reads or writes artifacts under the configured output
//! directory; rerunning a command with the same config and seed reproduces
//! its outputs byte for byte.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use embedrank::config::{DocEmbedding, PipelineConfig, ScoreMode};
use embedrank::embedder::{LabelSpace, TextCnn};
use embedrank::eval::{
    mean_average_precision, mean_ndcg_at_k, mean_precision_at_k, multilabel_metrics,
    validate_runs_against_qrels, LabelMatrixPair, Metric, Qrels,
};
use embedrank::nn::{cnn_suite, GRADCHECK_TOL};
use embedrank::ranking::{
    combine_scores, cosine_sim, hinge_gradcheck, rank, read_run, read_triplets, sample_triplets,
    write_run, write_triplets, DrmmModel, HistogramMode, InvertedIndex, MatchUnit,
};
use embedrank::text::{read_corpus, split_paragraphs, tokenize, Document, WordVectorTable};
use embedrank::{Error, Result};

#[derive(Parser)]
#[command(name = "embedrank", version, about = "Label-supervised text embeddings and document ranking for long queries")]
struct Cli {
    /// TOML pipeline configuration (defaults apply when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides the configured RNG seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the multi-label text classifier; writes the embedder checkpoint
    /// and a per-epoch training log.
    TrainEmbedder,

    /// Write embeddings for every corpus document.
    Embed {
        /// `doc` (one vector per document) or `paragraph` (one per paragraph).
        #[arg(long, default_value = "doc", value_name = "GRANULARITY")]
        granularity: String,
    },

    /// Build the BM25 inverted index over the corpus.
    Index,

    /// Sample (query, relevant, non-relevant) triplets from the qrels.
    SampleTriplets,

    /// Train a relevance matching model on the sampled triplets.
    TrainDrmm {
        /// `drmm-term` (word-vector histograms) or `drmm-para` (paragraph
        /// embedding histograms).
        #[arg(long, value_name = "MODE")]
        mode: String,
    },

    /// Rank the corpus for every topic and write a TREC run file.
    Rank {
        /// One of bm25, drmm-term, drmm-para, cosine, combined.
        #[arg(long, value_name = "MODE")]
        mode: String,

        /// Overrides the configured per-query run length.
        #[arg(long, value_name = "N")]
        cutoff: Option<usize>,
    },

    /// Score a run file against qrels, or (with --classify) score the
    /// checkpoint's label predictions on a labeled corpus.
    Evaluate {
        /// TREC run file to score.
        #[arg(long, value_name = "PATH")]
        run: Option<PathBuf>,

        /// Qrels file (defaults to paths.qrels from the config).
        #[arg(long, value_name = "PATH")]
        qrels: Option<PathBuf>,

        /// Metrics to report (repeatable or comma-separated); defaults to the
        /// configured list.
        #[arg(long, value_delimiter = ',', value_name = "METRIC")]
        metrics: Vec<String>,

        /// Evaluate multi-label classification instead of retrieval.
        #[arg(long)]
        classify: bool,

        /// Labeled corpus for --classify (defaults to paths.corpus).
        #[arg(long, value_name = "PATH")]
        corpus: Option<PathBuf>,

        /// Use the conventional precision/recall denominators (predicted set
        /// for precision, true set for recall) instead of the swapped ones.
        #[arg(long)]
        conventional: bool,
    },

    /// Finite-difference checks of every analytic gradient.
    Gradcheck {
        /// Random restarts per check.
        #[arg(long, default_value_t = 20, value_name = "N")]
        seeds: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 2,
        Error::Io { .. } | Error::Data(_) | Error::EmptyInput(_) => 3,
        Error::MissingArtifact(..) => 4,
        Error::Parse { .. } | Error::UnknownQuery(_) | Error::UnknownDoc(_) => 5,
        Error::Shape(_) | Error::Invalid(_) => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    match cli.command {
        Command::TrainEmbedder => cmd_train_embedder(&config),
        Command::Embed { granularity } => cmd_embed(&config, &granularity),
        Command::Index => cmd_index(&config),
        Command::SampleTriplets => cmd_sample_triplets(&config),
        Command::TrainDrmm { mode } => cmd_train_drmm(&config, &mode),
        Command::Rank { mode, cutoff } => {
            if let Some(n) = cutoff {
                config.rank.cutoff = n;
                config.validate()?;
            }
            cmd_rank(&config, mode.parse()?)
        }
        Command::Evaluate { run, qrels, metrics, classify, corpus, conventional } => {
            if classify {
                cmd_evaluate_classify(&config, corpus, conventional)
            } else {
                cmd_evaluate_retrieval(&config, run, qrels, metrics)
            }
        }
        Command::Gradcheck { seeds } => cmd_gradcheck(seeds),
    }
}

fn ensure_output_dir(config: &PipelineConfig) -> Result<()> {
    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))
}

fn write_training_log(path: &Path, header: &[String], losses: &[f64]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for line in header {
        writeln!(w, "# {line}").map_err(io)?;
    }
    for (epoch, loss) in losses.iter().enumerate() {
        writeln!(w, "epoch {} loss {}", epoch + 1, loss).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn cmd_train_embedder(config: &PipelineConfig) -> Result<()> {
    let vectors = WordVectorTable::load(&config.word_vectors_path()?)?;
    let corpus = read_corpus(&config.corpus_path()?)?;
    let labels = LabelSpace::select(&corpus, config.cnn.label_count)?;
    let mut model = TextCnn::new(config.cnn.clone(), labels, vectors.dim(), config.seed)?;
    let losses = model.train(&corpus, &vectors, config.seed)?;

    ensure_output_dir(config)?;
    let ckpt = config.checkpoint_path();
    model.save(&ckpt, &config.meta_json())?;
    write_training_log(&config.artifact("train-embedder.log"), &config.header_lines(), &losses)?;

    println!("trained on {} documents, {} labels, {} epochs", corpus.len(), config.cnn.label_count, losses.len());
    if let Some(last) = losses.last() {
        println!("final weighted BCE {last:.6}");
    }
    println!("checkpoint {}", ckpt.display());
    Ok(())
}

fn text_embedding(
    model: &TextCnn,
    vectors: &WordVectorTable,
    text: &str,
    strategy: DocEmbedding,
) -> Result<Vec<f64>> {
    match strategy {
        DocEmbedding::Truncate => model.embed(&tokenize(text), vectors),
        DocEmbedding::ParagraphMean => model.embed_paragraph_mean(text, vectors),
    }
}

fn cmd_embed(config: &PipelineConfig, granularity: &str) -> Result<()> {
    if granularity != "doc" && granularity != "paragraph" {
        return Err(Error::Config(format!(
            "granularity must be doc or paragraph, got {granularity:?}"
        )));
    }
    let (model, _) = TextCnn::load(&config.checkpoint_path())?;
    let vectors = WordVectorTable::load(&config.word_vectors_path()?)?;
    let corpus = read_corpus(&config.corpus_path()?)?;

    ensure_output_dir(config)?;
    let path = if granularity == "doc" {
        config.embeddings_path()
    } else {
        config.paragraph_embeddings_path()
    };
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e| Error::io(&path, e);
    let meta = serde_json::json!({"meta": {
        "config_hash": config.hash(),
        "seed": config.seed,
        "granularity": granularity,
        "embedding_dim": model.config.embedding_dim,
    }});
    writeln!(w, "{meta}").map_err(io)?;

    let mut records = 0usize;
    for doc in &corpus {
        if granularity == "doc" {
            let emb = text_embedding(&model, &vectors, &doc.text, config.embed.doc_embedding)?;
            let line = serde_json::json!({"id": doc.id, "embedding": emb});
            writeln!(w, "{line}").map_err(io)?;
            records += 1;
        } else {
            for (i, paragraph) in split_paragraphs(&doc.text).iter().enumerate() {
                let emb = model.embed(&tokenize(paragraph), &vectors)?;
                let line = serde_json::json!({"id": doc.id, "paragraph": i, "embedding": emb});
                writeln!(w, "{line}").map_err(io)?;
                records += 1;
            }
        }
    }
    w.flush().map_err(io)?;
    println!("wrote {records} {granularity} embeddings to {}", path.display());
    Ok(())
}

fn cmd_index(config: &PipelineConfig) -> Result<()> {
    let corpus = read_corpus(&config.corpus_path()?)?;
    let tokenized: Vec<(String, Vec<String>)> =
        corpus.iter().map(|d| (d.id.clone(), tokenize(&d.text))).collect();
    let mut index =
        InvertedIndex::build(tokenized.iter().map(|(id, toks)| (id.as_str(), toks.as_slice())))?;
    index.meta = config.meta_json();

    ensure_output_dir(config)?;
    let path = config.index_path();
    index.save(&path)?;
    println!(
        "indexed {} documents (avg length {:.1} tokens) into {}",
        index.doc_count(),
        index.avg_doc_len(),
        path.display()
    );
    Ok(())
}

fn cmd_sample_triplets(config: &PipelineConfig) -> Result<()> {
    let qrels = Qrels::load(&config.qrels_path()?)?;
    let corpus = read_corpus(&config.corpus_path()?)?;
    let doc_ids: Vec<String> = corpus.iter().map(|d| d.id.clone()).collect();
    let (triplets, stats) =
        sample_triplets(&qrels, Some(&doc_ids), config.sampling.per_query, config.seed);
    if triplets.is_empty() {
        return Err(Error::Data(
            "no query has both a relevant and a non-relevant document pool".into(),
        ));
    }

    ensure_output_dir(config)?;
    let path = config.triplets_path();
    write_triplets(&path, &triplets, &config.header_lines())?;
    println!(
        "sampled {} triplets over {} queries ({} skipped) into {}",
        triplets.len(),
        stats.eligible_queries,
        stats.skipped_queries.len(),
        path.display()
    );
    Ok(())
}

/// Distinct query tokens in first-appearance order; the corpus-statistics idf
/// drives the gating softmax.
fn query_term_units(
    tokens: &[String],
    vectors: &WordVectorTable,
    index: &InvertedIndex,
) -> Vec<MatchUnit> {
    let mut seen = std::collections::HashSet::new();
    let mut units = Vec::new();
    for token in tokens {
        if seen.insert(token.as_str()) {
            units.push(MatchUnit::term(
                token.clone(),
                vectors.get(token).to_vec(),
                index.gating_idf(token),
                1,
            ));
        }
    }
    units
}

/// Distinct document tokens with occurrence counts (the exact-match bin adds
/// the count when the query term is lexically identical).
fn doc_term_units(
    tokens: &[String],
    vectors: &WordVectorTable,
    index: &InvertedIndex,
) -> Vec<MatchUnit> {
    let mut order: Vec<&String> = Vec::new();
    let mut counts: HashMap<&str, u32> = HashMap::new();
    for token in tokens {
        match counts.entry(token.as_str()) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(1);
                order.push(token);
            }
            std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += 1,
        }
    }
    order
        .into_iter()
        .map(|t| {
            MatchUnit::term(t.clone(), vectors.get(t).to_vec(), index.gating_idf(t), counts[t.as_str()])
        })
        .collect()
}

/// One unit per paragraph: its embedding plus the max token idf (used only
/// under max-idf gating). Paragraphs with no tokens are dropped.
fn paragraph_units(
    text: &str,
    model: &TextCnn,
    vectors: &WordVectorTable,
    index: &InvertedIndex,
) -> Result<Vec<MatchUnit>> {
    let mut units = Vec::new();
    for paragraph in split_paragraphs(text) {
        let tokens = tokenize(&paragraph);
        if tokens.is_empty() {
            continue;
        }
        let idf = tokens.iter().map(|t| index.gating_idf(t)).fold(f64::MIN, f64::max);
        units.push(MatchUnit::paragraph(model.embed(&tokens, vectors)?, idf));
    }
    Ok(units)
}

fn parse_drmm_mode(mode: &str) -> Result<HistogramMode> {
    match mode {
        "drmm-term" => Ok(HistogramMode::Term),
        "drmm-para" => Ok(HistogramMode::Paragraph),
        other => Err(Error::Config(format!(
            "train-drmm mode must be drmm-term or drmm-para, got {other:?}"
        ))),
    }
}

fn cmd_train_drmm(config: &PipelineConfig, mode: &str) -> Result<()> {
    let hist_mode = parse_drmm_mode(mode)?;
    let triplets = read_triplets(&config.triplets_path())?;
    let index = InvertedIndex::load(&config.index_path())?;
    let vectors = WordVectorTable::load(&config.word_vectors_path()?)?;
    let topics = read_corpus(&config.topics_path()?)?;
    let corpus = read_corpus(&config.corpus_path()?)?;

    let mut queries: HashMap<String, Vec<MatchUnit>> = HashMap::new();
    let mut docs: HashMap<String, Vec<MatchUnit>> = HashMap::new();
    match hist_mode {
        HistogramMode::Term => {
            for t in &topics {
                queries.insert(t.id.clone(), query_term_units(&tokenize(&t.text), &vectors, &index));
            }
            for d in &corpus {
                docs.insert(d.id.clone(), doc_term_units(&tokenize(&d.text), &vectors, &index));
            }
        }
        HistogramMode::Paragraph => {
            let (model, _) = TextCnn::load(&config.checkpoint_path())?;
            for t in &topics {
                queries.insert(t.id.clone(), paragraph_units(&t.text, &model, &vectors, &index)?);
            }
            for d in &corpus {
                docs.insert(d.id.clone(), paragraph_units(&d.text, &model, &vectors, &index)?);
            }
        }
    }

    let mut drmm_config = config.drmm.clone();
    drmm_config.mode = hist_mode;
    let (model, losses) =
        embedrank::ranking::train_drmm(drmm_config, &triplets, &queries, &docs, config.seed)?;

    ensure_output_dir(config)?;
    let path = config.drmm_model_path(hist_mode);
    model.save(&path, &config.meta_json())?;
    let log_name = match hist_mode {
        HistogramMode::Term => "train-drmm-term.log",
        HistogramMode::Paragraph => "train-drmm-para.log",
    };
    write_training_log(&config.artifact(log_name), &config.header_lines(), &losses)?;

    println!("trained on {} triplets, {} epochs", triplets.len(), losses.len());
    if let Some(last) = losses.last() {
        println!("final mean hinge loss {last:.6}");
    }
    println!("model {}", path.display());
    Ok(())
}

struct Query {
    id: String,
    text: String,
    tokens: Vec<String>,
}

/// Everything the rank loop needs; per-document match units and embeddings
/// are cached across queries.
struct RankResources {
    index: InvertedIndex,
    vectors: Option<WordVectorTable>,
    cnn: Option<TextCnn>,
    drmm_term: Option<DrmmModel>,
    drmm_para: Option<DrmmModel>,
    docs_by_id: HashMap<String, Document>,
    k1: f64,
    b: f64,
    doc_strategy: DocEmbedding,
    term_units: HashMap<String, Vec<MatchUnit>>,
    para_units: HashMap<String, Vec<MatchUnit>>,
    doc_embeddings: HashMap<String, Vec<f64>>,
}

impl RankResources {
    fn load(config: &PipelineConfig, components: &[ScoreMode]) -> Result<Self> {
        let needs = |m: ScoreMode| components.contains(&m);
        let needs_text = components.iter().any(|&c| c != ScoreMode::Bm25);
        let index = InvertedIndex::load(&config.index_path())?;
        let vectors = if needs_text {
            Some(WordVectorTable::load(&config.word_vectors_path()?)?)
        } else {
            None
        };
        let cnn = if needs(ScoreMode::DrmmPara) || needs(ScoreMode::Cosine) {
            Some(TextCnn::load(&config.checkpoint_path())?.0)
        } else {
            None
        };
        let load_drmm = |mode: HistogramMode| -> Result<DrmmModel> {
            let path = config.drmm_model_path(mode);
            let (model, _) = DrmmModel::load(&path)?;
            if model.config.mode != mode {
                return Err(Error::Data(format!(
                    "{}: model was trained in a different histogram mode",
                    path.display()
                )));
            }
            Ok(model)
        };
        let drmm_term =
            if needs(ScoreMode::DrmmTerm) { Some(load_drmm(HistogramMode::Term)?) } else { None };
        let drmm_para = if needs(ScoreMode::DrmmPara) {
            Some(load_drmm(HistogramMode::Paragraph)?)
        } else {
            None
        };
        let docs_by_id = if needs_text {
            read_corpus(&config.corpus_path()?)?.into_iter().map(|d| (d.id.clone(), d)).collect()
        } else {
            HashMap::new()
        };
        Ok(Self {
            index,
            vectors,
            cnn,
            drmm_term,
            drmm_para,
            docs_by_id,
            k1: config.bm25.k1,
            b: config.bm25.b,
            doc_strategy: config.embed.doc_embedding,
            term_units: HashMap::new(),
            para_units: HashMap::new(),
            doc_embeddings: HashMap::new(),
        })
    }

    fn doc(docs_by_id: &HashMap<String, Document>, id: &str) -> Result<Document> {
        docs_by_id.get(id).cloned().ok_or_else(|| {
            Error::Data(format!("document {id} is in the index but not the corpus"))
        })
    }

    fn component_scores(
        &mut self,
        component: ScoreMode,
        query: &Query,
        candidates: &[String],
    ) -> Result<Vec<Option<f64>>> {
        match component {
            ScoreMode::Bm25 => candidates
                .iter()
                .map(|id| self.index.bm25_score_with(&query.tokens, id, self.k1, self.b).map(Some))
                .collect(),
            ScoreMode::DrmmTerm => {
                let vectors = self.vectors.as_ref().expect("vectors loaded for drmm-term");
                let model = self.drmm_term.as_ref().expect("model loaded for drmm-term");
                let qunits = query_term_units(&query.tokens, vectors, &self.index);
                let mut out = Vec::with_capacity(candidates.len());
                for id in candidates {
                    if !self.term_units.contains_key(id) {
                        let doc = Self::doc(&self.docs_by_id, id)?;
                        let units = doc_term_units(&tokenize(&doc.text), vectors, &self.index);
                        self.term_units.insert(id.clone(), units);
                    }
                    out.push(Some(model.score(&qunits, &self.term_units[id])?));
                }
                Ok(out)
            }
            ScoreMode::DrmmPara => {
                let vectors = self.vectors.as_ref().expect("vectors loaded for drmm-para");
                let cnn = self.cnn.as_ref().expect("checkpoint loaded for drmm-para");
                let model = self.drmm_para.as_ref().expect("model loaded for drmm-para");
                let qunits = paragraph_units(&query.text, cnn, vectors, &self.index)?;
                if qunits.is_empty() {
                    return Err(Error::Data(format!("query {} has no paragraphs", query.id)));
                }
                let mut out = Vec::with_capacity(candidates.len());
                for id in candidates {
                    if !self.para_units.contains_key(id) {
                        let doc = Self::doc(&self.docs_by_id, id)?;
                        let units = paragraph_units(&doc.text, cnn, vectors, &self.index)?;
                        self.para_units.insert(id.clone(), units);
                    }
                    out.push(Some(model.score(&qunits, &self.para_units[id])?));
                }
                Ok(out)
            }
            ScoreMode::Cosine => {
                let vectors = self.vectors.as_ref().expect("vectors loaded for cosine");
                let cnn = self.cnn.as_ref().expect("checkpoint loaded for cosine");
                let qvec = text_embedding(cnn, vectors, &query.text, self.doc_strategy)?;
                let mut out = Vec::with_capacity(candidates.len());
                for id in candidates {
                    if !self.doc_embeddings.contains_key(id) {
                        let doc = Self::doc(&self.docs_by_id, id)?;
                        let emb = text_embedding(cnn, vectors, &doc.text, self.doc_strategy)?;
                        self.doc_embeddings.insert(id.clone(), emb);
                    }
                    out.push(cosine_sim(&qvec, &self.doc_embeddings[id]));
                }
                Ok(out)
            }
            ScoreMode::Combined => unreachable!("combined resolves to its components"),
        }
    }
}

fn cmd_rank(config: &PipelineConfig, mode: ScoreMode) -> Result<()> {
    let components: Vec<ScoreMode> = match mode {
        ScoreMode::Combined => config.rank.ensemble.clone(),
        single => vec![single],
    };
    let mut resources = RankResources::load(config, &components)?;
    let topics = read_corpus(&config.topics_path()?)?;

    let mut runs = Vec::with_capacity(topics.len());
    for topic in &topics {
        let query = Query {
            id: topic.id.clone(),
            text: topic.text.clone(),
            tokens: tokenize(&topic.text),
        };
        let candidates: Vec<String> = if config.rank.full_scan {
            resources.index.doc_ids().to_vec()
        } else {
            resources.index.bm25_pool_with(
                &query.tokens,
                config.rank.pool_size,
                config.bm25.k1,
                config.bm25.b,
            )
        };
        let per_component: Vec<Vec<Option<f64>>> = components
            .iter()
            .map(|&c| resources.component_scores(c, &query, &candidates))
            .collect::<Result<_>>()?;
        let scores = match mode {
            ScoreMode::Combined => combine_scores(&per_component, config.rank.znorm),
            _ => per_component.into_iter().next().expect("one component"),
        };
        runs.push(rank(&query.id, candidates.into_iter().zip(scores), config.rank.cutoff));
    }

    ensure_output_dir(config)?;
    let path = config.run_path(mode);
    write_run(&path, &runs, mode.as_str(), &config.header_lines())?;
    let entries: usize = runs.iter().map(|r| r.entries.len()).sum();
    println!("ranked {} queries ({entries} run entries) into {}", runs.len(), path.display());
    Ok(())
}

fn metric_value(metric: Metric, runs: &[embedrank::ranking::RunList], qrels: &Qrels) -> Result<f64> {
    match metric {
        Metric::Map => mean_average_precision(runs, qrels),
        Metric::PrecisionAt(k) => Ok(mean_precision_at_k(runs, qrels, k)),
        Metric::NdcgAt(k) => Ok(mean_ndcg_at_k(runs, qrels, k)),
    }
}

fn write_report(config: &PipelineConfig, report: &serde_json::Map<String, serde_json::Value>) -> Result<()> {
    ensure_output_dir(config)?;
    let path = config.artifact("evaluation.json");
    let doc = serde_json::json!({
        "config_hash": config.hash(),
        "seed": config.seed,
        "report": report,
    });
    let pretty = serde_json::to_string_pretty(&doc).expect("report serializes");
    std::fs::write(&path, pretty + "\n").map_err(|e| Error::io(&path, e))?;
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    Ok(())
}

fn cmd_evaluate_retrieval(
    config: &PipelineConfig,
    run: Option<PathBuf>,
    qrels: Option<PathBuf>,
    metrics: Vec<String>,
) -> Result<()> {
    let run_path = run.ok_or_else(|| Error::Config("evaluate needs --run <path> (or --classify)".into()))?;
    let qrels_path = match qrels {
        Some(p) => p,
        None => config.qrels_path()?,
    };
    let requested = if metrics.is_empty() { config.evaluate.metrics.clone() } else { metrics };
    if requested.is_empty() {
        return Err(Error::Config("no metrics requested".into()));
    }
    let parsed: Vec<(String, Metric)> = requested
        .into_iter()
        .map(|name| name.parse::<Metric>().map(|m| (name, m)))
        .collect::<Result<_>>()?;

    let runs = read_run(&run_path)?;
    if runs.is_empty() {
        return Err(Error::Data(format!("{}: no run entries", run_path.display())));
    }
    let qrels = Qrels::load(&qrels_path)?;
    validate_runs_against_qrels(&runs, &qrels)?;

    let mut report = serde_json::Map::new();
    for (name, metric) in parsed {
        report.insert(name, serde_json::json!(metric_value(metric, &runs, &qrels)?));
    }
    write_report(config, &report)
}

fn cmd_evaluate_classify(
    config: &PipelineConfig,
    corpus: Option<PathBuf>,
    conventional: bool,
) -> Result<()> {
    let corpus_path = match corpus {
        Some(p) => p,
        None => config.corpus_path()?,
    };
    let (model, _) = TextCnn::load(&config.checkpoint_path())?;
    let vectors = WordVectorTable::load(&config.word_vectors_path()?)?;
    let docs = read_corpus(&corpus_path)?;

    let mut pred = Vec::with_capacity(docs.len());
    let mut truth = Vec::with_capacity(docs.len());
    for doc in &docs {
        pred.push(model.predict_mask(&tokenize(&doc.text), &vectors)?);
        truth.push(model.labels.target_vector(&doc.labels).iter().map(|&v| v > 0.5).collect());
    }
    let pair = LabelMatrixPair::new(pred, truth)?;
    let m = multilabel_metrics(&pair, conventional);

    let mut report = serde_json::Map::new();
    report.insert("precision".into(), serde_json::json!(m.precision));
    report.insert("recall".into(), serde_json::json!(m.recall));
    report.insert("f1".into(), serde_json::json!(m.f1));
    report.insert("accuracy".into(), serde_json::json!(m.accuracy));
    write_report(config, &report)
}

fn cmd_gradcheck(seeds: u64) -> Result<()> {
    if seeds == 0 {
        return Err(Error::Config("gradcheck needs at least one seed".into()));
    }
    let start = Instant::now();
    let mut failed = false;

    let blocks = cnn_suite(seeds)?;
    for block in &blocks {
        let verdict = if block.passed() { "pass" } else { "FAIL" };
        failed |= !block.passed();
        println!(
            "{:<22} {:>6} params  max rel err {:.3e}  {}",
            block.name, block.params, block.max_rel_err, verdict
        );
    }

    let mut worst_hinge = 0.0_f64;
    for seed in 0..seeds {
        worst_hinge = worst_hinge.max(hinge_gradcheck(seed)?);
    }
    let hinge_pass = worst_hinge < GRADCHECK_TOL;
    failed |= !hinge_pass;
    println!(
        "{:<22} {:>6}        max rel err {:.3e}  {}",
        "hinge.drmm_ffn",
        "",
        worst_hinge,
        if hinge_pass { "pass" } else { "FAIL" }
    );

    println!("{seeds} seeds per check in {:.2?}", start.elapsed());
    if failed {
        return Err(Error::Invalid("gradient check failed".into()));
    }
    Ok(())
}

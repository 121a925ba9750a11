//! End-to-end pipelines: learning a map with its accuracy report, and the
//! clustering methods compared on a bilingual collection.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{kmeans, pca_2d, ClusterResult, KMeansParams};
use crate::corpus::{select_vocabulary, vectorize, Document, DocumentSet, FeatureMatrix, Scheme, VocabMode};
use crate::editdist::{translate_corpus_edit, translate_corpus_hybrid, TargetInventory};
use crate::embeddings::EmbeddingModel;
use crate::error::{Error, Result};
use crate::eval::{map_clusters_to_topics, ClusterTopicReport};
use crate::fingerprint::{fingerprint_corpus, FingerprintMode};
use crate::mapping::{
    build_training_pairs, check_dims, eval_translation, learn_transform, translate_word, Lexicon, TransformMatrix,
    TranslationAccuracy,
};
use crate::SCHEMA;

/// Parses `start:stop:step` into `start, start + step, …` up to and
/// including `stop`.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("lambda sweep must be start:stop:step, got {spec:?}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start >= 0.0 && stop >= start && step > 0.0 && stop.is_finite()) {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnMapConfig {
    pub lambda: f64,
    pub sweep: Option<Vec<f64>>,
    pub train: usize,
    pub test: usize,
    pub seed: u64,
    pub ks: Vec<usize>,
}

impl Default for LearnMapConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            sweep: None,
            train: 4500,
            test: 500,
            seed: 0,
            ks: vec![1, 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub lambda: f64,
    pub train: TranslationAccuracy,
    pub test: Option<TranslationAccuracy>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnMapReport {
    pub schema: &'static str,
    pub src_dim: usize,
    pub tgt_dim: usize,
    pub lexicon_pairs: usize,
    pub usable_pairs: usize,
    pub train_pairs: usize,
    pub test_pairs: usize,
    pub seed: u64,
    /// Regularisation of the returned matrix.
    pub lambda: f64,
    pub rows: Vec<AccuracyRow>,
}

impl LearnMapReport {
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "pairs: {} in lexicon, {} usable, {} train, {} test",
            self.lexicon_pairs, self.usable_pairs, self.train_pairs, self.test_pairs
        );
        let ks: Vec<usize> = self
            .rows
            .first()
            .map(|r| r.train.at.iter().map(|a| a.k).collect())
            .unwrap_or_default();
        let _ = write!(s, "{:>8}", "lambda");
        for k in &ks {
            let _ = write!(s, "  {:>9}", format!("train@{k}"));
        }
        for k in &ks {
            let _ = write!(s, "  {:>8}", format!("test@{k}"));
        }
        s.push('\n');
        for row in &self.rows {
            let _ = write!(s, "{:>8}", row.lambda);
            for a in &row.train.at {
                let _ = write!(s, "  {:>9.4}", a.accuracy);
            }
            for a in row.test.iter().flat_map(|t| &t.at) {
                let _ = write!(s, "  {:>8.4}", a.accuracy);
            }
            s.push('\n');
        }
        s
    }
}

/// Learns the map at `cfg.lambda` on a seeded train split of the usable
/// lexicon pairs and reports accuracy on both splits, for every swept λ.
pub fn learn_map(
    src: &EmbeddingModel,
    tgt: &EmbeddingModel,
    lexicon: &Lexicon,
    cfg: &LearnMapConfig,
) -> Result<(TransformMatrix, LearnMapReport)> {
    let usable = lexicon.filter_in_vocab(src, tgt);
    let (train, test) = usable.split(cfg.train, cfg.test, cfg.seed)?;
    let pm = build_training_pairs(&train, src, tgt)?;
    let fit = |lambda: f64| -> Result<(TransformMatrix, AccuracyRow)> {
        let t = learn_transform(&pm, lambda)?;
        let train_acc = eval_translation(&t, &train, src, tgt, &cfg.ks)?;
        let test_acc = if test.is_empty() {
            None
        } else {
            Some(eval_translation(&t, &test, src, tgt, &cfg.ks)?)
        };
        Ok((
            t,
            AccuracyRow {
                lambda,
                train: train_acc,
                test: test_acc,
            },
        ))
    };
    let (transform, main_row) = fit(cfg.lambda)?;
    let rows = match &cfg.sweep {
        None => vec![main_row],
        Some(lambdas) => lambdas
            .iter()
            .map(|&l| {
                if l == cfg.lambda {
                    Ok(main_row.clone())
                } else {
                    fit(l).map(|(_, r)| r)
                }
            })
            .collect::<Result<_>>()?,
    };
    let report = LearnMapReport {
        schema: SCHEMA,
        src_dim: src.dim(),
        tgt_dim: tgt.dim(),
        lexicon_pairs: lexicon.len(),
        usable_pairs: usable.len(),
        train_pairs: train.len(),
        test_pairs: test.len(),
        seed: cfg.seed,
        lambda: cfg.lambda,
        rows,
    };
    Ok((transform, report))
}

/// Clustering pipelines, one per way of making the two languages comparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Bag of words over the untranslated collection, presence weights.
    NaiveBinary,
    /// Bag of words over the untranslated collection, count weights.
    NaiveCount,
    /// Source words replaced by their closest target word by edit distance.
    Edit,
    /// Dictionary lookup, then edit distance for the rest.
    DictEdit,
    /// Source words replaced by the target word nearest to their mapped vector.
    MatrixTranslate,
    /// Fingerprints averaged over distinct words.
    FpTypes,
    /// Fingerprints averaged over all tokens.
    FpTokens,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::NaiveBinary,
        Method::NaiveCount,
        Method::Edit,
        Method::DictEdit,
        Method::MatrixTranslate,
        Method::FpTypes,
        Method::FpTokens,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::NaiveBinary => "naive-binary",
            Method::NaiveCount => "naive-count",
            Method::Edit => "edit",
            Method::DictEdit => "dict-edit",
            Method::MatrixTranslate => "matrix-translate",
            Method::FpTypes => "fp-types",
            Method::FpTokens => "fp-tokens",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Optional inputs; which ones are required depends on the method.
#[derive(Debug, Clone, Copy, Default)]
pub struct Resources<'a> {
    pub src: Option<&'a EmbeddingModel>,
    pub tgt: Option<&'a EmbeddingModel>,
    pub transform: Option<&'a TransformMatrix>,
    pub inventory: Option<&'a TargetInventory>,
    pub lexicon: Option<&'a Lexicon>,
}

impl<'a> Resources<'a> {
    fn need<T>(value: Option<T>, method: Method, input: &str) -> Result<T> {
        value.ok_or_else(|| Error::MissingInput {
            method: method.name().into(),
            input: input.into(),
        })
    }

    fn models(&self, method: Method) -> Result<(&'a EmbeddingModel, &'a EmbeddingModel, &'a TransformMatrix)> {
        Ok((
            Self::need(self.src, method, "a source model")?,
            Self::need(self.tgt, method, "a target model")?,
            Self::need(self.transform, method, "a transformation matrix")?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    /// Defaults to the number of gold topics.
    pub k: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Weighting for the translate-then-count methods; the naive methods fix
    /// their own.
    pub scheme: Option<Scheme>,
    pub vocab_x: usize,
    pub vocab_mode: VocabMode,
    pub replace_pos: HashSet<String>,
    pub src_lang: String,
    pub tgt_lang: String,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        let defaults = KMeansParams::new(1, 0);
        Self {
            k: None,
            seed: 0,
            restarts: defaults.restarts,
            max_iter: defaults.max_iter,
            tol: defaults.tol,
            scheme: None,
            vocab_x: 500,
            vocab_mode: VocabMode::PerTopic,
            replace_pos: ["S", "A", "V", "ABBR"].into_iter().map(String::from).collect(),
            src_lang: "uk".into(),
            tgt_lang: "ru".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusterOutcome {
    pub method: Method,
    pub features: FeatureMatrix,
    pub result: ClusterResult,
    /// Present when every document has a gold topic.
    pub report: Option<ClusterTopicReport>,
}

/// Applies `translate` to the source-language documents only, keeping order.
fn translate_sources(
    docs: &DocumentSet,
    src_lang: &str,
    translate: impl FnOnce(&DocumentSet) -> Result<DocumentSet>,
) -> Result<DocumentSet> {
    let sources = docs.filter_lang(src_lang);
    let translated = translate(&sources)?;
    let mut by_id: HashMap<&str, &Document> = translated.iter().map(|d| (d.id.as_str(), d)).collect();
    let merged = docs
        .iter()
        .map(|d| by_id.remove(d.id.as_str()).unwrap_or(d).clone())
        .collect();
    DocumentSet::new(merged)
}

/// Replaces each source-model token by the target word nearest to its mapped
/// vector. Tokens unknown to the source model are kept.
pub fn translate_corpus_matrix(
    docs: &DocumentSet,
    transform: &TransformMatrix,
    src: &EmbeddingModel,
    tgt: &EmbeddingModel,
) -> Result<DocumentSet> {
    check_dims(transform, src, tgt)?;
    let distinct: Vec<&str> = docs
        .iter()
        .flat_map(|d| d.tokens.iter().map(String::as_str))
        .filter(|t| src.contains(t))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let table: HashMap<&str, String> = distinct
        .par_iter()
        .map(|&t| {
            let best = translate_word(transform, src, tgt, t, 1)?;
            Ok((t, best.into_iter().next().expect("non-empty target model").word))
        })
        .collect::<Result<_>>()?;
    let out = docs
        .iter()
        .map(|d| Document {
            tokens: d
                .tokens
                .iter()
                .map(|t| table.get(t.as_str()).cloned().unwrap_or_else(|| t.clone()))
                .collect(),
            ..d.clone()
        })
        .collect();
    DocumentSet::new(out)
}

/// Builds the feature matrix a method clusters on.
pub fn method_features(
    method: Method,
    docs: &DocumentSet,
    res: &Resources<'_>,
    cfg: &ClusterConfig,
) -> Result<FeatureMatrix> {
    let bow = |corpus: &DocumentSet, scheme: Scheme| -> Result<FeatureMatrix> {
        let vocab = select_vocabulary(corpus, cfg.vocab_x, cfg.vocab_mode)?;
        vectorize(corpus, &vocab, scheme)
    };
    let fixed = |scheme: Scheme| -> Result<Scheme> {
        match cfg.scheme {
            Some(s) if s != scheme => Err(Error::InvalidArgument(format!(
                "method {method} implies scheme {scheme}, got {s}"
            ))),
            _ => Ok(scheme),
        }
    };
    let scheme = cfg.scheme.unwrap_or(Scheme::Binary);
    match method {
        Method::NaiveBinary => bow(docs, fixed(Scheme::Binary)?),
        Method::NaiveCount => bow(docs, fixed(Scheme::Count)?),
        Method::Edit => {
            let inventory = Resources::need(res.inventory, method, "a target inventory")?;
            let translated = translate_sources(docs, &cfg.src_lang, |d| {
                Ok(translate_corpus_edit(d, inventory, &cfg.replace_pos))
            })?;
            bow(&translated, scheme)
        }
        Method::DictEdit => {
            let inventory = Resources::need(res.inventory, method, "a target inventory")?;
            let lexicon = Resources::need(res.lexicon, method, "a lexicon")?;
            let translated = translate_sources(docs, &cfg.src_lang, |d| {
                Ok(translate_corpus_hybrid(d, lexicon, inventory, &cfg.replace_pos))
            })?;
            bow(&translated, scheme)
        }
        Method::MatrixTranslate => {
            let (src, tgt, t) = res.models(method)?;
            let translated = translate_sources(docs, &cfg.src_lang, |d| translate_corpus_matrix(d, t, src, tgt))?;
            bow(&translated, scheme)
        }
        Method::FpTypes | Method::FpTokens => {
            if cfg.scheme.is_some() {
                return Err(Error::InvalidArgument(format!(
                    "method {method} takes no weighting scheme"
                )));
            }
            let (src, tgt, t) = res.models(method)?;
            let mode = if method == Method::FpTypes {
                FingerprintMode::Types
            } else {
                FingerprintMode::Tokens
            };
            fingerprint_corpus(docs, src, tgt, t, &cfg.src_lang, &cfg.tgt_lang, mode)
        }
    }
}

/// Features, k-means, and (with gold labels) the cluster/topic report.
pub fn run_cluster(
    method: Method,
    docs: &DocumentSet,
    res: &Resources<'_>,
    cfg: &ClusterConfig,
) -> Result<ClusterOutcome> {
    if docs.is_empty() {
        return Err(Error::InvalidArgument("no documents".into()));
    }
    let labelled = docs.iter().all(|d| d.topic.is_some());
    let k = match cfg.k {
        Some(k) => k,
        None if labelled => docs
            .iter()
            .filter_map(|d| d.topic.as_deref())
            .collect::<HashSet<_>>()
            .len(),
        None => {
            return Err(Error::InvalidArgument(
                "k is required when documents carry no topics".into(),
            ))
        }
    };
    let features = method_features(method, docs, res, cfg)?;
    let params = KMeansParams {
        k,
        seed: cfg.seed,
        restarts: cfg.restarts,
        max_iter: cfg.max_iter,
        tol: cfg.tol,
    };
    let result = kmeans(features.matrix.view(), &params)?;
    let report = if labelled {
        let gold: Vec<Option<&str>> = docs.iter().map(|d| d.topic.as_deref()).collect();
        Some(map_clusters_to_topics(&result.assignments, k, &gold)?)
    } else {
        None
    };
    Ok(ClusterOutcome {
        method,
        features,
        result,
        report,
    })
}

#[derive(Serialize)]
struct AssignmentsFile<'a> {
    schema: &'static str,
    method: &'static str,
    feature_space: String,
    k: usize,
    seed: u64,
    restarts: usize,
    iterations_run: usize,
    inertia: f64,
    assignments: BTreeMap<&'a str, usize>,
    centroids: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    schema: &'static str,
    method: &'static str,
    feature_space: String,
    #[serde(flatten)]
    report: &'a ClusterTopicReport,
}

impl ClusterOutcome {
    /// Assignments keyed by document id, centroids, inertia and seed.
    pub fn assignments_json(&self) -> String {
        let file = AssignmentsFile {
            schema: SCHEMA,
            method: self.method.name(),
            feature_space: self.features.feature_space.to_string(),
            k: self.result.centroids.nrows(),
            seed: self.result.seed,
            restarts: self.result.restarts_run,
            iterations_run: self.result.iterations_run,
            inertia: self.result.inertia,
            assignments: self
                .features
                .doc_ids
                .iter()
                .map(String::as_str)
                .zip(self.result.assignments.iter().copied())
                .collect(),
            centroids: self.result.centroids.rows().into_iter().map(|r| r.to_vec()).collect(),
        };
        serde_json::to_string_pretty(&file).expect("serialisable")
    }

    pub fn report_json(&self) -> Option<String> {
        self.report.as_ref().map(|report| {
            let file = ReportFile {
                schema: SCHEMA,
                method: self.method.name(),
                feature_space: self.features.feature_space.to_string(),
                report,
            };
            serde_json::to_string_pretty(&file).expect("serialisable")
        })
    }

    /// PCA coordinates as CSV `doc_id,x,y,lang,topic,cluster`.
    pub fn write_projection_csv<W: Write>(&self, docs: &DocumentSet, out: W) -> Result<()> {
        let projection = pca_2d(self.features.matrix.view())?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(["doc_id", "x", "y", "lang", "topic", "cluster"])
            .map_err(csv_err)?;
        for (i, d) in docs.iter().enumerate() {
            let row = projection.coords.row(i);
            w.write_record([
                d.id.as_str(),
                &row[0].to_string(),
                &row[1].to_string(),
                d.lang.as_str(),
                d.topic.as_deref().unwrap_or(""),
                &self.result.assignments[i].to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }
}

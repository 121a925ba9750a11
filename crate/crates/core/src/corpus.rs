//! Pre-tokenised document collections and bag-of-words features.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One document: tokens follow the `lemma_POS` convention, e.g. `дисертація_S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub lang: String,
    pub tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
}

/// Documents with unique ids, in input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentSet {
    docs: Vec<Document>,
}

impl DocumentSet {
    pub fn new(docs: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(docs.len());
        for d in &docs {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateDocId(d.id.clone()));
            }
        }
        Ok(Self { docs })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses JSON lines. Blank lines are skipped.
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let mut docs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(line).map_err(|e| Error::format(context, i + 1, e.to_string()))?;
            docs.push(doc);
        }
        Self::new(docs)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("write to Vec");
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn write_jsonl<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for d in &self.docs {
            serde_json::to_writer(&mut *out, d)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn into_docs(self) -> Vec<Document> {
        self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.docs.iter()
    }

    /// Gold topic of every document, or the id of the first unlabelled one.
    pub fn topics(&self) -> Result<Vec<&str>> {
        self.docs
            .iter()
            .map(|d| d.topic.as_deref().ok_or_else(|| Error::MissingTopic(d.id.clone())))
            .collect()
    }

    /// Drops tokens whose PoS tag is in `blocklist`.
    pub fn without_pos(&self, blocklist: &HashSet<String>) -> Self {
        let docs = self
            .docs
            .iter()
            .map(|d| Document {
                tokens: d
                    .tokens
                    .iter()
                    .filter(|t| split_pos(t).1.is_none_or(|p| !blocklist.contains(p)))
                    .cloned()
                    .collect(),
                ..d.clone()
            })
            .collect();
        Self { docs }
    }

    /// Keeps only documents in the given language.
    pub fn filter_lang(&self, lang: &str) -> Self {
        Self {
            docs: self.docs.iter().filter(|d| d.lang == lang).cloned().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a DocumentSet {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.docs.iter()
    }
}

/// Splits `lemma_POS` at the last underscore. Tokens without one have no tag.
pub fn split_pos(token: &str) -> (&str, Option<&str>) {
    match token.rsplit_once('_') {
        Some((lemma, pos)) if !lemma.is_empty() && !pos.is_empty() => (lemma, Some(pos)),
        _ => (token, None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VocabMode {
    Global,
    PerTopic,
}

impl FromStr for VocabMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Self::Global),
            "per_topic" | "per-topic" => Ok(Self::PerTopic),
            _ => Err(Error::InvalidArgument(format!("unknown vocabulary mode {s:?}"))),
        }
    }
}

/// Feature vocabulary for bag-of-words vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub provenance: VocabMode,
    pub x: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn count_tokens<'a>(docs: impl IntoIterator<Item = &'a Document>) -> HashMap<&'a str, usize> {
    let mut counts = HashMap::new();
    for d in docs {
        for t in &d.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    counts
}

/// Sorts by descending count, ties by ascending term.
fn ranked<'a>(counts: &HashMap<&'a str, usize>) -> Vec<(&'a str, usize)> {
    let mut v: Vec<_> = counts.iter().map(|(&t, &c)| (t, c)).collect();
    v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    v
}

/// Top-`x` terms by collection frequency, either over the whole collection or
/// per gold topic (then the union of the per-topic lists).
pub fn select_vocabulary(docs: &DocumentSet, x: usize, mode: VocabMode) -> Result<Vocabulary> {
    if x == 0 {
        return Err(Error::InvalidArgument("x must be positive".into()));
    }
    let global = count_tokens(docs);
    let chosen: HashSet<&str> = match mode {
        VocabMode::Global => ranked(&global).into_iter().take(x).map(|(t, _)| t).collect(),
        VocabMode::PerTopic => {
            let topics = docs.topics()?;
            let mut by_topic: BTreeMap<&str, Vec<&Document>> = BTreeMap::new();
            for (d, t) in docs.iter().zip(topics) {
                by_topic.entry(t).or_default().push(d);
            }
            by_topic
                .values()
                .flat_map(|ds| {
                    ranked(&count_tokens(ds.iter().copied()))
                        .into_iter()
                        .take(x)
                        .map(|(t, _)| t)
                        .collect::<Vec<_>>()
                })
                .collect()
        }
    };
    let terms = ranked(&global)
        .into_iter()
        .filter(|(t, _)| chosen.contains(t))
        .map(|(t, _)| t.to_owned())
        .collect();
    Ok(Vocabulary {
        terms,
        provenance: mode,
        x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Binary,
    Count,
    Tfidf,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Self::Binary),
            "count" => Ok(Self::Count),
            "tfidf" | "tf-idf" => Ok(Self::Tfidf),
            _ => Err(Error::InvalidArgument(format!("unknown weighting scheme {s:?}"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Binary => "binary",
            Self::Count => "count",
            Self::Tfidf => "tfidf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSpace {
    Bow(Scheme),
    Fingerprint { dim: usize },
}

impl fmt::Display for FeatureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bow(s) => write!(f, "bow:{s}"),
            Self::Fingerprint { dim } => write!(f, "fingerprint:d={dim}"),
        }
    }
}

/// One numeric row per document.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub doc_ids: Vec<String>,
    pub feature_names: Vec<String>,
    pub matrix: Array2<f64>,
    pub feature_space: FeatureSpace,
}

impl FeatureMatrix {
    pub fn new(
        doc_ids: Vec<String>,
        feature_names: Vec<String>,
        matrix: Array2<f64>,
        feature_space: FeatureSpace,
    ) -> Result<Self> {
        if matrix.nrows() != doc_ids.len() || matrix.ncols() != feature_names.len() {
            return Err(Error::InvalidArgument(format!(
                "matrix {}x{} does not match {} ids and {} features",
                matrix.nrows(),
                matrix.ncols(),
                doc_ids.len(),
                feature_names.len()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite feature value".into()));
        }
        Ok(Self {
            doc_ids,
            feature_names,
            matrix: matrix.as_standard_layout().into_owned(),
            feature_space,
        })
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(std::iter::once("doc_id").chain(self.feature_names.iter().map(String::as_str)))
            .map_err(csv_err)?;
        for (id, row) in self.doc_ids.iter().zip(self.matrix.rows()) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

/// Bag-of-words rows over `vocab`. Tokens outside the vocabulary are ignored.
///
/// The tf-idf weight is `count(t, d) · ln(N / df(t))`.
pub fn vectorize(docs: &DocumentSet, vocab: &Vocabulary, scheme: Scheme) -> Result<FeatureMatrix> {
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let column: HashMap<&str, usize> = vocab.terms.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let mut m = Array2::<f64>::zeros((docs.len(), vocab.len()));
    for (r, d) in docs.iter().enumerate() {
        for t in &d.tokens {
            if let Some(&c) = column.get(t.as_str()) {
                m[[r, c]] += 1.0;
            }
        }
    }
    match scheme {
        Scheme::Count => {}
        Scheme::Binary => m.mapv_inplace(|v| if v > 0.0 { 1.0 } else { 0.0 }),
        Scheme::Tfidf => {
            let n = docs.len() as f64;
            for mut col in m.columns_mut() {
                let df = col.iter().filter(|&&v| v > 0.0).count();
                let idf = if df == 0 { 0.0 } else { (n / df as f64).ln() };
                col.mapv_inplace(|v| v * idf);
            }
        }
    }
    FeatureMatrix::new(
        docs.iter().map(|d| d.id.clone()).collect(),
        vocab.terms.clone(),
        m,
        FeatureSpace::Bow(scheme),
    )
}

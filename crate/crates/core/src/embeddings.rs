//! Word-embedding models in word2vec text format with exact cosine search.
//!
//! A model file starts with a `vocab_size dim` header followed by one
//! `word v1 ... v_dim` line per word. Fields are separated by single spaces.
//! CRLF line endings and one trailing newline are accepted; anything else
//! (blank lines, doubled separators, trailing spaces) is rejected.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vocabulary with one dense vector per word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Array2<f64>,
    norms: Vec<f64>,
}

/// A word and its cosine similarity to some query vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub word: String,
    pub similarity: f64,
}

impl EmbeddingModel {
    /// Builds a model from words and a row-aligned vector matrix.
    pub fn new(words: Vec<String>, vectors: Array2<f64>) -> Result<Self> {
        if words.len() != vectors.nrows() {
            return Err(Error::InvalidArgument(format!(
                "{} words but {} vectors",
                words.len(),
                vectors.nrows()
            )));
        }
        if vectors.ncols() == 0 {
            return Err(Error::InvalidArgument("dimensionality must be at least 1".into()));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() || w.contains(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!("invalid word {w:?}")));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateWord(w.clone()));
            }
        }
        let vectors = vectors.as_standard_layout().into_owned();
        let mut norms = Vec::with_capacity(words.len());
        for (w, row) in words.iter().zip(vectors.rows()) {
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite value in vector of {w:?}")));
            }
            let norm = l2_norm(row.as_slice().expect("standard layout"));
            if norm == 0.0 {
                return Err(Error::InvalidArgument(format!("all-zero vector for {w:?}")));
            }
            norms.push(norm);
        }
        Ok(Self {
            words,
            index,
            vectors,
            norms,
        })
    }

    pub fn load(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string(), expected_dim)
    }

    /// Parses word2vec text format. `context` names the source in error messages.
    pub fn parse(text: &str, context: &str, expected_dim: Option<usize>) -> Result<Self> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));

        let header = lines
            .next()
            .filter(|h| !h.is_empty())
            .ok_or_else(|| Error::format(context, 1, "missing header"))?;
        let (count, dim) = parse_header(header).ok_or_else(|| {
            Error::format(
                context,
                1,
                format!("malformed header {header:?}, expected \"vocab_size dim\""),
            )
        })?;
        if let Some(expected) = expected_dim {
            if expected != dim {
                return Err(Error::DimMismatch { expected, found: dim });
            }
        }

        let mut words = Vec::with_capacity(count);
        let mut data = Vec::with_capacity(count * dim);
        let mut seen = HashSet::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if words.len() == count {
                return Err(Error::format(context, lineno, format!("more than {count} rows")));
            }
            let mut fields = line.split(' ');
            let word = fields.next().unwrap_or_default();
            if word.is_empty() {
                return Err(Error::format(context, lineno, "empty word"));
            }
            let start = data.len();
            for field in fields {
                let value: f64 = field
                    .parse()
                    .map_err(|_| Error::format(context, lineno, format!("invalid number {field:?}")))?;
                if !value.is_finite() {
                    return Err(Error::format(context, lineno, "non-finite value"));
                }
                data.push(value);
            }
            let found = data.len() - start;
            if found != dim {
                return Err(Error::format(
                    context,
                    lineno,
                    format!("row length mismatch: expected {dim} values, found {found}"),
                ));
            }
            if data[start..].iter().all(|&x| x == 0.0) {
                return Err(Error::format(context, lineno, format!("all-zero vector for {word:?}")));
            }
            if !seen.insert(word) {
                return Err(Error::DuplicateWord(word.to_owned()));
            }
            words.push(word.to_owned());
        }
        if words.len() != count {
            return Err(Error::format(
                context,
                words.len() + 2,
                format!("expected {count} rows, found {}", words.len()),
            ));
        }
        let vectors = Array2::from_shape_vec((count, dim), data).expect("shape checked");
        Self::new(words, vectors)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = io::BufWriter::new(file);
        self.write_text(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }

    /// Writes word2vec text format. Values use the shortest representation
    /// that parses back to the identical `f64`.
    pub fn write_text<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim())?;
        for (word, row) in self.words.iter().zip(self.vectors.rows()) {
            out.write_all(word.as_bytes())?;
            for x in row {
                write!(out, " {x}")?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Returns a copy with every vector scaled to unit length.
    pub fn normalized(&self) -> Self {
        let mut vectors = self.vectors.clone();
        for (mut row, &n) in vectors.rows_mut().into_iter().zip(&self.norms) {
            row.mapv_inplace(|x| x / n);
        }
        let norms = vectors
            .rows()
            .into_iter()
            .map(|r| l2_norm(r.as_slice().expect("standard layout")))
            .collect();
        Self {
            words: self.words.clone(),
            index: self.index.clone(),
            vectors,
            norms,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vectors(&self) -> ArrayView2<'_, f64> {
        self.vectors.view()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Row `i` of the vector matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        let dim = self.dim();
        &self.vectors.as_slice().expect("standard layout")[i * dim..(i + 1) * dim]
    }

    pub fn vector(&self, word: &str) -> Result<&[f64]> {
        self.index_of(word)
            .map(|i| self.row(i))
            .ok_or_else(|| Error::OutOfVocabulary(word.to_owned()))
    }

    /// Exact top-`k` words by cosine similarity to `query`.
    ///
    /// Results are sorted by similarity descending, ties by ascending word.
    /// Words in `exclude` are skipped.
    pub fn nearest(&self, query: &[f64], k: usize, exclude: Option<&HashSet<String>>) -> Result<Vec<Neighbor>> {
        if query.len() != self.dim() {
            return Err(Error::InvalidQuery(format!(
                "length {} does not match model dim {}",
                query.len(),
                self.dim()
            )));
        }
        if query.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidQuery("non-finite component".into()));
        }
        let qnorm = l2_norm(query);
        if qnorm == 0.0 {
            return Err(Error::InvalidQuery("zero norm".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }

        let mut scored: Vec<(usize, f64)> = (0..self.len())
            .into_par_iter()
            .filter(|&i| exclude.is_none_or(|ex| !ex.contains(&self.words[i])))
            .map(|i| {
                let sim = dot(query, self.row(i)) / (qnorm * self.norms[i]);
                (i, sim.clamp(-1.0, 1.0))
            })
            .collect();

        let cmp = |a: &(usize, f64), b: &(usize, f64)| -> Ordering {
            b.1.total_cmp(&a.1).then_with(|| self.words[a.0].cmp(&self.words[b.0]))
        };
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_unstable_by(cmp);
        Ok(scored
            .into_iter()
            .map(|(i, similarity)| Neighbor {
                word: self.words[i].clone(),
                similarity,
            })
            .collect())
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let (count, dim) = line.split_once(' ')?;
    let count = count.parse().ok()?;
    let dim: usize = dim.parse().ok()?;
    (dim >= 1).then_some((count, dim))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

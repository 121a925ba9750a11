//! Document "semantic fingerprints": the average embedding of a document's
//! words, optionally mapped into another language's space.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{DocumentSet, FeatureMatrix, FeatureSpace};
use crate::embeddings::EmbeddingModel;
use crate::error::{Error, Result};
use crate::mapping::{apply_transform, check_dims, TransformMatrix};

/// Whether repeated words count once (`Types`) or once per occurrence (`Tokens`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FingerprintMode {
    Types,
    Tokens,
}

impl FromStr for FingerprintMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "types" => Ok(Self::Types),
            "tokens" => Ok(Self::Tokens),
            _ => Err(Error::InvalidArgument(format!("unknown fingerprint mode {s:?}"))),
        }
    }
}

impl fmt::Display for FingerprintMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Types => "types",
            Self::Tokens => "tokens",
        })
    }
}

/// Mean vector of the in-vocabulary tokens; out-of-vocabulary tokens are skipped.
///
/// Vectors are summed in vocabulary order, weighted by their multiplicity, so
/// the result does not depend on token order.
pub fn doc_fingerprint<S: AsRef<str>>(model: &EmbeddingModel, tokens: &[S], mode: FingerprintMode) -> Result<Vec<f64>> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = model.index_of(t.as_ref()) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyFingerprint { doc: None });
    }
    let mut sum = vec![0.0; model.dim()];
    let mut total = 0usize;
    for (&i, &c) in &counts {
        let weight = match mode {
            FingerprintMode::Tokens => c,
            FingerprintMode::Types => 1,
        };
        total += weight;
        let w = weight as f64;
        for (s, v) in sum.iter_mut().zip(model.row(i)) {
            *s += w * v;
        }
    }
    let total = total as f64;
    sum.iter_mut().for_each(|s| *s /= total);
    Ok(sum)
}

/// Fingerprints for a bilingual collection, all expressed in the target space.
///
/// Documents in `src_lang` are fingerprinted with `src` and then mapped with
/// `transform`; documents in `tgt_lang` use `tgt` directly.
pub fn fingerprint_corpus(
    docs: &DocumentSet,
    src: &EmbeddingModel,
    tgt: &EmbeddingModel,
    transform: &TransformMatrix,
    src_lang: &str,
    tgt_lang: &str,
    mode: FingerprintMode,
) -> Result<FeatureMatrix> {
    check_dims(transform, src, tgt)?;
    let rows: Vec<Vec<f64>> = docs
        .docs()
        .par_iter()
        .map(|d| {
            let with_id = |e: Error| match e {
                Error::EmptyFingerprint { .. } => Error::EmptyFingerprint {
                    doc: Some(d.id.clone()),
                },
                other => other,
            };
            if d.lang == src_lang {
                let fp = doc_fingerprint(src, &d.tokens, mode).map_err(with_id)?;
                apply_transform(transform, &fp)
            } else if d.lang == tgt_lang {
                doc_fingerprint(tgt, &d.tokens, mode).map_err(with_id)
            } else {
                Err(Error::UnknownLanguage {
                    doc: d.id.clone(),
                    lang: d.lang.clone(),
                })
            }
        })
        .collect::<Result<_>>()?;

    let dim = tgt.dim();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let matrix = Array2::from_shape_vec((docs.len(), dim), data).expect("row lengths equal tgt dim");
    FeatureMatrix::new(
        docs.iter().map(|d| d.id.clone()).collect(),
        (0..dim).map(|i| format!("f{i}")).collect(),
        matrix,
        FeatureSpace::Fingerprint { dim },
    )
}

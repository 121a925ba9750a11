//! Linear source→target embedding maps learned with the normal equation.
//!
//! Every source vector is augmented with a trailing bias component equal to 1,
//! so a map from `d_src` to `d_tgt` dimensions is a `d_tgt × (d_src + 1)`
//! matrix. Row `i` of the matrix solves
//!
//! ```text
//! βᵢ = (XᵀX + λL)⁻¹ Xᵀ yᵢ
//! ```
//!
//! where `L` is the identity with a zero at the bias position, so the bias
//! coefficient is never penalised. `λ = 0` gives the plain least-squares map.

mod lexicon;
mod solve;

use std::fs;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embeddings::{dot, EmbeddingModel, Neighbor};
use crate::error::{Error, Result};
use crate::SCHEMA;

pub use lexicon::Lexicon;

/// Design and response matrices for one regression problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedMatrices {
    /// `n × (d_src + 1)`; the last column is the bias, all ones.
    pub x: Array2<f64>,
    /// `n × d_tgt`.
    pub y: Array2<f64>,
    /// The lexicon pairs behind each row, in row order.
    pub kept_pairs: Vec<(String, String)>,
}

impl PairedMatrices {
    pub fn src_dim(&self) -> usize {
        self.x.ncols() - 1
    }

    pub fn tgt_dim(&self) -> usize {
        self.y.ncols()
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }
}

/// A learned source→target affine map.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    weights: Array2<f64>,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct TransformFile {
    schema: String,
    src_dim: usize,
    tgt_dim: usize,
    lambda: f64,
    /// Row-major `tgt_dim × (src_dim + 1)`, bias coefficient last in each row.
    coefficients: Vec<f64>,
}

impl TransformMatrix {
    /// Wraps a `d_tgt × (d_src + 1)` coefficient matrix.
    pub fn new(weights: Array2<f64>, lambda: f64) -> Result<Self> {
        if weights.ncols() < 2 || weights.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "transform shape {}x{} is degenerate",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if weights.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite transform coefficient".into()));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid lambda {lambda}")));
        }
        Ok(Self {
            weights: weights.as_standard_layout().into_owned(),
            lambda,
        })
    }

    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn src_dim(&self) -> usize {
        self.weights.ncols() - 1
    }

    pub fn tgt_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn to_json(&self) -> String {
        let file = TransformFile {
            schema: SCHEMA.to_owned(),
            src_dim: self.src_dim(),
            tgt_dim: self.tgt_dim(),
            lambda: self.lambda,
            coefficients: self.weights.iter().copied().collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let file: TransformFile =
            serde_json::from_str(text).map_err(|e| Error::format(context, e.line(), e.to_string()))?;
        if file.schema != SCHEMA {
            return Err(Error::format(
                context,
                1,
                format!("unsupported schema {:?}", file.schema),
            ));
        }
        let expected = file.tgt_dim * (file.src_dim + 1);
        if file.coefficients.len() != expected {
            return Err(Error::format(
                context,
                1,
                format!("expected {expected} coefficients, found {}", file.coefficients.len()),
            ));
        }
        let weights =
            Array2::from_shape_vec((file.tgt_dim, file.src_dim + 1), file.coefficients).expect("length checked");
        Self::new(weights, file.lambda)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }
}

/// Stacks the vectors of every lexicon pair whose words are both known.
pub fn build_training_pairs(lexicon: &Lexicon, src: &EmbeddingModel, tgt: &EmbeddingModel) -> Result<PairedMatrices> {
    let kept = lexicon.filter_in_vocab(src, tgt);
    let needed = src.dim() + 1;
    if kept.len() < needed {
        return Err(Error::InsufficientPairs {
            needed,
            found: kept.len(),
        });
    }
    let n = kept.len();
    let mut x = Array2::zeros((n, needed));
    let mut y = Array2::zeros((n, tgt.dim()));
    for (r, (s, t)) in kept.pairs().iter().enumerate() {
        let sv = src.vector(s)?;
        let mut row = x.row_mut(r);
        for (dst, v) in row.iter_mut().zip(sv) {
            *dst = *v;
        }
        row[needed - 1] = 1.0;
        for (dst, v) in y.row_mut(r).iter_mut().zip(tgt.vector(t)?) {
            *dst = *v;
        }
    }
    Ok(PairedMatrices {
        x,
        y,
        kept_pairs: kept.pairs().to_vec(),
    })
}

/// Solves the (regularised) normal equation for every target component.
pub fn learn_transform(pm: &PairedMatrices, lambda: f64) -> Result<TransformMatrix> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be a finite value >= 0, got {lambda}"
        )));
    }
    let p = pm.x.ncols();
    let m = pm.y.ncols();
    if pm.len() < p {
        return Err(Error::InsufficientPairs {
            needed: p,
            found: pm.len(),
        });
    }
    if pm.x.iter().chain(pm.y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite training value".into()));
    }

    // Column-major copies make every Gram entry a contiguous dot product.
    let xt = pm.x.t().as_standard_layout().into_owned();
    let yt = pm.y.t().as_standard_layout().into_owned();
    let xt = xt.as_slice().expect("standard layout");
    let yt = yt.as_slice().expect("standard layout");
    let n = pm.len();
    fn col(data: &[f64], n: usize, j: usize) -> &[f64] {
        &data[j * n..(j + 1) * n]
    }

    let gram_rows: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| (i..p).map(|j| dot(col(xt, n, i), col(xt, n, j))).collect())
        .collect();
    let mut gram = vec![0.0; p * p];
    for (i, row) in gram_rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            gram[i * p + i + off] = v;
            gram[(i + off) * p + i] = v;
        }
    }
    if lambda > 0.0 {
        // L = I with the bias (last) diagonal entry zeroed.
        for i in 0..p - 1 {
            gram[i * p + i] += lambda;
        }
    }

    let rhs_rows: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| (0..m).map(|c| dot(col(xt, n, i), col(yt, n, c))).collect())
        .collect();
    let rhs: Vec<f64> = rhs_rows.into_iter().flatten().collect();

    let beta = solve::solve_spd(&gram, p, &rhs, m)?;
    // beta is p × m; the transform stores one row per target component.
    let weights = Array2::from_shape_vec((p, m), beta)
        .expect("solver output shape")
        .reversed_axes();
    TransformMatrix::new(weights, lambda)
}

/// `W · [v; 1]`.
pub fn apply_transform(t: &TransformMatrix, v: &[f64]) -> Result<Vec<f64>> {
    let d = t.src_dim();
    if v.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input vector".into()));
    }
    Ok(t.weights
        .rows()
        .into_iter()
        .map(|row| {
            let row = row.as_slice().expect("standard layout");
            dot(&row[..d], v) + row[d]
        })
        .collect())
}

/// Nearest target words to the mapped vector of a source word.
pub fn translate_word(
    t: &TransformMatrix,
    src: &EmbeddingModel,
    tgt: &EmbeddingModel,
    word: &str,
    k: usize,
) -> Result<Vec<Neighbor>> {
    check_dims(t, src, tgt)?;
    let mapped = apply_transform(t, src.vector(word)?)?;
    tgt.nearest(&mapped, k, None)
}

pub(crate) fn check_dims(t: &TransformMatrix, src: &EmbeddingModel, tgt: &EmbeddingModel) -> Result<()> {
    if src.dim() != t.src_dim() {
        return Err(Error::DimMismatch {
            expected: t.src_dim(),
            found: src.dim(),
        });
    }
    if tgt.dim() != t.tgt_dim() {
        return Err(Error::DimMismatch {
            expected: t.tgt_dim(),
            found: tgt.dim(),
        });
    }
    Ok(())
}

/// Translation accuracy at several cut-offs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationAccuracy {
    /// Number of distinct source words evaluated.
    pub evaluable: usize,
    pub at: Vec<AccuracyAt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyAt {
    pub k: usize,
    pub hits: usize,
    pub accuracy: f64,
}

impl TranslationAccuracy {
    pub fn accuracy(&self, k: usize) -> Option<f64> {
        self.at.iter().find(|a| a.k == k).map(|a| a.accuracy)
    }
}

/// Fraction of source words whose top-`k` translations contain any of their
/// dictionary targets. Pairs with an unknown word are ignored; a source word
/// with several targets counts once.
pub fn eval_translation(
    t: &TransformMatrix,
    test_pairs: &Lexicon,
    src: &EmbeddingModel,
    tgt: &EmbeddingModel,
    ks: &[usize],
) -> Result<TranslationAccuracy> {
    check_dims(t, src, tgt)?;
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::InvalidArgument("ks must be non-empty positive integers".into()));
    }
    let usable = test_pairs.filter_in_vocab(src, tgt);
    let groups = usable.grouped();
    if groups.is_empty() {
        return Err(Error::NoEvaluablePairs);
    }
    let max_k = *ks.iter().max().expect("non-empty");

    // Rank (0-based) of the best dictionary target within the top max_k, if any.
    let ranks: Vec<Option<usize>> = groups
        .par_iter()
        .map(|(s, targets)| {
            let mapped = apply_transform(t, src.vector(s)?)?;
            let top = tgt.nearest(&mapped, max_k, None)?;
            Ok(top.iter().position(|nb| targets.contains(&nb.word.as_str())))
        })
        .collect::<Result<_>>()?;

    let evaluable = groups.len();
    let at = ks
        .iter()
        .map(|&k| {
            let hits = ranks.iter().filter(|r| r.is_some_and(|r| r < k)).count();
            AccuracyAt {
                k,
                hits,
                accuracy: hits as f64 / evaluable as f64,
            }
        })
        .collect();
    Ok(TranslationAccuracy { evaluable, at })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn model(words: &[&str], rows: Array2<f64>) -> EmbeddingModel {
        EmbeddingModel::new(words.iter().map(|w| w.to_string()).collect(), rows).unwrap()
    }

    #[test]
    fn build_pairs_filters_oov() {
        let src = model(&["a", "b"], array![[1.0], [2.0]]);
        let tgt = model(&["x", "y", "z"], array![[1.0], [2.0], [3.0]]);
        let lex = Lexicon::new([("a", "x"), ("q", "y"), ("b", "z")]).unwrap();
        let pm = build_training_pairs(&lex, &src, &tgt).unwrap();
        assert_eq!(pm.len(), 2);
        assert_eq!(pm.x, array![[1.0, 1.0], [2.0, 1.0]]);
        assert_eq!(pm.y, array![[1.0], [3.0]]);
        assert_eq!(pm.kept_pairs[1], ("b".to_string(), "z".to_string()));
    }

    #[test]
    fn build_pairs_insufficient() {
        let src = model(&["a", "b"], array![[1.0, 0.0], [0.0, 2.0]]);
        let tgt = model(&["x"], array![[1.0]]);
        let lex = Lexicon::new([("a", "x"), ("b", "x")]).unwrap();
        assert!(matches!(
            build_training_pairs(&lex, &src, &tgt),
            Err(Error::InsufficientPairs { needed: 3, found: 2 })
        ));
    }

    #[test]
    fn identity_data_gives_identity_map() {
        let x = array![[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [2.0, 3.0, 1.0], [-1.0, 0.5, 1.0]];
        let y = x.slice(ndarray::s![.., ..2]).to_owned();
        let pm = PairedMatrices {
            x,
            y,
            kept_pairs: vec![],
        };
        let t = learn_transform(&pm, 0.0).unwrap();
        let expected = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        for (a, b) in t.weights().iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_without_regularisation() {
        // second feature duplicates the first
        let x = array![[1.0, 1.0, 1.0], [2.0, 2.0, 1.0], [3.0, 3.0, 1.0], [4.0, 4.0, 1.0]];
        let y = array![[1.0], [2.0], [3.0], [4.0]];
        let pm = PairedMatrices {
            x,
            y,
            kept_pairs: vec![],
        };
        let err = learn_transform(&pm, 0.0).unwrap_err();
        assert!(err.to_string().contains("try lambda > 0"));
        assert!(learn_transform(&pm, 0.5).is_ok());
        assert!(learn_transform(&pm, -1.0).is_err());
    }

    #[test]
    fn apply_identity_and_bias_only() {
        let t = TransformMatrix::new(array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 0.0).unwrap();
        assert_eq!(apply_transform(&t, &[3.0, -2.0]).unwrap(), vec![3.0, -2.0]);
        let t = TransformMatrix::new(array![[0.0, 0.0, 5.0], [0.0, 0.0, -1.5]], 0.0).unwrap();
        assert_eq!(apply_transform(&t, &[3.0, -2.0]).unwrap(), vec![5.0, -1.5]);
        assert!(matches!(apply_transform(&t, &[1.0]), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn transform_json_roundtrip() {
        let t = TransformMatrix::new(array![[0.1, 1.0 / 3.0, -2.5e-17]], 1.5).unwrap();
        let back = TransformMatrix::from_json(&t.to_json(), "t").unwrap();
        assert_eq!(back, t);
        assert!(TransformMatrix::from_json(
            "{\"schema\":\"other\",\"src_dim\":1,\"tgt_dim\":1,\"lambda\":0,\"coefficients\":[1,2]}",
            "t"
        )
        .is_err());
    }

    #[test]
    fn translate_truncates_to_vocab() {
        let src = model(&["a"], array![[1.0, 0.0]]);
        let tgt = model(&["x", "y"], array![[1.0, 0.0], [0.0, 1.0]]);
        let t = TransformMatrix::new(array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 0.0).unwrap();
        let out = translate_word(&t, &src, &tgt, "a", 10).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].word, "x");
        assert!(matches!(
            translate_word(&t, &src, &tgt, "zz", 1),
            Err(Error::OutOfVocabulary(_))
        ));
    }

    #[test]
    fn eval_groups_multiple_targets() {
        let src = model(&["a", "b"], array![[1.0, 0.0], [0.0, 1.0]]);
        let tgt = model(&["x", "y", "w"], array![[1.0, 0.0], [0.0, 1.0], [0.7, 0.7]]);
        let t = TransformMatrix::new(array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 0.0).unwrap();
        // a has two targets, one correct; b's only target ranks second
        let lex = Lexicon::new([("a", "w"), ("a", "x"), ("b", "w"), ("c", "x")]).unwrap();
        let acc = eval_translation(&t, &lex, &src, &tgt, &[1, 2]).unwrap();
        assert_eq!(acc.evaluable, 2);
        assert_eq!(acc.accuracy(1), Some(0.5));
        assert_eq!(acc.accuracy(2), Some(1.0));
        let none = Lexicon::new([("c", "x")]).unwrap();
        assert!(matches!(
            eval_translation(&t, &none, &src, &tgt, &[1]),
            Err(Error::NoEvaluablePairs)
        ));
    }
}

//! Seeded synthetic bilingual worlds with known ground truth: paired
//! embedding models related by an affine map, their lexicon, a topical
//! bilingual corpus, and a target-side inventory for edit-distance baselines.
//!
//! Word forms are Cyrillic pseudo-words carrying the noun tag `_S`. About a
//! quarter of source forms are near-cognates of their translation (one or
//! two edits away), the rest are unrelated.

use std::collections::{BTreeMap, HashSet};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, DocumentSet};
use crate::editdist::{InventoryEntry, TargetInventory};
use crate::embeddings::{dot, EmbeddingModel};
use crate::error::{Error, Result};
use crate::mapping::{Lexicon, TransformMatrix};

const CONSONANTS: &[char] = &[
    'б', 'в', 'г', 'д', 'ж', 'з', 'к', 'л', 'м', 'н', 'п', 'р', 'с', 'т', 'ф', 'х', 'ц', 'ч', 'ш',
];
const VOWELS: &[char] = &['а', 'е', 'и', 'о', 'у', 'я', 'ю'];
const SOURCE_ONLY: &[char] = &['і', 'ї', 'є', 'ґ'];
const POS: &str = "S";
const COGNATE_RATE: f64 = 0.25;

/// Semantic layout of the vocabulary, in lexicon order: per topic a block of
/// `vocab_per_topic` signature words, then `shared_noise_vocab` noise words,
/// then per topic `reserve_per_topic` words of the same semantic field that
/// the corpus never uses. Remaining words carry no structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicLayout {
    pub topics: usize,
    pub vocab_per_topic: usize,
    pub shared_noise_vocab: usize,
    pub reserve_per_topic: usize,
    /// Per topic, weight of the shared field direction relative to the
    /// per-word draw.
    pub field_strengths: Vec<f64>,
}

impl TopicLayout {
    fn structured_len(&self) -> usize {
        self.topics * (self.vocab_per_topic + self.reserve_per_topic) + self.shared_noise_vocab
    }

    fn field_of(&self, i: usize) -> Option<usize> {
        let sig = self.topics * self.vocab_per_topic;
        let reserve_start = sig + self.shared_noise_vocab;
        if i < sig {
            Some(i / self.vocab_per_topic)
        } else if i >= reserve_start && i < self.structured_len() && self.reserve_per_topic > 0 {
            Some((i - reserve_start) / self.reserve_per_topic)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticBilingual {
    pub src: EmbeddingModel,
    pub tgt: EmbeddingModel,
    /// `src.words()[i] ↔ tgt.words()[i]`, in vocabulary order.
    pub lexicon: Lexicon,
    /// The generating map.
    pub gold: TransformMatrix,
}

/// Source vectors i.i.d. standard Gaussian; `tgt_i = A·[src_i; 1] + ε` with
/// `A` Gaussian of variance `1/(d+1)` and `ε ~ N(0, σ²I)`.
pub fn gen_bilingual_embeddings(
    vocab_size: usize,
    d: usize,
    noise_sigma: f64,
    seed: u64,
) -> Result<SyntheticBilingual> {
    generate_models(vocab_size, d, noise_sigma, None, seed)
}

/// As [`gen_bilingual_embeddings`], but words in the semantic field of topic
/// `t` share a direction: `src_i = (ξ_i + α_t·c_t) / √(1 + α_t²)`.
pub fn gen_topical_embeddings(
    vocab_size: usize,
    d: usize,
    noise_sigma: f64,
    layout: &TopicLayout,
    seed: u64,
) -> Result<SyntheticBilingual> {
    if layout.topics == 0 || layout.vocab_per_topic == 0 {
        return Err(Error::InvalidArgument(
            "topic layout needs topics and signature words".into(),
        ));
    }
    if layout.structured_len() > vocab_size {
        return Err(Error::InvalidArgument(format!(
            "layout needs {} words but vocab_size is {vocab_size}",
            layout.structured_len()
        )));
    }
    if layout.field_strengths.len() != layout.topics {
        return Err(Error::InvalidArgument(format!(
            "{} field strengths for {} topics",
            layout.field_strengths.len(),
            layout.topics
        )));
    }
    if layout.field_strengths.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
        return Err(Error::InvalidArgument(
            "field strengths must be finite and non-negative".into(),
        ));
    }
    generate_models(vocab_size, d, noise_sigma, Some(layout), seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn generate_models(
    vocab_size: usize,
    d: usize,
    noise_sigma: f64,
    layout: Option<&TopicLayout>,
    seed: u64,
) -> Result<SyntheticBilingual> {
    if d == 0 || vocab_size <= d + 1 {
        return Err(Error::InvalidArgument(format!(
            "need d >= 1 and vocab_size > d + 1, got vocab_size {vocab_size}, d {d}"
        )));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be finite and >= 0, got {noise_sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);

    let topics = layout.map_or(0, |l| l.topics);
    let centres: Vec<Vec<f64>> = (0..topics)
        .map(|_| (0..d).map(|_| normal(&mut rng)).collect())
        .collect();
    let mut src = Array2::zeros((vocab_size, d));
    for i in 0..vocab_size {
        let field = layout.and_then(|l| l.field_of(i).map(|f| (f, l.field_strengths[f])));
        for j in 0..d {
            let v = normal(&mut rng);
            src[[i, j]] = match field {
                Some((f, alpha)) => (v + alpha * centres[f][j]) / (1.0 + alpha * alpha).sqrt(),
                None => v,
            };
        }
    }

    let a_scale = 1.0 / ((d + 1) as f64).sqrt();
    let mut a = Array2::zeros((d, d + 1));
    a.iter_mut().for_each(|v| *v = a_scale * normal(&mut rng));

    let mut tgt = Array2::zeros((vocab_size, d));
    for i in 0..vocab_size {
        let x = src.row(i);
        let x = x.as_slice().expect("standard layout");
        for r in 0..d {
            let w = a.row(r);
            let w = w.as_slice().expect("standard layout");
            tgt[[i, r]] = dot(&w[..d], x) + w[d] + noise_sigma * normal(&mut rng);
        }
    }

    let (src_words, tgt_words) = word_forms(vocab_size, &mut rng);
    let lexicon = Lexicon::new(src_words.iter().cloned().zip(tgt_words.iter().cloned()))?;
    Ok(SyntheticBilingual {
        src: EmbeddingModel::new(src_words, src)?,
        tgt: EmbeddingModel::new(tgt_words, tgt)?,
        lexicon,
        gold: TransformMatrix::new(a, 0.0)?,
    })
}

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(2..=4);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push(CONSONANTS[rng.random_range(0..CONSONANTS.len())]);
        w.push(VOWELS[rng.random_range(0..VOWELS.len())]);
    }
    if rng.random_bool(0.3) {
        w.push(CONSONANTS[rng.random_range(0..CONSONANTS.len())]);
    }
    w
}

fn random_letter(rng: &mut ChaCha8Rng) -> char {
    let n = CONSONANTS.len() + VOWELS.len() + SOURCE_ONLY.len();
    let i = rng.random_range(0..n);
    if i < CONSONANTS.len() {
        CONSONANTS[i]
    } else if i < CONSONANTS.len() + VOWELS.len() {
        VOWELS[i - CONSONANTS.len()]
    } else {
        SOURCE_ONLY[i - CONSONANTS.len() - VOWELS.len()]
    }
}

/// One or two random single-character edits.
fn cognate(word: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    for _ in 0..rng.random_range(1..=2) {
        let n = chars.len();
        match rng.random_range(0..4) {
            0 => chars[rng.random_range(0..n)] = random_letter(rng),
            1 => chars.insert(rng.random_range(0..=n), random_letter(rng)),
            2 if n > 3 => {
                chars.remove(rng.random_range(0..n));
            }
            _ if n >= 2 => {
                let i = rng.random_range(0..n - 1);
                chars.swap(i, i + 1);
            }
            _ => chars.push(random_letter(rng)),
        }
    }
    chars.into_iter().collect()
}

/// Distinct tagged forms for both languages; no form is shared across them.
fn word_forms(n: usize, rng: &mut ChaCha8Rng) -> (Vec<String>, Vec<String>) {
    fn fresh(
        rng: &mut ChaCha8Rng,
        used: &mut HashSet<String>,
        make: &mut dyn FnMut(&mut ChaCha8Rng) -> String,
    ) -> String {
        loop {
            let w = make(rng);
            if used.insert(w.clone()) {
                return w;
            }
        }
    }
    let mut used: HashSet<String> = HashSet::with_capacity(2 * n);
    let tgt: Vec<String> = (0..n).map(|_| fresh(rng, &mut used, &mut pseudo_word)).collect();
    let src: Vec<String> = tgt
        .iter()
        .map(|t| {
            if rng.random_bool(COGNATE_RATE) {
                fresh(rng, &mut used, &mut |r| cognate(t, r))
            } else {
                fresh(rng, &mut used, &mut pseudo_word)
            }
        })
        .collect();
    let tag = |w: String| format!("{w}_{POS}");
    (src.into_iter().map(tag).collect(), tgt.into_iter().map(tag).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub topics: usize,
    pub docs_per_topic_per_lang: usize,
    pub doc_len: usize,
    pub vocab_per_topic: usize,
    pub shared_noise_vocab: usize,
    /// Probability that a token is drawn from the topic signature rather than
    /// the shared noise words.
    pub topic_mix: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            topics: 3,
            docs_per_topic_per_lang: 100,
            doc_len: 200,
            vocab_per_topic: 40,
            shared_noise_vocab: 30,
            topic_mix: 0.8,
        }
    }
}

pub fn topic_name(t: usize) -> String {
    const NAMES: &[&str] = &["economics", "history", "law", "medicine", "physics", "philology"];
    NAMES.get(t).map_or_else(|| format!("topic{t}"), |s| s.to_string())
}

/// Topical bilingual corpus over the lexicon's words.
///
/// Topic `t` owns lexicon pairs `[t·V, (t+1)·V)` as its signature, and the
/// next `shared_noise_vocab` pairs are shared noise; each language draws from
/// its own side of those pairs. Documents are ordered by topic, then language
/// (source first), then index.
pub fn gen_topic_corpus(
    lexicon: &Lexicon,
    spec: &CorpusSpec,
    src_lang: &str,
    tgt_lang: &str,
    seed: u64,
) -> Result<DocumentSet> {
    if spec.topics == 0 || spec.docs_per_topic_per_lang == 0 || spec.doc_len == 0 || spec.vocab_per_topic == 0 {
        return Err(Error::InvalidArgument("corpus sizes must be positive".into()));
    }
    if !(0.0..=1.0).contains(&spec.topic_mix) || (spec.shared_noise_vocab == 0 && spec.topic_mix < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "topic_mix {} invalid for {} noise words",
            spec.topic_mix, spec.shared_noise_vocab
        )));
    }
    let needed = spec.topics * spec.vocab_per_topic + spec.shared_noise_vocab;
    if lexicon.len() < needed {
        return Err(Error::InvalidArgument(format!(
            "corpus needs {needed} lexicon pairs, got {}",
            lexicon.len()
        )));
    }
    if src_lang == tgt_lang {
        return Err(Error::InvalidArgument("source and target languages must differ".into()));
    }
    let pairs = lexicon.pairs();
    let noise = &pairs[spec.topics * spec.vocab_per_topic..needed];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);

    let mut docs = Vec::with_capacity(2 * spec.topics * spec.docs_per_topic_per_lang);
    for t in 0..spec.topics {
        let signature = &pairs[t * spec.vocab_per_topic..(t + 1) * spec.vocab_per_topic];
        for (side, lang) in [(0, src_lang), (1, tgt_lang)] {
            for j in 0..spec.docs_per_topic_per_lang {
                let tokens = (0..spec.doc_len)
                    .map(|_| {
                        let pool = if rng.random_bool(spec.topic_mix) {
                            signature
                        } else {
                            noise
                        };
                        let (s, g) = &pool[rng.random_range(0..pool.len())];
                        if side == 0 {
                            s.clone()
                        } else {
                            g.clone()
                        }
                    })
                    .collect();
                docs.push(Document {
                    id: format!("{lang}-{t}-{j:03}"),
                    lang: lang.to_string(),
                    tokens,
                    topic: Some(topic_name(t)),
                });
            }
        }
    }
    DocumentSet::new(docs)
}

/// Inventory of every target-model word, with frequency one plus its count in
/// the target-language documents.
pub fn gen_inventory(tgt: &EmbeddingModel, docs: &DocumentSet, tgt_lang: &str) -> Result<TargetInventory> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for d in docs.iter().filter(|d| d.lang == tgt_lang) {
        for t in &d.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let entries = tgt
        .words()
        .iter()
        .map(|w| {
            let (lemma, pos) = crate::corpus::split_pos(w);
            InventoryEntry {
                word: lemma.to_string(),
                pos: pos.unwrap_or(POS).to_string(),
                freq: 1 + counts.get(w.as_str()).copied().unwrap_or(0),
            }
        })
        .collect();
    TargetInventory::new(entries)
}

/// Every topic has a strong semantic field except the last, whose
/// vocabulary is unstructured.
pub fn default_field_strengths(topics: usize) -> Vec<f64> {
    (0..topics)
        .map(|t| if t + 1 == topics && topics > 1 { 0.0 } else { 3.0 })
        .collect()
}

/// Parameters for a complete synthetic world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub vocab_size: usize,
    pub dim: usize,
    pub noise_sigma: f64,
    pub reserve_per_topic: usize,
    pub field_strengths: Vec<f64>,
    pub corpus: CorpusSpec,
    pub src_lang: String,
    pub tgt_lang: String,
    pub seed: u64,
}

impl SynthConfig {
    /// The clustering fixture: three topics, 100 documents per topic and
    /// language, 200 tokens each, over 600-word 20-dimensional models.
    pub fn new(seed: u64) -> Self {
        let corpus = CorpusSpec::default();
        Self {
            vocab_size: 600,
            dim: 20,
            noise_sigma: 1.0,
            reserve_per_topic: 20,
            field_strengths: default_field_strengths(corpus.topics),
            corpus,
            src_lang: "uk".into(),
            tgt_lang: "ru".into(),
            seed,
        }
    }

    pub fn layout(&self) -> TopicLayout {
        TopicLayout {
            topics: self.corpus.topics,
            vocab_per_topic: self.corpus.vocab_per_topic,
            shared_noise_vocab: self.corpus.shared_noise_vocab,
            reserve_per_topic: self.reserve_per_topic,
            field_strengths: self.field_strengths.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthWorld {
    pub models: SyntheticBilingual,
    pub corpus: DocumentSet,
    pub inventory: TargetInventory,
}

pub fn gen_world(cfg: &SynthConfig) -> Result<SynthWorld> {
    let models = gen_topical_embeddings(cfg.vocab_size, cfg.dim, cfg.noise_sigma, &cfg.layout(), cfg.seed)?;
    let corpus = gen_topic_corpus(&models.lexicon, &cfg.corpus, &cfg.src_lang, &cfg.tgt_lang, cfg.seed)?;
    let inventory = gen_inventory(&models.tgt, &corpus, &cfg.tgt_lang)?;
    Ok(SynthWorld {
        models,
        corpus,
        inventory,
    })
}

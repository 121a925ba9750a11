use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embeddings::EmbeddingModel;
use crate::error::{Error, Result};

/// Ordered bilingual dictionary of `(source, target)` word pairs.
///
/// Exact duplicate pairs are dropped (first occurrence kept); a source word
/// may still map to several targets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    pairs: Vec<(String, String)>,
}

impl Lexicon {
    pub fn new<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (s, t) in pairs {
            let (s, t) = (s.into(), t.into());
            if s.is_empty() || t.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "empty lexicon member in ({s:?}, {t:?})"
                )));
            }
            if seen.insert((s.clone(), t.clone())) {
                out.push((s, t));
            }
        }
        Ok(Self { pairs: out })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses `src<TAB>tgt` lines; `#` comment lines and blank lines are skipped.
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(t), None) if !s.is_empty() && !t.is_empty() => pairs.push((s.to_owned(), t.to_owned())),
                _ => {
                    return Err(Error::format(
                        context,
                        i + 1,
                        format!("expected \"src<TAB>tgt\", found {line:?}"),
                    ))
                }
            }
        }
        Self::new(pairs)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("write to Vec");
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn write_tsv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for (s, t) in &self.pairs {
            writeln!(out, "{s}\t{t}")?;
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs whose source word is in `src` and target word is in `tgt`.
    pub fn filter_in_vocab(&self, src: &EmbeddingModel, tgt: &EmbeddingModel) -> Lexicon {
        Lexicon {
            pairs: self
                .pairs
                .iter()
                .filter(|(s, t)| src.contains(s) && tgt.contains(t))
                .cloned()
                .collect(),
        }
    }

    /// Target words grouped by source word, in order of first appearance.
    pub fn grouped(&self) -> Vec<(&str, Vec<&str>)> {
        let mut slot: HashMap<&str, usize> = HashMap::new();
        let mut groups: Vec<(&str, Vec<&str>)> = Vec::new();
        for (s, t) in &self.pairs {
            match slot.get(s.as_str()) {
                Some(&i) => groups[i].1.push(t),
                None => {
                    slot.insert(s, groups.len());
                    groups.push((s, vec![t]));
                }
            }
        }
        groups
    }

    /// First-listed target for each source word.
    pub fn first_targets(&self) -> BTreeMap<&str, &str> {
        let mut map = BTreeMap::new();
        for (s, t) in &self.pairs {
            map.entry(s.as_str()).or_insert(t.as_str());
        }
        map
    }

    /// Seeded shuffle, then the first `train` pairs form the training split
    /// and the next `test` pairs the test split. Each split keeps lexicon order.
    pub fn split(&self, train: usize, test: usize, seed: u64) -> Result<(Lexicon, Lexicon)> {
        if train + test > self.len() {
            return Err(Error::InvalidArgument(format!(
                "split {train}+{test} exceeds {} available pairs",
                self.len()
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pick = |idx: &[usize]| {
            let mut idx = idx.to_vec();
            idx.sort_unstable();
            Lexicon {
                pairs: idx.into_iter().map(|i| self.pairs[i].clone()).collect(),
            }
        };
        Ok((pick(&order[..train]), pick(&order[train..train + test])))
    }
}

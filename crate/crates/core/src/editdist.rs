//! Orthographic "quasi-translation" baselines built on Damerau-Levenshtein
//! (optimal string alignment) distance.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{split_pos, Document, DocumentSet};
use crate::error::{Error, Result};
use crate::mapping::Lexicon;

/// OSA distance over Unicode scalar values: unit-cost insertion, deletion,
/// substitution and adjacent transposition, no substring edited twice.
pub fn dl_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    osa(&a, &b)
}

fn osa(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    // three rolling rows: i-2, i-1, i
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(prev2[j - 2] + 1);
            }
            cur[j] = d;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryEntry {
    /// Lemma without the PoS suffix.
    pub word: String,
    pub pos: String,
    pub freq: u64,
}

impl InventoryEntry {
    /// The entry as a `lemma_POS` token.
    pub fn token(&self) -> String {
        format!("{}_{}", self.word, self.pos)
    }
}

/// Candidate target words with corpus frequencies, grouped by PoS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetInventory {
    entries: Vec<InventoryEntry>,
    chars: Vec<Vec<char>>,
    by_pos: HashMap<String, Vec<usize>>,
}

impl TargetInventory {
    pub fn new(entries: Vec<InventoryEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut by_pos: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.word.is_empty() {
                return Err(Error::InvalidArgument("empty inventory word".into()));
            }
            if e.freq == 0 {
                return Err(Error::InvalidArgument(format!(
                    "inventory word {:?} has zero frequency",
                    e.word
                )));
            }
            if !seen.insert((e.word.as_str(), e.pos.as_str())) {
                return Err(Error::DuplicateWord(e.token()));
            }
            by_pos.entry(e.pos.clone()).or_default().push(i);
        }
        let chars = entries.iter().map(|e| e.word.chars().collect()).collect();
        Ok(Self { entries, chars, by_pos })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses `word<TAB>pos<TAB>freq` lines; `#` comments and blank lines are skipped.
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || {
                Error::format(
                    context,
                    i + 1,
                    format!("expected \"word<TAB>pos<TAB>freq\", found {line:?}"),
                )
            };
            let [word, pos, freq] = fields[..] else {
                return Err(bad());
            };
            let freq: u64 = freq.parse().map_err(|_| bad())?;
            if word.is_empty() || freq == 0 {
                return Err(bad());
            }
            entries.push(InventoryEntry {
                word: word.to_owned(),
                pos: pos.to_owned(),
                freq,
            });
        }
        Self::new(entries)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("write to Vec");
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn write_tsv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for e in &self.entries {
            writeln!(out, "{}\t{}\t{}", e.word, e.pos, e.freq)?;
        }
        Ok(())
    }

    pub fn entries(&self) -> &[InventoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub word: String,
    pub pos: String,
    pub distance: usize,
    pub freq: u64,
}

impl Candidate {
    pub fn token(&self) -> String {
        format!("{}_{}", self.word, self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuasiTranslation {
    /// Best candidates first, at most `k`.
    Ranked(Vec<Candidate>),
    /// The inventory has no word with the token's PoS.
    Untranslatable,
}

impl QuasiTranslation {
    pub fn best(&self) -> Option<&Candidate> {
        match self {
            Self::Ranked(c) => c.first(),
            Self::Untranslatable => None,
        }
    }
}

/// Ranks same-PoS inventory words by (distance asc, frequency desc, word asc)
/// against the lemma of `token`.
pub fn quasi_translate(token: &str, inventory: &TargetInventory, k: usize) -> QuasiTranslation {
    let (lemma, pos) = split_pos(token);
    let pos = pos.unwrap_or("");
    let Some(idx) = inventory.by_pos.get(pos) else {
        return QuasiTranslation::Untranslatable;
    };
    let lemma: Vec<char> = lemma.chars().collect();
    let mut scored: Vec<(usize, usize)> = idx.iter().map(|&i| (osa(&lemma, &inventory.chars[i]), i)).collect();
    let entries = &inventory.entries;
    let cmp = |a: &(usize, usize), b: &(usize, usize)| -> Ordering {
        a.0.cmp(&b.0)
            .then_with(|| entries[b.1].freq.cmp(&entries[a.1].freq))
            .then_with(|| entries[a.1].word.cmp(&entries[b.1].word))
    };
    let k = k.max(1);
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, cmp);
        scored.truncate(k);
    }
    scored.sort_unstable_by(cmp);
    QuasiTranslation::Ranked(
        scored
            .into_iter()
            .map(|(distance, i)| Candidate {
                word: entries[i].word.clone(),
                pos: entries[i].pos.clone(),
                distance,
                freq: entries[i].freq,
            })
            .collect(),
    )
}

fn wants_replacement(token: &str, replace_pos: &HashSet<String>) -> bool {
    split_pos(token).1.is_some_and(|p| replace_pos.contains(p))
}

/// Rewrites every document token with `rewrite`, computed once per distinct token.
fn rewrite_tokens<F>(docs: &DocumentSet, rewrite: F) -> DocumentSet
where
    F: Fn(&str) -> Option<String> + Sync,
{
    let distinct: BTreeSet<&str> = docs.iter().flat_map(|d| d.tokens.iter().map(String::as_str)).collect();
    let table: HashMap<&str, String> = distinct
        .into_par_iter()
        .filter_map(|t| rewrite(t).map(|r| (t, r)))
        .collect();
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
    DocumentSet::new(out).expect("ids unchanged")
}

/// Replaces each token whose PoS is in `replace_pos` with its best
/// quasi-translation. Untranslatable tokens are kept verbatim.
pub fn translate_corpus_edit(
    docs: &DocumentSet,
    inventory: &TargetInventory,
    replace_pos: &HashSet<String>,
) -> DocumentSet {
    rewrite_tokens(docs, |t| {
        if !wants_replacement(t, replace_pos) {
            return None;
        }
        quasi_translate(t, inventory, 1).best().map(Candidate::token)
    })
}

/// Dictionary lookup first (first-listed target wins), then edit distance for
/// the remaining tokens whose PoS is in `replace_pos`.
pub fn translate_corpus_hybrid(
    docs: &DocumentSet,
    lexicon: &Lexicon,
    inventory: &TargetInventory,
    replace_pos: &HashSet<String>,
) -> DocumentSet {
    let dictionary = lexicon.first_targets();
    rewrite_tokens(docs, |t| {
        if let Some(&target) = dictionary.get(t) {
            return Some(target.to_owned());
        }
        if !wants_replacement(t, replace_pos) {
            return None;
        }
        quasi_translate(t, inventory, 1).best().map(Candidate::token)
    })
}

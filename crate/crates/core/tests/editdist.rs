mod common;

use std::collections::HashSet;

use common::{all_strings, osa_recursive};
use proptest::prelude::*;
use rand::Rng;
use xlingmap::corpus::split_pos;
use xlingmap::editdist::{dl_distance, quasi_translate, translate_corpus_hybrid, InventoryEntry};
use xlingmap::synth::gen_bilingual_embeddings;
use xlingmap::{Document, DocumentSet, Lexicon, QuasiTranslation, TargetInventory};

fn inventory(rows: &[(&str, &str, u64)]) -> TargetInventory {
    TargetInventory::new(
        rows.iter()
            .map(|&(w, p, f)| InventoryEntry {
                word: w.into(),
                pos: p.into(),
                freq: f,
            })
            .collect(),
    )
    .unwrap()
}

/// Best same-PoS entry by (distance, -freq, word), straight from the definition.
fn brute_best<'a>(token: &str, entries: &'a [InventoryEntry]) -> Option<&'a InventoryEntry> {
    let (lemma, pos) = split_pos(token);
    entries.iter().filter(|e| Some(e.pos.as_str()) == pos).min_by(|a, b| {
        (osa_recursive(lemma, &a.word), std::cmp::Reverse(a.freq), &a.word).cmp(&(
            osa_recursive(lemma, &b.word),
            std::cmp::Reverse(b.freq),
            &b.word,
        ))
    })
}

#[test]
fn exhaustive_short_strings_match_recursive_definition() {
    let all = all_strings(&['a', 'b', 'c'], 5);
    // every pair up to length 3, and every length-4/5 string against a sample
    let short: Vec<&String> = all.iter().filter(|s| s.len() <= 3).collect();
    for a in &short {
        for b in &short {
            assert_eq!(dl_distance(a, b), osa_recursive(a, b), "{a} {b}");
        }
    }
    for (i, a) in all.iter().enumerate() {
        for b in all.iter().skip(i % 7).step_by(7) {
            assert_eq!(dl_distance(a, b), osa_recursive(a, b), "{a} {b}");
        }
    }
}

#[test]
fn random_cyrillic_pairs_match_recursive_definition() {
    let alphabet: Vec<char> = "абвгдеєжзиіїйклмнопрстуфхцчшщьюя".chars().collect();
    let mut r = common::rng(4);
    let word = |r: &mut rand_chacha::ChaCha8Rng| -> String {
        let n = r.random_range(0..=8);
        (0..n).map(|_| alphabet[r.random_range(0..alphabet.len())]).collect()
    };
    for _ in 0..1000 {
        let a = word(&mut r);
        let b = word(&mut r);
        assert_eq!(dl_distance(&a, &b), osa_recursive(&a, &b));
    }
}

#[test]
fn ranking_matches_brute_force() {
    let inv = inventory(&[
        ("закон", "S", 5),
        ("закан", "S", 9),
        ("вокон", "S", 9),
        ("законы", "S", 1),
        ("право", "S", 3),
        ("закон", "V", 2),
    ]);
    for token in ["закон_S", "закин_S", "правo_S", "зкаон_S", "ззакон_S", "закон_V", "x_S"]
    {
        let got = quasi_translate(token, &inv, 1);
        let want = brute_best(token, inv.entries()).unwrap();
        let best = got.best().unwrap();
        assert_eq!((&best.word, &best.pos), (&want.word, &want.pos), "{token}");
    }
    assert_eq!(quasi_translate("закон_ADV", &inv, 3), QuasiTranslation::Untranslatable);
    let ranked = match quasi_translate("закин_S", &inv, 10) {
        QuasiTranslation::Ranked(c) => c,
        QuasiTranslation::Untranslatable => unreachable!(),
    };
    assert_eq!(ranked.len(), 5);
    assert!(ranked
        .windows(2)
        .all(|w| (w[0].distance, std::cmp::Reverse(w[0].freq)) <= (w[1].distance, std::cmp::Reverse(w[1].freq))));
}

#[test]
fn single_edits_of_synthetic_forms_are_restored() {
    let world = gen_bilingual_embeddings(600, 4, 0.0, 12).unwrap();
    let entries: Vec<InventoryEntry> = world
        .tgt
        .words()
        .iter()
        .map(|w| {
            let (lemma, pos) = split_pos(w);
            InventoryEntry {
                word: lemma.into(),
                pos: pos.unwrap().into(),
                freq: 1,
            }
        })
        .collect();
    let inv = TargetInventory::new(entries.clone()).unwrap();
    let alphabet: Vec<char> = "абвгдеєжзиіїйклмнопрстуфхцчшщьюя".chars().collect();
    let mut r = common::rng(99);
    let mut restored = 0;
    for e in &entries {
        let mut chars: Vec<char> = e.word.chars().collect();
        let at = r.random_range(0..chars.len());
        let replacement = loop {
            let c = alphabet[r.random_range(0..alphabet.len())];
            if c != chars[at] {
                break c;
            }
        };
        chars[at] = replacement;
        let token = format!("{}_{}", chars.iter().collect::<String>(), e.pos);
        if quasi_translate(&token, &inv, 1)
            .best()
            .is_some_and(|c| c.word == e.word)
        {
            restored += 1;
        }
    }
    let rate = restored as f64 / entries.len() as f64;
    assert!(rate >= 0.95, "restored {rate}");
}

#[test]
fn hybrid_is_dictionary_then_edit() {
    let inv = inventory(&[("суд", "S", 4), ("право", "S", 7), ("новый", "A", 2)]);
    let lexicon = Lexicon::new([("закон_S", "право_S"), ("закон_S", "суд_S")]).unwrap();
    let docs = DocumentSet::new(vec![Document {
        id: "d".into(),
        lang: "uk".into(),
        tokens: ["закон_S", "суд_S", "нові_A", "і_CONJ", "сад_S"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        topic: None,
    }])
    .unwrap();
    let replace: HashSet<String> = ["S", "A"].iter().map(|s| s.to_string()).collect();
    let out = translate_corpus_hybrid(&docs, &lexicon, &inv, &replace);
    let oracle: Vec<String> = docs.docs()[0]
        .tokens
        .iter()
        .map(|t| {
            if let Some((_, target)) = lexicon.pairs().iter().find(|(s, _)| s == t) {
                return target.clone();
            }
            match split_pos(t).1 {
                Some(p) if replace.contains(p) => {
                    brute_best(t, inv.entries()).map_or(t.clone(), |e| format!("{}_{}", e.word, e.pos))
                }
                _ => t.clone(),
            }
        })
        .collect();
    assert_eq!(out.docs()[0].tokens, oracle);
    assert_eq!(oracle, ["право_S", "суд_S", "новый_A", "і_CONJ", "суд_S"]);
}

proptest! {
    #[test]
    fn distance_is_a_symmetric_premetric(a in "[abcд]{0,7}", b in "[abcд]{0,7}") {
        let d = dl_distance(&a, &b);
        prop_assert_eq!(d, dl_distance(&b, &a));
        prop_assert_eq!(d == 0, a == b);
        prop_assert!(d <= a.chars().count().max(b.chars().count()));
        prop_assert!(d >= a.chars().count().abs_diff(b.chars().count()));
    }

    #[test]
    fn matches_recursive_oracle(a in "[ab]{0,8}", b in "[ab]{0,8}") {
        prop_assert_eq!(dl_distance(&a, &b), osa_recursive(&a, &b));
    }
}

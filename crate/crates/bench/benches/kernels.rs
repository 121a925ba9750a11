use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use xlingmap::editdist::{dl_distance, quasi_translate};
use xlingmap::fingerprint::fingerprint_corpus;
use xlingmap::mapping::learn_transform;
use xlingmap::pipeline::{learn_map, LearnMapConfig};
use xlingmap::{kmeans, FingerprintMode, KMeansParams};
use xlingmap_bench::{bilingual, training_pairs, world};

fn solve(c: &mut Criterion) {
    let pm = training_pairs(5000, 100);
    c.bench_function("learn_transform 5000x101 -> 100", |b| {
        b.iter(|| learn_transform(black_box(&pm), 0.5).unwrap())
    });
}

fn nearest(c: &mut Criterion) {
    let m = bilingual(20_000, 300);
    let q = m.src.row(17).to_vec();
    c.bench_function("nearest k=5 over 20000x300", |b| {
        b.iter(|| m.tgt.nearest(black_box(&q), 5, None).unwrap())
    });
}

fn edit(c: &mut Criterion) {
    c.bench_function("dl_distance 12 chars", |b| {
        b.iter(|| dl_distance(black_box("дисертаційний"), black_box("диссертационный")))
    });
    let w = world();
    let token = w.models.src.words()[3].clone();
    c.bench_function("quasi_translate over 600 entries", |b| {
        b.iter(|| quasi_translate(black_box(&token), &w.inventory, 1))
    });
}

fn cluster(c: &mut Criterion) {
    let w = world();
    let m = &w.models;
    let cfg = LearnMapConfig {
        train: 500,
        test: 100,
        seed: 1,
        ..LearnMapConfig::default()
    };
    let (t, _) = learn_map(&m.src, &m.tgt, &m.lexicon, &cfg).unwrap();
    let fm = fingerprint_corpus(&w.corpus, &m.src, &m.tgt, &t, "uk", "ru", FingerprintMode::Tokens).unwrap();
    c.bench_function("fingerprint_corpus 600 docs", |b| {
        b.iter(|| {
            fingerprint_corpus(
                black_box(&w.corpus),
                &m.src,
                &m.tgt,
                &t,
                "uk",
                "ru",
                FingerprintMode::Tokens,
            )
            .unwrap()
        })
    });
    c.bench_function("kmeans k=3 over 600x20", |b| {
        b.iter(|| kmeans(black_box(fm.matrix.view()), &KMeansParams::new(3, 1)).unwrap())
    });
}

criterion_group!(benches, solve, nearest, edit, cluster);
criterion_main!(benches);

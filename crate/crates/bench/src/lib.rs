//! Fixture builders shared by the benchmarks.

use xlingmap::synth::{gen_bilingual_embeddings, gen_world, SynthConfig, SynthWorld, SyntheticBilingual};
use xlingmap::PairedMatrices;

/// Bilingual models of `vocab` words in `d` dimensions with mild noise.
pub fn bilingual(vocab: usize, d: usize) -> SyntheticBilingual {
    gen_bilingual_embeddings(vocab, d, 0.1, 7).expect("valid fixture")
}

/// Regression problem over every lexicon pair of [`bilingual`].
pub fn training_pairs(vocab: usize, d: usize) -> PairedMatrices {
    let b = bilingual(vocab, d);
    xlingmap::mapping::build_training_pairs(&b.lexicon, &b.src, &b.tgt).expect("enough pairs")
}

/// The default three-topic clustering world.
pub fn world() -> SynthWorld {
    gen_world(&SynthConfig::new(1)).expect("valid fixture")
}

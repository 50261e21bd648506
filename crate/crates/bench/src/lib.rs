//! Shared fixtures for the benchmarks.

use nea_core::sampling::seeded_rng;
use nea_core::Corpus;
use rand::Rng;

/// `docs` documents of `len` tokens, each drawn from one of `blocks` equal
/// vocabulary blocks over `words` words.
pub fn block_corpus(docs: usize, len: usize, words: usize, blocks: usize, seed: u64) -> Corpus {
    let mut rng = seeded_rng(seed);
    let width = words / blocks;
    let docs = (0..docs)
        .map(|_| {
            let b = rng.random_range(0..blocks);
            (0..len).map(|_| b * width + rng.random_range(0..width)).collect()
        })
        .collect();
    Corpus::from_token_ids(words, docs).expect("ids are in range")
}

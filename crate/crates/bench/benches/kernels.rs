use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nea_bench::block_corpus;
use nea_core::eval::{top_words, DocIndex};
use nea_core::nea::neg_update_with;
use nea_core::sampling::{seeded_rng, AliasTable};
use nea_core::topic_models::{train_lda, SamplerConfig};
use nea_core::EmbeddingSet;
use rand::Rng;

fn gibbs_sweep(c: &mut Criterion) {
    let corpus = block_corpus(200, 100, 1000, 10, 1);
    let mut group = c.benchmark_group("lda");
    group.sample_size(20);
    for k in [10, 100] {
        let config = SamplerConfig::new(k, 1);
        group.bench_function(format!("sweep_20k_tokens_k{k}"), |b| {
            b.iter(|| train_lda(black_box(&corpus), &config, 1).unwrap())
        });
    }
    group.finish();
}

fn neg_step(c: &mut Criterion) {
    let mut rng = seeded_rng(2);
    for dim in [50, 300] {
        let mut emb = EmbeddingSet::random_init(100, 1000, dim, "topic", "word", &mut rng);
        let negatives: Vec<usize> = (0..5).map(|_| rng.random_range(0..1000)).collect();
        c.bench_function(&format!("neg_step_dim{dim}_k5"), |b| {
            b.iter(|| neg_update_with(&mut emb, black_box(3), black_box(7), &negatives, 1e-4).unwrap())
        });
    }
}

fn alias(c: &mut Criterion) {
    let mut rng = seeded_rng(3);
    let weights: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
    c.bench_function("alias_build_10k", |b| b.iter(|| AliasTable::new(black_box(&weights)).unwrap()));
    let table = AliasTable::new(&weights).unwrap();
    c.bench_function("alias_draw", |b| b.iter(|| table.sample(&mut rng)));
}

fn umass(c: &mut Criterion) {
    let corpus = block_corpus(2000, 100, 5000, 20, 4);
    let index = DocIndex::from_corpus(&corpus);
    let mut rng = seeded_rng(5);
    c.bench_function("umass_top10", |b| {
        b.iter_batched(
            || {
                let row: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
                top_words(&row, 10)
            },
            |top| index.umass(&top).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, gibbs_sweep, neg_step, alias, umass);
criterion_main!(benches);

//! Cost of a single gradient evaluation and of a short bounded training run.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use termweight::corpus::{build_corpus, Stopwords};
use termweight::ltw::{self, LtwConfig, LtwVariant, OutputHead};
use termweight::stats::TermStats;
use termweight::toy;

fn batch_gradients(c: &mut Criterion) {
    let docs = toy::generate(200, 5).unwrap();
    let corpus = build_corpus(&docs, &Stopwords::none()).unwrap();
    let task = corpus.binary_task(toy::classes()[0]);
    let stats = TermStats::compute(&corpus, &task).unwrap();
    let rows: Vec<usize> = (0..corpus.n_docs().min(100)).collect();
    let y: Vec<bool> = rows.iter().map(|&i| task.y[i]).collect();

    let mut group = c.benchmark_group("batch_gradients");
    for (label, variant) in [
        ("local_sigmoid", LtwVariant::Local),
        ("global_sigmoid", LtwVariant::Global),
    ] {
        let mut cfg = LtwConfig::new(variant, OutputHead::Sigmoid);
        cfg.hidden_local = 100;
        cfg.hidden_global_cap = 64;
        let model = ltw::LtwModel::new(cfg, &stats, 0).unwrap();
        group.bench_function(label, |b| {
            b.iter(|| ltw::batch_gradients(black_box(&model), &corpus, &rows, &y).unwrap())
        });
    }
    group.finish();
}

fn short_training_run(c: &mut Criterion) {
    let docs = toy::generate(80, 6).unwrap();
    let corpus = build_corpus(&docs, &Stopwords::none()).unwrap();
    let task = corpus.binary_task(toy::classes()[0]);

    let mut cfg = LtwConfig::new(LtwVariant::Local, OutputHead::Identity);
    cfg.hidden_local = 32;
    cfg.batch_size = 16;
    cfg.max_steps = 60;
    cfg.validation_every = 30;
    cfg.patience = 100; // never triggers within the step budget

    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    group.bench_function("local_identity_60_steps", |b| {
        b.iter(|| ltw::train(black_box(cfg.clone()), &corpus, &task).unwrap())
    });
    group.finish();
}

criterion_group!(benches, batch_gradients, short_training_run);
criterion_main!(benches);

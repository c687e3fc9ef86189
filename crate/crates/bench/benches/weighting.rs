//! Throughput of corpus weighting across representative schemes.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use termweight::corpus::{build_corpus, Stopwords};
use termweight::toy;
use termweight::weighting::{CorpusStats, WeightingScheme};

fn weigh_corpus(c: &mut Criterion) {
    let docs = toy::generate(400, 7).unwrap();
    let corpus = build_corpus(&docs, &Stopwords::none()).unwrap();
    let task = corpus.binary_task(toy::classes()[0]);
    let stats = CorpusStats::supervised(&corpus, &task).unwrap();

    let mut group = c.benchmark_group("weigh_corpus");
    for name in ["Binary", "LogTFIDF", "BM25", "TFRF"] {
        let scheme = WeightingScheme::from_name(name).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| {
                scheme
                    .weigh_corpus(black_box(&corpus), black_box(&stats))
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, weigh_corpus);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use std::hint::black_box;

use probstream::sketches::{F0Sketch, F2Sketch, GkSummary};

const UPDATES: u64 = 10_000;

fn sketch_updates(c: &mut Criterion) {
    let mut group = c.benchmark_group("sketch_updates");
    group.throughput(Throughput::Elements(UPDATES));
    group.bench_function("f0_sampling", |b| {
        b.iter(|| {
            let mut sk = F0Sketch::new(0.2, 0.1, 1 << 30, 7).unwrap();
            for j in 1..=UPDATES {
                sk.insert(black_box(j * 7919 % (1 << 30) + 1)).unwrap();
            }
            sk.estimate()
        })
    });
    group.bench_function("f2", |b| {
        let mut sk = F2Sketch::new(0.5, 0.2, 1 << 20, 7).unwrap();
        b.iter(|| {
            for j in 1..=UPDATES {
                sk.update(black_box(j % 1000 + 1), 0.5).unwrap();
            }
        })
    });
    group.bench_function("gk", |b| {
        b.iter(|| {
            let mut gk = GkSummary::new(0.01, 1 << 20).unwrap();
            for j in 1..=UPDATES {
                gk.insert(black_box(j * 7919 % (1 << 20) + 1)).unwrap();
            }
            gk.query(UPDATES / 2).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, sketch_updates);
criterion_main!(benches);

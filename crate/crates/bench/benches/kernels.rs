use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use varieties_core::rankcert::{RankOneTable, RankTable, DEFAULT_NODE_BUDGET};
use varieties_core::{MultilinearForm, UnitriMatrix, UtParams};

fn unitri(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (p, m) in [(3u32, 2usize), (5, 2)] {
        let params = UtParams::lemma(p, m).unwrap();
        let a = UnitriMatrix::random(params, &mut rng);
        let b = UnitriMatrix::random(params, &mut rng);
        c.bench_function(&format!("ut multiply p={p} m={m}"), |bench| {
            bench.iter(|| black_box(&a).multiply(black_box(&b)))
        });
        c.bench_function(&format!("ut pth power fast p={p} m={m}"), |bench| {
            bench.iter(|| black_box(&a).pth_power_fast())
        });
        c.bench_function(&format!("ut pth power repeated p={p} m={m}"), |bench| {
            bench.iter(|| black_box(&a).power(p as u64))
        });
        c.bench_function(&format!("ut inverse p={p} m={m}"), |bench| bench.iter(|| black_box(&a).inverse()));
    }
}

fn rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank");
    group.sample_size(10);
    group.bench_function("classify p=3 t=3 d=2", |bench| bench.iter(|| RankTable::classify(3, 3, 2).unwrap()));
    let table = RankOneTable::new(3, 3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    group.bench_function("sum search r=2 random form", |bench| {
        bench.iter_batched(
            || MultilinearForm::random(3, 3, 2, &mut rng),
            |f| table.sum_search(&f, 2, DEFAULT_NODE_BUDGET).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let w = MultilinearForm::new(3, 3, 2, vec![0, 1, 1, 0, 1, 0, 0, 0]).unwrap();
    group.bench_function("sum search r=2 rank-3 form", |bench| {
        bench.iter(|| table.sum_search(black_box(&w), 2, DEFAULT_NODE_BUDGET).unwrap())
    });
    group.finish();
}

criterion_group!(benches, unitri, rank);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use den_bench::{EpochState, Fixture};
use den_core::check_embedding;
use den_core::graph::{generate_instance, GeneratorConfig};
use den_core::init::{fruchterman_reingold, FrConfig};

const SIZES: [usize; 3] = [10, 50, 100];

fn epoch(c: &mut Criterion) {
    let mut group = c.benchmark_group("epoch");
    for n in SIZES {
        let fixture = Fixture::new(n, 2, 7);
        let mut state = EpochState::new(&fixture);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| black_box(state.step())));
    }
    group.finish();
}

fn feasibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_embedding");
    for n in SIZES {
        let fixture = Fixture::new(n, 2, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &fixture, |b, f| {
            b.iter(|| check_embedding(&f.graph, black_box(&f.start), &f.params).unwrap())
        });
    }
    group.finish();
}

fn layout(c: &mut Criterion) {
    let mut group = c.benchmark_group("fruchterman_reingold");
    group.sample_size(10);
    for n in [10, 50] {
        let fixture = Fixture::new(n, 2, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &fixture, |b, f| {
            b.iter(|| fruchterman_reingold(&f.graph, &FrConfig::new(2, 1), f.params.l).unwrap())
        });
    }
    group.finish();
}

fn generator(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_instance");
    for n in SIZES {
        let mut seed = 0;
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| {
                seed += 1;
                generate_instance(&GeneratorConfig::for_size(n, seed)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, epoch, feasibility, layout, generator);
criterion_main!(benches);

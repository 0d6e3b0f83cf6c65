use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

use nipgraph::graph::{build, GraphSpec};
use nipgraph::mask::{compile, Pattern};
use nipgraph::nip::{expected_nip, ip_random_walk_with};
use nipgraph::topology::{Topology, TopologyParams};
use nipgraph::verify::duality_suite;
use nipgraph::{Exec, Family};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn all_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_pairs_distances");
    for n in [256usize, 1024] {
        let spec = GraphSpec::new(Family::Hypercube, n);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                // Distances are cached per graph, so each sample gets a fresh one.
                b.iter_batched(
                    || build(&spec).unwrap(),
                    |g| black_box(g.distances_with(exec).max()),
                    BatchSize::SmallInput,
                )
            });
        }
    }
    group.finish();
}

fn walk(c: &mut Criterion) {
    let mut group = c.benchmark_group("ip_random_walk");
    group.sample_size(10);
    let g = build(&GraphSpec::new(Family::Hypercube, 1024)).unwrap();
    g.distances();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "hypercube-1024"), |b| {
            b.iter(|| black_box(ip_random_walk_with(&g, exec).unwrap()))
        });
    }
    group.finish();
}

fn expected(c: &mut Criterion) {
    let mut group = c.benchmark_group("expected_nip");
    group.sample_size(10);
    let spec = Topology::BigBird.spec(256, &TopologyParams::default());
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "bigbird-256x8"), |b| {
            b.iter(|| black_box(expected_nip(&spec, 8, true, exec).unwrap()))
        });
    }
    group.finish();
}

fn seed_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("mask_seed_sweep");
    let seeds: Vec<u64> = (0..100).collect();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "bigbird-1024x100"), |b| {
            b.iter(|| {
                let counts = exec.map_slice(&seeds, |&s| {
                    compile(Pattern::BigBird, 1024, 16, s).unwrap().count_blocks()
                });
                black_box(counts)
            })
        });
    }
    group.finish();
}

fn duality(c: &mut Criterion) {
    let mut group = c.benchmark_group("duality_suite");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "max-n-32"), |b| {
            b.iter(|| black_box(duality_suite(32, 0, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, all_pairs, walk, expected, seed_sweep, duality);
criterion_main!(benches);

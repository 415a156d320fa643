//! Compares the parallel fan-out against the always-sequential baseline on
//! representative workloads.  Build with `--features parallel` (default) to
//! measure rayon, or `--no-default-features` to pin both sides to one thread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use symc::linalg::{random_matrix, SeedMixer};
use symc::par::{is_parallel, par_map, seq_map};

fn rank_workload(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_rank_batch");
    let label = if is_parallel() { "parallel" } else { "sequential-fallback" };
    for &batch in &[8usize, 32] {
        let matrices: Vec<_> = (0..batch)
            .map(|i| {
                let mut rng = SeedMixer::new(7).with(i as u64).rng();
                random_matrix(&mut rng, 24, 24, 8)
            })
            .collect();
        group.bench_with_input(
            BenchmarkId::new(label, batch),
            &matrices,
            |b, ms| {
                b.iter(|| {
                    let ranks = par_map(ms.clone(), |m| m.rank());
                    criterion::black_box(ranks)
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("sequential-baseline", batch),
            &matrices,
            |b, ms| {
                b.iter(|| {
                    let ranks = seq_map(ms.clone(), |m| m.rank());
                    criterion::black_box(ranks)
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, rank_workload);
criterion_main!(benches);

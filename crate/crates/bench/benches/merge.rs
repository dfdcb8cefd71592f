use adfg_bench::{department_pair, grouped_log};
use adfg_core::{discover, merge_pair, min_fvs, Digraph, MergeMode, PipelineConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn merge_only(c: &mut Criterion) {
    let mut group = c.benchmark_group("merge_pair");
    for n in [40, 120] {
        let (m1, m2) = department_pair(10, n);
        for mode in [MergeMode::Naive, MergeMode::Accurate] {
            group.bench_with_input(BenchmarkId::new(mode.to_string(), n), &(&m1, &m2), |b, (m1, m2)| {
                b.iter(|| merge_pair(black_box(m1), black_box(m2), mode, 1_000_000).expect("acyclic inputs"))
            });
        }
    }
    group.finish();
}

fn full_discovery(c: &mut Criterion) {
    let log = grouped_log(11);
    c.bench_function("discover/grouped", |b| {
        b.iter(|| discover(black_box(&log), None, &PipelineConfig::default()).expect("acyclic log"))
    });
}

fn feedback_vertex_set(c: &mut Criterion) {
    // Two interleaved rings with chords.
    let n = 30;
    let g = Digraph::from_arcs(n, (0..n).flat_map(|i| [(i, (i + 1) % n), (i, (i + 7) % n)]));
    c.bench_function("min_fvs/ring30", |b| b.iter(|| min_fvs(black_box(&g), 1_000_000)));
}

criterion_group!(benches, merge_only, full_discovery, feedback_vertex_set);
criterion_main!(benches);

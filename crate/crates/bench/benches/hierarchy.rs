use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use delone_core::lattice::Point;
use delone_core::nonrect::{BuildConfig, BuildMode, ToyParams};
use delone_core::ue::build_ue_spec;
use delone_core::{OccurrenceMode, Patch};

fn counting(c: &mut Criterion) {
    let spec = build_ue_spec(3, ToyParams::default()).unwrap().spec;
    let top = spec.depth();
    let needle = Patch::full(3, 3, Point::new(0, 0));
    c.bench_function("sliding count, mixing depth 3", |b| {
        b.iter(|| spec.count_occurrences(black_box(&needle), top, 0, OccurrenceMode::Sliding).unwrap())
    });
    c.bench_function("block frequency matrix 1 -> top", |b| b.iter(|| spec.block_frequency_matrix(1, black_box(top)).unwrap()));
    c.bench_function("materialize level 5", |b| b.iter(|| spec.materialize(black_box(5), 0).unwrap()));
}

fn building(c: &mut Criterion) {
    let cfg = BuildConfig { depth: 3, mode: BuildMode::Toy(ToyParams::default()), ..BuildConfig::default() };
    c.bench_function("alternating build, 3 stages", |b| b.iter(|| black_box(&cfg).build().unwrap()));
}

criterion_group!(benches, counting, building);
criterion_main!(benches);

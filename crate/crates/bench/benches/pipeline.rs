use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dscubic_core::counterexample::{counterexample_edge, fixture_edge};
use dscubic_core::{
    build_from_mesh, check_complex, ds_refine, g1_necessary_test, make_tetrahedron,
    normal_jump_edge, ConstructionConfig, Rational, WeightVariant,
};

fn bench_pipeline(c: &mut Criterion) {
    let tetra = make_tetrahedron(&Rational::from_int(1260)).unwrap();
    let config = ConstructionConfig::default();
    let complex = build_from_mesh(&tetra, &config).unwrap();
    let edge = counterexample_edge(&complex).unwrap();
    let fixture = fixture_edge();

    c.bench_function("refine tetrahedron, two steps", |b| {
        b.iter(|| ds_refine(black_box(&tetra), 2, WeightVariant::Classical).unwrap())
    });
    c.bench_function("construct tetrahedron complex", |b| {
        b.iter(|| build_from_mesh(black_box(&tetra), &config).unwrap())
    });
    c.bench_function("continuity test, one edge", |b| {
        b.iter(|| g1_necessary_test(black_box(&fixture), 0))
    });
    c.bench_function("continuity check, whole complex", |b| {
        b.iter(|| check_complex(black_box(&complex)).unwrap())
    });
    c.bench_function("normal jump, 33 intervals", |b| {
        b.iter(|| normal_jump_edge(black_box(&complex), edge, 33).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);

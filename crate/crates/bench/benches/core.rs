use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use kripke_blend::dejongh::{counting_check, excluded_middle_demo, psi};
use kripke_blend::frames::{enumerate_trees, star};
use kripke_blend::propositional::{axiom, valid_in_frame, AxiomScheme};
use kripke_blend_bench::fork_v3_model;

fn bench_tree_enumeration(c: &mut Criterion) {
    c.bench_function("enumerate_trees(6)", |b| {
        b.iter(|| black_box(enumerate_trees(black_box(6)).len()))
    });
}

fn bench_upsets(c: &mut Criterion) {
    let frames = enumerate_trees(6);
    c.bench_function("upsets over all size<=6 trees", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for f in &frames {
                for v in f.nodes() {
                    total += f.upsets(v).len();
                }
            }
            black_box(total)
        })
    });
}

fn bench_validity_sweep(c: &mut Criterion) {
    let t2 = axiom(AxiomScheme::T(2));
    let frame = star(3);
    c.bench_function("valid_in_frame T(2) on the 3-star", |b| {
        b.iter(|| black_box(valid_in_frame(&frame, &t2, 10_000_000).unwrap().is_valid()))
    });
}

fn bench_blend_construction(c: &mut Criterion) {
    c.bench_function("construct fork V3/V3 rank 3", |b| {
        b.iter(|| black_box(fork_v3_model().domain(0).unwrap().len()))
    });
}

fn bench_psi_forcing(c: &mut Criterion) {
    c.bench_function("counting_check fork V3/V3 rank 3", |b| {
        // fresh model per iteration: the sentence cache would otherwise
        // short-circuit everything after the first run
        b.iter(|| {
            let model = fork_v3_model();
            black_box(counting_check(&model).unwrap().ok())
        })
    });
    c.bench_function("force psi(6) at fork root", |b| {
        let phi = psi(6);
        b.iter(|| {
            let model = fork_v3_model();
            black_box(model.force_sentence(0, &phi).unwrap())
        })
    });
}

fn bench_em_demo(c: &mut Criterion) {
    c.bench_function("excluded_middle_demo lazy rank 4", |b| {
        b.iter(|| black_box(excluded_middle_demo(1_000_000).unwrap().expected_pattern()))
    });
}

criterion_group!(
    benches,
    bench_tree_enumeration,
    bench_upsets,
    bench_validity_sweep,
    bench_blend_construction,
    bench_psi_forcing,
    bench_em_demo
);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use moframe::forms::{verify_structure, Level};
use moframe::frame::solve_point;
use moframe::jet::{sample_point, FJet};
use moframe::parse::parse_expr;

fn pointwise(c: &mut Criterion) {
    let mut g = c.benchmark_group("frame");
    g.sample_size(20);
    for (name, src) in [("flat", "0"), ("q_squared", "q^2"), ("generic", "q*p/(x+1) + u^2")] {
        let fjet = FJet::build(&parse_expr(src).unwrap(), 4).unwrap();
        let pt = sample_point(&fjet, &[], 1).unwrap();
        g.bench_function(name, |b| b.iter(|| solve_point(black_box(&fjet), &pt, 4)));
    }
    g.finish();
}

fn structure(c: &mut Criterion) {
    let mut g = c.benchmark_group("structure");
    g.sample_size(10);
    g.bench_function("horizontal", |b| b.iter(|| verify_structure(Level::Horizontal)));
    g.bench_function("generic_branch", |b| b.iter(|| verify_structure(Level::GenericBranch)));
    g.finish();
}

criterion_group!(frame, pointwise, structure);
criterion_main!(frame);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use moframe::action::{prolonged_action, GroupJet};
use moframe::jet::FJet;
use moframe::parse::parse_expr;
use moframe::Symbol;

fn canonical_form(c: &mut Criterion) {
    let a = parse_expr("(x + u)^4 / (p - q)^2").unwrap();
    let b = parse_expr("(x - u)^3 * (p - q) / (x + 1)").unwrap();
    c.bench_function("expr/add_rational", |bch| bch.iter(|| black_box(&a) + black_box(&b)));
    c.bench_function("expr/diff_quotient", |bch| bch.iter(|| black_box(&a).diff(Symbol::U)));
}

fn parse(c: &mut Criterion) {
    c.bench_function("parse/medium", |b| {
        b.iter(|| parse_expr(black_box("q*p/(x+1) + u^2 - 3*p^3*q/(u - x)^2")).unwrap())
    });
}

fn jets(c: &mut Criterion) {
    let f = parse_expr("q*p/(x+1) + u^2").unwrap();
    c.bench_function("jet/build_order4", |b| b.iter(|| FJet::build(black_box(&f), 4).unwrap()));
    c.bench_function("action/formal_order3", |b| b.iter(|| prolonged_action(&GroupJet::formal(3), None).unwrap()));
}

criterion_group!(kernel, canonical_form, parse, jets);
criterion_main!(kernel);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rfod_core::calculus::ProofScript;
use rfod_core::quantum::{measure, schmidt, Basis, QState};
use rfod_core::syntax::{parse_sequent, ContextVar, Domain, Item};
use rfod_core::theorems::{lemma1_tree, prop2_tree, FocusLeaf};
use rfod_core::{check, TheoryConfig};

fn checking(c: &mut Criterion) {
    let mut group = c.benchmark_group("check");
    for m in [2, 4, 8, 16] {
        let d = Domain::uniform("D", m).unwrap();
        let cfg = TheoryConfig::new().with_domain(d.clone()).focus("D");
        let lemma = lemma1_tree(vec![Item::Context(ContextVar::new("G"))], "A", &d, FocusLeaf::Focus).unwrap();
        group.bench_with_input(BenchmarkId::new("lemma1", m), &lemma, |b, t| b.iter(|| check(t, &cfg)));
        let converse = prop2_tree(&d).unwrap();
        group.bench_with_input(BenchmarkId::new("prop2", m), &converse, |b, t| b.iter(|| check(t, &cfg)));
    }
    group.finish();
}

fn parsing(c: &mut Criterion) {
    let text = "G, z in D, forall x in D . A(x) & B(x, <t1, 1/2>) |- exists x in E . (C() \\/ x != #s), bot_Y";
    c.bench_function("parse sequent", |b| b.iter(|| parse_sequent(text).unwrap()));
    let d = Domain::uniform("D", 8).unwrap();
    let lemma = lemma1_tree(vec![Item::Context(ContextVar::new("G"))], "A", &d, FocusLeaf::Focus).unwrap();
    let script = ProofScript::from_derivation(&lemma, TheoryConfig::new().with_domain(d).focus("D")).render();
    c.bench_function("parse script", |b| b.iter(|| ProofScript::parse(&script).unwrap()));
}

fn quantum(c: &mut Criterion) {
    let bell = QState::named("bell").unwrap();
    c.bench_function("schmidt", |b| b.iter(|| schmidt(&bell).unwrap()));
    let psi = QState::from_real(&[0.6, 0.8]).unwrap();
    let y = Basis::y();
    c.bench_function("measure", |b| b.iter(|| measure(&psi, &y).unwrap()));
}

criterion_group!(benches, checking, parsing, quantum);
criterion_main!(benches);

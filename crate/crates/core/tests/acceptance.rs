//! Acceptance run: one pass/fail line per criterion, non-zero exit on failure.

mod common;

use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfod_core::calculus::{equation_step, Direction, Params, ProofScript, RuleError, RuleId};
use rfod_core::quantum::{
    density_of, emit_assertion, measure, measure_as, purity, schmidt, AssertionInput, Basis, QState,
};
use rfod_core::syntax::{parse_sequent, ContextVar, Domain, DomainKind, Item, Prob, Sequent, Term};
use rfod_core::theorems::{
    build_uncertainty, check_reversibility, collapse_trees, derive_collapse_and_repeat, derive_distributivity,
    derive_reflection, distributivity_trees, lemma1_tree, prop1_tree, prop2_tree, FocusLeaf, TheoremError,
};
use rfod_core::tolerance::{ENTANGLEMENT_TOL, SCHMIDT_RECON_TOL};
use rfod_core::{check, Derivation, TheoryConfig};

type Outcome = Result<String, String>;

/// Name, check and optional time budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((a - b).abs() <= tol, || format!("{what}: {a} differs from {b} by more than {tol:e}"))
}

fn seq(text: &str) -> Sequent {
    parse_sequent(text).expect("fixture sequents parse")
}

fn reflection() -> Outcome {
    let golden = include_str!("golden/reflection.seq");
    let canonical = ProofScript::from_derivation(&derive_reflection("D", "A"), TheoryConfig::new()).render();
    ensure(canonical == golden, || format!("golden mismatch:\n{canonical}"))?;
    let names = [("D", "A"), ("DZ", "P"), ("Spin_1", "Up'"), ("E", "Q"), ("DS", "B1")];
    for (d, p) in names {
        let script = ProofScript::from_derivation(&derive_reflection(d, p), TheoryConfig::new());
        let report = script.check();
        ensure(report.closed(), || format!("{d}/{p}: {report}"))?;
        let reparsed = ProofScript::parse(&script.render()).map_err(|e| e.to_string())?;
        ensure(reparsed.render() == script.render() && reparsed.check().closed(), || format!("{d}/{p}: reparse"))?;
        let expected = seq(&format!("forall x in {d} . {p}(x), z in {d} |- {p}(z)"));
        let conclusion = &script.derivation().map_err(|e| e.to_string())?.conclusion;
        ensure(conclusion.equiv(&expected), || format!("{d}/{p}: concluded {conclusion}"))?;
    }
    Ok(format!("golden script matches; {} name pairs accepted", names.len()))
}

fn focusing() -> Outcome {
    let mut trees = 0;
    for m in 1..=4 {
        let d = Domain::uniform("D", m).map_err(|e| e.to_string())?;
        let on = TheoryConfig::new().with_domain(d.clone()).focus("D");
        let off = TheoryConfig::new().with_domain(d.clone()).singleton_axioms(false);
        let gamma = vec![Item::Context(ContextVar::new("G"))];
        let built: [(&str, std::sync::Arc<Derivation>); 2] = [
            ("from a conjunction", lemma1_tree(gamma, "A", &d, FocusLeaf::Focus).map_err(|e| e.to_string())?),
            ("from identity", prop1_tree("A", &d, FocusLeaf::Focus).map_err(|e| e.to_string())?),
        ];
        for (what, tree) in built {
            let accepted = check(&tree, &on);
            ensure(accepted.accepted(), || format!("{what} m={m} with focus: {accepted}"))?;
            let rejected = check(&tree, &off);
            let f = rejected.first_failure.as_ref().ok_or(format!("{what} m={m} accepted without focus"))?;
            ensure(f.rule == RuleId::AxFocus("D".into()), || format!("{what} m={m}: failed at {}", f.rule))?;
            ensure(matches!(f.error, RuleError::DisabledAxiom(_)), || format!("{what} m={m}: {}", f.error))?;
            ensure(rejected.failing_rules() == vec![RuleId::AxFocus("D".into())], || {
                format!("{what} m={m}: failing rules {:?}", rejected.failing_rules())
            })?;
            let steps = tree.linearize();
            ensure(steps[f.step - 1].premises.is_empty(), || format!("{what} m={m}: failure is not at a leaf"))?;
            trees += 1;
        }
    }
    Ok(format!("{trees} derivations accepted with AX_FOCUS and rejected at its leaf without"))
}

fn conj_of(terms: &[String], op: &str, sep: &str) -> String {
    terms.iter().map(|t| format!("z {op} {t}")).collect::<Vec<_>>().join(sep)
}

/// Follows the cut's main premise down through the six stages and returns
/// the DUALIZE node.
fn main_chain(tree: &Derivation) -> Result<&Derivation, String> {
    let rule = |d: &Derivation, want: RuleId, dir: Option<Direction>| {
        ensure(d.rule == want && d.direction == dir, || {
            format!("expected {want} {dir:?}, found {} {:?}", d.rule, d.direction)
        })
    };
    rule(tree, RuleId::Cut, None)?;
    let side = |want: RuleId| tree.premises.iter().find(|p| p.rule == want).ok_or(format!("cut has no {want} premise"));
    side(RuleId::ExistsR)?;
    let closed = side(RuleId::EqExistsL)?;
    rule(closed, RuleId::EqExistsL, Some(Direction::Forward))?;
    let dual = &closed.premises[0];
    rule(dual, RuleId::Dualize, None)?;
    let opened = &dual.premises[0];
    rule(opened, RuleId::EqForallR, Some(Direction::Backward))?;
    rule(&opened.premises[0], RuleId::Instantiate, None)?;
    Ok(dual)
}

fn prop2_replay() -> Outcome {
    for m in [2, 3] {
        let d = Domain::uniform("D", m).map_err(|e| e.to_string())?;
        let tree = prop2_tree(&d).map_err(|e| e.to_string())?;
        let cfg = TheoryConfig::new().with_domain(d.clone());
        let report = check(&tree, &cfg);
        ensure(report.accepted(), || format!("m={m}: {report}"))?;
        let chain = main_chain(&tree).map_err(|e| format!("m={m}: {e}"))?;
        let steps = tree.linearize();
        let terms: Vec<String> = d.elements().iter().map(ToString::to_string).collect();
        let displayed_in = seq(&format!("{}, y in D |- z != y", conj_of(&terms, "!=", " & ")));
        let displayed_out = seq(&format!("y in D, z = y |- {}", conj_of(&terms, "=", " \\/ ")));
        let input = &chain.premises[0].conclusion;
        ensure(input.equiv(&displayed_in), || format!("m={m}: dualize input {input}"))?;
        ensure(chain.conclusion.equiv(&displayed_out), || format!("m={m}: dualize output {}", chain.conclusion))?;
        ensure(steps.iter().filter(|s| s.rule == RuleId::Dualize).count() == 1, || {
            format!("m={m}: several dualize steps")
        })?;
        let focus = seq(&format!("z in D |- {}", conj_of(&terms, "=", " \\/ ")));
        ensure(tree.conclusion.equiv(&focus), || format!("m={m}: concluded {}", tree.conclusion))?;
    }
    Ok("six stages in order for m = 2, 3; dualize sequents match".into())
}

fn random_domain(rng: &mut ChaCha8Rng, k: usize) -> Domain {
    let name = format!("R{k}");
    match rng.gen_range(0..4) {
        0 => Domain::singleton(&format!("u{k}")),
        1 => Domain::uniform(name, rng.gen_range(1..6)).expect("uniform"),
        _ => {
            let n = rng.gen_range(2..6);
            let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..10)).collect();
            let total: i64 = weights.iter().sum();
            let elements = weights
                .iter()
                .enumerate()
                .map(|(i, &w)| Term::outcome(format!("o{i}"), Prob::new(w, total)).expect("positive"))
                .collect();
            Domain::new(name, elements, DomainKind::Measured, false).expect("sums to one")
        }
    }
}

fn reversibility() -> Outcome {
    let seed = common::seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut reversible, mut blocked) = (0, 0);
    for k in 0..100 {
        let d = random_domain(&mut rng, k);
        let mut cfg =
            TheoryConfig::new().singleton_axioms(rng.gen_bool(0.5)).classical(rng.gen_bool(0.5)).with_domain(d.clone());
        if rng.gen_bool(0.5) {
            cfg = cfg.focus(d.name());
        }
        let focused = cfg.is_focused(d.name());
        let v = check_reversibility(&d, &cfg).map_err(|e| format!("{}: {e}", d.name()))?;
        ensure(v.reversible == focused, || {
            format!("{}: reversible={} focused={focused}\n{}", d.name(), v.reversible, v.report)
        })?;
        if focused {
            let w = v.witness.as_ref().ok_or(format!("{}: no witness", d.name()))?;
            ensure(check(w, &cfg).accepted(), || format!("{}: witness does not check", d.name()))?;
            reversible += 1;
        } else {
            let want = RuleId::AxFocus(d.name().to_string());
            ensure(v.missing_axiom.as_ref() == Some(&want), || {
                format!("{}: missing axiom {:?}", d.name(), v.missing_axiom)
            })?;
            blocked += 1;
        }
    }
    Ok(format!("seed {seed}: {reversible} focused domains reversible, {blocked} unfocused blocked by AX_FOCUS"))
}

fn collapse_chain() -> Outcome {
    let mut checked = 0;
    for m in [2, 3] {
        let d = Domain::uniform("D", m).map_err(|e| e.to_string())?;
        let on = TheoryConfig::new().with_domain(d.clone());
        let off = on.clone().singleton_axioms(false);
        for i in 1..=m {
            let chain = derive_collapse_and_repeat(&d, i, "A", &on).map_err(|e| e.to_string())?;
            let target = seq(&format!("forall x in D . A(x) |- A^f(#t{i})"));
            ensure(chain.collapse.conclusion.equiv(&target), || format!("collapse {}", chain.collapse.conclusion))?;
            ensure(chain.remeasure.conclusion.equiv(&target), || format!("remeasure {}", chain.remeasure.conclusion))?;
            let axiom = RuleId::AxSingleton(format!("{{t{i}}}"));
            ensure(chain.repeat.rules().contains(&axiom), || "repeat does not use the sharp-state axiom".into())?;
            for (what, tree) in
                [("collapse", &chain.collapse), ("repeat", &chain.repeat), ("remeasure", &chain.remeasure)]
            {
                let r = check(tree, &on);
                ensure(r.closed(), || format!("{what} m={m} i={i}: {r}"))?;
                let r = check(tree, &off);
                let f = r.first_failure.as_ref().ok_or(format!("{what} m={m} i={i} accepted with axioms off"))?;
                ensure(matches!(f.error, RuleError::DisabledAxiom(_)), || format!("{what}: {}", f.error))?;
                checked += 1;
            }
            let gated = derive_collapse_and_repeat(&d, i, "A", &off);
            ensure(gated.as_ref().err() == Some(&TheoremError::AxiomsDisabled), || "precondition not enforced".into())?;
            collapse_trees(&d, i, "A").map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("{checked} derivations closed with the singleton axioms and rejected without"))
}

fn numerics() -> Outcome {
    let plus = measure(&QState::named("plus").unwrap(), &Basis::z()).map_err(|e| e.to_string())?;
    for (_, p) in plus.outcomes() {
        close(p.to_f64().unwrap(), 0.5, 1e-9, "P(+ in Z)")?;
    }
    let mixed = purity(&density_of(&plus, &Basis::z()).map_err(|e| e.to_string())?);
    close(mixed, 0.5, 1e-9, "purity of the mixture")?;
    let sharp = measure(&QState::named("0").unwrap(), &Basis::z()).map_err(|e| e.to_string())?;
    ensure(sharp.is_singleton(), || format!("{sharp} is not a singleton"))?;
    close(purity(&density_of(&sharp, &Basis::z()).map_err(|e| e.to_string())?), 1.0, 1e-9, "purity of the singleton")?;
    let dy = measure_as(&QState::named("up_z").unwrap(), &Basis::y(), "DY").map_err(|e| e.to_string())?;
    let outcomes = dy.outcomes();
    ensure(outcomes.iter().map(|(l, _)| *l).eq(["up_y", "down_y"]), || format!("{dy}"))?;
    for (_, p) in &outcomes {
        close(p.to_f64().unwrap(), 0.5, 1e-9, "P(spin y after z collapse)")?;
    }
    let u = build_uncertainty(&seq("G |- A^f(#up_z)"), &dy).map_err(|e| e.to_string())?;
    ensure(u.sequent.to_string() == "G |- A^f(#up_z), bot_Y", || u.sequent.to_string())?;
    Ok(format!("{plus}; purities {mixed} and 1; {dy}"))
}

fn entanglement() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = QState::named("bell").unwrap();
    let sd = schmidt(&bell).map_err(|e| e.to_string())?;
    close(sd.coefficients[0], h, 1e-7, "a1")?;
    close(sd.coefficients[1], h, 1e-7, "a2")?;
    ensure(sd.reconstruction_error(&bell) <= SCHMIDT_RECON_TOL, || "Bell reconstruction".into())?;
    for name in ["0,0", "0,plus", "plus,i-", "1,minus"] {
        let psi = QState::named(name).unwrap();
        let s = schmidt(&psi).map_err(|e| e.to_string())?;
        ensure(s.coefficients[1] <= ENTANGLEMENT_TOL, || format!("{name}: a2 = {}", s.coefficients[1]))?;
        let a = emit_assertion(&AssertionInput::Bipartite { state: psi, local: Basis::z() }, "G")
            .map_err(|e| e.to_string())?;
        ensure(a.sequent.to_string() == "G, z in DZ, y in DZ' |- A(z), A'(y)", || format!("{name}: {}", a.sequent))?;
    }
    let a = emit_assertion(&AssertionInput::Bipartite { state: bell, local: Basis::z() }, "G")
        .map_err(|e| e.to_string())?;
    ensure(a.sequent.to_string() == "G, z in DS |- A(z) ,_S A'(z)", || a.sequent.to_string())?;
    let cfg = a.theory();
    let folded =
        equation_step(std::slice::from_ref(&a.sequent), &RuleId::EqBowtieR, Direction::Forward, &Params::new(), &cfg)
            .map_err(|e| e.to_string())?;
    ensure(folded[0].to_string() == "G |- bowtie x in DS (A(x); A'(x))", || folded[0].to_string())?;
    let back = equation_step(&folded, &RuleId::EqBowtieR, Direction::Backward, &Params::new().var("z"), &cfg)
        .map_err(|e| e.to_string())?;
    ensure(back[0].equiv(&a.sequent), || format!("bowtie round trip gave {}", back[0]))?;
    Ok(format!(
        "Bell coefficients ({:.9}, {:.9}); products separable; bowtie round trip",
        sd.coefficients[0], sd.coefficients[1]
    ))
}

fn distributivity() -> Outcome {
    let (da, db) = (Domain::uniform("DA", 2).unwrap(), Domain::uniform("DB", 2).unwrap());
    let pair = distributivity_trees("DA", "DB", "A", "A'").map_err(|e| e.to_string())?;
    let classical = TheoryConfig::new().classical(true).with_domain(da.clone()).with_domain(db.clone());
    let basic = TheoryConfig::new().with_domain(da.clone()).with_domain(db.clone());
    for (what, tree) in [("joint", &pair.joint), ("split", &pair.split)] {
        let r = check(tree, &classical);
        ensure(r.accepted(), || format!("{what} in classical mode: {r}"))?;
    }
    let r = check(&pair.split, &basic);
    let f = r.first_failure.as_ref().ok_or("split accepted in basic mode")?;
    ensure(f.rule == RuleId::EqForallR && matches!(f.error, RuleError::RightContext(_)), || f.to_string())?;
    let gated = derive_distributivity(&da, &db, "A", "A'", &basic);
    ensure(matches!(gated, Err(TheoremError::ClassicalModeRequired(_))), || "precondition not enforced".into())?;
    Ok(format!("both accepted classically; basic mode rejects step {} ({})", f.step, f.rule))
}

fn run_suite<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), String>,
) -> Result<(), String> {
    common::runner(cases).run(&strategy, |v| test(v).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
}

fn property_suites() -> Outcome {
    let n = 1000;
    run_suite(n, common::unfoldable(), |(eq, s, p)| common::check_inversion(&eq, &s, &p))
        .map_err(|e| format!("equation inversion: {e}"))?;
    run_suite(n, common::dualizable_sequent(), |s| common::check_dualize_involution(&s))
        .map_err(|e| format!("dualize involution: {e}"))?;
    run_suite(n, common::sequent(), |s| common::check_parse_round_trip(&s))
        .map_err(|e| format!("parser round trip: {e}"))?;
    let sums = (prop::collection::vec(1i64..6, 1..5), 6i64..13);
    run_suite(n, sums, |(nums, den)| {
        let elements =
            nums.iter().enumerate().map(|(i, &k)| Term::outcome(format!("o{i}"), Prob::new(k, den)).unwrap()).collect();
        let exact = nums.iter().map(|&k| Prob::new(k, den)).sum::<Prob>() == Prob::from_integer(1);
        let built = Domain::new("D", elements, DomainKind::Measured, false);
        ensure(built.is_ok() == exact, || format!("{nums:?}/{den}: accepted={}", built.is_ok()))
    })
    .map_err(|e| format!("domain sums: {e}"))?;
    Ok(format!("{n} cases each: inversion, involution, round trip, sums (seed {})", common::seed()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("reflection axiom", reflection, Some(Duration::from_secs(1))),
        ("focusing biconditional", focusing, Some(Duration::from_secs(5))),
        ("converse replay", prop2_replay, None),
        ("reversibility corpus", reversibility, None),
        ("collapse and repeat", collapse_chain, None),
        ("measurement numerics", numerics, None),
        ("Schmidt and bowtie", entanglement, None),
        ("distributivity", distributivity, None),
        ("property suites", property_suites, Some(Duration::from_secs(60))),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, budget) {
            if took > *limit {
                outcome = Err(format!("took {took:.2?}, budget {limit:.0?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({took:.2?}) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({took:.2?}) {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

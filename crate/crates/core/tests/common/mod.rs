//! Generators shared by the property suites and the acceptance runner.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed, TestRng, TestRunner};
use rfod_core::calculus::{dualize, equation_step, Direction, Params, RuleId, TheoryConfig};
use rfod_core::syntax::{parse_sequent, ContextVar, Formula, Item, Prob, Sequent, Slot, Term};

/// Seed for randomized corpora: `RFOD_SEED` when set, a fixed default otherwise.
pub fn seed() -> u64 {
    std::env::var("RFOD_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0x5eed_2024)
}

/// Property-test configuration for `cases` cases: seeded by `RFOD_SEED`
/// when set, random otherwise.
pub fn config(cases: u32) -> Config {
    let rng_seed = match std::env::var("RFOD_SEED").ok().and_then(|s| s.parse().ok()) {
        Some(s) => RngSeed::Fixed(s),
        None => RngSeed::Random,
    };
    Config { cases, rng_seed, failure_persistence: None, ..Config::default() }
}

/// A deterministic runner for `cases` cases, seeded from [`seed`].
pub fn runner(cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed().to_le_bytes());
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

pub const VARS: [&str; 4] = ["x", "y", "z", "w"];

pub fn prob() -> impl Strategy<Value = Prob> {
    prop::sample::select(vec![Prob::new(1, 2), Prob::new(1, 3), Prob::new(2, 3), Prob::new(1, 4), Prob::new(3, 4)])
}

pub fn closed_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        (1..4u8, prob()).prop_map(|(i, p)| Term::outcome(format!("t{i}"), p).unwrap()),
        (1..3u8).prop_map(|i| Term::sharp(format!("s{i}"))),
    ]
}

pub fn term() -> impl Strategy<Value = Term> {
    prop_oneof![2 => prop::sample::select(VARS.to_vec()).prop_map(Term::var), 1 => closed_term()]
}

/// Atoms with fixed arities: `C/0`, `A/1`, `B/2`.
pub fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::atom("C", vec![])),
        term().prop_map(|t| Formula::atom("A", vec![t])),
        (term(), term()).prop_map(|(a, b)| Formula::atom("B", vec![a, b])),
    ]
}

pub fn domain_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["D".to_string(), "E".to_string()])
}

/// Formulas without `*`, `bot` and `bowtie`: the fragment closed under duality.
pub fn dualizable_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        3 => atom(),
        1 => (term(), term()).prop_map(|(a, b)| Formula::Eq(a, b)),
        1 => (term(), term()).prop_map(|(a, b)| Formula::Neq(a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (domain_name(), inner.clone()).prop_map(|(d, b)| Formula::forall("x", d, b)),
            (domain_name(), inner).prop_map(|(d, b)| Formula::exists("x", d, b)),
        ]
    })
}

pub fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => atom(),
        1 => (term(), domain_name()).prop_map(|(t, d)| Formula::member(t, d)),
        1 => (term(), term()).prop_map(|(a, b)| Formula::Eq(a, b)),
        1 => (term(), term()).prop_map(|(a, b)| Formula::Neq(a, b)),
        1 => prop::option::of(prop::sample::select(vec!["Y".to_string(), "Z".to_string()])).prop_map(Formula::Bot),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::star(l, r)),
            (domain_name(), inner.clone()).prop_map(|(d, b)| Formula::forall("x", d, b)),
            (domain_name(), inner.clone()).prop_map(|(d, b)| Formula::exists("x", d, b)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::bowtie("x", "DS", l, r)),
        ]
    })
}

pub fn slot() -> impl Strategy<Value = Slot> {
    prop_oneof![
        6 => formula().prop_map(Slot::from),
        1 => (atom(), atom()).prop_map(|(l, r)| Slot::Correlated { label: "S".into(), left: l, right: r }),
    ]
}

pub fn sequent() -> impl Strategy<Value = Sequent> {
    (
        prop::bool::weighted(0.3),
        prop::collection::vec(formula().prop_map(Item::Formula), 0..4),
        prop::collection::vec(slot(), 0..3),
    )
        .prop_map(|(g, mut a, s)| {
            if g {
                a.insert(0, gamma());
            }
            Sequent::new(a, s)
        })
}

/// Sequents in the fragment the duality transform accepts.
pub fn dualizable_sequent() -> impl Strategy<Value = Sequent> {
    let ant = prop_oneof![
        3 => dualizable_formula().prop_map(Item::Formula),
        1 => (term(), domain_name()).prop_map(|(t, d)| Item::Formula(Formula::member(t, d))),
    ];
    (prop::collection::vec(ant, 0..4), prop::collection::vec(dualizable_formula().prop_map(Slot::from), 0..3))
        .prop_map(|(a, s)| Sequent::new(a, s))
}

pub fn gamma() -> Item {
    Item::Context(ContextVar::new("G"))
}

/// An atom that mentions the bound variable `x`.
pub fn bound_body() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::atom("A", vec![Term::var("x")])),
        term().prop_map(|t| Formula::atom("B", vec![Term::var("x"), t])),
        term().prop_map(|t| Formula::atom("B", vec![t, Term::var("x")])),
    ]
}

fn rest() -> impl Strategy<Value = Vec<Item>> {
    prop::collection::vec(formula().prop_map(Item::Formula), 0..3)
}

/// A sequent whose first succedent slot or last antecedent item carries the
/// connective of `eq`, paired with the parameters its backward step needs.
pub fn unfoldable() -> impl Strategy<Value = (RuleId, Sequent, Params)> {
    prop_oneof![
        (rest(), domain_name(), atom()).prop_map(|(mut a, d, body)| {
            a.insert(0, gamma());
            (RuleId::EqForallR, Sequent::new(a, vec![Formula::forall("x", d, body).into()]), Params::new())
        }),
        (rest(), formula(), formula(), prop::collection::vec(formula(), 0..2)).prop_map(|(a, l, r, extra)| {
            let mut s = vec![Slot::from(Formula::and(l, r))];
            s.extend(extra.into_iter().map(Slot::from));
            (RuleId::EqAndR, Sequent::new(a, s), Params::new().target(0))
        }),
        (rest(), formula(), formula(), prop::collection::vec(formula(), 0..2)).prop_map(|(a, l, r, extra)| {
            let mut s = vec![Slot::from(Formula::star(l, r))];
            s.extend(extra.into_iter().map(Slot::from));
            (RuleId::EqStarR, Sequent::new(a, s), Params::new().target(0))
        }),
        (rest(), prop::collection::vec(formula(), 0..3)).prop_map(|(a, s)| {
            let mut s: Vec<Slot> = s.into_iter().map(Slot::from).collect();
            s.push(Formula::Bot(Some("Y".into())).into());
            let k = s.len() - 1;
            (RuleId::EqBotR, Sequent::new(a, s), Params::new().target(k).label("Y"))
        }),
        (rest(), formula(), formula(), prop::collection::vec(formula(), 0..2)).prop_map(|(mut a, l, r, s)| {
            a.push(Formula::or(l, r).into());
            let k = a.len() - 1;
            (RuleId::EqOrL, Sequent::new(a, s.into_iter().map(Slot::from).collect()), Params::new().target(k))
        }),
        (rest(), domain_name(), bound_body(), prop::collection::vec(formula(), 0..2)).prop_map(
            |(mut a, d, body, s)| {
                a.push(Formula::exists("x", d, body).into());
                let k = a.len() - 1;
                (RuleId::EqExistsL, Sequent::new(a, s.into_iter().map(Slot::from).collect()), Params::new().target(k))
            }
        ),
        (rest(), atom(), atom()).prop_map(|(mut a, l, r)| {
            a.insert(0, gamma());
            (RuleId::EqBowtieR, Sequent::new(a, vec![Formula::bowtie("x", "DS", l, r).into()]), Params::new())
        }),
        (rest(), 1..3u8, prop::collection::vec(formula(), 0..2)).prop_map(|(a, i, s)| {
            let t = Term::outcome(format!("t{i}"), Prob::new(1, 2)).unwrap();
            let mut slots = vec![Slot::from(Formula::atom("B", vec![t.clone(), t.clone()]))];
            slots.extend(s.into_iter().map(Slot::from));
            let seq = Sequent::new(a, slots);
            let positions = seq.succedent_positions(&t);
            (RuleId::EqEquality, seq, Params::new().term(t).positions(positions))
        }),
    ]
}

pub fn permissive() -> TheoryConfig {
    TheoryConfig::new().classical(true)
}

/// The unfolded side of `s` by `eq`, and the variable a binder step chose.
pub fn unfold(eq: &RuleId, s: &Sequent, params: &Params) -> Result<(Vec<Sequent>, Params), String> {
    let mut params = params.clone();
    if matches!(eq, RuleId::EqForallR | RuleId::EqExistsL | RuleId::EqBowtieR | RuleId::EqEquality) {
        params = params.var(s.fresh_var());
    }
    let out = equation_step(std::slice::from_ref(s), eq, Direction::Backward, &params, &permissive())
        .map_err(|e| format!("{eq} backward on {s}: {e}"))?;
    Ok((out, params))
}

/// Forward parameters: binder steps name the variable, the others are located
/// by shape alone.
pub fn refold_params(eq: &RuleId, used: &Params) -> Params {
    match eq {
        RuleId::EqForallR | RuleId::EqExistsL | RuleId::EqBowtieR | RuleId::EqEquality => {
            Params::new().var(used.var.clone().unwrap())
        }
        RuleId::EqBotR => Params::new().label("Y"),
        _ => Params::new(),
    }
}

/// `forward(backward(s)) == s` and `backward(forward(backward(s))) == backward(s)`.
pub fn check_inversion(eq: &RuleId, s: &Sequent, params: &Params) -> Result<(), String> {
    let (unfolded, used) = unfold(eq, s, params)?;
    let back = equation_step(&unfolded, eq, Direction::Forward, &refold_params(eq, &used), &permissive())
        .map_err(|e| format!("{eq} forward: {e}"))?;
    if back.len() != 1 || !back[0].equiv(s) {
        return Err(format!("{eq}: forward(backward({s})) = {back:?}"));
    }
    let (again, _) = unfold(eq, &back[0], &used)?;
    if again.len() != unfolded.len() || again.iter().zip(&unfolded).any(|(a, b)| !a.equiv(b)) {
        return Err(format!("{eq}: backward is not stable on {s}"));
    }
    Ok(())
}

pub fn check_dualize_involution(s: &Sequent) -> Result<(), String> {
    let once = dualize(s).map_err(|e| format!("{s}: {e}"))?;
    let twice = dualize(&once).map_err(|e| format!("{once}: {e}"))?;
    if twice.equiv(s) {
        Ok(())
    } else {
        Err(format!("{s} -> {once} -> {twice}"))
    }
}

pub fn check_parse_round_trip(s: &Sequent) -> Result<(), String> {
    let text = s.to_string();
    let back = parse_sequent(&text).map_err(|e| format!("{text}: {e}"))?;
    if &back != s || back.to_string() != text {
        return Err(format!("{text} reparsed as {back}"));
    }
    Ok(())
}

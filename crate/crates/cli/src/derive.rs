use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use rfod_core::calculus::{Derivation, ProofScript};
use rfod_core::quantum::{measure_as, Basis, QState};
use rfod_core::syntax::{parse_sequent, ContextVar, Domain, Item};
use rfod_core::theorems::{
    build_uncertainty, check_reversibility, collapse_trees, derive_reflection, distributivity_trees, lemma1_tree,
    prop1_tree, prop2_tree, FocusLeaf,
};
use rfod_core::TheoryConfig;

use crate::{quantum_failure, Failure, TheoryFlags};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// `forall x in D . A(x), z in D |- A(z)` from identity.
    Reflection,
    /// `G |- forall x in D . A(x)` from `G |- A(t1) & ... & A(tm)` through AX_FOCUS.
    Lemma1,
    /// `A(t1) & ... & A(tm) |- forall x in D . A(x)` through AX_FOCUS.
    Prop1,
    /// The focus sequent `z in D |- z = t1 \/ ... \/ z = tm` from the schematic converse.
    Prop2,
    /// The substitution round trip on `G, z in D |- A(z)`; needs D focused.
    Prop3,
    /// Selective measurement of the `--index`-th element and its repetition.
    Collapse,
    /// The joint or split reading of a two-particle state.
    Distributivity,
    /// The falsum of an incompatible, uniformly distributed observable.
    Uncertainty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Part {
    Collapse,
    Repeat,
    Remeasure,
    Joint,
    Split,
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    #[arg(value_enum)]
    target: Target,
    /// Number of elements of the generated uniform domain.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Name of the generated domain.
    #[arg(long, default_value = "D")]
    domain: String,
    /// Predicate symbol.
    #[arg(long, default_value = "A")]
    pred: String,
    /// 1-based element selected by `collapse`.
    #[arg(long, default_value_t = 1)]
    index: usize,
    /// Which derivation to emit: collapse|repeat|remeasure for `collapse`
    /// (default remeasure), joint|split for `distributivity` (default split).
    #[arg(long, value_enum)]
    part: Option<Part>,
    /// Base sequent for `uncertainty`.
    #[arg(long, default_value = "G |- A^f(#up_z)")]
    base: String,
    /// State whose spin-y measurement supplies the falsum for `uncertainty`.
    #[arg(long, default_value = "0")]
    state: String,
    /// Write the script here instead of stdout; the report still goes to stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    theory: TheoryFlags,
}

struct Built {
    derivation: Arc<Derivation>,
    domains: Vec<Domain>,
    notes: Vec<String>,
}

fn uniform(name: &str, m: usize) -> Result<Domain, Failure> {
    Domain::uniform(name, m).map_err(Failure::usage)
}

fn build(args: &DeriveArgs, cfg: &TheoryConfig) -> Result<Built, Failure> {
    let logical = Failure::logical;
    let gamma = || vec![Item::Context(ContextVar::new("G"))];
    let mut notes = Vec::new();
    let (derivation, domains) = match args.target {
        Target::Reflection => (derive_reflection(&args.domain, &args.pred), vec![]),
        Target::Lemma1 => {
            let d = uniform(&args.domain, args.m)?;
            (lemma1_tree(gamma(), &args.pred, &d, FocusLeaf::Focus).map_err(logical)?, vec![d])
        }
        Target::Prop1 => {
            let d = uniform(&args.domain, args.m)?;
            (prop1_tree(&args.pred, &d, FocusLeaf::Focus).map_err(logical)?, vec![d])
        }
        Target::Prop2 => {
            let d = uniform(&args.domain, args.m)?;
            (prop2_tree(&d).map_err(logical)?, vec![d])
        }
        Target::Prop3 => {
            let d = uniform(&args.domain, args.m)?;
            let verdict = check_reversibility(&d, cfg).map_err(logical)?;
            notes.push(match &verdict.missing_axiom {
                None if verdict.reversible => format!("{} is reversible", d.name()),
                Some(ax) => format!("{} is not reversible: {ax} is unavailable", d.name()),
                None => format!("{} is not reversible", d.name()),
            });
            let witness = rfod_core::theorems::reversibility_witness(&d, &args.pred).map_err(logical)?;
            (witness, vec![d])
        }
        Target::Collapse => {
            let d = uniform(&args.domain, args.m)?;
            let chain = collapse_trees(&d, args.index, &args.pred).map_err(logical)?;
            let tree = match args.part.unwrap_or(Part::Remeasure) {
                Part::Collapse => chain.collapse,
                Part::Repeat => chain.repeat,
                Part::Remeasure => chain.remeasure,
                other => return Err(Failure::usage(format!("part {other:?} does not apply to collapse"))),
            };
            (tree, vec![d])
        }
        Target::Distributivity => {
            let first = uniform(&args.domain, args.m)?;
            let second = uniform(&format!("{}'", args.domain), args.m)?;
            let pair = distributivity_trees(first.name(), second.name(), &args.pred, &format!("{}'", args.pred))
                .map_err(logical)?;
            let tree = match args.part.unwrap_or(Part::Split) {
                Part::Joint => pair.joint,
                Part::Split => pair.split,
                other => return Err(Failure::usage(format!("part {other:?} does not apply to distributivity"))),
            };
            (tree, vec![first, second])
        }
        Target::Uncertainty => {
            let base = parse_sequent(&args.base).map_err(Failure::usage)?;
            let psi = QState::parse(&args.state).map_err(quantum_failure)?;
            let dy = measure_as(&psi, &Basis::y(), "DY").map_err(quantum_failure)?;
            notes.push(format!("incompatible observable: {dy}"));
            let u = build_uncertainty(&base, &dy).map_err(logical)?;
            (u.derivation, vec![dy])
        }
    };
    Ok(Built { derivation, domains, notes })
}

fn commented(text: &str) -> String {
    text.lines().map(|l| format!("-- {l}\n")).collect()
}

pub fn run(args: &DeriveArgs, json: bool) -> Result<u8, Failure> {
    let base = args.theory.apply(TheoryConfig::new());
    let built = build(args, &base)?;
    let cfg = built.domains.iter().cloned().fold(base, TheoryConfig::with_domain);
    let cfg = args.theory.apply(cfg);
    let script = ProofScript::from_derivation(&built.derivation, cfg);
    let report = script.check();
    let code = u8::from(!report.accepted());

    if json {
        let script_json: serde_json::Value =
            serde_json::from_str(&script.to_json().map_err(Failure::logical)?).map_err(Failure::logical)?;
        let out = serde_json::json!({ "script": script_json, "report": report.to_json(), "notes": built.notes });
        match &args.output {
            Some(path) => {
                write(path, &serde_json::to_string_pretty(&script_json).map_err(Failure::logical)?)?;
                println!("{}", serde_json::json!({ "report": report.to_json(), "notes": built.notes }));
            }
            None => println!("{out}"),
        }
        return Ok(code);
    }

    let mut trailer = String::new();
    for n in &built.notes {
        trailer.push_str(&format!("note: {n}\n"));
    }
    trailer.push_str(&report.to_string());
    let header = format!("-- {:?}\n", args.target).to_lowercase();
    let text = format!("{header}{}{}", script.render(), commented(&trailer));
    match &args.output {
        Some(path) => {
            write(path, &text)?;
            print!("{trailer}");
        }
        None => print!("{text}"),
    }
    Ok(code)
}

fn write(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

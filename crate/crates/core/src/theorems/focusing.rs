use std::sync::Arc;

use super::{atom, context, cut_node, eq_step, single, TheoremError};
use crate::calculus::{
    check, dualize, focus_sequent, instantiate_sequent, CheckReport, Derivation, Direction, Params, RuleId,
    TheoryConfig,
};
use crate::syntax::{Domain, Formula, Item, Sequent, Term};

/// Which axiom closes the focusing premise `z in D |- z = t1 \/ ... \/ z = tm`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FocusLeaf {
    Focus,
    /// The sharp-state axiom; only meaningful for singleton domains.
    Singleton,
}

impl FocusLeaf {
    fn rule(self, domain: &str) -> RuleId {
        match self {
            FocusLeaf::Focus => RuleId::AxFocus(domain.to_string()),
            FocusLeaf::Singleton => RuleId::AxSingleton(domain.to_string()),
        }
    }
}

/// `forall x in D . A(x), z in D |- A(z)` from identity.
pub fn derive_reflection(domain: &str, pred: &str) -> Arc<Derivation> {
    let all = Formula::forall("x", domain, atom(pred, Term::var("x")));
    let id = Derivation::leaf(RuleId::Identity, Sequent::new(vec![all.clone().into()], vec![all.into()]));
    eq_step(RuleId::EqForallR, Direction::Backward, Params::new(), vec![id], 0)
        .expect("the identity sequent always decomposes")
}

fn conjunction(pred: &str, d: &Domain) -> Formula {
    Formula::conj(d.elements().iter().map(|t| atom(pred, t.clone()))).expect("domains are non-empty")
}

/// From a derivation of `G |- A(t1) & ... & A(tm)` to `G |- forall x in D . A(x)`.
pub(super) fn lemma1_from(top: Arc<Derivation>, d: &Domain, leaf: FocusLeaf) -> Result<Arc<Derivation>, TheoremError> {
    let terms = d.elements();
    let mut parts = Vec::with_capacity(terms.len());
    let mut rest = top.clone();
    for _ in 1..terms.len() {
        parts.push(eq_step(RuleId::EqAndR, Direction::Backward, Params::new(), vec![rest.clone()], 0)?);
        rest = eq_step(RuleId::EqAndR, Direction::Backward, Params::new(), vec![rest], 1)?;
    }
    parts.push(rest);

    let z = top.conclusion.fresh_var();
    let mut branches = Vec::with_capacity(terms.len());
    for (part, t) in parts.into_iter().zip(terms) {
        let positions = part.conclusion.succedent_positions(t);
        let params = Params::new().var(&z).term(t.clone()).positions(positions);
        branches.push(eq_step(RuleId::EqEquality, Direction::Backward, params, vec![part], 0)?);
    }
    let mut joined = branches.pop().expect("domains are non-empty");
    while let Some(b) = branches.pop() {
        joined = eq_step(RuleId::EqOrL, Direction::Forward, Params::new(), vec![b, joined], 0)?;
    }

    let axiom = Derivation::leaf(leaf.rule(d.name()), focus_sequent(d, &z));
    let disj = axiom.conclusion.succedent[0].formula().cloned().expect("axioms have one formula");
    let cut = cut_node(axiom, joined, disj)?;
    eq_step(RuleId::EqForallR, Direction::Forward, Params::new().var(&z), vec![cut], 0)
}

/// `gamma |- forall x in D . A(x)` from the open leaf `gamma |- A(t1) & ... & A(tm)`.
pub fn lemma1_tree(gamma: Vec<Item>, pred: &str, d: &Domain, leaf: FocusLeaf) -> Result<Arc<Derivation>, TheoremError> {
    let hyp = Sequent::new(gamma, vec![single(conjunction(pred, d))]);
    lemma1_from(Derivation::leaf(RuleId::Hypothesis, hyp), d, leaf)
}

/// `gamma |- forall x in D . A(x)` from the open leaf `gamma |- A(t1) & ... & A(tm)`.
pub fn derive_lemma1(
    gamma: Vec<Item>,
    pred: &str,
    d: &Domain,
    cfg: &TheoryConfig,
) -> Result<Arc<Derivation>, TheoremError> {
    if !cfg.is_focused(d.name()) {
        return Err(TheoremError::NotFocused(d.name().to_string()));
    }
    lemma1_tree(gamma, pred, d, FocusLeaf::Focus)
}

/// `A(t1) & ... & A(tm) |- forall x in D . A(x)`, closed by identity.
pub fn prop1_tree(pred: &str, d: &Domain, leaf: FocusLeaf) -> Result<Arc<Derivation>, TheoremError> {
    let conj = conjunction(pred, d);
    let id = Derivation::leaf(RuleId::Identity, Sequent::new(vec![conj.clone().into()], vec![conj.into()]));
    lemma1_from(id, d, leaf)
}

pub fn derive_prop1(pred: &str, d: &Domain, cfg: &TheoryConfig) -> Result<Arc<Derivation>, TheoremError> {
    if !cfg.is_focused(d.name()) {
        return Err(TheoremError::NotFocused(d.name().to_string()));
    }
    prop1_tree(pred, d, FocusLeaf::Focus)
}

/// `z in D |- z = t1 \/ ... \/ z = tm` from the schematic hypothesis
/// `A(t1) & ... & A(tm) |- forall x in D . A(x)`, instantiated at
/// `A(x) := z != x` and then dualized.
pub fn prop2_tree(d: &Domain) -> Result<Arc<Derivation>, TheoremError> {
    let schematic = "A";
    let hyp_seq = Sequent::new(
        vec![conjunction(schematic, d).into()],
        vec![single(Formula::forall("x", d.name(), atom(schematic, Term::var("x"))))],
    );
    let hyp = Derivation::leaf(RuleId::Hypothesis, hyp_seq);

    let z = Term::var("z");
    let body = Formula::Neq(z.clone(), Term::var("x"));
    let inst_seq = instantiate_sequent(&hyp.conclusion, schematic, &["x".to_string()], &body)?;
    let inst = Derivation::node(
        RuleId::Instantiate,
        None,
        Params::new().pred(schematic).args(["x"]).formula(body),
        vec![hyp],
        inst_seq,
    );
    let opened = eq_step(RuleId::EqForallR, Direction::Backward, Params::new().var("y"), vec![inst], 0)?;
    let dual =
        Derivation::node(RuleId::Dualize, None, Params::new(), vec![opened.clone()], dualize(&opened.conclusion)?);
    let closed = eq_step(RuleId::EqExistsL, Direction::Forward, Params::new().var("y"), vec![dual], 0)?;

    let member = Formula::member(z.clone(), d.name());
    let refl =
        Derivation::leaf(RuleId::Reflexivity, Sequent::new(vec![], vec![single(Formula::Eq(z.clone(), z.clone()))]));
    let weak_seq = Sequent::new(vec![member.clone().into()], refl.conclusion.succedent.clone());
    let weak = Derivation::node(RuleId::WeakenL, None, Params::new().formula(member.clone()), vec![refl], weak_seq);
    let witness = Formula::exists("x", d.name(), Formula::Eq(z.clone(), Term::var("x")));
    let exists_seq = Sequent::new(vec![member.into()], vec![single(witness.clone())]);
    let exists = Derivation::node(RuleId::ExistsR, None, Params::new().term(z), vec![weak], exists_seq);
    cut_node(exists, closed, witness)
}

pub fn derive_prop2(d: &Domain) -> Result<Arc<Derivation>, TheoremError> {
    prop2_tree(d)
}

#[derive(Clone, Debug)]
pub struct ReversibilityVerdict {
    pub domain: String,
    pub reversible: bool,
    /// The round trip `G, z in D |- A(z)` to itself through the instances
    /// `G |- A(ti)`, present when it checks.
    pub witness: Option<Arc<Derivation>>,
    /// The axiom whose absence blocks the round trip.
    pub missing_axiom: Option<RuleId>,
    pub report: CheckReport,
}

/// Substitutes each element for `z` in `G, z in D |- A(z)`, reassembles the
/// instances by conjunction and closes back through the focused quantifier.
pub fn reversibility_witness(d: &Domain, pred: &str) -> Result<Arc<Derivation>, TheoremError> {
    let z = Term::var("z");
    let start = Sequent::new(
        vec![context("G"), Formula::member(z.clone(), d.name()).into()],
        vec![single(atom(pred, z.clone()))],
    );
    let hyp = Derivation::leaf(RuleId::Hypothesis, start);
    let mut instances = Vec::new();
    for t in d.elements() {
        let substituted = Derivation::node(
            RuleId::Subst,
            None,
            Params::new().var("z").term(t.clone()),
            vec![hyp.clone()],
            hyp.conclusion.subst("z", t),
        );
        let member = Formula::member(t.clone(), d.name());
        let fact = Derivation::leaf(RuleId::Membership, Sequent::new(vec![], vec![single(member.clone())]));
        instances.push(cut_node(fact, substituted, member)?);
    }
    let mut conj = instances.pop().expect("domains are non-empty");
    while let Some(i) = instances.pop() {
        conj = eq_step(RuleId::EqAndR, Direction::Forward, Params::new(), vec![i, conj], 0)?;
    }
    let general = lemma1_from(conj, d, FocusLeaf::Focus)?;
    eq_step(RuleId::EqForallR, Direction::Backward, Params::new().var("z"), vec![general], 0)
}

/// Substitution on a variable of `d` can be undone exactly when the
/// round trip checks, which it does exactly when `d` is focused.
pub fn check_reversibility(d: &Domain, cfg: &TheoryConfig) -> Result<ReversibilityVerdict, TheoremError> {
    let mut cfg = cfg.clone();
    if cfg.domain(d.name()).is_none() {
        cfg.add_domain(d.clone());
    }
    let witness = reversibility_witness(d, "A")?;
    let report = check(&witness, &cfg);
    let reversible = report.accepted();
    let missing_axiom = report.first_failure.as_ref().filter(|f| f.rule.is_axiom()).map(|f| f.rule.clone());
    Ok(ReversibilityVerdict {
        domain: d.name().to_string(),
        reversible,
        witness: reversible.then_some(witness),
        missing_axiom,
        report,
    })
}

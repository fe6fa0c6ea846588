use std::collections::BTreeSet;

use super::config::TheoryConfig;
use super::rule::{Params, RuleError, RuleId};
use crate::syntax::{multiset_eq, random_variable_of, remove_one, Formula, Item, Sequent, Slot, SubstMode, Term};

/// Checks that `conclusion` follows from `premises` by a one-directional rule
/// or axiom.
pub fn rule_step(
    conclusion: &Sequent,
    rule: &RuleId,
    premises: &[Sequent],
    params: &Params,
    cfg: &TheoryConfig,
) -> Result<(), RuleError> {
    let arity = match rule {
        r if r.is_leaf() => 0,
        RuleId::Cut => 2,
        r if r.is_equation() => {
            return Err(RuleError::Param(format!("{r} is an equation and needs a direction")));
        }
        _ => 1,
    };
    if premises.len() != arity {
        return Err(RuleError::PremiseCount { expected: arity.to_string(), found: premises.len() });
    }
    match rule {
        RuleId::Identity => identity(conclusion),
        RuleId::Reflexivity => reflexivity(conclusion),
        RuleId::Hypothesis => Ok(()),
        RuleId::Membership => membership(conclusion, cfg),
        RuleId::AxSingleton(d) => ax_singleton(conclusion, d, cfg),
        RuleId::AxFocus(d) => ax_focus(conclusion, d, cfg),
        RuleId::Cut => cut(conclusion, &premises[0], &premises[1], params),
        RuleId::Subst => subst(conclusion, &premises[0], params, SubstMode::Plain, cfg),
        RuleId::FSubst => subst(conclusion, &premises[0], params, SubstMode::Forgetful, cfg),
        RuleId::ExistsR => exists_right(conclusion, &premises[0], params),
        RuleId::WeakenL => weaken(conclusion, &premises[0], params),
        RuleId::Dualize => expect(conclusion, &dualize(&premises[0])?),
        RuleId::Instantiate => instantiate(conclusion, &premises[0], params),
        RuleId::Correlate => expect(conclusion, &correlate(&premises[0], params)?),
        _ => unreachable!("equations handled above"),
    }
}

fn expect(conclusion: &Sequent, expected: &Sequent) -> Result<(), RuleError> {
    if conclusion.equiv(expected) {
        Ok(())
    } else {
        Err(RuleError::Mismatch { expected: expected.to_string(), found: conclusion.to_string() })
    }
}

fn identity(c: &Sequent) -> Result<(), RuleError> {
    match (c.antecedent.as_slice(), c.succedent.as_slice()) {
        ([a], [Slot::Single(b)]) if a == b => Ok(()),
        _ => Err(RuleError::shape(format!("{c} is not of the form A |- A"))),
    }
}

fn reflexivity(c: &Sequent) -> Result<(), RuleError> {
    match (c.antecedent.as_slice(), c.succedent.as_slice()) {
        ([], [Slot::Single(Item::Formula(Formula::Eq(l, r)))]) if l == r => Ok(()),
        _ => Err(RuleError::shape(format!("{c} is not of the form |- t = t"))),
    }
}

fn membership(c: &Sequent, cfg: &TheoryConfig) -> Result<(), RuleError> {
    let ([], [Slot::Single(Item::Formula(Formula::Member { term, domain }))]) =
        (c.antecedent.as_slice(), c.succedent.as_slice())
    else {
        return Err(RuleError::shape(format!("{c} is not of the form |- t in D")));
    };
    if domain.ends_with("^f") && !cfg.singleton_axioms {
        return Err(RuleError::DisabledAxiom(format!("sharp membership in {domain} needs the singleton axioms")));
    }
    match cfg.is_member(term, domain) {
        Some(true) => Ok(()),
        Some(false) => Err(RuleError::shape(format!("{term} is not an element of {domain}"))),
        None => Err(RuleError::UnknownDomain(domain.clone())),
    }
}

/// `z in D |- z = t1 \/ ... \/ z = tm` in element order, right-associated.
pub fn focus_sequent(d: &crate::syntax::Domain, z: &str) -> Sequent {
    let zt = Term::var(z);
    let disj =
        Formula::disj(d.elements().iter().map(|t| Formula::Eq(zt.clone(), t.clone()))).expect("domains are non-empty");
    Sequent::new(vec![Formula::member(zt, d.name()).into()], vec![disj.into()])
}

fn axiom_instance(c: &Sequent, d: &crate::syntax::Domain) -> Result<(), RuleError> {
    let z = match c.antecedent.as_slice() {
        [Item::Formula(Formula::Member { term: Term::Var(z), .. })] => z.clone(),
        _ => return Err(RuleError::shape(format!("{c} is not of the form z in D |- ..."))),
    };
    expect(c, &focus_sequent(d, &z))
}

fn ax_singleton(c: &Sequent, name: &str, cfg: &TheoryConfig) -> Result<(), RuleError> {
    if !cfg.singleton_axioms {
        return Err(RuleError::DisabledAxiom(format!("AX_SINGLETON({name}) is disabled")));
    }
    let d = cfg.domain(name).ok_or_else(|| RuleError::UnknownDomain(name.to_string()))?;
    if !d.is_singleton() {
        return Err(RuleError::shape(format!("{name} is not a singleton domain")));
    }
    axiom_instance(c, &d)
}

fn ax_focus(c: &Sequent, name: &str, cfg: &TheoryConfig) -> Result<(), RuleError> {
    let d = cfg.domain(name).ok_or_else(|| RuleError::UnknownDomain(name.to_string()))?;
    if !cfg.is_focused(name) {
        return Err(RuleError::DisabledAxiom(format!("AX_FOCUS({name}) is disabled: {name} is not focused")));
    }
    axiom_instance(c, &d)
}

/// The conclusion of a cut of `cut_formula` between `left` (where it is in
/// the succedent) and `right` (where it is in the antecedent).
pub fn cut_conclusion(left: &Sequent, right: &Sequent, cut_formula: &Formula) -> Option<Sequent> {
    let as_slot: Slot = cut_formula.clone().into();
    let as_item: Item = cut_formula.clone().into();
    let succ = remove_one(&left.succedent, &as_slot)?;
    let ante = remove_one(&right.antecedent, &as_item)?;
    let mut antecedent = left.antecedent.clone();
    antecedent.extend(ante);
    let mut succedent = succ;
    succedent.extend(right.succedent.iter().cloned());
    Some(Sequent::new(antecedent, succedent))
}

fn cut(c: &Sequent, p1: &Sequent, p2: &Sequent, params: &Params) -> Result<(), RuleError> {
    let mut candidates: Vec<Formula> = match &params.formula {
        Some(f) => vec![f.clone()],
        None => p1.succedent.iter().chain(&p2.succedent).filter_map(Slot::formula).cloned().collect(),
    };
    candidates.dedup();
    let mut tried = None;
    for f in &candidates {
        for (l, r) in [(p1, p2), (p2, p1)] {
            if let Some(out) = cut_conclusion(l, r, f) {
                if c.equiv(&out) {
                    return Ok(());
                }
                tried.get_or_insert(out);
            }
        }
    }
    match tried {
        Some(out) => Err(RuleError::Mismatch { expected: out.to_string(), found: c.to_string() }),
        None => Err(RuleError::shape("the premises share no cut formula")),
    }
}

fn subst(c: &Sequent, p: &Sequent, params: &Params, mode: SubstMode, cfg: &TheoryConfig) -> Result<(), RuleError> {
    let name = if mode == SubstMode::Plain { "SUBST" } else { "F_SUBST" };
    let v = params.var.as_deref().ok_or_else(|| RuleError::Param(format!("{name} needs var")))?;
    let t = params.term.as_ref().ok_or_else(|| RuleError::Param(format!("{name} needs term")))?;
    if !t.is_closed() {
        return Err(RuleError::Param(format!("{t} is not a closed term")));
    }
    if let Some(ctx) = p.context_vars().find(|cv| cv.deps.iter().any(|d| d == v)) {
        return Err(RuleError::ContextDependency(format!(
            "{v} may occur in the context {ctx}; its occurrences there cannot be substituted"
        )));
    }
    let expected = match mode {
        SubstMode::Plain => p.subst(v, t),
        SubstMode::Forgetful => {
            if !cfg.singleton_axioms {
                return Err(RuleError::DisabledAxiom("forgetful substitution needs the singleton axioms".into()));
            }
            if !t.is_sharp() {
                return Err(RuleError::Param(format!("{t} is not a sharp term")));
            }
            let domain = p
                .antecedent
                .iter()
                .find_map(|i| match i {
                    Item::Formula(Formula::Member { term: Term::Var(x), domain }) if x == v => Some(domain.clone()),
                    _ => None,
                })
                .ok_or_else(|| RuleError::shape(format!("no membership {v} in D in the antecedent of {p}")))?;
            let d = cfg.domain(&domain).ok_or_else(|| RuleError::UnknownDomain(domain.clone()))?;
            let label = t.state().unwrap_or_default();
            if !d.labels().any(|l| l == label) {
                return Err(RuleError::shape(format!("{label} is not a state of {domain}")));
            }
            p.forgetful(v, t)
        }
    };
    expect(c, &expected)
}

fn exists_right(c: &Sequent, p: &Sequent, params: &Params) -> Result<(), RuleError> {
    let mut tried = None;
    for slot in &c.succedent {
        let Some(Formula::Exists { var, domain, body }) = slot.formula() else { continue };
        for j in 0..p.succedent.len() {
            let Some(witness_formula) = p.succedent[j].formula() else { continue };
            let mut terms: Vec<Term> = match &params.term {
                Some(t) => vec![t.clone()],
                None => {
                    let mut ts = Vec::new();
                    witness_formula.map_terms(&mut |t, _| {
                        ts.push(t.clone());
                        t.clone()
                    });
                    ts
                }
            };
            terms.dedup();
            for t in terms {
                if body.subst(var, &t) != *witness_formula {
                    continue;
                }
                let mut out = p.clone();
                out.succedent[j] = slot.clone();
                let member: Item = Formula::member(t, domain.clone()).into();
                if !out.antecedent.contains(&member) {
                    out.antecedent.push(member);
                }
                if c.equiv(&out) {
                    return Ok(());
                }
                tried.get_or_insert(out);
            }
        }
    }
    match tried {
        Some(out) => Err(RuleError::Mismatch { expected: out.to_string(), found: c.to_string() }),
        None => Err(RuleError::shape(format!("{c} is not an existential instance of {p}"))),
    }
}

fn weaken(c: &Sequent, p: &Sequent, params: &Params) -> Result<(), RuleError> {
    if !multiset_eq(&c.succedent, &p.succedent) {
        return Err(RuleError::shape("weakening changed the succedent"));
    }
    let ok = match &params.formula {
        Some(f) => {
            remove_one(&c.antecedent, &Item::Formula(f.clone())).is_some_and(|rest| multiset_eq(&rest, &p.antecedent))
        }
        None => (0..c.antecedent.len()).any(|i| {
            let mut rest = c.antecedent.clone();
            rest.remove(i);
            multiset_eq(&rest, &p.antecedent)
        }),
    };
    if ok {
        Ok(())
    } else {
        Err(RuleError::shape(format!("{c} does not add one antecedent item to {p}")))
    }
}

fn instantiate(c: &Sequent, p: &Sequent, params: &Params) -> Result<(), RuleError> {
    let pred = params.pred.as_deref().ok_or_else(|| RuleError::Param("INSTANTIATE needs pred".into()))?;
    let body = params.formula.as_ref().ok_or_else(|| RuleError::Param("INSTANTIATE needs formula".into()))?;
    let args = params.args.clone().unwrap_or_default();
    expect(c, &instantiate_sequent(p, pred, &args, body)?)
}

/// Replaces every atom `pred(a1..an)` by `body` with `args` bound to `a1..an`.
pub fn instantiate_sequent(p: &Sequent, pred: &str, args: &[String], body: &Formula) -> Result<Sequent, RuleError> {
    let mut err = None;
    let out = p.map_formulas(|f| match f.instantiate(pred, args, body) {
        Ok(g) => g,
        Err(e) => {
            err.get_or_insert(e);
            f.clone()
        }
    });
    match err {
        Some(e) => Err(RuleError::Param(e.to_string())),
        None => Ok(out),
    }
}

/// Joins slots `target` and `target + 1` (default the first two) into a
/// correlated slot labelled by the random variable of the domain of `var`.
pub fn correlate(p: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let k = params.target.unwrap_or(0);
    let (Some(l), Some(r)) =
        (p.succedent.get(k).and_then(Slot::formula), p.succedent.get(k + 1).and_then(Slot::formula))
    else {
        return Err(RuleError::shape(format!("slots {k} and {} of {p} are not two formulas", k + 1)));
    };
    let shared: BTreeSet<String> = l.free_vars().intersection(&r.free_vars()).cloned().collect();
    let domain = p
        .antecedent
        .iter()
        .rev()
        .find_map(|i| match i {
            Item::Formula(Formula::Member { term: Term::Var(z), domain })
                if params.var.as_deref().map_or(shared.contains(z), |v| v == z) =>
            {
                Some(domain.clone())
            }
            _ => None,
        })
        .ok_or_else(|| RuleError::shape("the two formulas share no variable with a domain membership"))?;
    let mut out = p.clone();
    out.succedent.splice(
        k..=k + 1,
        [Slot::Correlated { label: random_variable_of(&domain), left: l.clone(), right: r.clone() }],
    );
    Ok(out)
}

fn dual(f: &Formula) -> Result<Formula, RuleError> {
    Ok(match f {
        Formula::Atom { .. } | Formula::Member { .. } => f.clone(),
        Formula::Eq(l, r) => Formula::Neq(l.clone(), r.clone()),
        Formula::Neq(l, r) => Formula::Eq(l.clone(), r.clone()),
        Formula::And(l, r) => Formula::or(dual(l)?, dual(r)?),
        Formula::Or(l, r) => Formula::and(dual(l)?, dual(r)?),
        Formula::Forall { var, domain, body } => Formula::exists(var.clone(), domain.clone(), dual(body)?),
        Formula::Exists { var, domain, body } => Formula::forall(var.clone(), domain.clone(), dual(body)?),
        Formula::Star(..) | Formula::Bot(_) | Formula::Bowtie { .. } => {
            return Err(RuleError::Fragment(format!("{f} has no dual in this calculus")));
        }
    })
}

/// The duality transform. Antecedent memberships stay in the antecedent as
/// typing assumptions; every other formula moves to the opposite side as its
/// dual, each side's order reversed.
pub fn dualize(s: &Sequent) -> Result<Sequent, RuleError> {
    let mut members = Vec::new();
    let mut others = Vec::new();
    for item in &s.antecedent {
        match item {
            Item::Formula(f @ Formula::Member { .. }) => members.push(Item::Formula(f.clone())),
            Item::Formula(f) => others.push(dual(f)?),
            Item::Context(c) => return Err(RuleError::Fragment(format!("context {c} has no dual"))),
        }
    }
    let mut right = Vec::new();
    for slot in &s.succedent {
        match slot {
            Slot::Single(Item::Formula(f @ Formula::Member { .. })) => {
                return Err(RuleError::Fragment(format!("membership {f} in the succedent has no dual position")))
            }
            Slot::Single(Item::Formula(f)) => right.push(dual(f)?),
            other => return Err(RuleError::Fragment(format!("{other} has no dual"))),
        }
    }
    let antecedent = members.into_iter().chain(right.into_iter().rev().map(Item::Formula)).collect();
    let succedent = others.into_iter().rev().map(Slot::from).collect();
    Ok(Sequent::new(antecedent, succedent))
}

//! The definitory equations, each usable in both directions.
//!
//! `Backward` takes a sequent with the connective and returns the sequent(s)
//! on the other side of the equation. `Forward` takes those and returns the
//! sequent with the connective. The equality equation is read the other
//! way round: `Backward` introduces `s = t`, `Forward` discharges it.

use std::collections::BTreeSet;

use super::config::TheoryConfig;
use super::rule::{Direction, Params, RuleError, RuleId};
use crate::syntax::{fresh_name, multiset_eq, random_variable_of, Formula, Item, Sequent, Slot, Term};

pub fn equation_step(
    inputs: &[Sequent],
    eq: &RuleId,
    dir: Direction,
    params: &Params,
    cfg: &TheoryConfig,
) -> Result<Vec<Sequent>, RuleError> {
    use Direction::*;
    let one = |inputs: &[Sequent]| -> Result<Sequent, RuleError> {
        match inputs {
            [s] => Ok(s.clone()),
            _ => Err(RuleError::PremiseCount { expected: "1".into(), found: inputs.len() }),
        }
    };
    let two = |inputs: &[Sequent]| -> Result<(Sequent, Sequent), RuleError> {
        match inputs {
            [a, b] => Ok((a.clone(), b.clone())),
            _ => Err(RuleError::PremiseCount { expected: "2".into(), found: inputs.len() }),
        }
    };
    match (eq, dir) {
        (RuleId::EqForallR, Backward) => forall_backward(&one(inputs)?, params, cfg).map(|s| vec![s]),
        (RuleId::EqForallR, Forward) => forall_forward(&one(inputs)?, params, cfg).map(|s| vec![s]),
        (RuleId::EqAndR, Backward) => and_backward(&one(inputs)?, params, cfg),
        (RuleId::EqAndR, Forward) => {
            let (a, b) = two(inputs)?;
            and_forward(&a, &b, params, cfg).map(|s| vec![s])
        }
        (RuleId::EqStarR, Backward) => star_backward(&one(inputs)?, params).map(|s| vec![s]),
        (RuleId::EqStarR, Forward) => star_forward(&one(inputs)?, params).map(|s| vec![s]),
        (RuleId::EqBotR, Backward) => bot_backward(&one(inputs)?, params).map(|s| vec![s]),
        (RuleId::EqBotR, Forward) => {
            let mut s = one(inputs)?;
            s.succedent.push(Formula::Bot(params.label.clone()).into());
            Ok(vec![s])
        }
        (RuleId::EqOrL, Backward) => or_backward(&one(inputs)?, params),
        (RuleId::EqOrL, Forward) => {
            let (a, b) = two(inputs)?;
            or_forward(&a, &b, params).map(|s| vec![s])
        }
        (RuleId::EqExistsL, Backward) => exists_backward(&one(inputs)?, params).map(|s| vec![s]),
        (RuleId::EqExistsL, Forward) => exists_forward(&one(inputs)?, params).map(|s| vec![s]),
        (RuleId::EqEquality, Backward) => equality_introduce(&one(inputs)?, params).map(|s| vec![s]),
        (RuleId::EqEquality, Forward) => equality_discharge(&one(inputs)?, params).map(|s| vec![s]),
        (RuleId::EqBowtieR, Backward) => bowtie_backward(&one(inputs)?, params, cfg).map(|s| vec![s]),
        (RuleId::EqBowtieR, Forward) => bowtie_forward(&one(inputs)?, params, cfg).map(|s| vec![s]),
        (other, _) => Err(RuleError::Param(format!("{other} is not a definitory equation"))),
    }
}

fn right_context_guard(s: &Sequent, cfg: &TheoryConfig, what: &str) -> Result<(), RuleError> {
    if !cfg.right_contexts_in_forall && s.succedent.len() != 1 {
        return Err(RuleError::RightContext(format!(
            "{what} needs exactly one succedent formula in basic mode, found {}",
            s.succedent.len()
        )));
    }
    Ok(())
}

fn slot_formula(s: &Sequent, k: usize) -> Result<&Formula, RuleError> {
    match s.succedent.get(k) {
        Some(Slot::Single(Item::Formula(f))) => Ok(f),
        Some(other) => Err(RuleError::shape(format!("succedent slot {k} ({other}) is not a formula"))),
        None => Err(RuleError::Position(format!("no succedent slot {k}"))),
    }
}

fn item_formula(s: &Sequent, i: usize) -> Result<&Formula, RuleError> {
    match s.antecedent.get(i) {
        Some(Item::Formula(f)) => Ok(f),
        Some(other) => Err(RuleError::shape(format!("antecedent item {i} ({other}) is not a formula"))),
        None => Err(RuleError::Position(format!("no antecedent item {i}"))),
    }
}

/// The target slot: the explicit one, or the first formula slot matching `want`.
fn pick_slot(
    s: &Sequent,
    target: Option<usize>,
    want: impl Fn(&Formula) -> bool,
    what: &str,
) -> Result<usize, RuleError> {
    match target {
        Some(k) => {
            let f = slot_formula(s, k)?;
            if want(f) {
                Ok(k)
            } else {
                Err(RuleError::shape(format!("succedent slot {k} ({f}) is not {what}")))
            }
        }
        None => (0..s.succedent.len())
            .find(|&k| s.succedent[k].formula().is_some_and(&want))
            .ok_or_else(|| RuleError::shape(format!("no {what} in the succedent of {s}"))),
    }
}

fn pick_item(
    s: &Sequent,
    target: Option<usize>,
    want: impl Fn(&Formula) -> bool,
    what: &str,
) -> Result<usize, RuleError> {
    match target {
        Some(i) => {
            let f = item_formula(s, i)?;
            if want(f) {
                Ok(i)
            } else {
                Err(RuleError::shape(format!("antecedent item {i} ({f}) is not {what}")))
            }
        }
        None => (0..s.antecedent.len())
            .find(|&i| s.antecedent[i].formula().is_some_and(&want))
            .ok_or_else(|| RuleError::shape(format!("no {what} in the antecedent of {s}"))),
    }
}

fn fresh_for(s: &Sequent, requested: &Option<String>) -> Result<String, RuleError> {
    let z = requested.clone().unwrap_or_else(|| s.fresh_var());
    if s.free_vars().contains(&z) {
        return Err(RuleError::Freshness(format!("{z} is free in {s}")));
    }
    Ok(z)
}

/// Finds the antecedent membership `z in D` for the given or inferred `z`.
/// Inference takes the last membership whose variable occurs nowhere else
/// in the antecedent.
fn find_member(s: &Sequent, var: &Option<String>) -> Result<(usize, String, String), RuleError> {
    let member_at = |i: usize| match &s.antecedent[i] {
        Item::Formula(Formula::Member { term: Term::Var(v), domain }) => Some((v.clone(), domain.clone())),
        _ => None,
    };
    let candidates = (0..s.antecedent.len()).rev().filter_map(|i| member_at(i).map(|(v, d)| (i, v, d)));
    match var {
        Some(z) => candidates
            .into_iter()
            .find(|(_, v, _)| v == z)
            .ok_or_else(|| RuleError::shape(format!("no membership {z} in D in the antecedent of {s}"))),
        None => {
            let mut all: Vec<_> = candidates.collect();
            all.retain(|(i, v, _)| !free_in_antecedent_except(s, v, &[*i]));
            all.into_iter()
                .next()
                .ok_or_else(|| RuleError::shape(format!("no eigenvariable membership in the antecedent of {s}")))
        }
    }
}

fn free_in_antecedent_except(s: &Sequent, z: &str, skip: &[usize]) -> bool {
    s.antecedent.iter().enumerate().any(|(i, item)| !skip.contains(&i) && item.free_vars().contains(z))
}

fn free_in_succedent_except(s: &Sequent, z: &str, skip: Option<usize>) -> bool {
    s.succedent.iter().enumerate().any(|(k, slot)| Some(k) != skip && slot.free_vars().contains(z))
}

/// A binder name based on `wanted` that captures none of `free`.
fn binder_name(wanted: &Option<String>, free: BTreeSet<String>) -> String {
    fresh_name(wanted.as_deref().unwrap_or("x"), &free)
}

fn forall_backward(s: &Sequent, params: &Params, cfg: &TheoryConfig) -> Result<Sequent, RuleError> {
    right_context_guard(s, cfg, "EQ_FORALL_R")?;
    let k = pick_slot(s, params.target, |f| matches!(f, Formula::Forall { .. }), "a universal formula")?;
    let Formula::Forall { var, domain, body } = slot_formula(s, k)? else { unreachable!() };
    let z = fresh_for(s, &params.var)?;
    let mut out = s.clone();
    out.succedent[k] = body.subst(var, &Term::var(&z)).into();
    out.antecedent.push(Formula::member(Term::var(&z), domain.clone()).into());
    Ok(out)
}

/// The succedent slot holding `z`: the explicit target, the only slot
/// mentioning `z`, or the only slot.
fn slot_of(s: &Sequent, z: &str, target: Option<usize>) -> Result<usize, RuleError> {
    if let Some(k) = target {
        return Ok(k);
    }
    let with: Vec<usize> = (0..s.succedent.len()).filter(|&k| s.succedent[k].free_vars().contains(z)).collect();
    match with.as_slice() {
        [k] => Ok(*k),
        [] if s.succedent.len() == 1 => Ok(0),
        [] => Err(RuleError::shape(format!("no succedent formula mentions {z}"))),
        _ => Err(RuleError::Freshness(format!("{z} is free in more than one succedent slot"))),
    }
}

fn forall_forward(s: &Sequent, params: &Params, cfg: &TheoryConfig) -> Result<Sequent, RuleError> {
    right_context_guard(s, cfg, "EQ_FORALL_R")?;
    let (mi, z, domain) = find_member(s, &params.var)?;
    if free_in_antecedent_except(s, &z, &[mi]) {
        return Err(RuleError::Freshness(format!("{z} is free in the antecedent context of {s}")));
    }
    let k = slot_of(s, &z, params.target)?;
    let f = slot_formula(s, k)?;
    if free_in_succedent_except(s, &z, Some(k)) {
        return Err(RuleError::Freshness(format!("{z} is free in the right context of {s}")));
    }
    let mut free = f.free_vars();
    free.remove(&z);
    let x = binder_name(&params.bound, free);
    let mut out = s.clone();
    out.succedent[k] = Formula::forall(&x, domain, f.subst(&z, &Term::var(&x))).into();
    out.antecedent.remove(mi);
    Ok(out)
}

fn and_backward(s: &Sequent, params: &Params, cfg: &TheoryConfig) -> Result<Vec<Sequent>, RuleError> {
    right_context_guard(s, cfg, "EQ_AND_R")?;
    let k = pick_slot(s, params.target, |f| matches!(f, Formula::And(..)), "a conjunction")?;
    let Formula::And(l, r) = slot_formula(s, k)? else { unreachable!() };
    let mut a = s.clone();
    let mut b = s.clone();
    a.succedent[k] = l.as_ref().clone().into();
    b.succedent[k] = r.as_ref().clone().into();
    Ok(vec![a, b])
}

fn without<T: Clone>(items: &[T], k: usize) -> Vec<T> {
    let mut v = items.to_vec();
    v.remove(k);
    v
}

fn and_forward(a: &Sequent, b: &Sequent, params: &Params, cfg: &TheoryConfig) -> Result<Sequent, RuleError> {
    right_context_guard(a, cfg, "EQ_AND_R")?;
    right_context_guard(b, cfg, "EQ_AND_R")?;
    if !multiset_eq(&a.antecedent, &b.antecedent) {
        return Err(RuleError::shape("the two premises of EQ_AND_R have different antecedents"));
    }
    if a.succedent.len() != b.succedent.len() {
        return Err(RuleError::shape("the two premises of EQ_AND_R have different right contexts"));
    }
    let fits = |k: usize| {
        a.succedent[k].formula().is_some()
            && b.succedent[k].formula().is_some()
            && multiset_eq(&without(&a.succedent, k), &without(&b.succedent, k))
    };
    let k = match params.target {
        Some(k) if k < a.succedent.len() && fits(k) => k,
        Some(k) => return Err(RuleError::shape(format!("slot {k} does not pair the two premises"))),
        None => (0..a.succedent.len())
            .find(|&k| fits(k))
            .ok_or_else(|| RuleError::shape("the two premises of EQ_AND_R have different right contexts"))?,
    };
    let mut out = a.clone();
    out.succedent[k] = Formula::and(slot_formula(a, k)?.clone(), slot_formula(b, k)?.clone()).into();
    Ok(out)
}

fn star_backward(s: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let k = pick_slot(s, params.target, |f| matches!(f, Formula::Star(..)), "a multiplicative disjunction")?;
    let Formula::Star(l, r) = slot_formula(s, k)? else { unreachable!() };
    let mut out = s.clone();
    out.succedent.splice(k..=k, [l.as_ref().clone().into(), r.as_ref().clone().into()]);
    Ok(out)
}

fn star_forward(s: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let k = params.target.unwrap_or(0);
    let l = slot_formula(s, k)?.clone();
    let r = slot_formula(s, k + 1)?.clone();
    let mut out = s.clone();
    out.succedent.splice(k..=k + 1, [Formula::star(l, r).into()]);
    Ok(out)
}

fn bot_backward(s: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let is_bot = |k: &usize| matches!(s.succedent[*k].formula(), Some(Formula::Bot(_)));
    let k = match params.target {
        Some(k) if k < s.succedent.len() && is_bot(&k) => k,
        Some(k) => return Err(RuleError::shape(format!("succedent slot {k} is not bot"))),
        None => (0..s.succedent.len())
            .rev()
            .find(is_bot)
            .ok_or_else(|| RuleError::shape(format!("no bot in the succedent of {s}")))?,
    };
    let mut out = s.clone();
    out.succedent.remove(k);
    Ok(out)
}

fn or_backward(s: &Sequent, params: &Params) -> Result<Vec<Sequent>, RuleError> {
    let i = pick_item(s, params.target, |f| matches!(f, Formula::Or(..)), "a disjunction")?;
    let Formula::Or(l, r) = item_formula(s, i)? else { unreachable!() };
    let mut a = s.clone();
    let mut b = s.clone();
    a.antecedent[i] = l.as_ref().clone().into();
    b.antecedent[i] = r.as_ref().clone().into();
    Ok(vec![a, b])
}

fn or_forward(a: &Sequent, b: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    if !multiset_eq(&a.succedent, &b.succedent) {
        return Err(RuleError::shape("the two premises of EQ_OR_L have different succedents"));
    }
    let rows: Vec<usize> = match params.target {
        Some(i) => vec![i],
        None => (0..a.antecedent.len()).collect(),
    };
    let mut fallback = None;
    for &i in &rows {
        let Ok(fa) = item_formula(a, i) else { continue };
        let rest_a = without(&a.antecedent, i);
        for j in 0..b.antecedent.len() {
            let Ok(fb) = item_formula(b, j) else { continue };
            if !multiset_eq(&rest_a, &without(&b.antecedent, j)) {
                continue;
            }
            if fa != fb {
                return Ok(join_or(a, i, fa, fb));
            }
            fallback.get_or_insert((i, fa, fb));
        }
    }
    match fallback {
        Some((i, fa, fb)) => Ok(join_or(a, i, fa, fb)),
        None => Err(RuleError::shape("the two premises of EQ_OR_L differ in more than one antecedent formula")),
    }
}

fn join_or(a: &Sequent, i: usize, fa: &Formula, fb: &Formula) -> Sequent {
    let mut out = a.clone();
    out.antecedent[i] = Formula::or(fa.clone(), fb.clone()).into();
    out
}

fn exists_backward(s: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let i = pick_item(s, params.target, |f| matches!(f, Formula::Exists { .. }), "an existential formula")?;
    let Formula::Exists { var, domain, body } = item_formula(s, i)? else { unreachable!() };
    let z = fresh_for(s, &params.var)?;
    let mut out = s.clone();
    out.antecedent[i] = body.subst(var, &Term::var(&z)).into();
    out.antecedent.insert(i + 1, Formula::member(Term::var(&z), domain.clone()).into());
    Ok(out)
}

fn exists_forward(s: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let (mi, z, domain) = match &params.var {
        Some(_) => find_member(s, &params.var)?,
        None => {
            // the eigenvariable may occur in exactly one other antecedent formula
            (0..s.antecedent.len())
                .rev()
                .find_map(|i| match &s.antecedent[i] {
                    Item::Formula(Formula::Member { term: Term::Var(v), domain })
                        if !free_in_succedent_except(s, v, None)
                            && s.antecedent.iter().filter(|it| it.free_vars().contains(v)).count() <= 2 =>
                    {
                        Some((i, v.clone(), domain.clone()))
                    }
                    _ => None,
                })
                .ok_or_else(|| RuleError::shape(format!("no eigenvariable membership in the antecedent of {s}")))?
        }
    };
    let bi = match params.target {
        Some(i) => i,
        None => {
            let with: Vec<usize> =
                (0..s.antecedent.len()).filter(|&i| i != mi && s.antecedent[i].free_vars().contains(&z)).collect();
            match with.as_slice() {
                [i] => *i,
                [] => return Err(RuleError::shape(format!("no antecedent formula mentions {z}"))),
                _ => return Err(RuleError::Freshness(format!("{z} is free in more than one antecedent formula"))),
            }
        }
    };
    if bi == mi {
        return Err(RuleError::shape("the body and the membership must be different formulas"));
    }
    let body = item_formula(s, bi)?;
    if free_in_antecedent_except(s, &z, &[mi, bi]) {
        return Err(RuleError::Freshness(format!("{z} is free in the antecedent context of {s}")));
    }
    if free_in_succedent_except(s, &z, None) {
        return Err(RuleError::Freshness(format!("{z} is free in the succedent of {s}")));
    }
    let mut free = body.free_vars();
    free.remove(&z);
    let x = binder_name(&params.bound, free);
    let mut out = s.clone();
    out.antecedent[bi] = Formula::exists(&x, domain, body.subst(&z, &Term::var(&x))).into();
    out.antecedent.remove(mi);
    Ok(out)
}

fn equality_introduce(s: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let t =
        params.term.clone().ok_or_else(|| RuleError::Param("EQ_EQUALITY backward needs the replaced term".into()))?;
    let v = fresh_for(s, &params.var)?;
    let var = Term::var(&v);
    if var == t {
        return Err(RuleError::Param(format!("cannot equate {v} with itself")));
    }
    let n = s.count_occurrences(&t);
    let positions = params.positions.clone().unwrap_or_else(|| (1..=n).collect());
    if let Some(p) = positions.iter().find(|&&p| p == 0 || p > n) {
        return Err(RuleError::Position(format!("{t} has {n} occurrence(s), position {p} requested")));
    }
    let mut out = s.replace_occurrences(&t, &var, &positions);
    out.antecedent.push(Formula::Eq(var, t).into());
    Ok(out)
}

fn equality_discharge(s: &Sequent, params: &Params) -> Result<Sequent, RuleError> {
    let deps: BTreeSet<String> = s.context_vars().flat_map(|c| c.deps.iter().cloned()).collect();
    let usable = |i: usize| match &s.antecedent[i] {
        Item::Formula(Formula::Eq(Term::Var(v), t)) if Term::var(v) != *t && !deps.contains(v) => {
            Some((v.clone(), t.clone()))
        }
        _ => None,
    };
    let (i, v, t) = match params.target {
        Some(i) if i < s.antecedent.len() => {
            let (v, t) = usable(i).ok_or_else(|| {
                RuleError::shape(format!(
                    "antecedent item {i} is not an equation s = t with s a dischargeable variable"
                ))
            })?;
            (i, v, t)
        }
        Some(i) => return Err(RuleError::Position(format!("no antecedent item {i}"))),
        None => (0..s.antecedent.len())
            .rev()
            .find_map(|i| usable(i).map(|(v, t)| (i, v, t)))
            .ok_or_else(|| RuleError::shape(format!("no dischargeable equation in the antecedent of {s}")))?,
    };
    let mut rest = s.clone();
    rest.antecedent.remove(i);
    Ok(rest.subst(&v, &t))
}

fn bowtie_backward(s: &Sequent, params: &Params, cfg: &TheoryConfig) -> Result<Sequent, RuleError> {
    right_context_guard(s, cfg, "EQ_BOWTIE_R")?;
    let k = pick_slot(s, params.target, |f| matches!(f, Formula::Bowtie { .. }), "a bowtie formula")?;
    let Formula::Bowtie { var, domain, left, right } = slot_formula(s, k)? else { unreachable!() };
    let z = fresh_for(s, &params.var)?;
    let zt = Term::var(&z);
    let mut out = s.clone();
    out.succedent[k] = Slot::Correlated {
        label: random_variable_of(domain),
        left: left.subst(var, &zt),
        right: right.subst(var, &zt),
    };
    out.antecedent.push(Formula::member(zt, domain.clone()).into());
    Ok(out)
}

fn bowtie_forward(s: &Sequent, params: &Params, cfg: &TheoryConfig) -> Result<Sequent, RuleError> {
    right_context_guard(s, cfg, "EQ_BOWTIE_R")?;
    let k = match params.target {
        Some(k) => k,
        None => (0..s.succedent.len())
            .find(|&k| matches!(s.succedent[k], Slot::Correlated { .. }))
            .ok_or_else(|| RuleError::shape(format!("no correlated slot in the succedent of {s}")))?,
    };
    let Some(Slot::Correlated { label, left, right }) = s.succedent.get(k) else {
        return Err(RuleError::shape(format!("succedent slot {k} is not correlated")));
    };
    let var = match &params.var {
        Some(v) => Some(v.clone()),
        None => s.antecedent.iter().rev().find_map(|i| match i {
            Item::Formula(Formula::Member { term: Term::Var(v), domain }) if random_variable_of(domain) == *label => {
                Some(v.clone())
            }
            _ => None,
        }),
    };
    let (mi, z, domain) = find_member(s, &var)?;
    if random_variable_of(&domain) != *label {
        return Err(RuleError::shape(format!(
            "the correlated comma ,_{label} does not belong to the random variable of {domain}"
        )));
    }
    if free_in_antecedent_except(s, &z, &[mi]) {
        return Err(RuleError::Freshness(format!("{z} is free in the antecedent context of {s}")));
    }
    if free_in_succedent_except(s, &z, Some(k)) {
        return Err(RuleError::Freshness(format!("{z} is free in the right context of {s}")));
    }
    let mut free = left.free_vars();
    free.extend(right.free_vars());
    free.remove(&z);
    let x = binder_name(&params.bound, free);
    let xt = Term::var(&x);
    let mut out = s.clone();
    out.succedent[k] = Formula::bowtie(&x, domain, left.subst(&z, &xt), right.subst(&z, &xt)).into();
    out.antecedent.remove(mi);
    Ok(out)
}

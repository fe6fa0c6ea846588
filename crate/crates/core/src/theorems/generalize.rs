use std::collections::BTreeSet;
use std::sync::Arc;

use super::{cut_node, eq_step, reorder, slot_positions, TheoremError};
use crate::calculus::{correlate, focus_sequent, Derivation, Direction, Params, RuleId};
use crate::syntax::{fresh_var_avoiding, multiset_eq, Domain, DomainKind, Formula, Item, Sequent, Slot, Term};

/// An experimental datum `gamma |- formulas` together with the outcome
/// term(s) it was observed at.
#[derive(Clone, Debug, PartialEq)]
pub struct Judgement {
    pub gamma: Vec<Item>,
    pub formulas: Vec<Formula>,
    pub index: Vec<Term>,
}

impl Judgement {
    pub fn new(gamma: Vec<Item>, formulas: Vec<Formula>, index: Vec<Term>) -> Self {
        Judgement { gamma, formulas, index }
    }

    /// Takes the antecedent and the plain succedent formulas of `s`.
    pub fn from_sequent(s: &Sequent, index: Vec<Term>) -> Result<Self, TheoremError> {
        let formulas = s
            .succedent
            .iter()
            .map(|slot| match slot {
                Slot::Single(Item::Formula(f)) => Ok(f.clone()),
                other => Err(TheoremError::Batch(format!("{other} is not a plain formula"))),
            })
            .collect::<Result<_, _>>()?;
        Ok(Judgement { gamma: s.antecedent.clone(), formulas, index })
    }

    fn sequent(&self) -> Sequent {
        Sequent::new(self.gamma.clone(), self.formulas.iter().cloned().map(Slot::from).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneralizeMode {
    /// `G |- A(ti)` for each element of one domain.
    Single { domain: String },
    /// `G |- A(ti), A'(wj)` for each pair of elements of two domains.
    TwoVariable { first: String, second: String },
    /// `G |- A(ti), A'(ti)` with one shared outcome per datum.
    Correlated { domain: String },
}

#[derive(Clone, Debug)]
pub struct Generalization {
    pub sequent: Sequent,
    /// Leaves are the judgements of the batch.
    pub derivation: Arc<Derivation>,
    /// The domains built from the batch; focused, since membership in them is
    /// defined as the disjunction of the equalities with their elements.
    pub domains: Vec<Domain>,
}

/// Replaces `t` in `f` by the variable `v`.
fn abstract_term(f: &Formula, t: &Term, v: &str) -> Formula {
    let s = Sequent::new(vec![], vec![f.clone().into()]);
    let n = s.count_occurrences(t);
    let out = s.replace_occurrences(t, &Term::var(v), &(1..=n).collect());
    out.succedent[0].formula().cloned().expect("one formula in, one out")
}

fn build_domain(name: &str, terms: Vec<Term>) -> Result<Domain, TheoremError> {
    let kind = DomainKind::infer(&terms);
    Ok(Domain::new(name, terms, kind, true)?)
}

fn distinct(terms: impl Iterator<Item = Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for t in terms {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Introduces `v = t` for the occurrences of `t` in the given slots, joins
/// the branches by the disjunction equation and cuts the focusing axiom of
/// `d`, giving `..., v in D |- ...`.
fn generalize_over(
    branches: Vec<(Arc<Derivation>, Term)>,
    v: &str,
    slots: &[usize],
    d: &Domain,
) -> Result<Arc<Derivation>, TheoremError> {
    let mut introduced = Vec::new();
    for (b, t) in branches {
        let positions: BTreeSet<usize> = slots.iter().flat_map(|&k| slot_positions(&b.conclusion, &t, k)).collect();
        let params = Params::new().var(v).term(t).positions(positions);
        introduced.push(eq_step(RuleId::EqEquality, Direction::Backward, params, vec![b], 0)?);
    }
    let mut joined = introduced.pop().ok_or_else(|| TheoremError::Batch("empty batch".into()))?;
    while let Some(b) = introduced.pop() {
        joined = eq_step(RuleId::EqOrL, Direction::Forward, Params::new(), vec![b, joined], 0)?;
    }
    let axiom = Derivation::leaf(RuleId::AxFocus(d.name().to_string()), focus_sequent(d, v));
    let disj = axiom.conclusion.succedent[0].formula().cloned().expect("axioms have one formula");
    cut_node(axiom, joined, disj)
}

/// Turns a batch of propositional judgements into one predicative sequent.
pub fn generalize(batch: &[Judgement], mode: &GeneralizeMode) -> Result<Generalization, TheoremError> {
    let first = batch.first().ok_or_else(|| TheoremError::Batch("empty batch".into()))?;
    if let Some(j) = batch.iter().find(|j| !multiset_eq(&j.gamma, &first.gamma)) {
        return Err(TheoremError::Batch(format!("{} has a different context", j.sequent())));
    }
    let (formulas, indices) = match mode {
        GeneralizeMode::Single { .. } => (1, 1),
        GeneralizeMode::TwoVariable { .. } => (2, 2),
        GeneralizeMode::Correlated { .. } => (2, 1),
    };
    if let Some(j) = batch.iter().find(|j| j.formulas.len() != formulas || j.index.len() != indices) {
        return Err(TheoremError::Batch(format!(
            "{} needs {formulas} formula(s) and {indices} index term(s)",
            j.sequent()
        )));
    }
    let mut names: BTreeSet<String> = BTreeSet::new();
    for j in batch {
        names.extend(j.sequent().all_names());
    }
    let z = fresh_var_avoiding(&names);
    names.insert(z.clone());
    let y = fresh_var_avoiding(&names);
    let gamma = first.gamma.clone();

    let same_templates = |templates: Vec<Vec<Formula>>| -> Result<Vec<Formula>, TheoremError> {
        let head = templates[0].clone();
        match templates.iter().position(|t| *t != head) {
            Some(i) => {
                Err(TheoremError::Batch(format!("{} is not an instance of the same formulas", batch[i].sequent())))
            }
            None => Ok(head),
        }
    };
    let leaf = |j: &Judgement| Derivation::leaf(RuleId::Hypothesis, j.sequent());

    match mode {
        GeneralizeMode::Single { domain } | GeneralizeMode::Correlated { domain } => {
            let terms = distinct(batch.iter().map(|j| j.index[0].clone()));
            if terms.len() != batch.len() {
                return Err(TheoremError::Batch("two judgements share an index term".into()));
            }
            let templates =
                batch.iter().map(|j| j.formulas.iter().map(|f| abstract_term(f, &j.index[0], &z)).collect()).collect();
            let template = same_templates(templates)?;
            let d = build_domain(domain, terms)?;
            let slots: Vec<usize> = (0..formulas).collect();
            let branches = batch.iter().map(|j| (leaf(j), j.index[0].clone())).collect();
            let general = generalize_over(branches, &z, &slots, &d)?;
            let mut antecedent = gamma.clone();
            antecedent.push(Formula::member(Term::var(&z), domain.clone()).into());
            if matches!(mode, GeneralizeMode::Single { .. }) {
                let sequent = Sequent::new(antecedent, template.into_iter().map(Slot::from).collect());
                let derivation = reorder(&general, sequent.clone());
                return Ok(Generalization { sequent, derivation, domains: vec![d] });
            }
            let params = Params::new().var(&z);
            let joined = correlate(&general.conclusion, &params)?;
            let sequent = Sequent::new(antecedent, joined.succedent.clone());
            let derivation = Derivation::node(RuleId::Correlate, None, params, vec![general], sequent.clone());
            Ok(Generalization { sequent, derivation, domains: vec![d] })
        }
        GeneralizeMode::TwoVariable { first: n1, second: n2 } => {
            let ts = distinct(batch.iter().map(|j| j.index[0].clone()));
            let ws = distinct(batch.iter().map(|j| j.index[1].clone()));
            let find = |t: &Term, w: &Term| batch.iter().filter(|j| j.index[0] == *t && j.index[1] == *w).count();
            if batch.len() != ts.len() * ws.len() || ts.iter().any(|t| ws.iter().any(|w| find(t, w) != 1)) {
                return Err(TheoremError::Batch(format!(
                    "expected one judgement per pair of {} and {} index terms",
                    ts.len(),
                    ws.len()
                )));
            }
            let templates = batch
                .iter()
                .map(|j| {
                    vec![abstract_term(&j.formulas[0], &j.index[0], &z), abstract_term(&j.formulas[1], &j.index[1], &y)]
                })
                .collect();
            let template = same_templates(templates)?;
            let d1 = build_domain(n1, ts.clone())?;
            let d2 = build_domain(n2, ws.clone())?;
            let mut rows = Vec::new();
            for t in &ts {
                let branches = ws
                    .iter()
                    .map(|w| {
                        let j = batch.iter().find(|j| j.index[0] == *t && j.index[1] == *w).expect("checked above");
                        (leaf(j), w.clone())
                    })
                    .collect();
                rows.push((generalize_over(branches, &y, &[1], &d2)?, t.clone()));
            }
            let general = generalize_over(rows, &z, &[0], &d1)?;
            let mut antecedent = gamma;
            antecedent.push(Formula::member(Term::var(&z), n1.clone()).into());
            antecedent.push(Formula::member(Term::var(&y), n2.clone()).into());
            let sequent = Sequent::new(antecedent, template.into_iter().map(Slot::from).collect());
            let derivation = reorder(&general, sequent.clone());
            Ok(Generalization { sequent, derivation, domains: vec![d1, d2] })
        }
    }
}

//! Fixed derivation constructions: reflection, the focusing results,
//! generalization and reversibility, the sharp-state chain, uncertainty and
//! distributivity.
//!
//! Builders named `*_tree` produce a derivation regardless of the theory in
//! force, so that checking it under a given [`TheoryConfig`] shows which
//! axioms it depends on. The `derive_*` functions add the preconditions.

mod focusing;
mod generalize;
mod observables;
mod sharp;

use std::sync::Arc;

use crate::calculus::{cut_conclusion, Derivation, Direction, Params, RuleError, RuleId, TheoryConfig};
use crate::syntax::{DomainError, Formula, Item, Sequent, Slot, Term};

pub use focusing::{
    check_reversibility, derive_lemma1, derive_prop1, derive_prop2, derive_reflection, lemma1_tree, prop1_tree,
    prop2_tree, reversibility_witness, FocusLeaf, ReversibilityVerdict,
};
pub use generalize::{generalize, Generalization, GeneralizeMode, Judgement};
pub use observables::{build_uncertainty, derive_distributivity, distributivity_trees, Distributivity, Uncertainty};
pub use sharp::{collapse_trees, derive_collapse_and_repeat, CollapseChain};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoremError {
    #[error("focus axiom unavailable: {0} is not focused")]
    NotFocused(String),
    #[error("the singleton axioms are disabled")]
    AxiomsDisabled,
    #[error("index {index} is out of range for a domain of {len} element(s)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{0} is not uniform")]
    NotUniform(String),
    #[error("batch shape mismatch: {0}")]
    Batch(String),
    #[error("classical mode required: {0}")]
    ClassicalModeRequired(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("construction failed: {0}")]
    Rule(#[from] RuleError),
}

/// Conclusions are computed under the most permissive theory; checking
/// under the caller's theory decides acceptance.
fn construction_cfg() -> TheoryConfig {
    TheoryConfig::new().classical(true)
}

fn eq_step(
    eq: RuleId,
    dir: Direction,
    params: Params,
    premises: Vec<Arc<Derivation>>,
    pick: usize,
) -> Result<Arc<Derivation>, TheoremError> {
    Ok(Derivation::equation(eq, dir, params, premises, pick, &construction_cfg())?)
}

fn atom(pred: &str, t: Term) -> Formula {
    Formula::atom(pred, vec![t])
}

/// Cuts `f` between `left` (where it is a succedent formula) and `right`
/// (where it is an antecedent formula). The conclusion keeps the order of
/// `right`'s antecedent with `left`'s antecedent spliced in place of `f`.
fn cut_node(left: Arc<Derivation>, right: Arc<Derivation>, f: Formula) -> Result<Arc<Derivation>, TheoremError> {
    let plain = cut_conclusion(&left.conclusion, &right.conclusion, &f)
        .ok_or_else(|| RuleError::shape(format!("{f} cannot be cut between the two premises")))?;
    let at_ante = right.conclusion.antecedent.iter().position(|i| i.formula() == Some(&f));
    let at_succ = left.conclusion.succedent.iter().position(|s| s.formula() == Some(&f));
    let conclusion = match (at_ante, at_succ) {
        (Some(i), Some(k)) => {
            let mut antecedent = right.conclusion.antecedent.clone();
            antecedent.splice(i..=i, left.conclusion.antecedent.iter().cloned());
            let mut succedent = left.conclusion.succedent.clone();
            succedent.splice(k..=k, right.conclusion.succedent.iter().cloned());
            Sequent::new(antecedent, succedent)
        }
        _ => plain,
    };
    Ok(Derivation::node(RuleId::Cut, None, Params::new().formula(f), vec![left, right], conclusion))
}

/// The same node with its conclusion reordered.
fn reorder(d: &Arc<Derivation>, conclusion: Sequent) -> Arc<Derivation> {
    debug_assert!(d.conclusion.equiv(&conclusion));
    Arc::new(Derivation { conclusion, ..(**d).clone() })
}

/// Occurrence positions of `t` inside succedent slot `k`.
fn slot_positions(s: &Sequent, t: &Term, k: usize) -> std::collections::BTreeSet<usize> {
    let before = Sequent::new(s.antecedent.clone(), s.succedent[..k].to_vec()).count_occurrences(t);
    let within = Sequent::new(vec![], vec![s.succedent[k].clone()]).count_occurrences(t);
    (before + 1..=before + within).collect()
}

fn context(name: &str) -> Item {
    Item::Context(crate::syntax::ContextVar::new(name))
}

fn single(f: Formula) -> Slot {
    f.into()
}

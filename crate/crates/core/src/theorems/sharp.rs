use std::sync::Arc;

use super::focusing::{derive_reflection, prop1_tree, FocusLeaf};
use super::{atom, cut_node, single, TheoremError};
use crate::calculus::{Derivation, Params, RuleId, TheoryConfig};
use crate::syntax::{forgetful_predicate, sharp_companion, Domain, Formula, Sequent, Term};

#[derive(Clone, Debug)]
pub struct CollapseChain {
    /// `forall x in D . A(x) |- A^f(#si)`: selective measurement.
    pub collapse: Arc<Derivation>,
    /// `forall x in D . A(x) |- forall x in {si} . A^f(x)`: the collapsed
    /// state, through the sharp-state axiom.
    pub repeat: Arc<Derivation>,
    /// `forall x in D . A(x) |- A^f(#si)` again, by measuring the collapsed
    /// state.
    pub remeasure: Arc<Derivation>,
}

/// Forgetful substitution of `#s` for `z` in the reflection sequent of
/// `domain`, with the sharp membership cut away.
fn measure_sharp(domain: &str, pred: &str, s: &str) -> Result<Arc<Derivation>, TheoremError> {
    let reflection = derive_reflection(domain, pred);
    let sharp = Term::sharp(s);
    let selected = Derivation::node(
        RuleId::FSubst,
        None,
        Params::new().var("z").term(sharp.clone()),
        vec![reflection.clone()],
        reflection.conclusion.forgetful("z", &sharp),
    );
    let member = Formula::member(sharp, sharp_companion(domain));
    let fact = Derivation::leaf(RuleId::Membership, Sequent::new(vec![], vec![single(member.clone())]));
    cut_node(fact, selected, member)
}

/// The collapse, repeat and re-measurement derivations for the `i`-th
/// (1-based) element of `d`, independent of the theory in force.
pub fn collapse_trees(d: &Domain, i: usize, pred: &str) -> Result<CollapseChain, TheoremError> {
    let element = i
        .checked_sub(1)
        .and_then(|k| d.elements().get(k))
        .ok_or(TheoremError::IndexOutOfRange { index: i, len: d.len() })?;
    let s = element.state().expect("domain elements are closed").to_string();
    let fpred = forgetful_predicate(pred);

    let collapse = measure_sharp(d.name(), pred, &s)?;
    let collapsed = Domain::singleton(&s);
    let axiom_consequence = prop1_tree(&fpred, &collapsed, FocusLeaf::Singleton)?;
    let repeat = cut_node(collapse.clone(), axiom_consequence, atom(&fpred, Term::sharp(&s)))?;

    let again = measure_sharp(collapsed.name(), &fpred, &s)?;
    let state = repeat.conclusion.succedent[0].formula().cloned().expect("one formula");
    let remeasure = cut_node(repeat.clone(), again, state)?;
    Ok(CollapseChain { collapse, repeat, remeasure })
}

pub fn derive_collapse_and_repeat(
    d: &Domain,
    i: usize,
    pred: &str,
    cfg: &TheoryConfig,
) -> Result<CollapseChain, TheoremError> {
    if !cfg.singleton_axioms {
        return Err(TheoremError::AxiomsDisabled);
    }
    collapse_trees(d, i, pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check, RuleError};

    fn cfg() -> TheoryConfig {
        TheoryConfig::new().with_domain(Domain::uniform("D", 2).unwrap())
    }

    #[test]
    fn chain_conclusions() {
        let c = derive_collapse_and_repeat(&Domain::uniform("D", 2).unwrap(), 1, "A", &cfg()).unwrap();
        assert_eq!(c.collapse.conclusion.to_string(), "forall x in D . A(x) |- A^f(#t1)");
        assert_eq!(c.repeat.conclusion.to_string(), "forall x in D . A(x) |- forall x in {t1} . A^f(x)");
        assert_eq!(c.remeasure.conclusion.to_string(), "forall x in D . A(x) |- A^f(#t1)");
        for d in [&c.collapse, &c.repeat, &c.remeasure] {
            let r = check(d, &cfg());
            assert!(r.closed(), "{r}");
        }
        assert!(c.repeat.rules().contains(&RuleId::AxSingleton("{t1}".into())));
    }

    #[test]
    fn rejected_without_singleton_axioms() {
        let c = collapse_trees(&Domain::uniform("D", 2).unwrap(), 2, "A").unwrap();
        let off = cfg().singleton_axioms(false);
        for d in [&c.collapse, &c.repeat, &c.remeasure] {
            let r = check(d, &off);
            assert!(matches!(r.first_failure.unwrap().error, RuleError::DisabledAxiom(_)));
        }
        assert_eq!(
            derive_collapse_and_repeat(&Domain::uniform("D", 2).unwrap(), 1, "A", &off).unwrap_err(),
            TheoremError::AxiomsDisabled
        );
    }

    #[test]
    fn index_range() {
        let d = Domain::uniform("D", 2).unwrap();
        assert_eq!(collapse_trees(&d, 3, "A").unwrap_err(), TheoremError::IndexOutOfRange { index: 3, len: 2 });
        assert!(collapse_trees(&d, 0, "A").is_err());
    }
}

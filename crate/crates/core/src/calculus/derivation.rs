use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::config::TheoryConfig;
use super::equations::equation_step;
use super::rule::{Direction, Params, RuleError, RuleId};
use crate::syntax::Sequent;

/// A tree of rule applications. Premises are shared, so one sub-derivation
/// may feed several inferences.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: RuleId,
    pub direction: Option<Direction>,
    pub params: Params,
    pub premises: Vec<Arc<Derivation>>,
}

/// One line of a linearized derivation. Premises refer to earlier ids.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub id: usize,
    pub rule: RuleId,
    pub direction: Option<Direction>,
    pub params: Params,
    pub premises: Vec<usize>,
    pub conclusion: Sequent,
}

impl Derivation {
    pub fn leaf(rule: RuleId, conclusion: Sequent) -> Arc<Derivation> {
        Arc::new(Derivation { conclusion, rule, direction: None, params: Params::default(), premises: vec![] })
    }

    pub fn node(
        rule: RuleId,
        direction: Option<Direction>,
        params: Params,
        premises: Vec<Arc<Derivation>>,
        conclusion: Sequent,
    ) -> Arc<Derivation> {
        Arc::new(Derivation { conclusion, rule, direction, params, premises })
    }

    /// Applies an equation to the premises' conclusions. When the equation
    /// yields several sequents, `pick` selects the one concluded.
    pub fn equation(
        eq: RuleId,
        dir: Direction,
        params: Params,
        premises: Vec<Arc<Derivation>>,
        pick: usize,
        cfg: &TheoryConfig,
    ) -> Result<Arc<Derivation>, RuleError> {
        let inputs: Vec<Sequent> = premises.iter().map(|p| p.conclusion.clone()).collect();
        let mut out = equation_step(&inputs, &eq, dir, &params, cfg)?;
        if pick >= out.len() {
            return Err(RuleError::Position(format!("{eq} yields {} sequent(s), not {}", out.len(), pick + 1)));
        }
        let conclusion = out.swap_remove(pick);
        Ok(Derivation::node(eq, Some(dir), params, premises, conclusion))
    }

    /// Steps in post-order with shared sub-derivations listed once.
    pub fn linearize(&self) -> Vec<Step> {
        let mut steps = Vec::new();
        let mut seen = HashMap::new();
        self.push_steps(&mut steps, &mut seen);
        steps
    }

    fn push_steps(&self, steps: &mut Vec<Step>, seen: &mut HashMap<*const Derivation, usize>) -> usize {
        let premises = self
            .premises
            .iter()
            .map(|p| {
                let key = Arc::as_ptr(p);
                if let Some(&id) = seen.get(&key) {
                    return id;
                }
                let id = p.push_steps(steps, seen);
                seen.insert(key, id);
                id
            })
            .collect();
        let id = steps.len() + 1;
        steps.push(Step {
            id,
            rule: self.rule.clone(),
            direction: self.direction,
            params: self.params.clone(),
            premises,
            conclusion: self.conclusion.clone(),
        });
        id
    }

    /// Rebuilds a tree from steps; the last step is the root.
    pub fn from_steps(steps: &[Step]) -> Result<Arc<Derivation>, String> {
        let mut built: HashMap<usize, Arc<Derivation>> = HashMap::new();
        let mut last = None;
        for s in steps {
            if built.contains_key(&s.id) {
                return Err(format!("step {} is defined twice", s.id));
            }
            let premises = s
                .premises
                .iter()
                .map(|p| built.get(p).cloned().ok_or_else(|| format!("step {} refers to unknown step {p}", s.id)))
                .collect::<Result<Vec<_>, _>>()?;
            let d = Derivation::node(s.rule.clone(), s.direction, s.params.clone(), premises, s.conclusion.clone());
            built.insert(s.id, d.clone());
            last = Some(d);
        }
        last.ok_or_else(|| "the script has no steps".to_string())
    }

    /// Number of nodes, counting shared sub-derivations once.
    pub fn size(&self) -> usize {
        self.linearize().len()
    }

    /// Inference steps, that is nodes other than leaves.
    pub fn inference_count(&self) -> usize {
        self.linearize().iter().filter(|s| !s.premises.is_empty()).count()
    }

    pub fn rules(&self) -> Vec<RuleId> {
        self.linearize().into_iter().map(|s| s.rule).collect()
    }

    /// Replaces every hypothesis leaf concluding `hyp` by `replacement`.
    pub fn graft(self: &Arc<Self>, hyp: &Sequent, replacement: &Arc<Derivation>) -> Arc<Derivation> {
        if self.rule == RuleId::Hypothesis && self.conclusion.equiv(hyp) {
            return replacement.clone();
        }
        if self.premises.is_empty() {
            return self.clone();
        }
        let premises = self.premises.iter().map(|p| p.graft(hyp, replacement)).collect();
        Arc::new(Derivation { premises, ..(**self).clone() })
    }

    pub fn hypotheses(&self) -> Vec<Sequent> {
        self.linearize().into_iter().filter(|s| s.rule == RuleId::Hypothesis).map(|s| s.conclusion).collect()
    }
}

impl fmt::Display for Step {
    /// `step <id> <RULE> [direction] [params] [(premises)] : <sequent>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} {}", self.id, self.rule)?;
        if let Some(d) = self.direction {
            write!(f, " {d}")?;
        }
        if !self.params.is_empty() {
            write!(f, " {}", self.params)?;
        }
        if !self.premises.is_empty() {
            let ids: Vec<String> = self.premises.iter().map(usize::to_string).collect();
            write!(f, " ({})", ids.join(", "))?;
        }
        write!(f, " : {}", self.conclusion)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.linearize() {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_sequent;

    fn reflection() -> Arc<Derivation> {
        let id =
            Derivation::leaf(RuleId::Identity, parse_sequent("forall x in D . A(x) |- forall x in D . A(x)").unwrap());
        Derivation::equation(RuleId::EqForallR, Direction::Backward, Params::new(), vec![id], 0, &TheoryConfig::new())
            .unwrap()
    }

    #[test]
    fn linearize_and_rebuild() {
        let d = reflection();
        let steps = d.linearize();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[1].premises, vec![1]);
        assert_eq!(steps[1].to_string(), "step 2 EQ_FORALL_R backward (1) : forall x in D . A(x), z in D |- A(z)");
        let back = Derivation::from_steps(&steps).unwrap();
        assert_eq!(*back, *d);
    }

    #[test]
    fn shared_premises_listed_once() {
        let leaf = Derivation::leaf(RuleId::Hypothesis, parse_sequent("G |- A()").unwrap());
        let both = Derivation::equation(
            RuleId::EqAndR,
            Direction::Forward,
            Params::new(),
            vec![leaf.clone(), leaf],
            0,
            &TheoryConfig::new(),
        )
        .unwrap();
        let steps = both.linearize();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[1].premises, vec![1, 1]);
        assert_eq!(both.conclusion.to_string(), "G |- A() & A()");
    }

    #[test]
    fn bad_references_rejected() {
        let mut steps = reflection().linearize();
        steps[1].premises = vec![7];
        assert!(Derivation::from_steps(&steps).is_err());
        assert!(Derivation::from_steps(&[]).is_err());
    }

    #[test]
    fn graft_replaces_hypotheses() {
        let hyp = parse_sequent("forall x in D . A(x) |- forall x in D . A(x)").unwrap();
        let open = Derivation::equation(
            RuleId::EqForallR,
            Direction::Backward,
            Params::new(),
            vec![Derivation::leaf(RuleId::Hypothesis, hyp.clone())],
            0,
            &TheoryConfig::new(),
        )
        .unwrap();
        assert_eq!(open.hypotheses().len(), 1);
        let closed = open.graft(&hyp, &Derivation::leaf(RuleId::Identity, hyp.clone()));
        assert!(closed.hypotheses().is_empty());
        assert_eq!(*closed, *reflection());
    }
}

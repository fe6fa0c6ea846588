use std::collections::HashMap;
use std::fmt;

use super::config::TheoryConfig;
use super::derivation::{Derivation, Step};
use super::equations::equation_step;
use super::rule::{Direction, Params, RuleError, RuleId};
use super::rules::rule_step;
use crate::syntax::Sequent;

#[derive(Clone, Debug, PartialEq)]
pub struct StepVerdict {
    pub id: usize,
    pub rule: RuleId,
    pub direction: Option<Direction>,
    pub error: Option<RuleError>,
}

impl StepVerdict {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub step: usize,
    pub rule: RuleId,
    pub error: RuleError,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at step {} ({}: {})", self.error.headline(), self.step, self.rule, self.error)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CheckReport {
    pub steps: Vec<StepVerdict>,
    pub first_failure: Option<Failure>,
    /// Hypothesis leaves the conclusion still depends on.
    pub open_hypotheses: Vec<(usize, Sequent)>,
    /// Uses of rules that go beyond the definitory equations.
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn accepted(&self) -> bool {
        self.first_failure.is_none()
    }

    /// Accepted with no open hypotheses.
    pub fn closed(&self) -> bool {
        self.accepted() && self.open_hypotheses.is_empty()
    }

    pub fn verdict(&self) -> String {
        match &self.first_failure {
            None => "ACCEPTED".to_string(),
            Some(f) => format!("REJECTED: {f}"),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "accepted": self.accepted(),
            "closed": self.closed(),
            "verdict": self.verdict(),
            "first_failure": self.first_failure.as_ref().map(|f| serde_json::json!({
                "step": f.step,
                "rule": f.rule.to_string(),
                "kind": f.error.headline(),
                "reason": f.error.to_string(),
            })),
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "id": s.id,
                "rule": s.rule.to_string(),
                "direction": s.direction.map(|d| d.to_string()),
                "ok": s.ok(),
                "error": s.error.as_ref().map(ToString::to_string),
            })).collect::<Vec<_>>(),
            "open_hypotheses": self.open_hypotheses.iter().map(|(id, h)| serde_json::json!({
                "step": id,
                "sequent": h.to_string(),
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }

    /// Rules of the failing steps, in step order.
    pub fn failing_rules(&self) -> Vec<RuleId> {
        self.steps.iter().filter(|s| !s.ok()).map(|s| s.rule.clone()).collect()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(f, "step {} {}", s.id, s.rule)?;
            if let Some(d) = s.direction {
                write!(f, " {d}")?;
            }
            match &s.error {
                None => writeln!(f, ": ok")?,
                Some(e) => writeln!(f, ": FAILED, {}: {e}", e.headline())?,
            }
        }
        for (id, h) in &self.open_hypotheses {
            writeln!(f, "open hypothesis at step {id}: {h}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        writeln!(f, "{}", self.verdict())
    }
}

/// Validates a single step against the conclusions of its premises.
pub fn check_step(
    rule: &RuleId,
    direction: Option<Direction>,
    params: &Params,
    premises: &[Sequent],
    conclusion: &Sequent,
    cfg: &TheoryConfig,
) -> Result<(), RuleError> {
    conclusion.validate().map_err(|e| RuleError::shape(e.to_string()))?;
    if !rule.is_equation() {
        if let Some(d) = direction {
            return Err(RuleError::Param(format!("{rule} is one-directional and cannot be applied {d}")));
        }
        return rule_step(conclusion, rule, premises, params, cfg);
    }
    let dir = direction.ok_or_else(|| RuleError::Param(format!("{rule} needs a direction")))?;
    let out = equation_step(premises, rule, dir, params, cfg)?;
    if out.iter().any(|s| s.equiv(conclusion)) {
        return Ok(());
    }
    if params.target.is_none() {
        // the default target may differ from the one the author meant
        let width = premises.iter().map(|p| p.antecedent.len().max(p.succedent.len())).max().unwrap_or(0);
        for k in 0..width {
            let retry = Params { target: Some(k), ..params.clone() };
            if let Ok(out) = equation_step(premises, rule, dir, &retry, cfg) {
                if out.iter().any(|s| s.equiv(conclusion)) {
                    return Ok(());
                }
            }
        }
    }
    let expected: Vec<String> = out.iter().map(ToString::to_string).collect();
    Err(RuleError::Mismatch { expected: expected.join(" and "), found: conclusion.to_string() })
}

fn note_for(step: &Step) -> Option<String> {
    let id = step.id;
    match &step.rule {
        RuleId::Dualize => Some(format!("step {id} applies duality as an explicit rule")),
        RuleId::Correlate => Some(format!("step {id} introduces a correlated comma")),
        RuleId::Instantiate => {
            Some(format!("step {id} instantiates the schematic symbol {}", step.params.pred.as_deref().unwrap_or("?")))
        }
        RuleId::Membership => Some(format!("step {id} uses the declared fact {}", step.conclusion)),
        _ => None,
    }
}

pub fn check_steps(steps: &[Step], cfg: &TheoryConfig) -> CheckReport {
    let mut report = CheckReport::default();
    let mut conclusions: HashMap<usize, &Sequent> = HashMap::new();
    for step in steps {
        let premises: Result<Vec<Sequent>, RuleError> = step
            .premises
            .iter()
            .map(|p| {
                conclusions
                    .get(p)
                    .map(|s| (*s).clone())
                    .ok_or_else(|| RuleError::Param(format!("premise {p} is not an earlier step")))
            })
            .collect();
        let result =
            premises.and_then(|ps| check_step(&step.rule, step.direction, &step.params, &ps, &step.conclusion, cfg));
        if let Err(e) = &result {
            report.first_failure.get_or_insert(Failure { step: step.id, rule: step.rule.clone(), error: e.clone() });
        }
        if step.rule == RuleId::Hypothesis {
            report.open_hypotheses.push((step.id, step.conclusion.clone()));
        }
        if let Some(n) = note_for(step) {
            report.notes.push(n);
        }
        report.steps.push(StepVerdict {
            id: step.id,
            rule: step.rule.clone(),
            direction: step.direction,
            error: result.err(),
        });
        conclusions.insert(step.id, &step.conclusion);
    }
    report
}

/// Checks every node of a derivation under the given theory.
pub fn check(d: &Derivation, cfg: &TheoryConfig) -> CheckReport {
    check_steps(&d.linearize(), cfg)
}

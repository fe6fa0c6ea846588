use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::formula::singleton_literal;
use super::term::{render_prob, Prob, Term};
use crate::tolerance::PROB_SUM_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Measured,
    Uniform,
    Singleton,
}

impl DomainKind {
    /// The most specific kind consistent with a probability list.
    pub fn infer(elements: &[Term]) -> DomainKind {
        match elements {
            [only] if only.is_sharp() => DomainKind::Singleton,
            [first, rest @ ..] if !rest.is_empty() && rest.iter().all(|t| t.prob() == first.prob()) => {
                DomainKind::Uniform
            }
            _ => DomainKind::Measured,
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Measured => "measured",
            DomainKind::Uniform => "uniform",
            DomainKind::Singleton => "singleton",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("domain {0} has no elements")]
    Empty(String),
    #[error("domain {domain}: element {term} is not an outcome term")]
    NotOutcome { domain: String, term: String },
    #[error("domain {domain}: probabilities sum to {sum}, not 1")]
    BadSum { domain: String, sum: f64 },
    #[error("domain {domain}: state label {label} appears twice")]
    DuplicateLabel { domain: String, label: String },
    #[error("domain {domain}: kind {kind} does not fit its elements")]
    KindMismatch { domain: String, kind: DomainKind },
}

/// A random first-order domain: the outcomes of one measurement process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    name: String,
    elements: Vec<Term>,
    focused: bool,
    kind: DomainKind,
}

impl Domain {
    pub fn new(
        name: impl Into<String>,
        elements: Vec<Term>,
        kind: DomainKind,
        focused: bool,
    ) -> Result<Self, DomainError> {
        let name = name.into();
        if elements.is_empty() {
            return Err(DomainError::Empty(name));
        }
        let mut labels = BTreeSet::new();
        let mut sum = 0.0;
        for t in &elements {
            let (Some(label), Some(p)) = (t.state(), t.prob()) else {
                return Err(DomainError::NotOutcome { domain: name, term: t.to_string() });
            };
            if !labels.insert(label.to_string()) {
                return Err(DomainError::DuplicateLabel { domain: name, label: label.to_string() });
            }
            sum += p.to_f64().unwrap_or(f64::NAN);
        }
        if !((1.0 - PROB_SUM_TOL)..=(1.0 + PROB_SUM_TOL)).contains(&sum) {
            return Err(DomainError::BadSum { domain: name, sum });
        }
        let fits = match kind {
            DomainKind::Singleton => elements.len() == 1 && elements[0].is_sharp(),
            DomainKind::Uniform => elements.iter().all(|t| t.prob() == elements[0].prob()),
            DomainKind::Measured => true,
        };
        if !fits {
            return Err(DomainError::KindMismatch { domain: name, kind });
        }
        Ok(Domain { name, elements, focused, kind })
    }

    /// Builds a domain with the kind inferred from its probabilities.
    pub fn inferred(name: impl Into<String>, elements: Vec<Term>) -> Result<Self, DomainError> {
        let kind = DomainKind::infer(&elements);
        Domain::new(name, elements, kind, false)
    }

    /// `{t1, ..., tm}` with labels `t1..tm` and probability `1/m` each.
    pub fn uniform(name: impl Into<String>, m: usize) -> Result<Self, DomainError> {
        let elements: Vec<Term> =
            (1..=m).map(|i| Term::Outcome { state: format!("t{i}"), prob: Prob::new(1, m as i64) }).collect();
        Domain::inferred(name, elements)
    }

    /// The singleton `{u}` whose element is the sharp term `#u`.
    pub fn singleton(state: &str) -> Self {
        Domain {
            name: singleton_literal(state),
            elements: vec![Term::sharp(state)],
            focused: false,
            kind: DomainKind::Singleton,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[Term] {
        &self.elements
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn focused(&self) -> bool {
        self.focused
    }

    pub fn with_focus(mut self, focused: bool) -> Self {
        self.focused = focused;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.elements.contains(t)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().filter_map(Term::state)
    }

    pub fn is_uniform(&self) -> bool {
        self.elements.iter().all(|t| t.prob() == self.elements[0].prob())
    }

    pub fn is_singleton(&self) -> bool {
        self.kind == DomainKind::Singleton
    }

    /// `(label, probability)` pairs in element order.
    pub fn outcomes(&self) -> Vec<(&str, Prob)> {
        self.elements.iter().map(|t| (t.state().unwrap_or_default(), t.prob().unwrap_or_else(Prob::one))).collect()
    }
}

impl fmt::Display for Domain {
    /// `DZ = { (s0, 1/2), (s1, 1/2) }`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {{ ", self.name)?;
        for (i, (label, p)) in self.outcomes().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({label}, {})", render_prob(&p))?;
        }
        f.write_str(" }")
    }
}

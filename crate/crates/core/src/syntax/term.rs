use std::fmt;
use std::hash::{Hash, Hasher};

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::SyntaxError;

/// Exact probability carried by outcome terms.
pub type Prob = Rational64;

/// A first-order term.
///
/// Outcome terms are pairs of a state label and the frequency of that state
/// in a measurement process. Sharp terms are outcomes whose probability has
/// been forgotten (reset to 1). `Outcome(s, 1)` and `Sharp(s)` are distinct
/// syntax but compare equal.
#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    Outcome { state: String, prob: Prob },
    Sharp(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    /// Builds an outcome term, rejecting probabilities outside `(0, 1]`.
    pub fn outcome(state: impl Into<String>, prob: Prob) -> Result<Self, SyntaxError> {
        if prob <= Prob::zero() || prob > Prob::one() {
            return Err(SyntaxError::BadProbability(prob.to_string()));
        }
        Ok(Term::Outcome { state: state.into(), prob })
    }

    pub fn sharp(state: impl Into<String>) -> Self {
        Term::Sharp(state.into())
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// State label of a closed term.
    pub fn state(&self) -> Option<&str> {
        match self {
            Term::Var(_) => None,
            Term::Outcome { state, .. } | Term::Sharp(state) => Some(state),
        }
    }

    /// Probability of a closed term; sharp terms carry probability 1.
    pub fn prob(&self) -> Option<Prob> {
        match self {
            Term::Var(_) => None,
            Term::Outcome { prob, .. } => Some(*prob),
            Term::Sharp(_) => Some(Prob::one()),
        }
    }

    /// True for sharp terms and for outcomes of probability 1.
    pub fn is_sharp(&self) -> bool {
        self.prob().is_some_and(|p| p.is_one())
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Var(_), _) | (_, Term::Var(_)) => false,
            _ => self.state() == other.state() && self.prob() == other.prob(),
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::Var(v) => {
                0u8.hash(state);
                v.hash(state);
            }
            closed => {
                1u8.hash(state);
                closed.state().hash(state);
                closed.prob().hash(state);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Outcome { state, prob } => write!(f, "<{}, {}>", state, render_prob(prob)),
            Term::Sharp(s) => write!(f, "#{s}"),
        }
    }
}

/// Canonical text for a probability: `1`, `1/2`, `3/4`.
pub fn render_prob(p: &Prob) -> String {
    if p.is_integer() {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

/// Parses `3`, `1/2`, or `0.25` into an exact rational.
pub fn parse_prob(text: &str) -> Result<Prob, SyntaxError> {
    let bad = || SyntaxError::BadProbability(text.to_string());
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Prob::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 17 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_val: i64 = frac.parse().map_err(|_| bad())?;
        let scale = 10i64.pow(frac.len() as u32);
        let numer = int.checked_mul(scale).and_then(|v| v.checked_add(frac_val)).ok_or_else(bad)?;
        return Ok(Prob::new(numer, scale));
    }
    text.parse::<i64>().map(Prob::from_integer).map_err(|_| bad())
}

//! Terms, formulas, sequents and domains, with the DSL reader and printer.
//!
//! The printer is canonical: `parse(render(x))` is alpha-equivalent to `x`
//! for every AST, and the output is plain ASCII.

mod domain;
mod formula;
mod lexer;
mod parser;
mod sequent;
mod term;

pub use domain::{Domain, DomainError, DomainKind};
pub use formula::{
    forgetful_predicate, fresh_name, is_singleton_literal, random_variable_of, sharp_companion, singleton_literal,
    Formula,
};
pub use lexer::{tokenize, Spanned, Tok};
pub use parser::{parse_formula, parse_sequent, parse_sequent_in, parse_term, Parser, Signature};
pub use sequent::{fresh_var_avoiding, multiset_eq, remove_one, ContextVar, Item, Sequent, Slot};
pub use term::{parse_prob, render_prob, Prob, Term};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SyntaxError {
    #[error("line {line}, column {col}: {msg}")]
    At { line: usize, col: usize, msg: String },
    #[error("probability {0} is not in (0, 1]")]
    BadProbability(String),
    #[error("context variable {0} appears twice on one side")]
    DuplicateContext(String),
    #[error("predicate {pred} expects {expected} arguments, found {found}")]
    Arity { pred: String, expected: usize, found: usize },
    #[error("variable {0} would be captured")]
    Capture(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown domain {0}")]
    UnknownDomain(String),
    #[error("unknown predicate symbol {0}")]
    UnknownPredicate(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstMode {
    Plain,
    /// Replacement by a sharp term that also forgets the outcome
    /// probability: `z in D` becomes `#s in D^f`, `A(z)` becomes `A^f(#s)`.
    Forgetful,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SubstError {
    #[error("substituted term {0} is not closed")]
    NotClosed(String),
    #[error("forgetful substitution needs a sharp term, got {0}")]
    NotSharp(String),
}

/// Replaces the free occurrences of `v` in `f` by the closed term `t`.
pub fn substitute(f: &Formula, v: &str, t: &Term, mode: SubstMode) -> Result<Formula, SubstError> {
    if !t.is_closed() {
        return Err(SubstError::NotClosed(t.to_string()));
    }
    match mode {
        SubstMode::Plain => Ok(f.subst(v, t)),
        SubstMode::Forgetful if t.is_sharp() => Ok(f.forgetful(v, t)),
        SubstMode::Forgetful => Err(SubstError::NotSharp(t.to_string())),
    }
}

//! Proof kernel for a sequent calculus over random first-order domains.
//!
//! * [`syntax`]: terms, formulas, sequents, domains, and the DSL.
//! * [`calculus`]: the rule catalog, derivations, the checker, proof scripts.
//! * [`theorems`]: constructions of the focusing results, collapse,
//!   uncertainty and distributivity derivations.
//! * [`quantum`]: a two- and four-dimensional Hilbert-space backend that
//!   produces domains by Born-rule measurement.

pub mod calculus;
pub mod quantum;
pub mod syntax;
pub mod theorems;
pub mod tolerance;

pub use calculus::{check, CheckReport, Derivation, Direction, Params, RuleId, TheoryConfig};
pub use syntax::{parse_sequent, Domain, Formula, Sequent, Term};

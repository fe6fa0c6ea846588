//! The rule catalog, derivation trees, the checker and proof scripts.

mod check;
mod config;
mod derivation;
mod equations;
mod rule;
mod rules;
mod script;

pub use check::{check, check_step, check_steps, CheckReport, Failure, StepVerdict};
pub use config::TheoryConfig;
pub use derivation::{Derivation, Step};
pub use equations::equation_step;
pub use rule::{Direction, Params, RuleError, RuleId};
pub use rules::{correlate, cut_conclusion, dualize, focus_sequent, instantiate_sequent, rule_step};
pub use script::{describe_domain, DomainJson, ProofScript, ScriptError};

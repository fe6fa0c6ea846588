use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{is_singleton_literal, Domain, Term};

/// Which optional parts of the theory are in force, plus the declared domains.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryConfig {
    /// The sharp-state axioms `z in {u} |- z = #u`, which also license
    /// forgetful substitution and the sharp membership facts.
    pub singleton_axioms: bool,
    pub focused_domains: BTreeSet<String>,
    /// Classical mode: the quantifier and `&` equations admit extra
    /// succedent formulas.
    pub right_contexts_in_forall: bool,
    pub domains: BTreeMap<String, Domain>,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig {
            singleton_axioms: true,
            focused_domains: BTreeSet::new(),
            right_contexts_in_forall: false,
            domains: BTreeMap::new(),
        }
    }
}

impl TheoryConfig {
    pub fn new() -> Self {
        TheoryConfig::default()
    }

    pub fn classical(mut self, on: bool) -> Self {
        self.right_contexts_in_forall = on;
        self
    }

    pub fn singleton_axioms(mut self, on: bool) -> Self {
        self.singleton_axioms = on;
        self
    }

    pub fn focus(mut self, name: impl Into<String>) -> Self {
        self.focused_domains.insert(name.into());
        self
    }

    /// Registers a domain; a domain flagged as focused is also declared focused.
    pub fn with_domain(mut self, d: Domain) -> Self {
        self.add_domain(d);
        self
    }

    pub fn add_domain(&mut self, d: Domain) {
        if d.focused() {
            self.focused_domains.insert(d.name().to_string());
        }
        self.domains.insert(d.name().to_string(), d);
    }

    /// Looks a domain up. Singleton literals `{u}` need no declaration.
    pub fn domain(&self, name: &str) -> Option<Domain> {
        if let Some(d) = self.domains.get(name) {
            return Some(d.clone());
        }
        if is_singleton_literal(name) {
            return Some(Domain::singleton(&name[1..name.len() - 1]));
        }
        None
    }

    pub fn is_singleton(&self, name: &str) -> bool {
        self.domain(name).is_some_and(|d| d.is_singleton())
    }

    /// Declared focused, or a singleton while the singleton axioms hold.
    pub fn is_focused(&self, name: &str) -> bool {
        self.focused_domains.contains(name) || (self.singleton_axioms && self.is_singleton(name))
    }

    /// Whether `t in D` is a declared fact. For a sharp companion `D^f` the
    /// members are the sharp terms of the labels of `D`.
    pub fn is_member(&self, t: &Term, name: &str) -> Option<bool> {
        if let Some(base) = name.strip_suffix("^f") {
            let d = self.domain(base)?;
            return Some(t.is_sharp() && t.state().is_some_and(|s| d.labels().any(|l| l == s)));
        }
        Some(self.domain(name)?.contains(t))
    }
}

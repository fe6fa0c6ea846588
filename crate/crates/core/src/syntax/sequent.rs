use std::collections::BTreeSet;
use std::fmt;

use super::formula::{fresh_name, Formula};
use super::term::Term;
use super::SyntaxError;

/// A context metavariable such as `G` or `Delta`.
///
/// `deps` lists the variables the context may mention free. An empty list
/// means the context is closed, which is how measurement assumptions are
/// read: they cannot depend on the outcome variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContextVar {
    pub name: String,
    pub deps: Vec<String>,
}

impl ContextVar {
    pub fn new(name: impl Into<String>) -> Self {
        ContextVar { name: name.into(), deps: Vec::new() }
    }
}

impl fmt::Display for ContextVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.deps.is_empty() {
            write!(f, "[{}]", self.deps.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Formula(Formula),
    Context(ContextVar),
}

impl Item {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Item::Formula(f) => Some(f),
            Item::Context(_) => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Item::Formula(f) => f.free_vars(),
            Item::Context(c) => c.deps.iter().cloned().collect(),
        }
    }

    fn map_formula(&self, f: impl FnOnce(&Formula) -> Formula) -> Item {
        match self {
            Item::Formula(x) => Item::Formula(f(x)),
            ctx => ctx.clone(),
        }
    }
}

impl From<Formula> for Item {
    fn from(f: Formula) -> Self {
        Item::Formula(f)
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Formula(x) => write!(f, "{x}"),
            Item::Context(c) => write!(f, "{c}"),
        }
    }
}

/// A succedent position: a plain item, or two formulas joined by the
/// correlated comma `,_S` of a shared random variable `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Single(Item),
    Correlated { label: String, left: Formula, right: Formula },
}

impl Slot {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Slot::Single(Item::Formula(f)) => Some(f),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Slot::Single(i) => i.free_vars(),
            Slot::Correlated { left, right, .. } => {
                let mut s = left.free_vars();
                s.extend(right.free_vars());
                s
            }
        }
    }

    fn formulas(&self) -> Vec<&Formula> {
        match self {
            Slot::Single(Item::Formula(f)) => vec![f],
            Slot::Single(Item::Context(_)) => vec![],
            Slot::Correlated { left, right, .. } => vec![left, right],
        }
    }

    fn map_formulas(&self, mut f: impl FnMut(&Formula) -> Formula) -> Slot {
        match self {
            Slot::Single(i) => Slot::Single(i.map_formula(f)),
            Slot::Correlated { label, left, right } => {
                let left = f(left);
                Slot::Correlated { label: label.clone(), left, right: f(right) }
            }
        }
    }
}

impl From<Formula> for Slot {
    fn from(f: Formula) -> Self {
        Slot::Single(Item::Formula(f))
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Single(i) => write!(f, "{i}"),
            Slot::Correlated { label, left, right } => write!(f, "{left} ,_{label} {right}"),
        }
    }
}

/// `antecedent |- succedent`.
///
/// Derived equality compares the lists position by position; [`Sequent::equiv`]
/// is the kernel's identity, which also allows exchange on each side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Sequent {
    pub antecedent: Vec<Item>,
    pub succedent: Vec<Slot>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Item>, succedent: Vec<Slot>) -> Self {
        Sequent { antecedent, succedent }
    }

    /// Checks that a context metavariable occurs at most once per side.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        let mut seen = BTreeSet::new();
        for item in &self.antecedent {
            if let Item::Context(c) = item {
                if !seen.insert(&c.name) {
                    return Err(SyntaxError::DuplicateContext(c.name.clone()));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for slot in &self.succedent {
            if let Slot::Single(Item::Context(c)) = slot {
                if !seen.insert(&c.name) {
                    return Err(SyntaxError::DuplicateContext(c.name.clone()));
                }
            }
        }
        Ok(())
    }

    /// Identity up to exchange on both sides, each formula up to
    /// alpha-equivalence.
    pub fn equiv(&self, other: &Sequent) -> bool {
        multiset_eq(&self.antecedent, &other.antecedent) && multiset_eq(&self.succedent, &other.succedent)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut s = self.antecedent_free_vars();
        for slot in &self.succedent {
            s.extend(slot.free_vars());
        }
        s
    }

    pub fn antecedent_free_vars(&self) -> BTreeSet<String> {
        self.antecedent.iter().flat_map(Item::free_vars).collect()
    }

    /// All variable names, free or bound, including context dependencies.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        for item in &self.antecedent {
            match item {
                Item::Formula(f) => s.extend(f.all_names()),
                Item::Context(c) => s.extend(c.deps.iter().cloned()),
            }
        }
        for slot in &self.succedent {
            if let Slot::Single(Item::Context(c)) = slot {
                s.extend(c.deps.iter().cloned());
            }
            for f in slot.formulas() {
                s.extend(f.all_names());
            }
        }
        s
    }

    /// Deterministic fresh variable: `z`, `y`, then `z1`, `z2`, ...
    pub fn fresh_var(&self) -> String {
        fresh_var_avoiding(&self.all_names())
    }

    pub fn context_vars(&self) -> impl Iterator<Item = &ContextVar> {
        let left = self.antecedent.iter().filter_map(|i| match i {
            Item::Context(c) => Some(c),
            _ => None,
        });
        let right = self.succedent.iter().filter_map(|s| match s {
            Slot::Single(Item::Context(c)) => Some(c),
            _ => None,
        });
        left.chain(right)
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().filter_map(Item::formula).chain(self.succedent.iter().flat_map(Slot::formulas))
    }

    pub fn map_formulas(&self, mut f: impl FnMut(&Formula) -> Formula) -> Sequent {
        Sequent {
            antecedent: self.antecedent.iter().map(|i| i.map_formula(&mut f)).collect(),
            succedent: self.succedent.iter().map(|s| s.map_formulas(&mut f)).collect(),
        }
    }

    /// Capture-avoiding substitution of `v` by `t` in every formula.
    pub fn subst(&self, v: &str, t: &Term) -> Sequent {
        self.map_formulas(|f| f.subst(v, t))
    }

    pub fn forgetful(&self, v: &str, sharp: &Term) -> Sequent {
        self.map_formulas(|f| f.forgetful(v, sharp))
    }

    /// Number of occurrences of `t` (free occurrences when `t` is a variable)
    /// in canonical order: antecedent left to right, then succedent.
    pub fn count_occurrences(&self, t: &Term) -> usize {
        let mut n = 0;
        let _ = self.map_formulas(|f| {
            f.map_terms(&mut |x, bound| {
                if occurs_here(x, t, bound) {
                    n += 1;
                }
                x.clone()
            })
        });
        n
    }

    /// Replaces the selected occurrences (1-based, canonical order) of `t` by
    /// the term `by`. Binders whose name clashes with a variable of `by` are
    /// renamed first.
    pub fn replace_occurrences(&self, t: &Term, by: &Term, positions: &BTreeSet<usize>) -> Sequent {
        let avoid: BTreeSet<String> = by.as_var().map(|v| BTreeSet::from([v.to_string()])).unwrap_or_default();
        let renamed =
            if avoid.is_empty() { self.clone() } else { self.map_formulas(|f| f.rename_binders_away(&avoid)) };
        let mut n = 0;
        renamed.map_formulas(|f| {
            f.map_terms(&mut |x, bound| {
                if occurs_here(x, t, bound) {
                    n += 1;
                    if positions.contains(&n) {
                        return by.clone();
                    }
                }
                x.clone()
            })
        })
    }

    /// Occurrence positions (1-based) lying in the succedent.
    pub fn succedent_positions(&self, t: &Term) -> BTreeSet<usize> {
        let ante = Sequent::new(self.antecedent.clone(), vec![]).count_occurrences(t);
        let total = self.count_occurrences(t);
        (ante + 1..=total).collect()
    }
}

fn occurs_here(x: &Term, t: &Term, bound: &[String]) -> bool {
    x == t && !matches!(x, Term::Var(v) if bound.contains(v))
}

pub fn fresh_var_avoiding(taken: &BTreeSet<String>) -> String {
    for base in ["z", "y"] {
        if !taken.contains(base) {
            return base.to_string();
        }
    }
    let mut t = taken.clone();
    t.insert("z".into());
    fresh_name("z", &t)
}

/// Multiset equality using `==` for elements.
pub fn multiset_eq<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| match (0..b.len()).find(|&j| !used[j] && b[j] == *x) {
        Some(j) => {
            used[j] = true;
            true
        }
        None => false,
    })
}

/// Removes one element equal to `x`, returning the rest.
pub fn remove_one<T: PartialEq + Clone>(items: &[T], x: &T) -> Option<Vec<T>> {
    let i = items.iter().position(|y| y == x)?;
    let mut out = items.to_vec();
    out.remove(i);
    Some(out)
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        if self.antecedent.is_empty() {
            f.write_str("|-")?;
        } else {
            f.write_str(" |-")?;
        }
        for (i, slot) in self.succedent.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{slot}")?;
        }
        Ok(())
    }
}

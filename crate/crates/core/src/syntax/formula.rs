use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::term::Term;
use super::SyntaxError;

/// Formulas of the predicative language.
///
/// Equality (`==`) is alpha-equivalence: bound variables may be renamed
/// without changing identity. `Hash` agrees with it.
#[derive(Clone, Debug)]
pub enum Formula {
    Atom {
        pred: String,
        args: Vec<Term>,
    },
    Member {
        term: Term,
        domain: String,
    },
    Eq(Term, Term),
    Neq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Star(Box<Formula>, Box<Formula>),
    /// Falsum, optionally labelled by an incompatible observable.
    Bot(Option<String>),
    Forall {
        var: String,
        domain: String,
        body: Box<Formula>,
    },
    Exists {
        var: String,
        domain: String,
        body: Box<Formula>,
    },
    Bowtie {
        var: String,
        domain: String,
        left: Box<Formula>,
        right: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom { pred: pred.into(), args }
    }

    pub fn member(term: Term, domain: impl Into<String>) -> Self {
        Formula::Member { term, domain: domain.into() }
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn star(l: Formula, r: Formula) -> Self {
        Formula::Star(Box::new(l), Box::new(r))
    }

    pub fn forall(var: impl Into<String>, domain: impl Into<String>, body: Formula) -> Self {
        Formula::Forall { var: var.into(), domain: domain.into(), body: Box::new(body) }
    }

    pub fn exists(var: impl Into<String>, domain: impl Into<String>, body: Formula) -> Self {
        Formula::Exists { var: var.into(), domain: domain.into(), body: Box::new(body) }
    }

    pub fn bowtie(var: impl Into<String>, domain: impl Into<String>, left: Formula, right: Formula) -> Self {
        Formula::Bowtie { var: var.into(), domain: domain.into(), left: Box::new(left), right: Box::new(right) }
    }

    /// Right-associated conjunction; `None` for an empty list.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        fold_right(items.into_iter().collect(), Formula::and)
    }

    /// Right-associated disjunction; `None` for an empty list.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        fold_right(items.into_iter().collect(), Formula::or)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, v: &str) -> bool {
        self.free_vars().contains(v)
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<&str>| {
            if let Term::Var(v) = t {
                if !bound.contains(&v.as_str()) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Atom { args, .. } => args.iter().for_each(|t| term(t, bound)),
            Formula::Member { term: t, .. } => term(t, bound),
            Formula::Eq(l, r) | Formula::Neq(l, r) => {
                term(l, bound);
                term(r, bound);
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Star(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Bot(_) => {}
            Formula::Forall { var, body, .. } | Formula::Exists { var, body, .. } => {
                bound.push(var);
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::Bowtie { var, left, right, .. } => {
                bound.push(var);
                left.collect_free(bound, out);
                right.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring in the formula, free or bound.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_names(&mut out);
        out
    }

    fn visit_names(&self, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term| {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Atom { args, .. } => args.iter().for_each(term),
            Formula::Member { term: t, .. } => term(t),
            Formula::Eq(l, r) | Formula::Neq(l, r) => {
                term(l);
                term(r);
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Star(l, r) => {
                l.visit_names(out);
                r.visit_names(out);
            }
            Formula::Bot(_) => {}
            Formula::Forall { var, body, .. } | Formula::Exists { var, body, .. } => {
                out.insert(var.clone());
                body.visit_names(out);
            }
            Formula::Bowtie { var, left, right, .. } => {
                out.insert(var.clone());
                left.visit_names(out);
                right.visit_names(out);
            }
        }
    }

    /// Domain names mentioned by memberships and binders.
    pub fn domains(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Member { domain, .. } => {
                out.insert(domain.clone());
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Star(l, r) => {
                l.domains(out);
                r.domains(out);
            }
            Formula::Forall { domain, body, .. } | Formula::Exists { domain, body, .. } => {
                out.insert(domain.clone());
                body.domains(out);
            }
            Formula::Bowtie { domain, left, right, .. } => {
                out.insert(domain.clone());
                left.domains(out);
                right.domains(out);
            }
            Formula::Atom { .. } | Formula::Eq(..) | Formula::Neq(..) | Formula::Bot(_) => {}
        }
    }

    /// Predicate symbols with the arity of each occurrence.
    pub fn predicates(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Formula::Atom { pred, args } => out.push((pred.clone(), args.len())),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Star(l, r) => {
                l.predicates(out);
                r.predicates(out);
            }
            Formula::Forall { body, .. } | Formula::Exists { body, .. } => body.predicates(out),
            Formula::Bowtie { left, right, .. } => {
                left.predicates(out);
                right.predicates(out);
            }
            Formula::Member { .. } | Formula::Eq(..) | Formula::Neq(..) | Formula::Bot(_) => {}
        }
    }

    /// Capture-avoiding replacement of the free occurrences of `v` by `t`.
    ///
    /// `t` may be open; binders that would capture a variable of `t` are
    /// renamed.
    pub fn subst(&self, v: &str, t: &Term) -> Formula {
        let rep = |x: &Term| match x {
            Term::Var(name) if name == v => t.clone(),
            other => other.clone(),
        };
        match self {
            Formula::Atom { pred, args } => Formula::Atom { pred: pred.clone(), args: args.iter().map(rep).collect() },
            Formula::Member { term, domain } => Formula::Member { term: rep(term), domain: domain.clone() },
            Formula::Eq(l, r) => Formula::Eq(rep(l), rep(r)),
            Formula::Neq(l, r) => Formula::Neq(rep(l), rep(r)),
            Formula::And(l, r) => Formula::and(l.subst(v, t), r.subst(v, t)),
            Formula::Or(l, r) => Formula::or(l.subst(v, t), r.subst(v, t)),
            Formula::Star(l, r) => Formula::star(l.subst(v, t), r.subst(v, t)),
            Formula::Bot(label) => Formula::Bot(label.clone()),
            Formula::Forall { var, domain, body } => {
                let (var, body) = subst_under_binder(var, &[body.as_ref()], v, t);
                Formula::forall(var, domain.clone(), body.into_iter().next().unwrap())
            }
            Formula::Exists { var, domain, body } => {
                let (var, body) = subst_under_binder(var, &[body.as_ref()], v, t);
                Formula::exists(var, domain.clone(), body.into_iter().next().unwrap())
            }
            Formula::Bowtie { var, domain, left, right } => {
                let (var, mut parts) = subst_under_binder(var, &[left.as_ref(), right.as_ref()], v, t);
                let right = parts.pop().unwrap();
                let left = parts.pop().unwrap();
                Formula::bowtie(var, domain.clone(), left, right)
            }
        }
    }

    /// Forgetful substitution of `v` by the sharp term `sharp`.
    ///
    /// Memberships `v in D` become `#s in D^f` and atoms mentioning `v` are
    /// renamed to their forgetful companion `A^f`.
    pub fn forgetful(&self, v: &str, sharp: &Term) -> Formula {
        match self {
            Formula::Member { term: Term::Var(x), domain } if x == v => {
                Formula::Member { term: sharp.clone(), domain: sharp_companion(domain) }
            }
            Formula::Atom { pred, args } if args.iter().any(|a| a.as_var() == Some(v)) => Formula::Atom {
                pred: forgetful_predicate(pred),
                args: args.iter().map(|a| if a.as_var() == Some(v) { sharp.clone() } else { a.clone() }).collect(),
            },
            Formula::And(l, r) => Formula::and(l.forgetful(v, sharp), r.forgetful(v, sharp)),
            Formula::Or(l, r) => Formula::or(l.forgetful(v, sharp), r.forgetful(v, sharp)),
            Formula::Star(l, r) => Formula::star(l.forgetful(v, sharp), r.forgetful(v, sharp)),
            Formula::Forall { var, domain, body } if var != v => {
                Formula::forall(var.clone(), domain.clone(), body.forgetful(v, sharp))
            }
            Formula::Exists { var, domain, body } if var != v => {
                Formula::exists(var.clone(), domain.clone(), body.forgetful(v, sharp))
            }
            Formula::Bowtie { var, domain, left, right } if var != v => {
                Formula::bowtie(var.clone(), domain.clone(), left.forgetful(v, sharp), right.forgetful(v, sharp))
            }
            other => other.subst(v, sharp),
        }
    }

    /// Renames every binder whose name is in `avoid` to a fresh name.
    pub fn rename_binders_away(&self, avoid: &BTreeSet<String>) -> Formula {
        let mut taken = avoid.clone();
        taken.extend(self.all_names());
        self.rename_binders_inner(avoid, &mut taken)
    }

    fn rename_binders_inner(&self, avoid: &BTreeSet<String>, taken: &mut BTreeSet<String>) -> Formula {
        let fresh_for = |var: &String, taken: &mut BTreeSet<String>| {
            if avoid.contains(var) {
                let n = fresh_name(var, taken);
                taken.insert(n.clone());
                Some(n)
            } else {
                None
            }
        };
        match self {
            Formula::And(l, r) => {
                Formula::and(l.rename_binders_inner(avoid, taken), r.rename_binders_inner(avoid, taken))
            }
            Formula::Or(l, r) => {
                Formula::or(l.rename_binders_inner(avoid, taken), r.rename_binders_inner(avoid, taken))
            }
            Formula::Star(l, r) => {
                Formula::star(l.rename_binders_inner(avoid, taken), r.rename_binders_inner(avoid, taken))
            }
            Formula::Forall { var, domain, body } | Formula::Exists { var, domain, body } => {
                let (var, body) = match fresh_for(var, taken) {
                    Some(n) => (n.clone(), body.subst(var, &Term::Var(n))),
                    None => (var.clone(), body.as_ref().clone()),
                };
                let body = body.rename_binders_inner(avoid, taken);
                if matches!(self, Formula::Forall { .. }) {
                    Formula::forall(var, domain.clone(), body)
                } else {
                    Formula::exists(var, domain.clone(), body)
                }
            }
            Formula::Bowtie { var, domain, left, right } => {
                let (var, left, right) = match fresh_for(var, taken) {
                    Some(n) => (n.clone(), left.subst(var, &Term::Var(n.clone())), right.subst(var, &Term::Var(n))),
                    None => (var.clone(), left.as_ref().clone(), right.as_ref().clone()),
                };
                Formula::bowtie(
                    var,
                    domain.clone(),
                    left.rename_binders_inner(avoid, taken),
                    right.rename_binders_inner(avoid, taken),
                )
            }
            other => other.clone(),
        }
    }

    /// Visits every term position in canonical order (pre-order, left to
    /// right), passing the variables bound at that position.
    pub fn map_terms(&self, f: &mut dyn FnMut(&Term, &[String]) -> Term) -> Formula {
        self.map_terms_inner(f, &mut Vec::new())
    }

    fn map_terms_inner(&self, f: &mut dyn FnMut(&Term, &[String]) -> Term, bound: &mut Vec<String>) -> Formula {
        match self {
            Formula::Atom { pred, args } => {
                Formula::Atom { pred: pred.clone(), args: args.iter().map(|a| f(a, bound)).collect() }
            }
            Formula::Member { term, domain } => Formula::Member { term: f(term, bound), domain: domain.clone() },
            Formula::Eq(l, r) => {
                let l = f(l, bound);
                Formula::Eq(l, f(r, bound))
            }
            Formula::Neq(l, r) => {
                let l = f(l, bound);
                Formula::Neq(l, f(r, bound))
            }
            Formula::And(l, r) => {
                let l = l.map_terms_inner(f, bound);
                Formula::and(l, r.map_terms_inner(f, bound))
            }
            Formula::Or(l, r) => {
                let l = l.map_terms_inner(f, bound);
                Formula::or(l, r.map_terms_inner(f, bound))
            }
            Formula::Star(l, r) => {
                let l = l.map_terms_inner(f, bound);
                Formula::star(l, r.map_terms_inner(f, bound))
            }
            Formula::Bot(label) => Formula::Bot(label.clone()),
            Formula::Forall { var, domain, body } => {
                bound.push(var.clone());
                let body = body.map_terms_inner(f, bound);
                bound.pop();
                Formula::forall(var.clone(), domain.clone(), body)
            }
            Formula::Exists { var, domain, body } => {
                bound.push(var.clone());
                let body = body.map_terms_inner(f, bound);
                bound.pop();
                Formula::exists(var.clone(), domain.clone(), body)
            }
            Formula::Bowtie { var, domain, left, right } => {
                bound.push(var.clone());
                let left = left.map_terms_inner(f, bound);
                let right = right.map_terms_inner(f, bound);
                bound.pop();
                Formula::bowtie(var.clone(), domain.clone(), left, right)
            }
        }
    }

    /// Replaces each atom `pred(a1..an)` by `body[params := a1..an]`.
    ///
    /// Fails when the arity does not match or when a free variable of `body`
    /// would be captured by a binder around an occurrence of `pred`.
    pub fn instantiate(&self, pred: &str, params: &[String], body: &Formula) -> Result<Formula, SyntaxError> {
        let mut extra: BTreeSet<String> = body.free_vars();
        for p in params {
            extra.remove(p);
        }
        self.instantiate_inner(pred, params, body, &extra, &mut Vec::new())
    }

    fn instantiate_inner(
        &self,
        pred: &str,
        params: &[String],
        body: &Formula,
        extra: &BTreeSet<String>,
        bound: &mut Vec<String>,
    ) -> Result<Formula, SyntaxError> {
        let rec = |f: &Formula, bound: &mut Vec<String>| f.instantiate_inner(pred, params, body, extra, bound);
        Ok(match self {
            Formula::Atom { pred: p, args } if p == pred => {
                if args.len() != params.len() {
                    return Err(SyntaxError::Arity {
                        pred: pred.to_string(),
                        expected: params.len(),
                        found: args.len(),
                    });
                }
                if let Some(v) = bound.iter().find(|b| extra.contains(*b)) {
                    return Err(SyntaxError::Capture(v.clone()));
                }
                simultaneous_subst(body, params, args)
            }
            Formula::And(l, r) => Formula::and(rec(l, bound)?, rec(r, bound)?),
            Formula::Or(l, r) => Formula::or(rec(l, bound)?, rec(r, bound)?),
            Formula::Star(l, r) => Formula::star(rec(l, bound)?, rec(r, bound)?),
            Formula::Forall { var, domain, body: b } => {
                bound.push(var.clone());
                let b = rec(b, bound);
                bound.pop();
                Formula::forall(var.clone(), domain.clone(), b?)
            }
            Formula::Exists { var, domain, body: b } => {
                bound.push(var.clone());
                let b = rec(b, bound);
                bound.pop();
                Formula::exists(var.clone(), domain.clone(), b?)
            }
            Formula::Bowtie { var, domain, left, right } => {
                bound.push(var.clone());
                let l = rec(left, bound);
                let r = rec(right, bound);
                bound.pop();
                Formula::bowtie(var.clone(), domain.clone(), l?, r?)
            }
            other => other.clone(),
        })
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Forall { .. } | Formula::Exists { .. } => 0,
            Formula::Star(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }
}

fn fold_right(mut items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    let mut acc = items.pop()?;
    while let Some(next) = items.pop() {
        acc = join(next, acc);
    }
    Some(acc)
}

fn subst_under_binder(var: &str, parts: &[&Formula], v: &str, t: &Term) -> (String, Vec<Formula>) {
    if var == v || !parts.iter().any(|p| p.has_free(v)) {
        return (var.to_string(), parts.iter().map(|p| (*p).clone()).collect());
    }
    match t {
        Term::Var(tv) if tv == var => {
            let mut taken: BTreeSet<String> = parts.iter().flat_map(|p| p.all_names()).collect();
            taken.insert(v.to_string());
            taken.insert(tv.clone());
            let fresh = fresh_name(var, &taken);
            let renamed = Term::Var(fresh.clone());
            let parts = parts.iter().map(|p| p.subst(var, &renamed).subst(v, t)).collect();
            (fresh, parts)
        }
        _ => (var.to_string(), parts.iter().map(|p| p.subst(v, t)).collect()),
    }
}

fn simultaneous_subst(body: &Formula, params: &[String], args: &[Term]) -> Formula {
    // Route through placeholder names so that arguments mentioning other
    // parameters are not substituted twice.
    let mut taken = body.all_names();
    for a in args {
        if let Term::Var(v) = a {
            taken.insert(v.clone());
        }
    }
    taken.extend(params.iter().cloned());
    let mut placeholders = Vec::new();
    let mut out = body.clone();
    for p in params {
        let ph = fresh_name("_p", &taken);
        taken.insert(ph.clone());
        out = out.subst(p, &Term::Var(ph.clone()));
        placeholders.push(ph);
    }
    for (ph, a) in placeholders.iter().zip(args) {
        out = out.subst(ph, a);
    }
    out
}

/// Name of the sharp companion `D^f` of a domain. Singleton literals and
/// domains that are already sharp are their own companion.
pub fn sharp_companion(domain: &str) -> String {
    if domain.ends_with("^f") || is_singleton_literal(domain) {
        domain.to_string()
    } else {
        format!("{domain}^f")
    }
}

/// Name of the forgetful companion `A^f` of a predicate symbol.
pub fn forgetful_predicate(pred: &str) -> String {
    if pred.ends_with("^f") {
        pred.to_string()
    } else {
        format!("{pred}^f")
    }
}

/// `{u}` names the singleton domain whose only element is the sharp term `#u`.
pub fn is_singleton_literal(domain: &str) -> bool {
    domain.len() > 2 && domain.starts_with('{') && domain.ends_with('}')
}

pub fn singleton_literal(state: &str) -> String {
    format!("{{{state}}}")
}

/// Label of the random variable a domain describes: `DS` and `D_S` give
/// `S`; any other name is its own label.
pub fn random_variable_of(domain: &str) -> String {
    let rest = domain.strip_prefix("D_").or_else(|| domain.strip_prefix('D'));
    match rest {
        Some(r) if !r.is_empty() && !r.starts_with('^') => r.to_string(),
        _ => domain.to_string(),
    }
}

/// First name in `base, base1, base2, ...` that is not in `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|n| !taken.contains(n)).expect("unbounded name supply")
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        alpha_eq(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

impl Eq for Formula {}

fn bound_index(env: &[&str], v: &str) -> Option<usize> {
    env.iter().rev().position(|b| *b == v)
}

fn term_alpha_eq(a: &Term, b: &Term, ea: &[&str], eb: &[&str]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (bound_index(ea, x), bound_index(eb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        _ => a == b,
    }
}

fn alpha_eq<'a>(a: &'a Formula, b: &'a Formula, ea: &mut Vec<&'a str>, eb: &mut Vec<&'a str>) -> bool {
    use Formula::*;
    match (a, b) {
        (Atom { pred: p, args: xs }, Atom { pred: q, args: ys }) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_alpha_eq(x, y, ea, eb))
        }
        (Member { term: s, domain: d }, Member { term: t, domain: e }) => d == e && term_alpha_eq(s, t, ea, eb),
        (Eq(a1, a2), Eq(b1, b2)) | (Neq(a1, a2), Neq(b1, b2)) => {
            term_alpha_eq(a1, b1, ea, eb) && term_alpha_eq(a2, b2, ea, eb)
        }
        (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) | (Star(a1, a2), Star(b1, b2)) => {
            alpha_eq(a1, b1, ea, eb) && alpha_eq(a2, b2, ea, eb)
        }
        (Bot(x), Bot(y)) => x == y,
        (Forall { var: x, domain: d, body: p }, Forall { var: y, domain: e, body: q })
        | (Exists { var: x, domain: d, body: p }, Exists { var: y, domain: e, body: q }) => {
            if d != e {
                return false;
            }
            ea.push(x);
            eb.push(y);
            let r = alpha_eq(p, q, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Bowtie { var: x, domain: d, left: l1, right: r1 }, Bowtie { var: y, domain: e, left: l2, right: r2 }) => {
            if d != e {
                return false;
            }
            ea.push(x);
            eb.push(y);
            let r = alpha_eq(l1, l2, ea, eb) && alpha_eq(r1, r2, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        _ => false,
    }
}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        hash_alpha(self, &mut Vec::new(), state);
    }
}

fn hash_term<H: Hasher>(t: &Term, env: &[&str], state: &mut H) {
    match t {
        Term::Var(v) => match bound_index(env, v) {
            Some(i) => (2u8, i).hash(state),
            None => t.hash(state),
        },
        _ => t.hash(state),
    }
}

fn hash_alpha<'a, H: Hasher>(f: &'a Formula, env: &mut Vec<&'a str>, state: &mut H) {
    std::mem::discriminant(f).hash(state);
    match f {
        Formula::Atom { pred, args } => {
            pred.hash(state);
            args.iter().for_each(|a| hash_term(a, env, state));
        }
        Formula::Member { term, domain } => {
            domain.hash(state);
            hash_term(term, env, state);
        }
        Formula::Eq(l, r) | Formula::Neq(l, r) => {
            hash_term(l, env, state);
            hash_term(r, env, state);
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Star(l, r) => {
            hash_alpha(l, env, state);
            hash_alpha(r, env, state);
        }
        Formula::Bot(label) => label.hash(state),
        Formula::Forall { var, domain, body } | Formula::Exists { var, domain, body } => {
            domain.hash(state);
            env.push(var);
            hash_alpha(body, env, state);
            env.pop();
        }
        Formula::Bowtie { var, domain, left, right } => {
            domain.hash(state);
            env.push(var);
            hash_alpha(left, env, state);
            hash_alpha(right, env, state);
            env.pop();
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { pred, args } => {
                write!(f, "{pred}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Formula::Member { term, domain } => write!(f, "{term} in {domain}"),
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::Neq(l, r) => write!(f, "{l} != {r}"),
            Formula::And(l, r) => write_binary(f, self, l, "&", r),
            Formula::Or(l, r) => write_binary(f, self, l, "\\/", r),
            Formula::Star(l, r) => write_binary(f, self, l, "*", r),
            Formula::Bot(None) => f.write_str("bot"),
            Formula::Bot(Some(label)) => write!(f, "bot_{label}"),
            Formula::Forall { var, domain, body } => write!(f, "forall {var} in {domain} . {body}"),
            Formula::Exists { var, domain, body } => write!(f, "exists {var} in {domain} . {body}"),
            Formula::Bowtie { var, domain, left, right } => {
                write!(f, "bowtie {var} in {domain} ({left}; {right})")
            }
        }
    }
}

fn write_binary(f: &mut fmt::Formatter<'_>, parent: &Formula, l: &Formula, op: &str, r: &Formula) -> fmt::Result {
    let p = parent.prec();
    // Connectives are right-associative; quantifiers always get parentheses
    // as operands.
    if l.prec() <= p {
        write!(f, "({l})")?;
    } else {
        write!(f, "{l}")?;
    }
    write!(f, " {op} ")?;
    if r.prec() < p || r.prec() == 0 {
        write!(f, "({r})")
    } else {
        write!(f, "{r}")
    }
}

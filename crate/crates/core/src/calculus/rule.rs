use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Formula, Parser, SyntaxError, Term, Tok};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    EqForallR,
    EqAndR,
    EqStarR,
    EqBotR,
    EqOrL,
    EqExistsL,
    EqEquality,
    EqBowtieR,
    Identity,
    Reflexivity,
    Cut,
    Subst,
    FSubst,
    ExistsR,
    WeakenL,
    Dualize,
    AxSingleton(String),
    AxFocus(String),
    /// An open leaf: an assumption the derivation is relative to.
    Hypothesis,
    /// Replaces a schematic predicate symbol by a formula everywhere.
    Instantiate,
    /// The leaf `|- t in D` for a declared element `t` of `D`.
    Membership,
    /// Joins two succedent formulas sharing the variable of `z in D` with
    /// the correlated comma of the random variable of `D`.
    Correlate,
}

const NAMED: &[(&str, RuleId)] = &[
    ("EQ_FORALL_R", RuleId::EqForallR),
    ("EQ_AND_R", RuleId::EqAndR),
    ("EQ_STAR_R", RuleId::EqStarR),
    ("EQ_BOT_R", RuleId::EqBotR),
    ("EQ_OR_L", RuleId::EqOrL),
    ("EQ_EXISTS_L", RuleId::EqExistsL),
    ("EQ_EQUALITY", RuleId::EqEquality),
    ("EQ_BOWTIE_R", RuleId::EqBowtieR),
    ("IDENTITY", RuleId::Identity),
    ("REFLEXIVITY", RuleId::Reflexivity),
    ("CUT", RuleId::Cut),
    ("SUBST", RuleId::Subst),
    ("F_SUBST", RuleId::FSubst),
    ("EXISTS_R", RuleId::ExistsR),
    ("WEAKEN_L", RuleId::WeakenL),
    ("DUALIZE", RuleId::Dualize),
    ("HYPOTHESIS", RuleId::Hypothesis),
    ("INSTANTIATE", RuleId::Instantiate),
    ("MEMBERSHIP", RuleId::Membership),
    ("CORRELATE", RuleId::Correlate),
];

impl RuleId {
    pub fn is_equation(&self) -> bool {
        matches!(
            self,
            RuleId::EqForallR
                | RuleId::EqAndR
                | RuleId::EqStarR
                | RuleId::EqBotR
                | RuleId::EqOrL
                | RuleId::EqExistsL
                | RuleId::EqEquality
                | RuleId::EqBowtieR
        )
    }

    pub fn is_axiom(&self) -> bool {
        matches!(self, RuleId::AxSingleton(_) | RuleId::AxFocus(_))
    }

    pub fn is_leaf(&self) -> bool {
        self.is_axiom()
            || matches!(self, RuleId::Identity | RuleId::Reflexivity | RuleId::Hypothesis | RuleId::Membership)
    }

    pub fn equations() -> [RuleId; 8] {
        [
            RuleId::EqForallR,
            RuleId::EqAndR,
            RuleId::EqStarR,
            RuleId::EqBotR,
            RuleId::EqOrL,
            RuleId::EqExistsL,
            RuleId::EqEquality,
            RuleId::EqBowtieR,
        ]
    }

    /// The name without the domain argument of axioms.
    pub fn base_name(&self) -> &'static str {
        match self {
            RuleId::AxSingleton(_) => "AX_SINGLETON",
            RuleId::AxFocus(_) => "AX_FOCUS",
            other => NAMED.iter().find(|(_, r)| r == other).map(|(n, _)| *n).unwrap_or("?"),
        }
    }

    /// Parses `NAME` or `AX_FOCUS(D)` / `AX_SINGLETON(D)`.
    pub fn parse(text: &str) -> Result<RuleId, SyntaxError> {
        let mut p = Parser::new(text)?;
        let r = RuleId::parse_with(&mut p)?;
        p.expect_eof()?;
        Ok(r)
    }

    pub fn parse_with(p: &mut Parser) -> Result<RuleId, SyntaxError> {
        let name = p.ident("a rule name")?;
        match name.as_str() {
            "AX_FOCUS" | "AX_SINGLETON" => {
                p.expect(&Tok::LParen, "`(` and a domain")?;
                let d = p.domain_name()?;
                p.expect(&Tok::RParen, "`)`")?;
                Ok(if name == "AX_FOCUS" { RuleId::AxFocus(d) } else { RuleId::AxSingleton(d) })
            }
            _ => NAMED
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, r)| r.clone())
                .ok_or_else(|| p.error(format!("unknown rule `{name}`"))),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::AxSingleton(d) | RuleId::AxFocus(d) => write!(f, "{}({d})", self.base_name()),
            _ => f.write_str(self.base_name()),
        }
    }
}

/// `Forward` builds the connective, `Backward` takes it apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn inverse(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// Rule parameters. Every field is optional; each rule documents which ones
/// it reads.
///
/// * `target`: 0-based index of the slot or antecedent item acted on.
/// * `var`: the eigenvariable or substituted variable.
/// * `bound`: the name to bind when a quantifier is built.
/// * `term`: the substituted or equated term.
/// * `positions`: 1-based occurrence positions for the equality equation.
/// * `formula`: a cut or weakening formula, or an instantiation body.
/// * `label`: the label of a built `bot`.
/// * `pred`, `args`: the schematic symbol and parameter names instantiated.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub target: Option<usize>,
    pub var: Option<String>,
    pub bound: Option<String>,
    pub term: Option<Term>,
    pub positions: Option<BTreeSet<usize>>,
    pub formula: Option<Formula>,
    pub label: Option<String>,
    pub pred: Option<String>,
    pub args: Option<Vec<String>>,
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn target(mut self, i: usize) -> Self {
        self.target = Some(i);
        self
    }

    pub fn var(mut self, v: impl Into<String>) -> Self {
        self.var = Some(v.into());
        self
    }

    pub fn bound(mut self, v: impl Into<String>) -> Self {
        self.bound = Some(v.into());
        self
    }

    pub fn term(mut self, t: Term) -> Self {
        self.term = Some(t);
        self
    }

    pub fn positions(mut self, p: impl IntoIterator<Item = usize>) -> Self {
        self.positions = Some(p.into_iter().collect());
        self
    }

    pub fn formula(mut self, f: Formula) -> Self {
        self.formula = Some(f);
        self
    }

    pub fn label(mut self, l: impl Into<String>) -> Self {
        self.label = Some(l.into());
        self
    }

    pub fn pred(mut self, p: impl Into<String>) -> Self {
        self.pred = Some(p.into());
        self
    }

    pub fn args(mut self, a: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.args = Some(a.into_iter().map(Into::into).collect());
        self
    }

    pub fn is_empty(&self) -> bool {
        *self == Params::default()
    }

    /// `(key, rendered value)` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(t) = self.target {
            out.push(("target", t.to_string()));
        }
        if let Some(v) = &self.var {
            out.push(("var", v.clone()));
        }
        if let Some(v) = &self.bound {
            out.push(("bound", v.clone()));
        }
        if let Some(t) = &self.term {
            out.push(("term", t.to_string()));
        }
        if let Some(p) = &self.positions {
            let items: Vec<String> = p.iter().map(usize::to_string).collect();
            out.push(("positions", format!("{{{}}}", items.join(", "))));
        }
        if let Some(f) = &self.formula {
            out.push(("formula", format!("({f})")));
        }
        if let Some(l) = &self.label {
            out.push(("label", l.clone()));
        }
        if let Some(p) = &self.pred {
            out.push(("pred", p.clone()));
        }
        if let Some(a) = &self.args {
            out.push(("args", format!("{{{}}}", a.join(", "))));
        }
        out
    }

    /// Sets one parameter from its rendered value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SyntaxError> {
        let mut p = Parser::new(value)?;
        self.set_with(key, &mut p)?;
        p.expect_eof()
    }

    fn set_with(&mut self, key: &str, p: &mut Parser) -> Result<(), SyntaxError> {
        match key {
            "target" => self.target = Some(p.usize()?),
            "var" => self.var = Some(p.ident("a variable")?),
            "bound" => self.bound = Some(p.ident("a variable")?),
            "label" => self.label = Some(p.ident("a label")?),
            "pred" => self.pred = Some(p.ident("a predicate symbol")?),
            "term" => self.term = Some(p.term()?),
            "formula" => {
                p.expect(&Tok::LParen, "`(`")?;
                self.formula = Some(p.formula()?);
                p.expect(&Tok::RParen, "`)`")?;
            }
            "positions" => {
                let mut set = BTreeSet::new();
                brace_list(p, |p| {
                    set.insert(p.usize()?);
                    Ok(())
                })?;
                self.positions = Some(set);
            }
            "args" => {
                let mut args = Vec::new();
                brace_list(p, |p| {
                    args.push(p.ident("a parameter name")?);
                    Ok(())
                })?;
                self.args = Some(args);
            }
            other => return Err(p.error(format!("unknown parameter `{other}`"))),
        }
        Ok(())
    }

    /// Parses `[key=value, ...]`; the opening bracket must be next.
    pub fn parse_with(p: &mut Parser) -> Result<Params, SyntaxError> {
        let mut params = Params::default();
        p.expect(&Tok::LBracket, "`[`")?;
        if p.eat(&Tok::RBracket) {
            return Ok(params);
        }
        loop {
            let key = p.ident("a parameter name")?;
            p.expect(&Tok::Eq, "`=`")?;
            params.set_with(&key, p)?;
            if p.eat(&Tok::RBracket) {
                return Ok(params);
            }
            p.expect(&Tok::Comma, "`,` or `]`")?;
        }
    }
}

fn brace_list(p: &mut Parser, mut item: impl FnMut(&mut Parser) -> Result<(), SyntaxError>) -> Result<(), SyntaxError> {
    p.expect(&Tok::LBrace, "`{`")?;
    if p.eat(&Tok::RBrace) {
        return Ok(());
    }
    loop {
        item(p)?;
        if p.eat(&Tok::RBrace) {
            return Ok(());
        }
        p.expect(&Tok::Comma, "`,` or `}`")?;
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.entries().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "[{}]", items.join(", "))
    }
}

/// Why a single inference was rejected.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RuleError {
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Freshness(String),
    #[error("{0}")]
    RightContext(String),
    #[error("{0}")]
    Position(String),
    #[error("{0}")]
    DisabledAxiom(String),
    #[error("{0}")]
    Fragment(String),
    #[error("{0}")]
    Param(String),
    #[error("{0}")]
    ContextDependency(String),
    #[error("{0}")]
    UnknownDomain(String),
    #[error("expected {expected} premise(s), found {found}")]
    PremiseCount { expected: String, found: usize },
    #[error("conclusion {found} does not follow; expected {expected}")]
    Mismatch { expected: String, found: String },
}

impl RuleError {
    /// A short category used in one-line verdicts.
    pub fn headline(&self) -> &'static str {
        match self {
            RuleError::Shape(_) => "shape mismatch",
            RuleError::Freshness(_) => "freshness violation",
            RuleError::RightContext(_) => "right-context violation",
            RuleError::Position(_) => "position out of range",
            RuleError::DisabledAxiom(_) => "disabled axiom",
            RuleError::Fragment(_) => "outside the dualize fragment",
            RuleError::Param(_) => "bad parameter",
            RuleError::ContextDependency(_) => "context dependency",
            RuleError::UnknownDomain(_) => "unknown domain",
            RuleError::PremiseCount { .. } => "wrong number of premises",
            RuleError::Mismatch { .. } => "conclusion mismatch",
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        RuleError::Shape(msg.into())
    }
}

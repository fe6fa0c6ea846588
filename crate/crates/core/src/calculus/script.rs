//! Proof scripts: declarations plus numbered steps, as text or JSON.
//!
//! ```text
//! -- reflection
//! domain D
//! singleton-axioms on
//! right-contexts off
//! step 1 IDENTITY : forall x in D . A(x) |- forall x in D . A(x)
//! step 2 EQ_FORALL_R backward (1) : forall x in D . A(x), z in D |- A(z)
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::check::{check_steps, CheckReport};
use super::config::TheoryConfig;
use super::derivation::{Derivation, Step};
use super::rule::{Direction, Params, RuleId};
use crate::syntax::{parse_sequent, render_prob, Domain, DomainKind, Parser, Prob, Signature, SyntaxError, Term, Tok};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct ScriptError {
    pub line: Option<usize>,
    pub msg: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.msg),
            None => f.write_str(&self.msg),
        }
    }
}

impl ScriptError {
    fn at(line: usize, msg: impl Into<String>) -> Self {
        ScriptError { line: Some(line), msg: msg.into() }
    }

    fn plain(msg: impl Into<String>) -> Self {
        ScriptError { line: None, msg: msg.into() }
    }

    fn syntax(line: usize, e: SyntaxError) -> Self {
        match e {
            SyntaxError::At { col, msg, .. } => ScriptError::at(line, format!("column {col}: {msg}")),
            other => ScriptError::at(line, other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ProofScript {
    pub config: TheoryConfig,
    /// Domains declared by name only, without elements.
    pub abstract_domains: BTreeSet<String>,
    pub predicates: BTreeMap<String, usize>,
    pub steps: Vec<Step>,
}

impl ProofScript {
    pub fn from_derivation(d: &Derivation, config: TheoryConfig) -> Self {
        let mut abstract_domains = BTreeSet::new();
        for s in d.linearize() {
            for f in s.conclusion.formulas() {
                f.domains(&mut abstract_domains);
            }
        }
        abstract_domains.retain(|n| config.domain(n).is_none() && !n.ends_with("^f"));
        ProofScript { config, abstract_domains, predicates: BTreeMap::new(), steps: d.linearize() }
    }

    pub fn derivation(&self) -> Result<Arc<Derivation>, ScriptError> {
        Derivation::from_steps(&self.steps).map_err(ScriptError::plain)
    }

    pub fn check(&self) -> CheckReport {
        check_steps(&self.steps, &self.config)
    }

    fn signature(&self) -> Signature {
        let mut domains: BTreeSet<String> = self.config.domains.keys().cloned().collect();
        domains.extend(self.abstract_domains.iter().cloned());
        domains.extend(self.config.focused_domains.iter().cloned());
        Signature { domains, predicates: self.predicates.clone() }
    }

    pub fn parse(text: &str) -> Result<ProofScript, ScriptError> {
        let mut script = ProofScript::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let trimmed = raw.trim_start();
            let word_end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
            let (keyword, rest) = trimmed.split_at(word_end);
            if keyword.is_empty() || keyword.starts_with("--") {
                continue;
            }
            let mut p = Parser::new(rest).map_err(|e| ScriptError::syntax(line, e))?;
            match keyword {
                "domain" => script.parse_domain(&mut p, line)?,
                "focused" => {
                    let d = p.domain_name().map_err(|e| ScriptError::syntax(line, e))?;
                    script.config.focused_domains.insert(d);
                }
                "singleton-axioms" | "singleton_axioms" => script.config.singleton_axioms = on_off(&mut p, line)?,
                "right-contexts" | "right_contexts" => script.config.right_contexts_in_forall = on_off(&mut p, line)?,
                "predicate" => {
                    let name = p.ident("a predicate symbol").map_err(|e| ScriptError::syntax(line, e))?;
                    let arity = p.usize().map_err(|e| ScriptError::syntax(line, e))?;
                    script.predicates.insert(name, arity);
                }
                "step" => {
                    let step = parse_step(&mut p).map_err(|e| ScriptError::syntax(line, e))?;
                    if script.steps.iter().any(|s| s.id == step.id) {
                        return Err(ScriptError::at(line, format!("step {} is defined twice", step.id)));
                    }
                    if let Some(bad) = step.premises.iter().find(|&&q| !script.steps.iter().any(|s| s.id == q)) {
                        return Err(ScriptError::at(line, format!("premise {bad} does not refer to an earlier step")));
                    }
                    script.signature().check(&step.conclusion).map_err(|e| ScriptError::at(line, e.to_string()))?;
                    script.steps.push(step);
                    continue;
                }
                other => return Err(ScriptError::at(line, format!("unknown declaration `{other}`"))),
            }
            p.expect_eof().map_err(|e| ScriptError::syntax(line, e))?;
        }
        if script.steps.is_empty() {
            return Err(ScriptError::plain("the script has no steps"));
        }
        Ok(script)
    }

    fn parse_domain(&mut self, p: &mut Parser, line: usize) -> Result<(), ScriptError> {
        let syn = |e| ScriptError::syntax(line, e);
        let name = p.domain_name().map_err(syn)?;
        let kind = match p.peek().clone() {
            Tok::Ident(k) => {
                p.bump();
                Some(match k.as_str() {
                    "measured" => DomainKind::Measured,
                    "uniform" => DomainKind::Uniform,
                    "singleton" => DomainKind::Singleton,
                    other => return Err(ScriptError::at(line, format!("unknown domain kind `{other}`"))),
                })
            }
            _ => None,
        };
        if !p.eat(&Tok::Eq) {
            if kind.is_some() {
                return Err(ScriptError::at(line, "a domain kind needs `= { ... }`"));
            }
            self.abstract_domains.insert(name);
            return Ok(());
        }
        p.expect(&Tok::LBrace, "`{`").map_err(syn)?;
        let mut elements = Vec::new();
        if !p.eat(&Tok::RBrace) {
            loop {
                elements.push(p.term().map_err(syn)?);
                if p.eat(&Tok::RBrace) {
                    break;
                }
                p.expect(&Tok::Comma, "`,` or `}`").map_err(syn)?;
            }
        }
        let kind = kind.unwrap_or_else(|| DomainKind::infer(&elements));
        let d = Domain::new(name, elements, kind, false).map_err(|e| ScriptError::at(line, e.to_string()))?;
        self.config.add_domain(d);
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for name in &self.abstract_domains {
            out.push_str(&format!("domain {name}\n"));
        }
        for d in self.config.domains.values() {
            let elements: Vec<String> = d.elements().iter().map(ToString::to_string).collect();
            out.push_str(&format!("domain {} {} = {{ {} }}\n", d.name(), d.kind(), elements.join(", ")));
        }
        for f in &self.config.focused_domains {
            out.push_str(&format!("focused {f}\n"));
        }
        for (p, n) in &self.predicates {
            out.push_str(&format!("predicate {p} {n}\n"));
        }
        out.push_str(&format!("singleton-axioms {}\n", on_off_word(self.config.singleton_axioms)));
        out.push_str(&format!("right-contexts {}\n", on_off_word(self.config.right_contexts_in_forall)));
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String, ScriptError> {
        let root = self.derivation()?;
        let doc = ScriptJson {
            declarations: Declarations {
                domains: self
                    .abstract_domains
                    .iter()
                    .map(|n| DomainJson { name: n.clone(), kind: None, focused: false, elements: None })
                    .chain(self.config.domains.values().map(DomainJson::from_domain))
                    .collect(),
                focused: self.config.focused_domains.iter().cloned().collect(),
                singleton_axioms: self.config.singleton_axioms,
                right_contexts: self.config.right_contexts_in_forall,
                predicates: self.predicates.clone(),
            },
            derivation: DerivationJson::from_derivation(&root),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| ScriptError::plain(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<ProofScript, ScriptError> {
        let doc: ScriptJson =
            serde_json::from_str(text).map_err(|e| ScriptError::plain(format!("invalid JSON: {e}")))?;
        let mut script = ProofScript::default();
        let decl = doc.declarations;
        script.config.singleton_axioms = decl.singleton_axioms;
        script.config.right_contexts_in_forall = decl.right_contexts;
        script.predicates = decl.predicates;
        for d in decl.domains {
            match d.to_domain()? {
                Some(dom) => script.config.add_domain(dom),
                None => {
                    script.abstract_domains.insert(d.name);
                }
            }
        }
        script.config.focused_domains.extend(decl.focused);
        let mut memo = HashMap::new();
        let root = doc.derivation.to_derivation(&mut memo)?;
        script.steps = root.linearize();
        let sig = script.signature();
        for s in &script.steps {
            sig.check(&s.conclusion).map_err(|e| ScriptError::plain(format!("step {}: {e}", s.id)))?;
        }
        Ok(script)
    }
}

fn on_off(p: &mut Parser, line: usize) -> Result<bool, ScriptError> {
    match p.ident("`on` or `off`").map_err(|e| ScriptError::syntax(line, e))?.as_str() {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(ScriptError::at(line, format!("expected `on` or `off`, found `{other}`"))),
    }
}

fn on_off_word(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn parse_direction(word: &str) -> Option<Direction> {
    match word {
        "forward" => Some(Direction::Forward),
        "backward" => Some(Direction::Backward),
        _ => None,
    }
}

/// `<id> <RULE> [forward|backward] [[params]] [(<ids>)] : <sequent>`, after
/// the `step` keyword.
fn parse_step(p: &mut Parser) -> Result<Step, SyntaxError> {
    let id = p.usize()?;
    let rule = RuleId::parse_with(p)?;
    let mut direction = None;
    if let Tok::Ident(w) = p.peek().clone() {
        direction = Some(parse_direction(&w).ok_or_else(|| p.error(format!("expected a direction, found `{w}`")))?);
        p.bump();
    }
    let params = if matches!(p.peek(), Tok::LBracket) { Params::parse_with(p)? } else { Params::default() };
    let mut premises = Vec::new();
    if p.eat(&Tok::LParen) {
        loop {
            premises.push(p.usize()?);
            if p.eat(&Tok::RParen) {
                break;
            }
            p.expect(&Tok::Comma, "`,` or `)`")?;
        }
    }
    p.expect(&Tok::Colon, "`:` before the conclusion")?;
    let conclusion = p.sequent()?;
    p.expect_eof()?;
    Ok(Step { id, rule, direction, params, premises, conclusion })
}

#[derive(Serialize, Deserialize)]
struct ScriptJson {
    declarations: Declarations,
    derivation: DerivationJson,
}

#[derive(Serialize, Deserialize)]
struct Declarations {
    domains: Vec<DomainJson>,
    #[serde(default)]
    focused: Vec<String>,
    #[serde(default = "yes")]
    singleton_axioms: bool,
    #[serde(default)]
    right_contexts: bool,
    #[serde(default)]
    predicates: BTreeMap<String, usize>,
}

fn yes() -> bool {
    true
}

/// A domain as `{name, kind, focused, elements: [[label, num, den], ...]}`.
/// Abstract domains omit `kind` and `elements`.
#[derive(Serialize, Deserialize)]
pub struct DomainJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<DomainKind>,
    #[serde(default)]
    pub focused: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<(String, i64, i64)>>,
}

impl DomainJson {
    pub fn from_domain(d: &Domain) -> Self {
        DomainJson {
            name: d.name().to_string(),
            kind: Some(d.kind()),
            focused: d.focused(),
            elements: Some(d.outcomes().into_iter().map(|(l, p)| (l.to_string(), *p.numer(), *p.denom())).collect()),
        }
    }

    pub fn to_domain(&self) -> Result<Option<Domain>, ScriptError> {
        let Some(elements) = &self.elements else { return Ok(None) };
        let mut terms = Vec::new();
        for (label, n, d) in elements {
            if *d == 0 {
                return Err(ScriptError::plain(format!("domain {}: zero denominator", self.name)));
            }
            let p = Prob::new(*n, *d);
            let t = if p == Prob::from_integer(1) {
                Term::sharp(label)
            } else {
                Term::outcome(label, p).map_err(|e| ScriptError::plain(e.to_string()))?
            };
            terms.push(t);
        }
        let kind = self.kind.unwrap_or_else(|| DomainKind::infer(&terms));
        Domain::new(&self.name, terms, kind, self.focused).map(Some).map_err(|e| ScriptError::plain(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct DerivationJson {
    conclusion: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<DerivationJson>,
}

impl DerivationJson {
    fn from_derivation(d: &Derivation) -> Self {
        DerivationJson {
            conclusion: d.conclusion.to_string(),
            rule: d.rule.to_string(),
            direction: d.direction.map(|x| x.to_string()),
            params: d.params.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            premises: d.premises.iter().map(|p| DerivationJson::from_derivation(p)).collect(),
        }
    }

    /// Identical subtrees become one shared node.
    fn to_derivation(&self, memo: &mut HashMap<String, Arc<Derivation>>) -> Result<Arc<Derivation>, ScriptError> {
        let key = serde_json::to_string(self).map_err(|e| ScriptError::plain(e.to_string()))?;
        if let Some(d) = memo.get(&key) {
            return Ok(d.clone());
        }
        let at = |e: SyntaxError| ScriptError::plain(format!("in node `{}`: {e}", self.conclusion));
        let rule = RuleId::parse(&self.rule).map_err(at)?;
        let direction = match &self.direction {
            Some(w) => Some(parse_direction(w).ok_or_else(|| ScriptError::plain(format!("unknown direction `{w}`")))?),
            None => None,
        };
        let mut params = Params::default();
        for (k, v) in &self.params {
            params.set(k, v).map_err(at)?;
        }
        let conclusion = parse_sequent(&self.conclusion).map_err(at)?;
        let premises = self.premises.iter().map(|p| p.to_derivation(memo)).collect::<Result<Vec<_>, _>>()?;
        let d = Derivation::node(rule, direction, params, premises, conclusion);
        memo.insert(key, d.clone());
        Ok(d)
    }
}

/// `(label, probability)` rendering used by summaries.
pub fn describe_domain(d: &Domain) -> String {
    let parts: Vec<String> = d.outcomes().iter().map(|(l, p)| format!("{l}:{}", render_prob(p))).collect();
    format!("{} [{}]", d.name(), parts.join(" "))
}

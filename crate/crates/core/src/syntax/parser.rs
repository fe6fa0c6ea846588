use std::collections::{BTreeMap, BTreeSet};

use super::formula::{is_singleton_literal, singleton_literal, Formula};
use super::lexer::{tokenize, Spanned, Tok};
use super::sequent::{ContextVar, Item, Sequent, Slot};
use super::term::{parse_prob, Term};
use super::{ParseError, SyntaxError};

const KEYWORDS: &[&str] = &["forall", "exists", "bowtie", "in", "bot"];

/// Recursive-descent parser over a token stream. Also reused by the proof
/// script reader, which parses sequents and terms embedded in step lines.
pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Parser { toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let s = &self.toks[self.pos];
        SyntaxError::At { line: s.line, col: s.col, msg: msg.into() }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok, wanted: &str) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// A non-keyword identifier.
    pub fn ident(&mut self, wanted: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    pub fn number(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    pub fn usize(&mut self) -> Result<usize, SyntaxError> {
        let n = self.number()?;
        n.parse().map_err(|_| self.error(format!("`{n}` is not a non-negative integer")))
    }

    pub fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub fn domain_name(&mut self) -> Result<String, SyntaxError> {
        if self.eat(&Tok::LBrace) {
            self.eat(&Tok::Hash);
            let label = self.ident("a state label")?;
            self.expect(&Tok::RBrace, "`}`")?;
            return Ok(singleton_literal(&label));
        }
        self.ident("a domain name")
    }

    pub fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::Lt => {
                self.bump();
                let state = self.ident("a state label")?;
                self.expect(&Tok::Comma, "`,`")?;
                let p = self.number()?;
                let prob = parse_prob(&p).map_err(|e| self.error(e.to_string()))?;
                self.expect(&Tok::Gt, "`>`")?;
                Term::outcome(state, prob).map_err(|e| self.error(e.to_string()))
            }
            Tok::Hash => {
                self.bump();
                Ok(Term::Sharp(self.ident("a state label")?))
            }
            _ => Ok(Term::Var(self.ident("a term")?)),
        }
    }

    /// `formula := quantifier | star`; `*` binds loosest, then `\/`, then `&`.
    pub fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or_formula()?;
        if self.eat(&Tok::Star) {
            return Ok(Formula::star(lhs, self.formula()?));
        }
        Ok(lhs)
    }

    fn or_formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.and_formula()?;
        if self.eat(&Tok::Vee) {
            return Ok(Formula::or(lhs, self.or_formula()?));
        }
        Ok(lhs)
    }

    fn and_formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.primary()?;
        if self.eat(&Tok::Amp) {
            return Ok(Formula::and(lhs, self.and_formula()?));
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(f);
        }
        for (kw, universal) in [("forall", true), ("exists", false)] {
            if self.eat_keyword(kw) {
                let var = self.ident("a bound variable")?;
                self.expect_keyword("in")?;
                let domain = self.domain_name()?;
                self.expect(&Tok::Dot, "`.`")?;
                let body = self.formula()?;
                return Ok(if universal {
                    Formula::forall(var, domain, body)
                } else {
                    Formula::exists(var, domain, body)
                });
            }
        }
        if self.eat_keyword("bowtie") {
            let var = self.ident("a bound variable")?;
            self.expect_keyword("in")?;
            let domain = self.domain_name()?;
            self.expect(&Tok::LParen, "`(`")?;
            let left = self.formula()?;
            self.expect(&Tok::Semi, "`;`")?;
            let right = self.formula()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(Formula::bowtie(var, domain, left, right));
        }
        if self.eat_keyword("bot") {
            return Ok(Formula::Bot(None));
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(label) = name.strip_prefix("bot_") {
                self.bump();
                return Ok(Formula::Bot(Some(label.to_string())));
            }
            let next = self.peek_at(1).clone();
            let term_follows = matches!(next, Tok::Eq | Tok::Neq) || matches!(&next, Tok::Ident(k) if k == "in");
            if !KEYWORDS.contains(&name.as_str()) && !term_follows {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.term()?);
                            if self.eat(&Tok::RParen) {
                                break;
                            }
                            self.expect(&Tok::Comma, "`,` or `)`")?;
                        }
                    }
                    return Ok(Formula::atom(name, args));
                }
                return Ok(Formula::atom(name, vec![]));
            }
        }
        let lhs = self.term()?;
        if self.eat(&Tok::Eq) {
            return Ok(Formula::Eq(lhs, self.term()?));
        }
        if self.eat(&Tok::Neq) {
            return Ok(Formula::Neq(lhs, self.term()?));
        }
        if self.eat_keyword("in") {
            return Ok(Formula::member(lhs, self.domain_name()?));
        }
        Err(self.unexpected("`=`, `!=` or `in`"))
    }

    fn context_var_ahead(&self) -> bool {
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(s), next) if !KEYWORDS.contains(&s.as_str()) && !s.starts_with("bot_") => {
                matches!(next, Tok::Comma | Tok::CorrComma(_) | Tok::Turnstile | Tok::Eof | Tok::LBracket | Tok::Colon)
            }
            _ => false,
        }
    }

    fn item(&mut self) -> Result<Item, SyntaxError> {
        if self.context_var_ahead() {
            let name = self.ident("a context variable")?;
            let mut deps = Vec::new();
            if self.eat(&Tok::LBracket) && !self.eat(&Tok::RBracket) {
                loop {
                    deps.push(self.ident("a variable")?);
                    if self.eat(&Tok::RBracket) {
                        break;
                    }
                    self.expect(&Tok::Comma, "`,` or `]`")?;
                }
            }
            return Ok(Item::Context(ContextVar { name, deps }));
        }
        Ok(Item::Formula(self.formula()?))
    }

    pub fn sequent(&mut self) -> Result<Sequent, SyntaxError> {
        let mut antecedent = Vec::new();
        if !self.eat(&Tok::Turnstile) {
            loop {
                antecedent.push(self.item()?);
                if self.eat(&Tok::Turnstile) {
                    break;
                }
                if matches!(self.peek(), Tok::CorrComma(_)) {
                    return Err(self.error("correlated comma is only allowed in the succedent"));
                }
                self.expect(&Tok::Comma, "`,` or `|-`")?;
            }
        }
        let mut succedent: Vec<Slot> = Vec::new();
        if self.at_eof() {
            return finish(antecedent, succedent, self);
        }
        succedent.push(Slot::Single(self.item()?));
        loop {
            match self.peek().clone() {
                Tok::Comma => {
                    self.bump();
                    succedent.push(Slot::Single(self.item()?));
                }
                Tok::CorrComma(label) => {
                    self.bump();
                    let left = match succedent.pop() {
                        Some(Slot::Single(Item::Formula(f))) => f,
                        _ => return Err(self.error("`,_` must join two formulas")),
                    };
                    if self.context_var_ahead() {
                        return Err(self.error("`,_` must join two formulas"));
                    }
                    let right = self.formula()?;
                    succedent.push(Slot::Correlated { label, left, right });
                }
                _ => break,
            }
        }
        finish(antecedent, succedent, self)
    }
}

fn finish(antecedent: Vec<Item>, succedent: Vec<Slot>, p: &Parser) -> Result<Sequent, SyntaxError> {
    let s = Sequent::new(antecedent, succedent);
    s.validate().map_err(|e| p.error(e.to_string()))?;
    Ok(s)
}

fn whole<T>(text: &str, f: impl FnOnce(&mut Parser) -> Result<T, SyntaxError>) -> Result<T, SyntaxError> {
    let mut p = Parser::new(text)?;
    let v = f(&mut p)?;
    p.expect_eof()?;
    Ok(v)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, SyntaxError> {
    whole(text, Parser::sequent)
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    whole(text, Parser::formula)
}

pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    whole(text, Parser::term)
}

/// Declared names that parsed text is checked against.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub domains: BTreeSet<String>,
    /// Predicate arities. When empty, predicate symbols are not checked.
    pub predicates: BTreeMap<String, usize>,
}

impl Signature {
    pub fn knows_domain(&self, name: &str) -> bool {
        self.domains.contains(name)
            || is_singleton_literal(name)
            || name.strip_suffix("^f").is_some_and(|base| self.knows_domain(base))
    }

    fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied().or_else(|| name.strip_suffix("^f").and_then(|b| self.predicate_arity(b)))
    }

    pub fn check(&self, s: &Sequent) -> Result<(), ParseError> {
        let mut domains = BTreeSet::new();
        let mut preds = Vec::new();
        for f in s.formulas() {
            f.domains(&mut domains);
            f.predicates(&mut preds);
        }
        if let Some(d) = domains.into_iter().find(|d| !self.knows_domain(d)) {
            return Err(ParseError::UnknownDomain(d));
        }
        if !self.predicates.is_empty() {
            for (p, n) in preds {
                match self.predicate_arity(&p) {
                    None => return Err(ParseError::UnknownPredicate(p)),
                    Some(k) if k != n => {
                        return Err(ParseError::Syntax(SyntaxError::Arity { pred: p, expected: k, found: n }))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Parses a sequent and resolves its domain and predicate symbols.
pub fn parse_sequent_in(text: &str, sig: &Signature) -> Result<Sequent, ParseError> {
    let s = parse_sequent(text)?;
    sig.check(&s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::term::Prob;

    fn a(x: &str) -> Formula {
        Formula::atom("A", vec![Term::var(x)])
    }

    #[test]
    fn context_and_membership() {
        let s = parse_sequent("G, z in D |- A(z)").unwrap();
        assert_eq!(
            s,
            Sequent::new(
                vec![Item::Context(ContextVar::new("G")), Formula::member(Term::var("z"), "D").into()],
                vec![a("z").into()]
            )
        );
    }

    #[test]
    fn quantifier_succedent() {
        let s = parse_sequent("|- forall x in D . A(x)").unwrap();
        assert_eq!(s, Sequent::new(vec![], vec![Formula::forall("x", "D", a("x")).into()]));
        // no spaces around the dot
        assert_eq!(parse_sequent("|- forall x in D.A(x)").unwrap(), s);
    }

    #[test]
    fn correlated_slot() {
        let s = parse_sequent("G, z in DS |- A(z) ,_S A'(z)").unwrap();
        assert_eq!(s.succedent.len(), 1);
        assert_eq!(
            s.succedent[0],
            Slot::Correlated { label: "S".into(), left: a("z"), right: Formula::atom("A'", vec![Term::var("z")]) }
        );
    }

    #[test]
    fn precedence() {
        let f = parse_formula("A(x) & B(x) \\/ C(x) * D(x)").unwrap();
        let expected = Formula::star(
            Formula::or(
                Formula::and(a("x"), Formula::atom("B", vec![Term::var("x")])),
                Formula::atom("C", vec![Term::var("x")]),
            ),
            Formula::atom("D", vec![Term::var("x")]),
        );
        assert_eq!(f, expected);
        // quantifier body extends as far as possible
        let g = parse_formula("forall x in D . A(x) & B(x)").unwrap();
        assert!(matches!(g, Formula::Forall { .. }));
    }

    #[test]
    fn terms_and_bottoms() {
        let f = parse_formula("<up_y, 1/2> in DY").unwrap();
        let t = Term::outcome("up_y", Prob::new(1, 2)).unwrap();
        assert_eq!(f, Formula::member(t, "DY"));
        assert_eq!(parse_formula("bot_Y").unwrap(), Formula::Bot(Some("Y".into())));
        assert_eq!(parse_formula("bot").unwrap(), Formula::Bot(None));
        assert_eq!(parse_formula("#s in {s}").unwrap(), Formula::member(Term::sharp("s"), "{s}"));
        assert_eq!(parse_formula("z in {#u}").unwrap(), Formula::member(Term::var("z"), "{u}"));
        assert_eq!(parse_formula("<s, 0.5> = <s, 1/2>").unwrap().to_string(), "<s, 1/2> = <s, 1/2>");
    }

    #[test]
    fn nullary_atoms_and_contexts() {
        let s = parse_sequent("G |- A & B").unwrap();
        assert_eq!(s.succedent[0], Slot::from(Formula::and(Formula::atom("A", vec![]), Formula::atom("B", vec![]))));
        let s = parse_sequent("G[z] |- A(), Delta").unwrap();
        assert_eq!(s.antecedent[0], Item::Context(ContextVar { name: "G".into(), deps: vec!["z".into()] }));
        assert_eq!(s.succedent[1], Slot::Single(Item::Context(ContextVar::new("Delta"))));
        assert_eq!(s.to_string(), "G[z] |- A(), Delta");
    }

    #[test]
    fn empty_sides() {
        assert_eq!(parse_sequent("|-").unwrap(), Sequent::default());
        let s = parse_sequent("t != t |-").unwrap();
        assert_eq!(s.to_string(), "t != t |-");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_sequent("G, z in |- A(z)") {
            Err(SyntaxError::At { line: 1, col: 9, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_sequent("G |- A(z) ,_S G").is_err());
        assert!(parse_sequent("A(x) ,_S B(x) |-").is_err());
        assert!(parse_sequent("G, G |- A(z)").is_err());
    }

    #[test]
    fn bowtie_round_trip() {
        let text = "G |- bowtie x in DS (A(x); A'(x))";
        let s = parse_sequent(text).unwrap();
        assert_eq!(s.to_string(), text);
    }

    #[test]
    fn signature_lookup() {
        let sig = Signature {
            domains: BTreeSet::from(["D".to_string()]),
            predicates: BTreeMap::from([("A".to_string(), 1)]),
        };
        assert!(parse_sequent_in("z in D |- A(z)", &sig).is_ok());
        assert!(parse_sequent_in("#s in D^f |- A^f(#s)", &sig).is_ok());
        assert!(matches!(
            parse_sequent_in("z in E |- A(z)", &sig),
            Err(ParseError::UnknownDomain(d)) if d == "E"
        ));
        assert!(matches!(
            parse_sequent_in("z in D |- B(z)", &sig),
            Err(ParseError::UnknownPredicate(p)) if p == "B"
        ));
    }

    #[test]
    fn unicode_input_renders_ascii() {
        let s = parse_sequent("Γ, z ∈ D ⊢ ∀ x ∈ D . A(x) ∨ A(z)").unwrap();
        assert_eq!(s.to_string(), "G, z in D |- forall x in D . A(x) \\/ A(z)");
    }
}

//! Recursive-descent parser for the supported ISPL subset and for ATL formulas.
//!
//! Parsing happens in two passes. The first produces a raw tree that keeps source
//! positions; the second resolves every identifier against its declaration,
//! type-checks expressions and builds the public [`ModelSpec`].

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::lexer::{tokenize, Pos, Tok, Token};
use super::{ParseError, ParseErrors};

const KEYWORDS: &[&str] = &[
    "Agent", "end", "Vars", "Actions", "Protocol", "Evolution", "Evaluation", "Groups",
    "Formulae", "Other", "boolean", "true", "false", "and", "or", "if", "Action",
];

#[derive(Debug, Clone)]
struct Name {
    text: String,
    pos: Pos,
}

#[derive(Debug, Clone)]
enum RawKind {
    Int(i64),
    Bool(bool),
    Var { owner: Option<Name>, name: Name },
    ActionIs { agent: Name, action: Name },
    Not(Box<RawExpr>),
    And(Box<RawExpr>, Box<RawExpr>),
    Or(Box<RawExpr>, Box<RawExpr>),
    Cmp(CmpOp, Box<RawExpr>, Box<RawExpr>),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
}

#[derive(Debug, Clone)]
struct RawExpr {
    kind: RawKind,
    pos: Pos,
}

struct RawVar {
    name: Name,
    domain: Domain,
}

struct RawRule {
    assignments: Vec<(Name, RawExpr)>,
    condition: RawExpr,
}

struct RawProtocolRule {
    guard: Option<RawExpr>,
    actions: Vec<Name>,
    pos: Pos,
}

struct RawAgent {
    name: Name,
    vars: Vec<RawVar>,
    actions: Option<Vec<Name>>,
    protocol: Option<Vec<RawProtocolRule>>,
    evolution: Vec<RawRule>,
}

struct RawProp {
    name: Name,
    condition: RawExpr,
}

struct RawGroup {
    name: Name,
    members: Vec<Name>,
}

#[derive(Debug, Clone)]
enum RawFormula {
    Atom(Name),
    Not(Box<RawFormula>),
    And(Box<RawFormula>, Box<RawFormula>),
    Or(Box<RawFormula>, Box<RawFormula>),
    Next(Name, Box<RawFormula>),
    Eventually(Name, Box<RawFormula>),
    Always(Name, Box<RawFormula>),
    Until(Name, Box<RawFormula>, Box<RawFormula>),
}

#[derive(Default)]
struct RawModel {
    agents: Vec<RawAgent>,
    props: Vec<RawProp>,
    groups: Vec<RawGroup>,
    formulas: Option<(Pos, Vec<RawFormula>)>,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    fn expect_word(&mut self, word: &str) -> PResult<Pos> {
        if self.is_word(word) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) if !KEYWORDS.contains(&text.as_str()) => {
                let pos = self.bump().pos;
                Ok(Name { text, pos })
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(if negative { -n } else { n })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn name_list(&mut self) -> PResult<Vec<Name>> {
        self.expect(Tok::LBrace)?;
        let mut names = Vec::new();
        if *self.peek() != Tok::RBrace {
            names.push(self.ident()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                names.push(self.ident()?);
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(names)
    }

    fn end_section(&mut self, word: &str) -> PResult<()> {
        self.expect_word("end")?;
        self.expect_word(word)?;
        Ok(())
    }

    // ---- model ----

    fn model(&mut self) -> PResult<RawModel> {
        let mut m = RawModel::default();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(w) if w == "Agent" => {
                    self.bump();
                    m.agents.push(self.agent()?);
                }
                Tok::Ident(w) if w == "Evaluation" => {
                    self.bump();
                    while !self.is_word("end") {
                        let name = self.ident()?;
                        self.expect_word("if")?;
                        let condition = self.expr()?;
                        self.expect(Tok::Semi)?;
                        m.props.push(RawProp { name, condition });
                    }
                    self.end_section("Evaluation")?;
                }
                Tok::Ident(w) if w == "Groups" => {
                    self.bump();
                    while !self.is_word("end") {
                        let name = self.ident()?;
                        self.expect(Tok::Eq)?;
                        let members = self.name_list()?;
                        self.expect(Tok::Semi)?;
                        m.groups.push(RawGroup { name, members });
                    }
                    self.end_section("Groups")?;
                }
                Tok::Ident(w) if w == "Formulae" => {
                    let pos = self.bump().pos;
                    if m.formulas.is_some() {
                        return Err(ParseError::new(pos, "duplicate Formulae section"));
                    }
                    let mut fs = Vec::new();
                    while !self.is_word("end") {
                        fs.push(self.formula()?);
                        self.expect(Tok::Semi)?;
                    }
                    self.end_section("Formulae")?;
                    m.formulas = Some((pos, fs));
                }
                _ => return Err(self.unexpected("`Agent`, `Evaluation`, `Groups` or `Formulae`")),
            }
        }
        Ok(m)
    }

    fn agent(&mut self) -> PResult<RawAgent> {
        let name = match self.peek().clone() {
            Tok::Ident(w) if w == ENVIRONMENT => {
                let pos = self.bump().pos;
                Name { text: w, pos }
            }
            _ => self.ident()?,
        };
        let mut agent = RawAgent {
            name,
            vars: Vec::new(),
            actions: None,
            protocol: None,
            evolution: Vec::new(),
        };
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Ident(w) if w == "Vars" => {
                    self.bump();
                    self.expect(Tok::Colon)?;
                    while !self.is_word("end") {
                        agent.vars.push(self.var_decl()?);
                    }
                    self.end_section("Vars")?;
                }
                Tok::Ident(w) if w == "Actions" => {
                    self.bump();
                    if agent.actions.is_some() {
                        return Err(ParseError::new(pos, "duplicate Actions section"));
                    }
                    self.expect(Tok::Eq)?;
                    agent.actions = Some(self.name_list()?);
                    self.expect(Tok::Semi)?;
                }
                Tok::Ident(w) if w == "Protocol" => {
                    self.bump();
                    if agent.protocol.is_some() {
                        return Err(ParseError::new(pos, "duplicate Protocol section"));
                    }
                    self.expect(Tok::Colon)?;
                    let mut rules = Vec::new();
                    while !self.is_word("end") {
                        let pos = self.pos();
                        let guard = if self.is_word("Other") {
                            self.bump();
                            None
                        } else {
                            Some(self.expr()?)
                        };
                        self.expect(Tok::Colon)?;
                        let actions = self.name_list()?;
                        self.expect(Tok::Semi)?;
                        rules.push(RawProtocolRule { guard, actions, pos });
                    }
                    self.end_section("Protocol")?;
                    agent.protocol = Some(rules);
                }
                Tok::Ident(w) if w == "Evolution" => {
                    self.bump();
                    self.expect(Tok::Colon)?;
                    while !self.is_word("end") {
                        agent.evolution.push(self.rule()?);
                    }
                    self.end_section("Evolution")?;
                }
                Tok::Ident(w) if w == "end" => break,
                _ => return Err(self.unexpected("`Vars`, `Actions`, `Protocol`, `Evolution` or `end Agent`")),
            }
        }
        self.end_section("Agent")?;
        Ok(agent)
    }

    fn var_decl(&mut self) -> PResult<RawVar> {
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let domain = if self.is_word("boolean") {
            self.bump();
            Domain::Boolean
        } else {
            let pos = self.pos();
            let lo = self.signed_int()?;
            self.expect(Tok::DotDot)?;
            let hi = self.signed_int()?;
            if lo > hi {
                return Err(ParseError::new(
                    pos,
                    format!("range error: `{}` has empty range {lo}..{hi}", name.text),
                ));
            }
            if lo == hi {
                return Err(ParseError::new(
                    pos,
                    format!("range error: `{}` has a single-value domain", name.text),
                ));
            }
            Domain::Range { lo, hi }
        };
        self.expect(Tok::Semi)?;
        Ok(RawVar { name, domain })
    }

    fn rule(&mut self) -> PResult<RawRule> {
        let mut assignments = Vec::new();
        loop {
            let target = self.ident()?;
            self.expect(Tok::Eq)?;
            let value = self.not_expr()?;
            assignments.push((target, value));
            if self.is_word("and") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_word("if")?;
        let condition = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(RawRule {
            assignments,
            condition,
        })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<RawExpr> {
        let mut lhs = self.and_expr()?;
        while self.is_word("or") {
            let pos = self.bump().pos;
            let rhs = self.and_expr()?;
            lhs = RawExpr {
                kind: RawKind::Or(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<RawExpr> {
        let mut lhs = self.not_expr()?;
        while self.is_word("and") {
            let pos = self.bump().pos;
            let rhs = self.not_expr()?;
            lhs = RawExpr {
                kind: RawKind::And(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<RawExpr> {
        if *self.peek() == Tok::Bang {
            let pos = self.bump().pos;
            let inner = self.not_expr()?;
            return Ok(RawExpr {
                kind: RawKind::Not(Box::new(inner)),
                pos,
            });
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<RawExpr> {
        let lhs = self.arith()?;
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        let pos = self.bump().pos;
        let rhs = self.arith()?;
        Ok(RawExpr {
            kind: RawKind::Cmp(op, Box::new(lhs), Box::new(rhs)),
            pos,
        })
    }

    fn arith(&mut self) -> PResult<RawExpr> {
        let mut lhs = self.atom()?;
        loop {
            let add = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            let pos = self.bump().pos;
            let rhs = self.atom()?;
            let (l, r) = (Box::new(lhs), Box::new(rhs));
            lhs = RawExpr {
                kind: if add { RawKind::Add(l, r) } else { RawKind::Sub(l, r) },
                pos,
            };
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> PResult<RawExpr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(_) | Tok::Minus => Ok(RawExpr {
                kind: RawKind::Int(self.signed_int()?),
                pos,
            }),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                Ok(RawExpr {
                    kind: RawKind::Bool(w == "true"),
                    pos,
                })
            }
            Tok::Ident(w) if w == ENVIRONMENT || !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                let first = Name { text: w, pos };
                if *self.peek() != Tok::Dot {
                    return Ok(RawExpr {
                        kind: RawKind::Var {
                            owner: None,
                            name: first,
                        },
                        pos,
                    });
                }
                self.bump();
                if self.is_word("Action") {
                    self.bump();
                    self.expect(Tok::Eq)?;
                    let action = self.ident()?;
                    return Ok(RawExpr {
                        kind: RawKind::ActionIs {
                            agent: first,
                            action,
                        },
                        pos,
                    });
                }
                let name = self.ident()?;
                Ok(RawExpr {
                    kind: RawKind::Var {
                        owner: Some(first),
                        name,
                    },
                    pos,
                })
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<RawFormula> {
        let mut lhs = self.formula_and()?;
        while self.is_word("or") {
            self.bump();
            let rhs = self.formula_and()?;
            lhs = RawFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_and(&mut self) -> PResult<RawFormula> {
        let mut lhs = self.formula_unary()?;
        while self.is_word("and") {
            self.bump();
            let rhs = self.formula_unary()?;
            lhs = RawFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_unary(&mut self) -> PResult<RawFormula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(RawFormula::Not(Box::new(self.formula_unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Lt => {
                self.bump();
                let coalition = self.ident()?;
                self.expect(Tok::Gt)?;
                self.temporal(coalition)
            }
            Tok::Ident(w) if matches!(w.as_str(), "X" | "F" | "G") && *self.peek_at(1) == Tok::LParen => {
                Err(ParseError::new(
                    self.pos(),
                    format!("temporal operator `{w}` requires a coalition prefix such as `<g> {w}(...)`"),
                ))
            }
            Tok::Ident(w) if w == "U" => Err(ParseError::new(
                self.pos(),
                "`U` must appear inside a coalition prefix, as in `<g> (a U b)`",
            )),
            _ => Ok(RawFormula::Atom(self.ident()?)),
        }
    }

    fn temporal(&mut self, coalition: Name) -> PResult<RawFormula> {
        match self.peek().clone() {
            Tok::Ident(w) if matches!(w.as_str(), "X" | "F" | "G") => {
                self.bump();
                let inner = Box::new(self.formula_unary()?);
                Ok(match w.as_str() {
                    "X" => RawFormula::Next(coalition, inner),
                    "F" => RawFormula::Eventually(coalition, inner),
                    _ => RawFormula::Always(coalition, inner),
                })
            }
            Tok::LParen => {
                self.bump();
                let lhs = self.formula()?;
                self.expect_word("U")?;
                let rhs = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(RawFormula::Until(coalition, Box::new(lhs), Box::new(rhs)))
            }
            _ => Err(self.unexpected("`X`, `F`, `G` or `(` after coalition")),
        }
    }
}

// ---- resolution ----

/// Declarations visible during resolution.
struct Symbols {
    /// owner -> (var name -> domain)
    vars: BTreeMap<String, BTreeMap<String, Domain>>,
    /// agent -> actions (environment excluded)
    actions: BTreeMap<String, Vec<String>>,
    propositions: BTreeSet<String>,
    groups: BTreeSet<String>,
}

#[derive(Clone, Copy)]
enum Scope<'a> {
    Owner(&'a str),
    Global,
}

impl Symbols {
    fn resolve_var(&self, owner: &Option<Name>, name: &Name, scope: Scope) -> PResult<(VarRef, Domain)> {
        let lookup = |o: &str| self.vars.get(o).and_then(|vs| vs.get(&name.text)).copied();
        if let Some(o) = owner {
            if !self.vars.contains_key(&o.text) {
                return Err(ParseError::new(o.pos, format!("undeclared agent `{}`", o.text)));
            }
            return match lookup(&o.text) {
                Some(d) => Ok((
                    VarRef {
                        owner: o.text.clone(),
                        name: name.text.clone(),
                    },
                    d,
                )),
                None => Err(ParseError::new(
                    name.pos,
                    format!("undeclared variable `{}.{}`", o.text, name.text),
                )),
            };
        }
        let candidates: Vec<&str> = match scope {
            Scope::Owner(o) if o == ENVIRONMENT => vec![ENVIRONMENT],
            Scope::Owner(o) => vec![o, ENVIRONMENT],
            Scope::Global => self.vars.keys().map(String::as_str).collect(),
        };
        let found: Vec<(&str, Domain)> = candidates
            .iter()
            .filter_map(|o| lookup(o).map(|d| (*o, d)))
            .collect();
        match (scope, found.as_slice()) {
            (_, []) => Err(ParseError::new(
                name.pos,
                format!("undeclared variable `{}`", name.text),
            )),
            (Scope::Owner(_), [(o, d), ..]) | (Scope::Global, [(o, d)]) => Ok((
                VarRef {
                    owner: o.to_string(),
                    name: name.text.clone(),
                },
                *d,
            )),
            (Scope::Global, _) => Err(ParseError::new(
                name.pos,
                format!("ambiguous variable `{}`; qualify it with its owner", name.text),
            )),
        }
    }

    fn expr(&self, raw: &RawExpr, scope: Scope) -> PResult<(Expr, Type)> {
        let want = |e: &RawExpr, ty: Type| -> PResult<Expr> {
            let (x, t) = self.expr(e, scope)?;
            if t != ty {
                return Err(ParseError::new(
                    e.pos,
                    format!("type mismatch: expected {ty} expression, found {t}"),
                ));
            }
            Ok(x)
        };
        Ok(match &raw.kind {
            RawKind::Int(n) => (Expr::Int(*n), Type::Int),
            RawKind::Bool(b) => (Expr::Bool(*b), Type::Bool),
            RawKind::Var { owner, name } => {
                let (v, d) = self.resolve_var(owner, name, scope)?;
                (Expr::Var(v), d.ty())
            }
            RawKind::ActionIs { agent, action } => {
                let actions = self.actions.get(&agent.text).ok_or_else(|| {
                    ParseError::new(agent.pos, format!("undeclared agent `{}`", agent.text))
                })?;
                if !actions.contains(&action.text) {
                    return Err(ParseError::new(
                        action.pos,
                        format!("agent `{}` has no action `{}`", agent.text, action.text),
                    ));
                }
                (
                    Expr::ActionIs {
                        agent: agent.text.clone(),
                        action: action.text.clone(),
                    },
                    Type::Bool,
                )
            }
            RawKind::Not(e) => (Expr::Not(Box::new(want(e, Type::Bool)?)), Type::Bool),
            RawKind::And(l, r) => (
                Expr::And(Box::new(want(l, Type::Bool)?), Box::new(want(r, Type::Bool)?)),
                Type::Bool,
            ),
            RawKind::Or(l, r) => (
                Expr::Or(Box::new(want(l, Type::Bool)?), Box::new(want(r, Type::Bool)?)),
                Type::Bool,
            ),
            RawKind::Add(l, r) => (
                Expr::Add(Box::new(want(l, Type::Int)?), Box::new(want(r, Type::Int)?)),
                Type::Int,
            ),
            RawKind::Sub(l, r) => (
                Expr::Sub(Box::new(want(l, Type::Int)?), Box::new(want(r, Type::Int)?)),
                Type::Int,
            ),
            RawKind::Cmp(op, l, r) => {
                let (le, lt) = self.expr(l, scope)?;
                let (re, rt) = self.expr(r, scope)?;
                if lt != rt {
                    return Err(ParseError::new(
                        raw.pos,
                        format!("type mismatch: cannot compare {lt} with {rt}"),
                    ));
                }
                if lt == Type::Bool && !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                    return Err(ParseError::new(
                        raw.pos,
                        format!("type mismatch: `{}` needs integer operands", op.symbol()),
                    ));
                }
                (Expr::Cmp(*op, Box::new(le), Box::new(re)), Type::Bool)
            }
        })
    }

    fn condition(&self, raw: &RawExpr, scope: Scope) -> PResult<Expr> {
        let (e, t) = self.expr(raw, scope)?;
        if t != Type::Bool {
            return Err(ParseError::new(
                raw.pos,
                format!("type mismatch: condition must be boolean, found {t}"),
            ));
        }
        Ok(e)
    }

    fn formula(&self, raw: &RawFormula) -> PResult<Formula> {
        let coalition = |c: &Name| -> PResult<String> {
            if self.groups.contains(&c.text) || self.actions.contains_key(&c.text) {
                Ok(c.text.clone())
            } else {
                Err(ParseError::new(c.pos, format!("unknown group `{}`", c.text)))
            }
        };
        let sub = |f: &RawFormula| self.formula(f).map(Box::new);
        Ok(match raw {
            RawFormula::Atom(n) => {
                if !self.propositions.contains(&n.text) {
                    return Err(ParseError::new(n.pos, format!("unknown atom `{}`", n.text)));
                }
                Formula::Atom(n.text.clone())
            }
            RawFormula::Not(f) => Formula::Not(sub(f)?),
            RawFormula::And(l, r) => Formula::And(sub(l)?, sub(r)?),
            RawFormula::Or(l, r) => Formula::Or(sub(l)?, sub(r)?),
            RawFormula::Next(c, f) => Formula::Next(coalition(c)?, sub(f)?),
            RawFormula::Eventually(c, f) => Formula::Eventually(coalition(c)?, sub(f)?),
            RawFormula::Always(c, f) => Formula::Always(coalition(c)?, sub(f)?),
            RawFormula::Until(c, l, r) => Formula::Until(coalition(c)?, sub(l)?, sub(r)?),
        })
    }
}

fn symbols_of(spec: &ModelSpec) -> Symbols {
    let mut vars = BTreeMap::new();
    vars.insert(
        ENVIRONMENT.to_string(),
        spec.environment_vars.iter().map(|v| (v.name.clone(), v.domain)).collect(),
    );
    let mut actions = BTreeMap::new();
    for a in &spec.agents {
        vars.insert(a.name.clone(), a.vars.iter().map(|v| (v.name.clone(), v.domain)).collect());
        actions.insert(a.name.clone(), a.actions.clone());
    }
    Symbols {
        vars,
        actions,
        propositions: spec.propositions.iter().map(|p| p.name.clone()).collect(),
        groups: spec.groups.iter().map(|g| g.name.clone()).collect(),
    }
}

fn check_unique<'a>(names: impl IntoIterator<Item = &'a Name>, what: &str, errors: &mut Vec<ParseError>) {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.text.as_str()) {
            errors.push(ParseError::new(n.pos, format!("duplicate {what} `{}`", n.text)));
        }
    }
}

fn note(errors: &mut Vec<ParseError>, r: PResult<()>) {
    if let Err(e) = r {
        errors.push(e);
    }
}

fn resolve(raw: RawModel, eof: Pos) -> Result<ModelSpec, ParseErrors> {
    let mut errors = Vec::new();

    check_unique(raw.agents.iter().map(|a| &a.name), "agent", &mut errors);
    check_unique(raw.props.iter().map(|p| &p.name), "proposition", &mut errors);
    check_unique(raw.groups.iter().map(|g| &g.name), "group", &mut errors);

    let mut environment = None;
    let mut agents = Vec::new();
    for a in &raw.agents {
        check_unique(a.vars.iter().map(|v| &v.name), "variable", &mut errors);
        if a.name.text == ENVIRONMENT {
            if a.actions.is_some() || a.protocol.is_some() {
                errors.push(ParseError::new(
                    a.name.pos,
                    "the Environment agent takes no actions; remove its Actions/Protocol sections",
                ));
            }
            environment.get_or_insert(a);
        } else {
            if let Some(actions) = &a.actions {
                check_unique(actions, "action", &mut errors);
            }
            agents.push(a);
        }
    }
    if agents.is_empty() {
        errors.push(ParseError::new(eof, "model declares no agents besides Environment"));
    }
    for a in &agents {
        if a.actions.as_ref().is_none_or(|acts| acts.is_empty()) {
            errors.push(ParseError::new(
                a.name.pos,
                format!("agent `{}` declares no actions", a.name.text),
            ));
        }
    }

    // Declarations first, so bodies can refer to anything declared anywhere in the file.
    let decls = |a: &RawAgent| -> Vec<VarDecl> {
        a.vars
            .iter()
            .map(|v| VarDecl {
                name: v.name.text.clone(),
                domain: v.domain,
            })
            .collect()
    };
    let mut spec = ModelSpec {
        environment_vars: environment.map(decls).unwrap_or_default(),
        environment_evolution: Vec::new(),
        agents: agents
            .iter()
            .map(|a| AgentDecl {
                name: a.name.text.clone(),
                vars: decls(a),
                actions: a
                    .actions
                    .iter()
                    .flatten()
                    .map(|n| n.text.clone())
                    .collect(),
                protocol: None,
                evolution: Vec::new(),
            })
            .collect(),
        propositions: raw
            .props
            .iter()
            .map(|p| PropositionDef {
                name: p.name.text.clone(),
                condition: Expr::Bool(true),
            })
            .collect(),
        groups: raw
            .groups
            .iter()
            .map(|g| GroupDef {
                name: g.name.text.clone(),
                members: g.members.iter().map(|m| m.text.clone()).collect(),
            })
            .collect(),
        formulas: Vec::new(),
    };
    let symbols = symbols_of(&spec);

    let rules_of = |a: &RawAgent| -> Vec<PResult<EvolutionRule>> {
        let owner = a.name.text.as_str();
        a.evolution
            .iter()
            .map(|rule| {
                let mut assignments = Vec::new();
                for (target, value) in &rule.assignments {
                    let domain = symbols.vars[owner].get(&target.text).copied().ok_or_else(|| {
                        ParseError::new(
                            target.pos,
                            format!("`{}` is not a variable of `{owner}`", target.text),
                        )
                    })?;
                    let (e, t) = symbols.expr(value, Scope::Owner(owner))?;
                    if t != domain.ty() {
                        return Err(ParseError::new(
                            value.pos,
                            format!(
                                "type mismatch: `{}` is {} but is assigned a {t} expression",
                                target.text,
                                domain.ty()
                            ),
                        ));
                    }
                    assignments.push(Assignment {
                        target: VarRef {
                            owner: owner.to_string(),
                            name: target.text.clone(),
                        },
                        value: e,
                    });
                }
                let condition = symbols.condition(&rule.condition, Scope::Owner(owner))?;
                Ok(EvolutionRule {
                    assignments,
                    condition,
                })
            })
            .collect()
    };

    if let Some(env) = environment {
        for r in rules_of(env) {
            note(&mut errors, r.map(|rule| spec.environment_evolution.push(rule)));
        }
    }
    for (decl, a) in spec.agents.iter_mut().zip(&agents) {
        for r in rules_of(a) {
            note(&mut errors, r.map(|rule| decl.evolution.push(rule)));
        }
        if let Some(rules) = &a.protocol {
            let mut out = Vec::new();
            for rule in rules {
                let guard = match &rule.guard {
                    None => Ok(ProtocolGuard::Other),
                    Some(g) => symbols.condition(g, Scope::Owner(&a.name.text)).map(ProtocolGuard::When),
                };
                let guard = match guard {
                    Ok(g) => g,
                    Err(e) => {
                        note(&mut errors, Err(e));
                        continue;
                    }
                };
                for act in &rule.actions {
                    if !decl.actions.contains(&act.text) {
                        note(&mut errors, Err(ParseError::new(
                            act.pos,
                            format!("agent `{}` has no action `{}`", a.name.text, act.text),
                        )));
                    }
                }
                if rule.actions.is_empty() {
                    note(&mut errors, Err(ParseError::new(rule.pos, "protocol rule enables no actions")));
                }
                out.push(ProtocolRule {
                    guard,
                    actions: rule.actions.iter().map(|n| n.text.clone()).collect(),
                });
            }
            decl.protocol = Some(out);
        }
    }

    for (def, p) in spec.propositions.iter_mut().zip(&raw.props) {
        note(&mut errors, symbols.condition(&p.condition, Scope::Global).map(|c| def.condition = c));
    }

    for g in &raw.groups {
        check_unique(&g.members, "group member", &mut errors);
        for m in &g.members {
            if !symbols.actions.contains_key(&m.text) {
                errors.push(ParseError::new(
                    m.pos,
                    format!("group `{}` names undeclared agent `{}`", g.name.text, m.text),
                ));
            }
        }
    }

    match &raw.formulas {
        Some((_, fs)) if !fs.is_empty() => {
            for f in fs {
                match symbols.formula(f) {
                    Ok(f) => spec.formulas.push(f),
                    Err(e) => errors.push(e),
                }
            }
        }
        Some((pos, _)) => errors.push(ParseError::new(*pos, "empty Formulae section")),
        None => errors.push(ParseError::new(eof, "empty Formulae: the model declares no formulas")),
    }

    if errors.is_empty() {
        Ok(spec)
    } else {
        errors.sort_by_key(|e| e.pos);
        Err(ParseErrors(errors))
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<ModelSpec, ParseErrors> {
    let mut p = Parser::new(text).map_err(|e| ParseErrors(vec![e]))?;
    let raw = p.model().map_err(|e| ParseErrors(vec![e]))?;
    let eof = p.pos();
    resolve(raw, eof)
}

/// Parses a formula against the propositions, groups and agents of `spec`.
pub fn parse_formula(text: &str, spec: &ModelSpec) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let raw = p.formula()?;
    if *p.peek() == Tok::Semi {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of formula"));
    }
    symbols_of(spec).formula(&raw)
}

//! AgentSpeak plan text: emitting generated plans and loading them back.
//!
//! ```text
//! +!gettreasure:
//!     treasuremined(false) & columnba(2) & rowba(3) & poss(rowra(0)) & poss(rowra(1))
//!     <-
//!     .drop_all_intentions; mine; true.
//! ```
//!
//! Emitted plans indent with tabs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const DROP_ALL: &str = ".drop_all_intentions";

/// One guard literal: `var(value)` or `poss(var(value))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GuardAtom {
    Known { var: String, value: String },
    Possible { var: String, value: String },
}

impl GuardAtom {
    pub fn var(&self) -> &str {
        match self {
            GuardAtom::Known { var, .. } | GuardAtom::Possible { var, .. } => var,
        }
    }

    pub fn value(&self) -> &str {
        match self {
            GuardAtom::Known { value, .. } | GuardAtom::Possible { value, .. } => value,
        }
    }
}

impl fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardAtom::Known { var, value } => write!(f, "{var}({value})"),
            GuardAtom::Possible { var, value } => write!(f, "poss({var}({value}))"),
        }
    }
}

/// A value as it appears in a guard: integer literal or `true`/`false`.
pub fn parse_literal(text: &str) -> Option<i64> {
    match text {
        "true" => Some(1),
        "false" => Some(0),
        _ => text.parse().ok(),
    }
}

/// Builds guard atoms in canonical order: `fixed` as given, then known variables by
/// name, then possible values by name and ascending value.
///
/// `vars` maps lowercased variable names to their rendered values in ascending order.
pub fn ordered_guard(fixed: &[(String, String)], vars: &BTreeMap<String, Vec<String>>) -> Vec<GuardAtom> {
    let mut out: Vec<GuardAtom> = fixed
        .iter()
        .map(|(var, value)| GuardAtom::Known {
            var: var.clone(),
            value: value.clone(),
        })
        .collect();
    for (var, values) in vars.iter().filter(|(_, v)| v.len() == 1) {
        out.push(GuardAtom::Known {
            var: var.clone(),
            value: values[0].clone(),
        });
    }
    for (var, values) in vars.iter().filter(|(_, v)| v.len() > 1) {
        out.extend(values.iter().map(|value| GuardAtom::Possible {
            var: var.clone(),
            value: value.clone(),
        }));
    }
    out
}

/// Renders a guard, `true` when empty.
pub fn render_guard(atoms: &[GuardAtom]) -> String {
    if atoms.is_empty() {
        return "true".to_string();
    }
    atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" & ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub goal: String,
    pub guard: Vec<GuardAtom>,
    pub body: Vec<String>,
    pub successor: Option<String>,
}

impl Plan {
    /// Guard as variable -> admissible values.
    pub fn guard_sets(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for a in &self.guard {
            out.entry(a.var().to_string()).or_default().insert(a.value().to_string());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("plan for goal `{goal}` with guard `{guard}` has an empty body")]
    EmptyBody { goal: String, guard: String },
}

/// Writes one plan.
pub fn emit_plan(plan: &Plan) -> Result<String, EmitError> {
    if plan.body.is_empty() {
        return Err(EmitError::EmptyBody {
            goal: plan.goal.clone(),
            guard: render_guard(&plan.guard),
        });
    }
    let tail = match &plan.successor {
        Some(g) => format!("!{g}"),
        None => "true".to_string(),
    };
    let mut body = vec![DROP_ALL.to_string()];
    body.extend(plan.body.iter().cloned());
    body.push(tail);
    Ok(format!(
        "+!{}:\n\t{}\n\t<-\n\t{}.\n",
        plan.goal,
        render_guard(&plan.guard),
        body.join("; ")
    ))
}

/// Writes plans separated by blank lines.
pub fn emit(plans: &[Plan]) -> Result<String, EmitError> {
    let rendered = plans.iter().map(emit_plan).collect::<Result<Vec<_>, _>>()?;
    Ok(rendered.join("\n"))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LoadError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Plus,
    Bang,
    Colon,
    Amp,
    Arrow,
    Semi,
    Dot,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, LoadError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line) = (0, 1);
    let err = |line, message: String| Err(LoadError { line, message });
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && matches!(next, Some('/') | Some('*')) {
            return err(line, "comments are not supported".into());
        }
        let word_char = |c: char| c.is_ascii_alphanumeric() || c == '_';
        let starts_word = word_char(c)
            || (c == '.' && next.is_some_and(|n| n.is_ascii_alphabetic()))
            || (c == '-' && next.is_some_and(|n| n.is_ascii_digit()));
        if starts_word {
            let start = i;
            i += 1;
            while i < chars.len() && word_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), line));
            continue;
        }
        let tok = match (c, next) {
            ('<', Some('-')) => {
                i += 1;
                Tok::Arrow
            }
            ('+', _) => Tok::Plus,
            ('!', _) => Tok::Bang,
            (':', _) => Tok::Colon,
            ('&', _) => Tok::Amp,
            (';', _) => Tok::Semi,
            ('.', _) => Tok::Dot,
            ('(', _) => Tok::LParen,
            (')', _) => Tok::RParen,
            _ => return err(line, format!("unexpected character `{c}`")),
        };
        i += 1;
        out.push((tok, line));
    }
    Ok(out)
}

struct Loader {
    toks: Vec<(Tok, usize)>,
    at: usize,
    last_line: usize,
}

impl Loader {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.at).map_or(self.last_line, |(_, l)| *l)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, LoadError> {
        Err(LoadError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LoadError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn word(&mut self, what: &str) -> Result<String, LoadError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.at += 1;
                Ok(w)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn atom(&mut self) -> Result<GuardAtom, LoadError> {
        let name = self.word("guard atom")?;
        self.expect(Tok::LParen, "`(`")?;
        let atom = if name == "poss" {
            let var = self.word("variable name")?;
            self.expect(Tok::LParen, "`(`")?;
            let value = self.word("value")?;
            self.expect(Tok::RParen, "`)`")?;
            GuardAtom::Possible { var, value }
        } else {
            let value = self.word("value")?;
            GuardAtom::Known { var: name, value }
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(atom)
    }

    fn plan(&mut self) -> Result<Plan, LoadError> {
        self.expect(Tok::Plus, "`+!` at start of plan")?;
        self.expect(Tok::Bang, "`!` after `+`")?;
        let goal = self.word("goal name")?;
        self.expect(Tok::Colon, "`:` after the triggering goal")?;
        let mut guard = Vec::new();
        if self.peek() == Some(&Tok::Word("true".into())) {
            self.at += 1;
        } else {
            guard.push(self.atom()?);
            while self.peek() == Some(&Tok::Amp) {
                self.at += 1;
                guard.push(self.atom()?);
            }
        }
        self.expect(Tok::Arrow, "`<-`")?;
        let mut items = Vec::new();
        loop {
            let bang = self.peek() == Some(&Tok::Bang);
            if bang {
                self.at += 1;
            }
            let w = self.word("body action")?;
            items.push(if bang { format!("!{w}") } else { w });
            match self.peek() {
                Some(Tok::Semi) => self.at += 1,
                Some(Tok::Dot) => {
                    self.at += 1;
                    break;
                }
                _ => return self.fail("expected `;` or `.` in plan body"),
            }
        }
        if items.first().map(String::as_str) == Some(DROP_ALL) {
            items.remove(0);
        }
        let successor = match items.pop().as_deref() {
            Some("true") => None,
            Some(t) if t.starts_with('!') => Some(t[1..].to_string()),
            _ => return self.fail("plan body must end with `true` or `!goal`"),
        };
        if let Some(bad) = items.iter().find(|a| a.starts_with('!') || a.starts_with('.')) {
            return self.fail(format!("unsupported body item `{bad}`"));
        }
        Ok(Plan {
            goal,
            guard,
            body: items,
            successor,
        })
    }
}

/// Parses plans written by [`emit`] or by hand in the same subset.
pub fn load(text: &str) -> Result<Vec<Plan>, LoadError> {
    let toks = tokenize(text)?;
    let mut loader = Loader {
        toks,
        at: 0,
        last_line: text.lines().count().max(1),
    };
    let mut plans = Vec::new();
    while loader.peek().is_some() {
        plans.push(loader.plan()?);
    }
    Ok(plans)
}

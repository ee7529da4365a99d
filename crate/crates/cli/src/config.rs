//! Run configuration for plan generation: file format and interactive prompts.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use atlbdi_core::agentspeak::parse_literal;
use atlbdi_core::forge::{ForgeConfig, GoalSpec};
use atlbdi_core::ispl::{parse_formula, ModelSpec, VarRef, ENVIRONMENT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalFormula {
    /// Position in the model's Formulae section.
    Index(usize),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalEntry {
    pub name: String,
    pub formula: GoalFormula,
    pub next: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub agent: String,
    pub ignore_uniform: bool,
    pub fixed: BTreeMap<VarRef, i64>,
    pub initials: BTreeMap<VarRef, i64>,
    pub goals: Vec<GoalEntry>,
    pub horizon: Option<usize>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "y" => Some(true),
        "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

fn var_ref(path: &str) -> Option<VarRef> {
    let (owner, name) = path.split_once('.')?;
    (!owner.is_empty() && !name.is_empty() && !name.contains('.')).then(|| VarRef {
        owner: owner.to_string(),
        name: name.to_string(),
    })
}

#[derive(Default)]
struct PartialGoal {
    name: Option<String>,
    formula: Option<GoalFormula>,
    next: Option<Option<String>>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut agent = None;
    let mut goals: BTreeMap<usize, PartialGoal> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError::Syntax { line: n + 1, message };
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
        let number = |v: &str| v.parse::<usize>().ok().filter(|n| *n > 0);
        match key {
            "agent" => agent = Some(value.to_string()),
            "ignore_uniform" => {
                cfg.ignore_uniform = parse_bool(value).ok_or_else(|| err(format!("expected true or false, found `{value}`")))?
            }
            "horizon" => cfg.horizon = Some(number(value).ok_or_else(|| err("horizon must be a positive integer".into()))?),
            "max_steps" => {
                cfg.max_steps = Some(number(value).ok_or_else(|| err("max_steps must be a positive integer".into()))?)
            }
            _ => {
                if let Some(rest) = key.strip_prefix("fix.").or_else(|| key.strip_prefix("init.")) {
                    let var = var_ref(rest).ok_or_else(|| err(format!("expected `<owner>.<var>` in `{key}`")))?;
                    let v = parse_literal(value).ok_or_else(|| err(format!("invalid value `{value}`")))?;
                    let map = if key.starts_with("fix.") { &mut cfg.fixed } else { &mut cfg.initials };
                    if map.insert(var, v).is_some() {
                        return Err(err(format!("`{key}` given twice")));
                    }
                } else if let Some(rest) = key.strip_prefix("goal.") {
                    let (idx, field) = rest.split_once('.').ok_or_else(|| err(format!("unknown key `{key}`")))?;
                    let idx: usize = idx.parse().map_err(|_| err(format!("goal index `{idx}` is not a number")))?;
                    let g = goals.entry(idx).or_default();
                    match field {
                        "name" => g.name = Some(value.to_string()),
                        "formula" => {
                            g.formula = Some(match value.parse::<usize>() {
                                Ok(i) => GoalFormula::Index(i),
                                Err(_) => GoalFormula::Text(value.to_string()),
                            })
                        }
                        "next" => g.next = Some((value != "none" && !value.is_empty()).then(|| value.to_string())),
                        _ => return Err(err(format!("unknown goal field `{field}`"))),
                    }
                } else {
                    return Err(err(format!("unknown key `{key}`")));
                }
            }
        }
    }
    cfg.agent = agent.ok_or_else(|| ConfigError::Invalid("missing `agent`".into()))?;
    for (i, g) in goals {
        let name = g.name.ok_or_else(|| ConfigError::Invalid(format!("goal {i} has no name")))?;
        let formula = g.formula.unwrap_or(GoalFormula::Index(i));
        cfg.goals.push(GoalEntry {
            name,
            formula,
            next: g.next.flatten(),
        });
    }
    if cfg.goals.is_empty() {
        return Err(ConfigError::Invalid("no goals configured".into()));
    }
    Ok(cfg)
}

/// Checks a configuration against a model and converts it for plan generation.
pub fn resolve(cfg: &RunConfig, spec: &ModelSpec) -> Result<(ForgeConfig, Vec<GoalSpec>), ConfigError> {
    let invalid = |m: String| ConfigError::Invalid(m);
    if spec.agent(&cfg.agent).is_none() {
        return Err(invalid(format!("undeclared agent `{}`", cfg.agent)));
    }
    let vars = spec.variables();
    let check = |var: &VarRef, value: i64, env: bool| -> Result<(), ConfigError> {
        let q = vars
            .iter()
            .find(|q| &q.var == var)
            .ok_or_else(|| invalid(format!("undeclared variable `{var}`")))?;
        if q.is_environment() != env {
            let what = if env { "an environment" } else { "an agent" };
            return Err(invalid(format!("`{var}` is not {what} variable")));
        }
        if !q.domain.contains(value) {
            return Err(invalid(format!("value {} is outside the domain of `{var}`", q.domain.render(value))));
        }
        Ok(())
    };
    for (var, v) in &cfg.fixed {
        check(var, *v, true)?;
    }
    for (var, v) in &cfg.initials {
        check(var, *v, false)?;
    }
    if let Some(q) = vars.iter().find(|q| !q.is_environment() && !cfg.initials.contains_key(&q.var)) {
        return Err(invalid(format!("no initial value for `{}`", q.var)));
    }
    let mut goals = Vec::new();
    for g in &cfg.goals {
        if goals.iter().any(|x: &GoalSpec| x.name == g.name) {
            return Err(invalid(format!("duplicate goal `{}`", g.name)));
        }
        let formula = match &g.formula {
            GoalFormula::Index(i) => spec
                .formulas
                .get(*i)
                .cloned()
                .ok_or_else(|| invalid(format!("goal `{}`: the model has no formula {i}", g.name)))?,
            GoalFormula::Text(t) => parse_formula(t, spec).map_err(|e| invalid(format!("goal `{}`: {e}", g.name)))?,
        };
        goals.push(GoalSpec {
            name: g.name.clone(),
            formula,
            successor: g.next.clone(),
        });
    }
    if let Some(g) = cfg
        .goals
        .iter()
        .find(|g| g.next.as_ref().is_some_and(|n| !cfg.goals.iter().any(|x| &x.name == n)))
    {
        return Err(invalid(format!("goal `{}` names an undeclared successor", g.name)));
    }
    Ok((
        ForgeConfig {
            agent: cfg.agent.clone(),
            ignore_uniform: cfg.ignore_uniform,
            fixed: cfg.fixed.clone(),
            initials: cfg.initials.clone(),
            horizon: cfg.horizon,
        },
        goals,
    ))
}

/// Asks for a configuration on `input`, echoing prompts to `output`.
///
/// Order: agent-variable initial values, statically fixed environment variables,
/// goal names and successors per formula, the uncertain agent, ignoring uniform
/// strategies.
pub fn prompt_config<R: BufRead + ?Sized, W: Write + ?Sized>(spec: &ModelSpec, input: &mut R, output: &mut W) -> Result<RunConfig, ConfigError> {
    let mut ask = |question: &str| -> Result<String, ConfigError> {
        write!(output, "{question} ").and_then(|_| output.flush()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let mut line = String::new();
        let n = input.read_line(&mut line).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if n == 0 {
            return Err(ConfigError::Invalid("input ended before all questions were answered".into()));
        }
        Ok(line.trim().to_string())
    };
    let mut cfg = RunConfig::default();
    let vars = spec.variables();

    for q in vars.iter().filter(|q| !q.is_environment()) {
        loop {
            let answer = ask(&format!("Initial value of {} ({}):", q.var, describe(&q.domain)))?;
            match parse_literal(&answer).filter(|v| q.domain.contains(*v)) {
                Some(v) => {
                    cfg.initials.insert(q.var.clone(), v);
                    break;
                }
                None => continue,
            }
        }
    }

    loop {
        let answer = ask("Environment variable to fix as name=value (blank when done):")?;
        if answer.is_empty() {
            break;
        }
        let Some((name, value)) = answer.split_once('=') else { continue };
        let var = VarRef {
            owner: ENVIRONMENT.to_string(),
            name: name.trim().to_string(),
        };
        let known = vars.iter().find(|q| q.var == var);
        if let (Some(q), Some(v)) = (known, parse_literal(value.trim())) {
            if q.domain.contains(v) {
                cfg.fixed.insert(var, v);
            }
        }
    }

    for (i, f) in spec.formulas.iter().enumerate() {
        let name = loop {
            let answer = ask(&format!("Goal name for formula {i} `{f}`:"))?;
            if !answer.is_empty() {
                break answer;
            }
        };
        let next = ask(&format!("Goal to adopt after `{name}` (blank for none):"))?;
        cfg.goals.push(GoalEntry {
            name,
            formula: GoalFormula::Index(i),
            next: (!next.is_empty() && next != "none").then_some(next),
        });
    }

    let names: Vec<&str> = spec.agents.iter().map(|a| a.name.as_str()).collect();
    cfg.agent = loop {
        let answer = ask(&format!("Agent with uncertainty [{}]:", names.join(", ")))?;
        if names.contains(&answer.as_str()) {
            break answer;
        }
    };
    cfg.ignore_uniform = loop {
        if let Some(b) = parse_bool(&ask("Ignore uniform strategies? (y/n):")?) {
            break b;
        }
    };
    Ok(cfg)
}

fn describe(d: &atlbdi_core::ispl::Domain) -> String {
    match d {
        atlbdi_core::ispl::Domain::Boolean => "true/false".into(),
        atlbdi_core::ispl::Domain::Range { lo, hi } => format!("{lo}..{hi}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use atlbdi_core::fixtures;
    use atlbdi_core::ispl::parse_model;

    #[test]
    fn goldseeker_config() {
        let cfg = parse_config(fixtures::GOLDSEEKER_BA_CONFIG).unwrap();
        assert_eq!(cfg.agent, "BA");
        assert!(cfg.ignore_uniform);
        assert_eq!(cfg.fixed.len(), 1);
        assert_eq!(cfg.initials.len(), 2);
        assert_eq!(
            cfg.goals,
            vec![GoalEntry {
                name: "gettreasure".into(),
                formula: GoalFormula::Index(0),
                next: None
            }]
        );
    }

    #[test]
    fn interactive_matches_file() {
        let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
        let answers = "false\nfalse\ntreasureMined=false\n\ngettreasure\nnone\nBA\ny\n";
        let mut out = Vec::new();
        let cfg = prompt_config(&spec, &mut answers.as_bytes(), &mut out).unwrap();
        assert_eq!(cfg, parse_config(fixtures::GOLDSEEKER_BA_CONFIG).unwrap());
    }

    #[test]
    fn interactive_reprompts_bad_answers() {
        let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
        let answers = "7\nfalse\nfalse\nrowBA=9\n\n\ngettreasure\n\nXX\nRA\nmaybe\nn\n";
        let cfg = prompt_config(&spec, &mut answers.as_bytes(), &mut Vec::new()).unwrap();
        assert_eq!(cfg.agent, "RA");
        assert!(cfg.fixed.is_empty());
        assert!(!cfg.ignore_uniform);
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = parse_config("agent = BA\nnonsense\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Syntax {
                line: 2,
                message: "expected `key = value`, found `nonsense`".into()
            }
        );
        assert!(matches!(parse_config("agent = BA\nbogus = 1\n"), Err(ConfigError::Syntax { line: 2, .. })));
    }

    #[test]
    fn undeclared_agent_is_invalid() {
        let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
        let cfg = parse_config(&fixtures::GOLDSEEKER_BA_CONFIG.replace("agent = BA", "agent = ZZ")).unwrap();
        assert!(matches!(resolve(&cfg, &spec), Err(ConfigError::Invalid(m)) if m.contains("ZZ")));
    }

    #[test]
    fn out_of_domain_fix_is_invalid() {
        let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
        let text = format!("{}fix.Environment.rowBA = 7\n", fixtures::GOLDSEEKER_BA_CONFIG);
        assert!(resolve(&parse_config(&text).unwrap(), &spec).is_err());
    }
}

//! Explicit-state concurrent game models built from a [`ModelSpec`].
//!
//! States are dense indices: the mixed-radix encoding of the assignment to every
//! declared variable, environment variables first and then each agent's locals, with
//! the first variable most significant. Joint actions are encoded the same way over
//! the agents' action lists, so index order equals lexicographic action order.

mod stateset;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

pub use stateset::StateSet;

use crate::ispl::{CmpOp, Domain, Expr, ModelSpec, ProtocolGuard, QualifiedVar, VarRef, ENVIRONMENT};

/// Upper bound on `states * joint actions`, the size of the successor table.
const MAX_TABLE: usize = 1 << 26;
const DISABLED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("nondeterministic evolution at s{state} under {joint}: {first} and {second} assign different values to {var}")]
    Conflict {
        state: usize,
        joint: String,
        var: String,
        first: String,
        second: String,
    },
    #[error("{rule} assigns {value} to {var} at s{state} under {joint}, outside its domain")]
    OutOfDomain {
        state: usize,
        joint: String,
        var: String,
        rule: String,
        value: i64,
    },
    #[error("agent `{agent}` has no enabled action at s{state}")]
    NoEnabledAction { agent: String, state: usize },
    #[error("agent `{agent}` declares more than 64 actions")]
    TooManyActions { agent: String },
    #[error("model too large: {states} states x {joint} joint actions")]
    TooLarge { states: usize, joint: usize },
    #[error("no initial value given for agent variable {0}")]
    MissingInitial(String),
    #[error("invalid initial value {value} for {var}")]
    BadInitial { var: String, value: i64 },
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("action `{action}` of agent `{agent}` is not enabled at s{state}")]
    Disabled {
        agent: String,
        action: String,
        state: usize,
    },
    #[error("invalid explicit model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentInfo {
    pub name: String,
    pub actions: Vec<String>,
    /// Global indices of this agent's local variables.
    pub locals: Vec<usize>,
}

/// One action index per agent, in agent declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointAction(pub Vec<usize>);

/// An agent's belief as per-variable value sets over the environment variables.
///
/// Keys are global variable indices. `known`, `possible` and `fixed` partition the
/// environment variables; every possible-set holds at least two values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefState {
    pub known: BTreeMap<usize, i64>,
    pub possible: BTreeMap<usize, BTreeSet<i64>>,
    pub fixed: BTreeMap<usize, i64>,
}

impl BeliefState {
    /// Admissible values of one variable under this belief.
    pub fn values_of(&self, var: usize) -> Option<Vec<i64>> {
        if let Some(v) = self.known.get(&var).or_else(|| self.fixed.get(&var)) {
            return Some(vec![*v]);
        }
        self.possible.get(&var).map(|s| s.iter().copied().collect())
    }

    /// Checks the partition and domain invariants against a model.
    pub fn validate(&self, cgm: &Cgm) -> Result<(), String> {
        for (i, q) in cgm.vars().iter().enumerate() {
            if !q.is_environment() {
                continue;
            }
            let hits = self.known.contains_key(&i) as u8
                + self.possible.contains_key(&i) as u8
                + self.fixed.contains_key(&i) as u8;
            if hits != 1 {
                return Err(format!("{} must be exactly one of known, possible or fixed", q.var));
            }
            let values = self.values_of(i).unwrap_or_default();
            if let Some(v) = values.iter().find(|v| !q.domain.contains(**v)) {
                return Err(format!("value {v} outside the domain of {}", q.var));
            }
            if self.possible.contains_key(&i) && values.len() < 2 {
                return Err(format!("possible-set of {} needs at least two values", q.var));
            }
        }
        let stray = self
            .known
            .keys()
            .chain(self.possible.keys())
            .chain(self.fixed.keys())
            .find(|k| cgm.vars().get(**k).is_none_or(|q| !q.is_environment()));
        match stray {
            Some(k) => Err(format!("variable #{k} is not an environment variable")),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
enum CExpr {
    Const(i64),
    Var(usize),
    Action { agent: usize, action: usize },
    Not(Box<CExpr>),
    And(Box<CExpr>, Box<CExpr>),
    Or(Box<CExpr>, Box<CExpr>),
    Cmp(CmpOp, Box<CExpr>, Box<CExpr>),
    Add(Box<CExpr>, Box<CExpr>),
    Sub(Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    fn eval(&self, vals: &[i64], joint: Option<&[usize]>) -> i64 {
        match self {
            CExpr::Const(n) => *n,
            CExpr::Var(i) => vals[*i],
            CExpr::Action { agent, action } => joint.is_some_and(|j| j[*agent] == *action) as i64,
            CExpr::Not(x) => (x.eval(vals, joint) == 0) as i64,
            CExpr::And(l, r) => (l.eval(vals, joint) != 0 && r.eval(vals, joint) != 0) as i64,
            CExpr::Or(l, r) => (l.eval(vals, joint) != 0 || r.eval(vals, joint) != 0) as i64,
            CExpr::Cmp(op, l, r) => op.apply(l.eval(vals, joint), r.eval(vals, joint)) as i64,
            CExpr::Add(l, r) => l.eval(vals, joint) + r.eval(vals, joint),
            CExpr::Sub(l, r) => l.eval(vals, joint) - r.eval(vals, joint),
        }
    }

    fn holds(&self, vals: &[i64], joint: Option<&[usize]>) -> bool {
        self.eval(vals, joint) != 0
    }
}

struct Compiler<'a> {
    vars: &'a [QualifiedVar],
    agents: &'a [AgentInfo],
}

impl Compiler<'_> {
    fn compile(&self, e: &Expr) -> CExpr {
        let b = |x: &Expr| Box::new(self.compile(x));
        match e {
            Expr::Int(n) => CExpr::Const(*n),
            Expr::Bool(v) => CExpr::Const(*v as i64),
            Expr::Var(v) => CExpr::Var(self.var(v)),
            Expr::ActionIs { agent, action } => {
                let a = self.agents.iter().position(|x| &x.name == agent).expect("resolved agent");
                let act = self.agents[a].actions.iter().position(|x| x == action).expect("resolved action");
                CExpr::Action { agent: a, action: act }
            }
            Expr::Not(x) => CExpr::Not(b(x)),
            Expr::And(l, r) => CExpr::And(b(l), b(r)),
            Expr::Or(l, r) => CExpr::Or(b(l), b(r)),
            Expr::Cmp(op, l, r) => CExpr::Cmp(*op, b(l), b(r)),
            Expr::Add(l, r) => CExpr::Add(b(l), b(r)),
            Expr::Sub(l, r) => CExpr::Sub(b(l), b(r)),
        }
    }

    fn var(&self, v: &VarRef) -> usize {
        self.vars.iter().position(|q| &q.var == v).expect("resolved variable")
    }
}

struct CompiledRule {
    label: String,
    assignments: Vec<(usize, CExpr)>,
    condition: CExpr,
}

/// Explicit concurrent game model.
#[derive(Debug, Clone)]
pub struct Cgm {
    vars: Vec<QualifiedVar>,
    strides: Vec<usize>,
    agents: Vec<AgentInfo>,
    joint_strides: Vec<usize>,
    num_states: usize,
    num_joint: usize,
    /// `enabled[agent][state]`: bitmask over the agent's actions.
    enabled: Vec<Vec<u64>>,
    /// `succ[state * num_joint + joint]`, `DISABLED` where a component is not enabled.
    succ: Vec<u32>,
    propositions: Vec<(String, StateSet)>,
    groups: BTreeMap<String, Vec<usize>>,
    initial_locals: BTreeMap<usize, i64>,
}

/// Input for [`Cgm::explicit`]: a model given directly by its tables.
#[derive(Debug, Clone)]
pub struct ExplicitModel {
    pub agents: Vec<(String, Vec<String>)>,
    pub num_states: usize,
    /// `enabled[agent][state]` bitmask.
    pub enabled: Vec<Vec<u64>>,
    /// `successors[state][joint index]`; entries for disabled joint actions are ignored.
    pub successors: Vec<Vec<usize>>,
    pub propositions: Vec<(String, Vec<usize>)>,
    pub groups: Vec<(String, Vec<String>)>,
}

fn strides_of(sizes: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    strides
}

/// A protocol rule compiled to its guard (`None` for `Other`) and action mask.
type ProtocolMask = (Option<CExpr>, u64);

/// Builds the explicit model of `spec`. `agent_init` must give a value to every
/// agent-local variable; it seeds [`Cgm::belief_states`].
pub fn build_cgm(spec: &ModelSpec, agent_init: &BTreeMap<VarRef, i64>) -> Result<Cgm, ModelError> {
    let vars = spec.variables();
    let agents: Vec<AgentInfo> = spec
        .agents
        .iter()
        .map(|a| AgentInfo {
            name: a.name.clone(),
            actions: a.actions.clone(),
            locals: vars
                .iter()
                .enumerate()
                .filter(|(_, q)| q.var.owner == a.name)
                .map(|(i, _)| i)
                .collect(),
        })
        .collect();
    if let Some(a) = agents.iter().find(|a| a.actions.len() > 64) {
        return Err(ModelError::TooManyActions { agent: a.name.clone() });
    }

    let mut initial_locals = BTreeMap::new();
    for (i, q) in vars.iter().enumerate().filter(|(_, q)| !q.is_environment()) {
        let v = *agent_init
            .get(&q.var)
            .ok_or_else(|| ModelError::MissingInitial(q.var.to_string()))?;
        if !q.domain.contains(v) {
            return Err(ModelError::BadInitial {
                var: q.var.to_string(),
                value: v,
            });
        }
        initial_locals.insert(i, v);
    }
    if let Some((var, value)) = agent_init.iter().find(|(k, _)| !vars.iter().any(|q| &q.var == *k && !q.is_environment())) {
        return Err(ModelError::BadInitial {
            var: var.to_string(),
            value: *value,
        });
    }

    let sizes: Vec<usize> = vars.iter().map(|q| q.domain.size()).collect();
    let num_states = sizes.iter().try_fold(1usize, |acc, s| acc.checked_mul(*s));
    let action_counts: Vec<usize> = agents.iter().map(|a| a.actions.len()).collect();
    let num_joint: usize = action_counts.iter().product();
    let num_states = match num_states {
        Some(n) if n.saturating_mul(num_joint) <= MAX_TABLE => n,
        _ => {
            return Err(ModelError::TooLarge {
                states: num_states.unwrap_or(usize::MAX),
                joint: num_joint,
            })
        }
    };

    let compiler = Compiler { vars: &vars, agents: &agents };
    let mut rules = Vec::new();
    let mut push_rules = |owner: &str, evolution: &[crate::ispl::EvolutionRule]| {
        for (k, r) in evolution.iter().enumerate() {
            rules.push(CompiledRule {
                label: format!("{owner} evolution rule #{}", k + 1),
                assignments: r
                    .assignments
                    .iter()
                    .map(|a| (compiler.var(&a.target), compiler.compile(&a.value)))
                    .collect(),
                condition: compiler.compile(&r.condition),
            });
        }
    };
    push_rules(ENVIRONMENT, &spec.environment_evolution);
    for a in &spec.agents {
        push_rules(&a.name, &a.evolution);
    }

    let protocols: Vec<Option<Vec<ProtocolMask>>> = spec
        .agents
        .iter()
        .zip(&agents)
        .map(|(decl, info)| {
            decl.protocol.as_ref().map(|rules| {
                rules
                    .iter()
                    .map(|r| {
                        let mask = r
                            .actions
                            .iter()
                            .map(|a| 1u64 << info.actions.iter().position(|x| x == a).expect("resolved action"))
                            .fold(0, |m, b| m | b);
                        let guard = match &r.guard {
                            ProtocolGuard::When(e) => Some(compiler.compile(e)),
                            ProtocolGuard::Other => None,
                        };
                        (guard, mask)
                    })
                    .collect()
            })
        })
        .collect();

    let propositions: Vec<(String, CExpr)> = spec
        .propositions
        .iter()
        .map(|p| (p.name.clone(), compiler.compile(&p.condition)))
        .collect();

    let strides = strides_of(&sizes);
    let joint_strides = strides_of(&action_counts);
    let mut cgm = Cgm {
        vars,
        strides,
        agents,
        joint_strides,
        num_states,
        num_joint,
        enabled: Vec::new(),
        succ: vec![DISABLED; num_states * num_joint],
        propositions: Vec::new(),
        groups: BTreeMap::new(),
        initial_locals,
    };

    let mut enabled = vec![vec![0u64; num_states]; cgm.agents.len()];
    let mut prop_sets: Vec<StateSet> = vec![StateSet::empty(num_states); propositions.len()];
    #[allow(clippy::needless_range_loop)]
    for s in 0..num_states {
        let vals = cgm.decode(s);
        for (a, proto) in protocols.iter().enumerate() {
            let all = if cgm.agents[a].actions.len() == 64 {
                u64::MAX
            } else {
                (1u64 << cgm.agents[a].actions.len()) - 1
            };
            let mask = match proto {
                None => all,
                Some(rules) => {
                    let when: u64 = rules
                        .iter()
                        .filter_map(|(g, m)| g.as_ref().filter(|g| g.holds(&vals, None)).map(|_| *m))
                        .fold(0, |acc, m| acc | m);
                    if when != 0 {
                        when
                    } else {
                        rules.iter().filter(|(g, _)| g.is_none()).fold(0, |acc, (_, m)| acc | m)
                    }
                }
            };
            if mask == 0 {
                return Err(ModelError::NoEnabledAction {
                    agent: cgm.agents[a].name.clone(),
                    state: s,
                });
            }
            enabled[a][s] = mask;
        }
        for (p, (_, cond)) in propositions.iter().enumerate() {
            if cond.holds(&vals, None) {
                prop_sets[p].insert(s);
            }
        }
    }
    cgm.enabled = enabled;

    let mut next = vec![0i64; cgm.vars.len()];
    let mut assigned: Vec<Option<usize>> = vec![None; cgm.vars.len()];
    for s in 0..num_states {
        let vals = cgm.decode(s);
        for j in 0..num_joint {
            let joint = cgm.joint_from_index(j);
            if !cgm.joint_enabled(s, &joint.0) {
                continue;
            }
            next.copy_from_slice(&vals);
            assigned.iter_mut().for_each(|x| *x = None);
            for (ri, rule) in rules.iter().enumerate() {
                if !rule.condition.holds(&vals, Some(&joint.0)) {
                    continue;
                }
                for (var, value) in &rule.assignments {
                    let v = value.eval(&vals, Some(&joint.0));
                    if !cgm.vars[*var].domain.contains(v) {
                        return Err(ModelError::OutOfDomain {
                            state: s,
                            joint: cgm.joint_label(&joint),
                            var: cgm.vars[*var].var.to_string(),
                            rule: rule.label.clone(),
                            value: v,
                        });
                    }
                    match assigned[*var] {
                        Some(prev) if next[*var] != v => {
                            return Err(ModelError::Conflict {
                                state: s,
                                joint: cgm.joint_label(&joint),
                                var: cgm.vars[*var].var.to_string(),
                                first: rules[prev].label.clone(),
                                second: rule.label.clone(),
                            });
                        }
                        _ => {
                            next[*var] = v;
                            assigned[*var] = Some(ri);
                        }
                    }
                }
            }
            cgm.succ[s * num_joint + j] = cgm.encode(&next) as u32;
        }
    }

    cgm.propositions = propositions
        .into_iter()
        .map(|(n, _)| n)
        .zip(prop_sets)
        .collect();
    for g in &spec.groups {
        let members = g
            .members
            .iter()
            .map(|m| cgm.agent_index(m).expect("resolved group member"))
            .collect();
        cgm.groups.insert(g.name.clone(), members);
    }
    Ok(cgm)
}

impl Cgm {
    /// Builds a model from explicit tables. It has a single environment variable
    /// `state` ranging over the state indices.
    pub fn explicit(m: ExplicitModel) -> Result<Cgm, ModelError> {
        let n = m.num_states;
        if n == 0 {
            return Err(ModelError::Invalid("no states".into()));
        }
        let action_counts: Vec<usize> = m.agents.iter().map(|(_, a)| a.len()).collect();
        if action_counts.iter().any(|c| *c == 0 || *c > 64) {
            return Err(ModelError::Invalid("every agent needs 1..=64 actions".into()));
        }
        let num_joint: usize = action_counts.iter().product();
        let agents: Vec<AgentInfo> = m
            .agents
            .iter()
            .map(|(name, actions)| AgentInfo {
                name: name.clone(),
                actions: actions.clone(),
                locals: Vec::new(),
            })
            .collect();
        if m.enabled.len() != agents.len() || m.enabled.iter().any(|e| e.len() != n || e.contains(&0)) {
            return Err(ModelError::Invalid("enabled table must be nonempty for every agent and state".into()));
        }
        let mut cgm = Cgm {
            vars: vec![QualifiedVar {
                var: VarRef {
                    owner: ENVIRONMENT.into(),
                    name: "state".into(),
                },
                domain: Domain::Range { lo: 0, hi: n as i64 - 1 },
            }],
            strides: vec![1],
            agents,
            joint_strides: strides_of(&action_counts),
            num_states: n,
            num_joint,
            enabled: m.enabled,
            succ: vec![DISABLED; n * num_joint],
            propositions: m
                .propositions
                .iter()
                .map(|(p, states)| (p.clone(), StateSet::from_states(n, states.iter().copied())))
                .collect(),
            groups: BTreeMap::new(),
            initial_locals: BTreeMap::new(),
        };
        for s in 0..n {
            for j in 0..num_joint {
                let joint = cgm.joint_from_index(j);
                if cgm.joint_enabled(s, &joint.0) {
                    let t = *m.successors.get(s).and_then(|row| row.get(j)).ok_or_else(|| {
                        ModelError::Invalid(format!("missing successor for s{s}, joint #{j}"))
                    })?;
                    if t >= n {
                        return Err(ModelError::Invalid(format!("successor s{t} out of range")));
                    }
                    cgm.succ[s * num_joint + j] = t as u32;
                }
            }
        }
        for (g, members) in m.groups {
            let idx = members
                .iter()
                .map(|a| cgm.agent_index(a).ok_or_else(|| ModelError::UnknownAgent(a.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            cgm.groups.insert(g, idx);
        }
        Ok(cgm)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_joint(&self) -> usize {
        self.num_joint
    }

    pub fn vars(&self) -> &[QualifiedVar] {
        &self.vars
    }

    pub fn var_index(&self, owner: &str, name: &str) -> Option<usize> {
        self.vars.iter().position(|q| q.var.owner == owner && q.var.name == name)
    }

    pub fn agents(&self) -> &[AgentInfo] {
        &self.agents
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name == name)
    }

    pub fn action_index(&self, agent: usize, action: &str) -> Option<usize> {
        self.agents[agent].actions.iter().position(|a| a == action)
    }

    pub fn initial_locals(&self) -> &BTreeMap<usize, i64> {
        &self.initial_locals
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.num_states)
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.num_states)
    }

    pub fn decode(&self, state: usize) -> Vec<i64> {
        self.vars
            .iter()
            .zip(&self.strides)
            .map(|(q, stride)| q.domain.lo() + ((state / stride) % q.domain.size()) as i64)
            .collect()
    }

    pub fn encode(&self, vals: &[i64]) -> usize {
        self.vars
            .iter()
            .zip(&self.strides)
            .zip(vals)
            .map(|((q, stride), v)| (v - q.domain.lo()) as usize * stride)
            .sum()
    }

    pub fn value(&self, state: usize, var: usize) -> i64 {
        let q = &self.vars[var];
        q.domain.lo() + ((state / self.strides[var]) % q.domain.size()) as i64
    }

    pub fn enabled_mask(&self, agent: usize, state: usize) -> u64 {
        self.enabled[agent][state]
    }

    pub fn enabled_actions(&self, agent: usize, state: usize) -> Vec<usize> {
        let mask = self.enabled[agent][state];
        (0..self.agents[agent].actions.len()).filter(|a| mask >> a & 1 == 1).collect()
    }

    fn joint_enabled(&self, state: usize, joint: &[usize]) -> bool {
        joint.iter().enumerate().all(|(a, act)| self.enabled[a][state] >> act & 1 == 1)
    }

    pub fn joint_index(&self, joint: &[usize]) -> usize {
        joint.iter().zip(&self.joint_strides).map(|(a, s)| a * s).sum()
    }

    pub fn joint_from_index(&self, mut j: usize) -> JointAction {
        let mut out = vec![0; self.agents.len()];
        for (a, stride) in self.joint_strides.iter().enumerate() {
            out[a] = j / stride;
            j %= stride;
        }
        JointAction(out)
    }

    pub fn joint_label(&self, joint: &JointAction) -> String {
        let names: Vec<&str> = joint
            .0
            .iter()
            .enumerate()
            .map(|(a, act)| self.agents[a].actions[*act].as_str())
            .collect();
        format!("({})", names.join(","))
    }

    /// Successor for an encoded joint action, `None` when some component is disabled.
    pub fn successor_index(&self, state: usize, joint: usize) -> Option<usize> {
        match self.succ[state * self.num_joint + joint] {
            DISABLED => None,
            t => Some(t as usize),
        }
    }

    /// The unique successor of `state` under `joint`.
    pub fn successor(&self, state: usize, joint: &JointAction) -> Result<usize, ModelError> {
        for (a, act) in joint.0.iter().enumerate() {
            if self.enabled[a][state] >> act & 1 == 0 {
                return Err(ModelError::Disabled {
                    agent: self.agents[a].name.clone(),
                    action: self.agents[a].actions.get(*act).cloned().unwrap_or_default(),
                    state,
                });
            }
        }
        Ok(self
            .successor_index(state, self.joint_index(&joint.0))
            .expect("enabled joint action has a successor"))
    }

    pub fn proposition_names(&self) -> impl Iterator<Item = &str> {
        self.propositions.iter().map(|(n, _)| n.as_str())
    }

    /// States satisfying a declared proposition.
    pub fn eval_proposition(&self, name: &str) -> Result<&StateSet, ModelError> {
        self.propositions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| ModelError::UnknownProposition(name.to_string()))
    }

    /// Agent indices named by a coalition identifier (a group or a single agent).
    pub fn coalition(&self, name: &str) -> Option<Vec<usize>> {
        if let Some(g) = self.groups.get(name) {
            return Some(g.clone());
        }
        self.agent_index(name).map(|a| vec![a])
    }

    /// States whose environment variables agree with `belief` and whose agent
    /// locals hold their initial values.
    pub fn belief_states(&self, belief: &BeliefState) -> StateSet {
        let mut choices: Vec<Vec<i64>> = Vec::with_capacity(self.vars.len());
        for (i, q) in self.vars.iter().enumerate() {
            let vals = if q.is_environment() {
                belief.values_of(i).unwrap_or_else(|| q.domain.values().collect())
            } else {
                vec![self.initial_locals.get(&i).copied().unwrap_or(q.domain.lo())]
            };
            choices.push(vals.into_iter().filter(|v| q.domain.contains(*v)).collect());
        }
        let mut out = self.empty_set();
        let mut cursor = vec![0usize; choices.len()];
        if choices.iter().any(|c| c.is_empty()) {
            return out;
        }
        let mut vals: Vec<i64> = choices.iter().map(|c| c[0]).collect();
        loop {
            out.insert(self.encode(&vals));
            let mut k = choices.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                cursor[k] += 1;
                if cursor[k] < choices[k].len() {
                    vals[k] = choices[k][cursor[k]];
                    break;
                }
                cursor[k] = 0;
                vals[k] = choices[k][0];
            }
        }
    }

    /// `name=value` listing of a state.
    pub fn state_label(&self, state: usize) -> String {
        self.vars
            .iter()
            .zip(self.decode(state))
            .map(|(q, v)| {
                let name = if q.is_environment() {
                    q.var.name.clone()
                } else {
                    q.var.to_string()
                };
                format!("{name}={}", q.domain.render(v))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Text listing of every state and every enabled transition.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in 0..self.num_states {
            writeln!(out, "s{s}: {}", self.state_label(s)).unwrap();
        }
        for s in 0..self.num_states {
            for j in 0..self.num_joint {
                if let Some(t) = self.successor_index(s, j) {
                    let label = self.joint_label(&self.joint_from_index(j));
                    writeln!(out, "s{s} --{label}--> s{t}").unwrap();
                }
            }
        }
        out
    }
}

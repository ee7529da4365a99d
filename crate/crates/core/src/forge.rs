//! Plan library generation: one plan per (goal, belief) of the uncertain agent.
//!
//! Beliefs are processed in tiers of decreasing known-variable count, so when a
//! belief admits no strategy its concrete refinements are already in the cache.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::agentspeak::{ordered_guard, render_guard, GuardAtom, Plan};
use crate::atl::{self, LinearizeError, StrategyMap, UniformSearch};
use crate::cgm::{build_cgm, BeliefState, Cgm, ModelError, StateSet};
use crate::ispl::{Domain, Formula, ModelSpec, VarRef};

/// Values of the unknown variables, by global index.
pub type Assignment = Vec<(usize, i64)>;

/// Refuse libraries larger than this many beliefs per goal.
pub const MAX_BELIEFS: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalSpec {
    pub name: String,
    pub formula: Formula,
    pub successor: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForgeConfig {
    /// The agent whose uncertainty is enumerated and for whom plans are written.
    pub agent: String,
    pub ignore_uniform: bool,
    /// Environment variables held at one value and left out of enumeration.
    pub fixed: BTreeMap<VarRef, i64>,
    /// Initial values of every agent-local variable.
    pub initials: BTreeMap<VarRef, i64>,
    /// Linearization bound; defaults to the number of states.
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Uniform,
    NonUniform,
    /// Body borrowed from this concrete assignment of the unknown variables.
    Prev(Vec<(usize, i64)>),
    Unachievable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedPlan {
    pub plan: Plan,
    pub provenance: Provenance,
    pub belief: BeliefState,
}

#[derive(Debug, Clone, Default)]
pub struct GoalReport {
    pub goal: String,
    pub plans: usize,
    /// Guards of the beliefs that got no plan.
    pub unachievable: Vec<String>,
    /// Beliefs processed, achievable or not.
    pub iterations: usize,
    pub seconds: f64,
}

impl GoalReport {
    pub fn summary(&self) -> String {
        format!(
            "goal {}: {} plans, {} unachievable, {:.2}s",
            self.goal,
            self.plans,
            self.unachievable.len(),
            self.seconds
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct ForgeOutput {
    pub plans: Vec<GeneratedPlan>,
    pub reports: Vec<GoalReport>,
}

impl ForgeOutput {
    pub fn agentspeak_plans(&self) -> Vec<Plan> {
        self.plans.iter().map(|p| p.plan.clone()).collect()
    }

    /// Report text: unachievable guards per goal, then one summary line per goal.
    pub fn report_text(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            for g in &r.unachievable {
                writeln!(out, "unachievable {}: {g}", r.goal).unwrap();
            }
        }
        for r in &self.reports {
            writeln!(out, "{}", r.summary()).unwrap();
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("goal `{goal}`, belief `{belief}`: {source}")]
    Linearize {
        goal: String,
        belief: String,
        source: LinearizeError,
    },
    #[error("goal `{goal}`, belief `{belief}`: refinement `{refinement}` was not processed before it was needed")]
    MissingRefinement {
        goal: String,
        belief: String,
        refinement: String,
    },
    #[error("{0} beliefs per goal is more than the supported {MAX_BELIEFS}")]
    TooManyBeliefs(u128),
}

/// Canonical belief key: one admissible-value bitmask per free variable.
pub type BeliefKey = Vec<u64>;

/// Linearized bodies by (goal, belief key); `None` marks an unachievable belief.
#[derive(Debug, Default, Clone)]
pub struct StrategyCache {
    entries: HashMap<(String, BeliefKey), Option<Vec<String>>>,
}

impl StrategyCache {
    pub fn get(&self, goal: &str, key: &BeliefKey) -> Option<&Option<Vec<String>>> {
        self.entries.get(&(goal.to_string(), key.clone()))
    }

    pub fn insert(&mut self, goal: &str, key: BeliefKey, body: Option<Vec<String>>) {
        self.entries.insert((goal.to_string(), key), body);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn subsets(size: usize) -> impl Iterator<Item = u64> {
    1..(1u64 << size)
}

/// Number of beliefs over variables with these domain sizes: the product of `2^l - 1`.
pub fn belief_count(sizes: &[usize]) -> u128 {
    sizes.iter().map(|l| (1u128 << *l) - 1).product()
}

/// Every belief over `free` (global variable index and domain), in tiers of
/// decreasing known-variable count. Within a tier, variable subsets and value sets
/// follow ascending bitmask order.
pub fn enumerate_beliefs(free: &[(usize, Domain)]) -> Vec<BeliefState> {
    let n = free.len();
    let mut out = Vec::new();
    for known_count in (0..=n).rev() {
        for which in 0u64..(1 << n) {
            if which.count_ones() as usize != known_count {
                continue;
            }
            let options: Vec<Vec<u64>> = free
                .iter()
                .enumerate()
                .map(|(i, (_, d))| {
                    let known = which >> i & 1 == 1;
                    subsets(d.size()).filter(|m| (m.count_ones() == 1) == known).collect()
                })
                .collect();
            for_each_product(&options, |masks| out.push(belief_from_masks(free, masks)));
        }
    }
    out
}

fn for_each_product(options: &[Vec<u64>], mut f: impl FnMut(&[u64])) {
    if options.iter().any(|o| o.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; options.len()];
    let mut cur: Vec<u64> = options.iter().map(|o| o[0]).collect();
    loop {
        f(&cur);
        let mut k = options.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                cur[k] = options[k][idx[k]];
                break;
            }
            idx[k] = 0;
            cur[k] = options[k][0];
        }
    }
}

fn values_of_mask(domain: &Domain, mask: u64) -> Vec<i64> {
    domain.values().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v).collect()
}

fn belief_from_masks(free: &[(usize, Domain)], masks: &[u64]) -> BeliefState {
    let mut b = BeliefState::default();
    for ((var, domain), mask) in free.iter().zip(masks) {
        let values = values_of_mask(domain, *mask);
        if values.len() == 1 {
            b.known.insert(*var, values[0]);
        } else {
            b.possible.insert(*var, values.into_iter().collect());
        }
    }
    b
}

/// Key of `belief` over the free variables.
pub fn belief_key(free: &[(usize, Domain)], belief: &BeliefState) -> BeliefKey {
    free.iter()
        .map(|(var, domain)| {
            belief
                .values_of(*var)
                .unwrap_or_default()
                .iter()
                .fold(0u64, |m, v| m | 1 << (v - domain.lo()))
        })
        .collect()
}

/// Looks up the first cached achievable body among the concrete refinements of
/// `belief`, unknown variables in order and values ascending.
pub fn prev(
    goal: &str,
    belief: &BeliefState,
    free: &[(usize, Domain)],
    cache: &StrategyCache,
) -> Result<Option<(Vec<String>, Assignment)>, BeliefKey> {
    if belief.possible.is_empty() {
        return Ok(None);
    }
    let base = belief_key(free, belief);
    let unknown: Vec<usize> = free
        .iter()
        .enumerate()
        .filter(|(_, (var, _))| belief.possible.contains_key(var))
        .map(|(i, _)| i)
        .collect();
    let options: Vec<Vec<u64>> = unknown
        .iter()
        .map(|i| (0..64).map(|b| 1u64 << b).filter(|bit| base[*i] & bit != 0).collect())
        .collect();
    let mut found = None;
    let mut missing = None;
    for_each_product(&options, |bits| {
        if found.is_some() || missing.is_some() {
            return;
        }
        let mut key = base.clone();
        for (i, bit) in unknown.iter().zip(bits) {
            key[*i] = *bit;
        }
        match cache.get(goal, &key) {
            None => missing = Some(key),
            Some(Some(body)) => {
                let assignment = unknown
                    .iter()
                    .zip(bits)
                    .map(|(i, bit)| {
                        let (var, domain) = free[*i];
                        (var, domain.lo() + bit.trailing_zeros() as i64)
                    })
                    .collect();
                found = Some((body.clone(), assignment));
            }
            Some(None) => {}
        }
    });
    match missing {
        Some(key) => Err(key),
        None => Ok(found),
    }
}

struct PreparedGoal {
    spec: GoalSpec,
    satisfying: StateSet,
    strategy: Option<StrategyMap>,
}

/// A model prepared for plan generation.
pub struct Forge {
    cgm: Cgm,
    agent: usize,
    free: Vec<(usize, Domain)>,
    /// Fixed variables in declaration order, with their guard atoms.
    fixed: Vec<(usize, i64)>,
    fixed_atoms: Vec<(String, String)>,
    ignore_uniform: bool,
    horizon: usize,
    goals: Vec<PreparedGoal>,
}

impl Forge {
    pub fn new(spec: &ModelSpec, goals: &[GoalSpec], config: &ForgeConfig) -> Result<Forge, ForgeError> {
        let cgm = build_cgm(spec, &config.initials)?;
        let agent = cgm
            .agent_index(&config.agent)
            .ok_or_else(|| ForgeError::Config(format!("undeclared agent `{}`", config.agent)))?;
        for (var, value) in &config.fixed {
            let idx = cgm
                .var_index(&var.owner, &var.name)
                .filter(|i| cgm.vars()[*i].is_environment())
                .ok_or_else(|| ForgeError::Config(format!("`{var}` is not an environment variable")))?;
            if !cgm.vars()[idx].domain.contains(*value) {
                return Err(ForgeError::Config(format!("value {value} is outside the domain of `{var}`")));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for g in goals {
            if !names.insert(g.name.as_str()) {
                return Err(ForgeError::Config(format!("duplicate goal `{}`", g.name)));
            }
        }
        for g in goals {
            if let Some(next) = &g.successor {
                if !names.contains(next.as_str()) {
                    return Err(ForgeError::Config(format!(
                        "goal `{}` names undeclared successor `{next}`",
                        g.name
                    )));
                }
            }
        }

        let mut free = Vec::new();
        let mut fixed = Vec::new();
        let mut fixed_atoms = Vec::new();
        for (i, q) in cgm.vars().iter().enumerate().filter(|(_, q)| q.is_environment()) {
            match config.fixed.get(&q.var) {
                Some(v) => {
                    fixed.push((i, *v));
                    fixed_atoms.push((q.var.name.to_lowercase(), q.domain.render(*v)));
                }
                None => free.push((i, q.domain)),
            }
        }
        let sizes: Vec<usize> = free.iter().map(|(_, d)| d.size()).collect();
        if sizes.iter().any(|s| *s > 63) || belief_count(&sizes) > MAX_BELIEFS {
            let count = if sizes.iter().any(|s| *s > 100) {
                u128::MAX
            } else {
                belief_count(&sizes)
            };
            return Err(ForgeError::TooManyBeliefs(count));
        }

        let prepared = goals
            .iter()
            .map(|g| {
                let (satisfying, strategy) = atl::synthesize(&cgm, &g.formula);
                PreparedGoal {
                    spec: g.clone(),
                    satisfying,
                    strategy,
                }
            })
            .collect();
        Ok(Forge {
            horizon: config.horizon.unwrap_or(cgm.num_states()),
            cgm,
            agent,
            free,
            fixed,
            fixed_atoms,
            ignore_uniform: config.ignore_uniform,
            goals: prepared,
        })
    }

    pub fn cgm(&self) -> &Cgm {
        &self.cgm
    }

    pub fn agent(&self) -> usize {
        self.agent
    }

    /// Free variables with their domains, in declaration order.
    pub fn free_vars(&self) -> &[(usize, Domain)] {
        &self.free
    }

    pub fn beliefs(&self) -> Vec<BeliefState> {
        let mut beliefs = enumerate_beliefs(&self.free);
        for b in &mut beliefs {
            b.fixed = self.fixed.iter().copied().collect();
        }
        beliefs
    }

    /// Guard atoms describing `belief`.
    pub fn guard(&self, belief: &BeliefState) -> Vec<GuardAtom> {
        let vars: BTreeMap<String, Vec<String>> = self
            .free
            .iter()
            .map(|(var, domain)| {
                let name = self.cgm.vars()[*var].var.name.to_lowercase();
                let values = belief
                    .values_of(*var)
                    .unwrap_or_default()
                    .iter()
                    .map(|v| domain.render(*v))
                    .collect();
                (name, values)
            })
            .collect();
        ordered_guard(&self.fixed_atoms, &vars)
    }

    fn action_names(&self, body: &[usize]) -> Vec<String> {
        let actions = &self.cgm.agents()[self.agent].actions;
        body.iter().map(|a| actions[*a].clone()).collect()
    }

    fn linearize(&self, goal: &str, belief: &BeliefState, strategy: &StrategyMap) -> Result<Vec<String>, ForgeError> {
        atl::linearize(&self.cgm, strategy, belief, self.agent, self.horizon)
            .map(|b| self.action_names(&b))
            .map_err(|source| ForgeError::Linearize {
                goal: goal.to_string(),
                belief: render_guard(&self.guard(belief)),
                source,
            })
    }

    /// Strategy-derived body for one belief, without the refinement fallback.
    fn direct(
        &self,
        goal: &PreparedGoal,
        belief: &BeliefState,
        uniform: Option<&mut UniformSearch>,
    ) -> Result<Option<(Vec<String>, Provenance)>, ForgeError> {
        let states = self.cgm.belief_states(belief);
        if states.is_empty() {
            return Ok(None);
        }
        if let Some(search) = uniform {
            if let Some(strategy) = search.find(&states) {
                let body = self.linearize(&goal.spec.name, belief, &strategy)?;
                return Ok(Some((body, Provenance::Uniform)));
            }
        }
        if !states.is_subset(&goal.satisfying) {
            return Ok(None);
        }
        let strategy = goal.strategy.as_ref().ok_or_else(|| ForgeError::Linearize {
            goal: goal.spec.name.clone(),
            belief: render_guard(&self.guard(belief)),
            source: LinearizeError::NonLinearizable("the goal has no outermost strategic operator".into()),
        })?;
        let body = self.linearize(&goal.spec.name, belief, strategy)?;
        Ok(Some((body, Provenance::NonUniform)))
    }

    /// Body for a single belief and goal, from a uniform or non-uniform strategy.
    pub fn plan_for(&self, goal: usize, belief: &BeliefState) -> Result<Option<(Vec<String>, Provenance)>, ForgeError> {
        let g = &self.goals[goal];
        let mut search = (!self.ignore_uniform).then(|| UniformSearch::new(&self.cgm, &g.spec.formula, self.agent));
        self.direct(g, belief, search.as_mut())
    }

    pub fn goal_names(&self) -> Vec<&str> {
        self.goals.iter().map(|g| g.spec.name.as_str()).collect()
    }

    /// Runs every goal over every belief.
    pub fn run(&self) -> Result<ForgeOutput, ForgeError> {
        let beliefs = self.beliefs();
        let mut out = ForgeOutput::default();
        let mut cache = StrategyCache::default();
        for goal in &self.goals {
            let started = clock::now();
            let mut search = (!self.ignore_uniform).then(|| UniformSearch::new(&self.cgm, &goal.spec.formula, self.agent));
            let mut report = GoalReport {
                goal: goal.spec.name.clone(),
                ..Default::default()
            };
            for belief in &beliefs {
                report.iterations += 1;
                let key = belief_key(&self.free, belief);
                let mut result = self.direct(goal, belief, search.as_mut())?;
                if result.is_none() {
                    result = prev(&goal.spec.name, belief, &self.free, &cache)
                        .map_err(|missing| ForgeError::MissingRefinement {
                            goal: goal.spec.name.clone(),
                            belief: render_guard(&self.guard(belief)),
                            refinement: format!("{missing:?}"),
                        })?
                        .map(|(body, assignment)| (body, Provenance::Prev(assignment)));
                }
                let guard = self.guard(belief);
                match result {
                    Some((body, provenance)) => {
                        cache.insert(&goal.spec.name, key, Some(body.clone()));
                        report.plans += 1;
                        out.plans.push(GeneratedPlan {
                            plan: Plan {
                                goal: goal.spec.name.clone(),
                                guard,
                                body,
                                successor: goal.spec.successor.clone(),
                            },
                            provenance,
                            belief: belief.clone(),
                        });
                    }
                    None => {
                        cache.insert(&goal.spec.name, key, None);
                        report.unachievable.push(render_guard(&guard));
                    }
                }
            }
            report.seconds = clock::seconds_since(started);
            out.reports.push(report);
        }
        Ok(out)
    }
}

/// Runs plan generation for `goals` under `config`.
pub fn generate_plans(spec: &ModelSpec, goals: &[GoalSpec], config: &ForgeConfig) -> Result<ForgeOutput, ForgeError> {
    Forge::new(spec, goals, config)?.run()
}

#[cfg(not(target_arch = "wasm32"))]
mod clock {
    use std::time::Instant;

    pub fn now() -> Option<Instant> {
        Some(Instant::now())
    }

    pub fn seconds_since(t: Option<Instant>) -> f64 {
        t.map_or(0.0, |t| t.elapsed().as_secs_f64())
    }
}

#[cfg(target_arch = "wasm32")]
mod clock {
    pub fn now() -> Option<()> {
        None
    }

    pub fn seconds_since(_: Option<()>) -> f64 {
        0.0
    }
}

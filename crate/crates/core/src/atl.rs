//! ATL model checking over explicit game models, with memoryless strategy
//! extraction, uniform strategy search and linearization into action lists.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::cgm::{BeliefState, Cgm, JointAction, StateSet};
use crate::ispl::Formula;

/// What a strategy enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// One step into `goal`.
    Next,
    /// Reach `goal`; every move strictly lowers the fixpoint rank.
    Reach,
    /// Stay inside `goal` forever.
    Safety,
}

/// A memoryless strategy for a coalition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyMap {
    /// Agent indices, in declaration order.
    pub coalition: Vec<usize>,
    pub objective: Objective,
    /// state -> one action per coalition member.
    pub choice: BTreeMap<usize, Vec<usize>>,
    /// States on which `choice` is defined.
    pub domain: StateSet,
    /// For `Reach`: the states where the objective is met. For `Next`: the target
    /// of the move. For `Safety`: the invariant.
    pub goal: StateSet,
    /// Strategy for an `<A> X(..)` conjunct of the goal, played once the goal holds.
    pub finish: Option<Box<StrategyMap>>,
}

impl StrategyMap {
    pub fn action(&self, state: usize) -> Option<&[usize]> {
        self.choice.get(&state).map(|v| v.as_slice())
    }

    /// Action of `agent` at `state`, if the agent is in the coalition and the
    /// strategy is defined there.
    pub fn agent_action(&self, state: usize, agent: usize) -> Option<usize> {
        let k = self.coalition.iter().position(|a| *a == agent)?;
        self.action(state).map(|m| m[k])
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    /// States satisfying the formula.
    pub satisfying: StateSet,
    /// Whether every initial state satisfies the formula.
    pub holds: bool,
    /// Witness for an outermost strategic operator, present when `holds`.
    pub strategy: Option<StrategyMap>,
    pub uniform: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinearizeError {
    #[error("non-linearizable goal: {0}")]
    NonLinearizable(String),
    #[error("agent `{0}` is not in the strategy's coalition")]
    NotInCoalition(String),
    #[error("horizon of {0} steps exceeded before the goal was reached")]
    HorizonExceeded(usize),
    #[error("belief induces no states")]
    EmptyBelief,
    #[error("strategy has no move at s{0}")]
    NoMove(usize),
}

struct Labeled {
    states: StateSet,
    strategy: Option<StrategyMap>,
}

/// Fixpoint labeler over a model, optionally with one agent's enabled actions
/// replaced by a per-state mask.
struct Checker<'a> {
    cgm: &'a Cgm,
    joints: Vec<JointAction>,
    restrict: Option<(usize, &'a [u64])>,
}

impl<'a> Checker<'a> {
    fn new(cgm: &'a Cgm, restrict: Option<(usize, &'a [u64])>) -> Self {
        Checker {
            cgm,
            joints: (0..cgm.num_joint()).map(|j| cgm.joint_from_index(j)).collect(),
            restrict,
        }
    }

    fn enabled(&self, agent: usize, state: usize) -> u64 {
        match self.restrict {
            Some((a, masks)) if a == agent => masks[state],
            _ => self.cgm.enabled_mask(agent, state),
        }
    }

    fn coalition(&self, name: &str) -> Vec<usize> {
        self.cgm.coalition(name).unwrap_or_default()
    }

    /// Lexicographically smallest coalition move at `state` that forces the
    /// successor into `target` against every counter-move.
    fn best_move(&self, coalition: &[usize], state: usize, target: &StateSet) -> Option<Vec<usize>> {
        let agents = self.cgm.agents();
        let radix: Vec<usize> = coalition.iter().map(|a| agents[*a].actions.len()).collect();
        let total: usize = radix.iter().product();
        // 0 = no enabled joint action seen, 1 = all successors in target, 2 = some escape
        let mut status = vec![0u8; total];
        let masks: Vec<u64> = (0..agents.len()).map(|a| self.enabled(a, state)).collect();
        for (j, joint) in self.joints.iter().enumerate() {
            if joint.0.iter().enumerate().any(|(a, act)| masks[a] >> act & 1 == 0) {
                continue;
            }
            let key = coalition.iter().fold(0, |k, a| k * agents[*a].actions.len() + joint.0[*a]);
            let t = self.cgm.successor_index(state, j).expect("enabled joint action has a successor");
            if !target.contains(t) {
                status[key] = 2;
            } else if status[key] == 0 {
                status[key] = 1;
            }
        }
        let key = status.iter().position(|s| *s == 1)?;
        let mut out = vec![0; coalition.len()];
        let mut rest = key;
        for (k, r) in radix.iter().enumerate().rev() {
            out[k] = rest % r;
            rest /= r;
        }
        Some(out)
    }

    fn pre(&self, coalition: &[usize], target: &StateSet) -> StateSet {
        let mut out = self.cgm.empty_set();
        for s in 0..self.cgm.num_states() {
            if self.best_move(coalition, s, target).is_some() {
                out.insert(s);
            }
        }
        out
    }

    fn strategy(&self, coalition: Vec<usize>, objective: Objective, choice: BTreeMap<usize, Vec<usize>>, goal: StateSet) -> StrategyMap {
        let domain = StateSet::from_states(self.cgm.num_states(), choice.keys().copied());
        StrategyMap {
            coalition,
            objective,
            choice,
            domain,
            goal,
            finish: None,
        }
    }

    /// Attaches the strategy of the first `<A> X(..)` conjunct of `target`.
    fn with_finish(&self, mut strategy: StrategyMap, target: &Formula) -> StrategyMap {
        let next = target.conjuncts().into_iter().find(|c| matches!(c, Formula::Next(..)));
        if let Some(next) = next {
            strategy.finish = self.label(next).strategy.map(Box::new);
        }
        strategy
    }

    /// Least fixpoint `goal ∪ (allowed ∩ pre(Z))`, recording one move per added state.
    fn reach(&self, coalition: Vec<usize>, allowed: Option<&StateSet>, goal: StateSet) -> Labeled {
        let mut z = goal.clone();
        let mut choice = BTreeMap::new();
        loop {
            let layer: Vec<(usize, Vec<usize>)> = z
                .complement()
                .iter()
                .filter(|s| allowed.is_none_or(|a| a.contains(*s)))
                .filter_map(|s| self.best_move(&coalition, s, &z).map(|m| (s, m)))
                .collect();
            if layer.is_empty() {
                break;
            }
            for (s, m) in layer {
                z.insert(s);
                choice.insert(s, m);
            }
        }
        Labeled {
            states: z,
            strategy: Some(self.strategy(coalition, Objective::Reach, choice, goal)),
        }
    }

    fn label(&self, f: &Formula) -> Labeled {
        let plain = |states| Labeled { states, strategy: None };
        match f {
            Formula::Atom(p) => plain(
                self.cgm
                    .eval_proposition(p)
                    .cloned()
                    .unwrap_or_else(|_| self.cgm.empty_set()),
            ),
            Formula::Not(x) => plain(self.label(x).states.complement()),
            Formula::And(l, r) => plain(self.label(l).states.intersection(&self.label(r).states)),
            Formula::Or(l, r) => plain(self.label(l).states.union(&self.label(r).states)),
            Formula::Next(c, x) => {
                let coalition = self.coalition(c);
                let target = self.label(x).states;
                let choice: BTreeMap<usize, Vec<usize>> = (0..self.cgm.num_states())
                    .filter_map(|s| self.best_move(&coalition, s, &target).map(|m| (s, m)))
                    .collect();
                let states = StateSet::from_states(self.cgm.num_states(), choice.keys().copied());
                let strategy = self.strategy(coalition, Objective::Next, choice, target);
                Labeled {
                    states,
                    strategy: Some(self.with_finish(strategy, x)),
                }
            }
            Formula::Eventually(c, x) => {
                let mut l = self.reach(self.coalition(c), None, self.label(x).states);
                l.strategy = l.strategy.map(|s| self.with_finish(s, x));
                l
            }
            Formula::Until(c, a, b) => {
                let allowed = self.label(a).states;
                let mut l = self.reach(self.coalition(c), Some(&allowed), self.label(b).states);
                l.strategy = l.strategy.map(|s| self.with_finish(s, b));
                l
            }
            Formula::Always(c, x) => {
                let coalition = self.coalition(c);
                let inv = self.label(x).states;
                let mut z = inv.clone();
                loop {
                    let keep = z.intersection(&self.pre(&coalition, &z));
                    if keep == z {
                        break;
                    }
                    z = keep;
                }
                let choice: BTreeMap<usize, Vec<usize>> = z
                    .iter()
                    .map(|s| (s, self.best_move(&coalition, s, &z).expect("state in greatest fixpoint")))
                    .collect();
                Labeled {
                    states: z,
                    strategy: Some(self.strategy(coalition, Objective::Safety, choice, inv)),
                }
            }
        }
    }

    fn check(&self, formula: &Formula, initial: &StateSet) -> CheckResult {
        let l = self.label(formula);
        let holds = initial.is_subset(&l.states);
        CheckResult {
            holds,
            strategy: if holds { l.strategy } else { None },
            satisfying: l.states,
            uniform: false,
        }
    }
}

/// States from which `coalition` can force the next state into `target`.
pub fn pre(cgm: &Cgm, coalition: &[usize], target: &StateSet) -> StateSet {
    Checker::new(cgm, None).pre(coalition, target)
}

/// States satisfying `formula`.
pub fn satisfying_states(cgm: &Cgm, formula: &Formula) -> StateSet {
    Checker::new(cgm, None).label(formula).states
}

/// Satisfying states of `formula` and the witness of its outermost strategic
/// operator over all of them.
pub fn synthesize(cgm: &Cgm, formula: &Formula) -> (StateSet, Option<StrategyMap>) {
    let l = Checker::new(cgm, None).label(formula);
    (l.states, l.strategy)
}

/// Checks `formula` on every state of `initial`.
pub fn check(cgm: &Cgm, formula: &Formula, initial: &StateSet) -> CheckResult {
    Checker::new(cgm, None).check(formula, initial)
}

fn monotone_in(formula: &Formula, agent: usize, cgm: &Cgm) -> bool {
    fn strategic(f: &Formula) -> bool {
        match f {
            Formula::Atom(_) => false,
            Formula::Not(x) => strategic(x),
            Formula::And(l, r) | Formula::Or(l, r) => strategic(l) || strategic(r),
            _ => true,
        }
    }
    match formula {
        Formula::Atom(_) => true,
        Formula::Not(x) => !strategic(x),
        Formula::And(l, r) | Formula::Or(l, r) => monotone_in(l, agent, cgm) && monotone_in(r, agent, cgm),
        Formula::Next(c, x) | Formula::Eventually(c, x) | Formula::Always(c, x) => {
            cgm.coalition(c).unwrap_or_default().contains(&agent) && monotone_in(x, agent, cgm)
        }
        Formula::Until(c, a, b) => {
            cgm.coalition(c).unwrap_or_default().contains(&agent)
                && monotone_in(a, agent, cgm)
                && monotone_in(b, agent, cgm)
        }
    }
}

/// Backtracking search for strategies in which one agent's action depends only on
/// its observation (the values of its local variables).
///
/// Labelings are cached per action assignment, so one search object can serve
/// many belief sets for the same formula.
pub struct UniformSearch<'a> {
    cgm: &'a Cgm,
    formula: Formula,
    agent: usize,
    /// Observation classes ordered by their lowest state.
    classes: Vec<Vec<usize>>,
    /// Actions enabled somewhere in each class.
    candidates: Vec<Vec<usize>>,
    prune: bool,
    cache: HashMap<Vec<Option<usize>>, CheckResult>,
}

impl<'a> UniformSearch<'a> {
    pub fn new(cgm: &'a Cgm, formula: &Formula, agent: usize) -> Self {
        let locals = &cgm.agents()[agent].locals;
        let mut by_obs: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for s in 0..cgm.num_states() {
            let obs = locals.iter().map(|v| cgm.value(s, *v)).collect();
            by_obs.entry(obs).or_default().push(s);
        }
        let mut classes: Vec<Vec<usize>> = by_obs.into_values().collect();
        classes.sort_by_key(|c| c[0]);
        let candidates = classes
            .iter()
            .map(|c| {
                let mask = c.iter().fold(0u64, |m, s| m | cgm.enabled_mask(agent, *s));
                (0..cgm.agents()[agent].actions.len()).filter(|a| mask >> a & 1 == 1).collect()
            })
            .collect();
        UniformSearch {
            cgm,
            prune: monotone_in(formula, agent, cgm),
            formula: formula.clone(),
            agent,
            classes,
            candidates,
            cache: HashMap::new(),
        }
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    fn evaluate(&mut self, assignment: &[Option<usize>], initial: &StateSet) -> &CheckResult {
        if !self.cache.contains_key(assignment) {
            let mut masks: Vec<u64> = (0..self.cgm.num_states())
                .map(|s| self.cgm.enabled_mask(self.agent, s))
                .collect();
            for (class, choice) in self.classes.iter().zip(assignment) {
                if let Some(a) = choice {
                    for s in class {
                        masks[*s] &= 1u64 << a;
                    }
                }
            }
            let l = Checker::new(self.cgm, Some((self.agent, &masks))).label(&self.formula);
            let result = CheckResult {
                satisfying: l.states,
                holds: false,
                strategy: l.strategy,
                uniform: true,
            };
            self.cache.insert(assignment.to_vec(), result);
        }
        let r = self.cache.get_mut(assignment).expect("cached");
        r.holds = initial.is_subset(&r.satisfying);
        r
    }

    /// First uniform witness for every state of `initial`, searching classes in
    /// order and actions in declaration order.
    pub fn find(&mut self, initial: &StateSet) -> Option<StrategyMap> {
        if initial.is_empty() {
            return None;
        }
        let mut assignment = vec![None; self.classes.len()];
        self.search(0, &mut assignment, initial)
    }

    fn search(&mut self, k: usize, assignment: &mut Vec<Option<usize>>, initial: &StateSet) -> Option<StrategyMap> {
        if k == self.classes.len() {
            let r = self.evaluate(assignment, initial);
            if !r.holds {
                return None;
            }
            let mut strategy = r.strategy.clone()?;
            let agent = self.agent;
            if let Some(pos) = strategy.coalition.iter().position(|a| *a == agent) {
                // Pin the agent's component to its class action even where the
                // coalition needs no move, so the map is observation-constant.
                for (class, choice) in self.classes.iter().zip(assignment.iter()) {
                    for s in class {
                        if let Some(m) = strategy.choice.get_mut(s) {
                            m[pos] = choice.expect("complete assignment");
                        }
                    }
                }
            }
            return Some(strategy);
        }
        for a in self.candidates[k].clone() {
            assignment[k] = Some(a);
            if self.prune && k + 1 < self.classes.len() && !self.evaluate(assignment, initial).holds {
                continue;
            }
            if let Some(s) = self.search(k + 1, assignment, initial) {
                assignment[k] = None;
                return Some(s);
            }
        }
        assignment[k] = None;
        None
    }
}

/// Searches for a strategy witnessing `formula` on every state of `belief` in which
/// `agent`'s action is constant on each of its observation classes.
pub fn find_uniform_strategy(cgm: &Cgm, formula: &Formula, belief: &BeliefState, agent: usize) -> Option<StrategyMap> {
    UniformSearch::new(cgm, formula, agent).find(&cgm.belief_states(belief))
}

/// Smallest enabled action of every agent outside the coalition, combined with the
/// coalition's move.
fn joint_for(cgm: &Cgm, strategy: &StrategyMap, state: usize, mv: &[usize]) -> JointAction {
    JointAction(
        (0..cgm.agents().len())
            .map(|a| match strategy.coalition.iter().position(|c| *c == a) {
                Some(k) => mv[k],
                None => cgm.enabled_actions(a, state)[0],
            })
            .collect(),
    )
}

/// One step of a strategy-driven play from `state`.
struct Step {
    state: usize,
    joint: JointAction,
    next: usize,
}

fn play(cgm: &Cgm, strategy: &StrategyMap, start: usize, horizon: usize) -> Result<Vec<Step>, LinearizeError> {
    if strategy.objective == Objective::Safety {
        return Err(LinearizeError::NonLinearizable(
            "safety objectives have no finite witness".into(),
        ));
    }
    let mut steps = Vec::new();
    let mut s = start;
    loop {
        let done = match strategy.objective {
            Objective::Reach => strategy.goal.contains(s),
            _ => !steps.is_empty(),
        };
        if done {
            break;
        }
        if steps.len() >= horizon {
            return Err(LinearizeError::HorizonExceeded(horizon));
        }
        let mv = strategy.action(s).ok_or(LinearizeError::NoMove(s))?;
        let joint = joint_for(cgm, strategy, s, mv);
        let next = cgm.successor(s, &joint).map_err(|_| LinearizeError::NoMove(s))?;
        steps.push(Step { state: s, joint, next });
        s = next;
    }
    if let Some(finish) = &strategy.finish {
        let mv = finish.action(s).ok_or(LinearizeError::NoMove(s))?;
        let joint = joint_for(cgm, finish, s, mv);
        let next = cgm.successor(s, &joint).map_err(|_| LinearizeError::NoMove(s))?;
        steps.push(Step { state: s, joint, next });
    }
    Ok(steps)
}

/// Projects the play of `strategy` from the belief's lowest state onto `agent`.
///
/// The play runs until the goal holds (at most `horizon` moves), then appends the
/// agent's part of the finishing move when the goal carries an `<A> X(..)` conjunct.
pub fn linearize(
    cgm: &Cgm,
    strategy: &StrategyMap,
    belief: &BeliefState,
    agent: usize,
    horizon: usize,
) -> Result<Vec<usize>, LinearizeError> {
    let start = cgm.belief_states(belief).first().ok_or(LinearizeError::EmptyBelief)?;
    linearize_from(cgm, strategy, start, agent, horizon)
}

/// As [`linearize`], from an explicit start state.
pub fn linearize_from(
    cgm: &Cgm,
    strategy: &StrategyMap,
    start: usize,
    agent: usize,
    horizon: usize,
) -> Result<Vec<usize>, LinearizeError> {
    if !strategy.coalition.contains(&agent) {
        return Err(LinearizeError::NotInCoalition(cgm.agents()[agent].name.clone()));
    }
    let steps = play(cgm, strategy, start, horizon)?;
    Ok(steps.iter().map(|st| st.joint.0[agent]).collect())
}

/// `step k: state s<i>, joint (a1,a2) -> s<j>` lines for the play from `start`.
pub fn witness_trace(cgm: &Cgm, strategy: &StrategyMap, start: usize, horizon: usize) -> Result<String, LinearizeError> {
    let mut out = String::new();
    if strategy.objective == Objective::Safety {
        // Show one lap of the invariant: stop at the first repeated state.
        let mut seen = StateSet::empty(cgm.num_states());
        let mut s = start;
        for k in 0..horizon {
            if seen.contains(s) {
                break;
            }
            seen.insert(s);
            let mv = strategy.action(s).ok_or(LinearizeError::NoMove(s))?;
            let joint = joint_for(cgm, strategy, s, mv);
            let next = cgm.successor(s, &joint).map_err(|_| LinearizeError::NoMove(s))?;
            writeln!(out, "step {k}: state s{s}, joint {} -> s{next}", cgm.joint_label(&joint)).unwrap();
            s = next;
        }
        return Ok(out);
    }
    for (k, st) in play(cgm, strategy, start, horizon)?.iter().enumerate() {
        writeln!(
            out,
            "step {k}: state s{}, joint {} -> s{}",
            st.state,
            cgm.joint_label(&st.joint),
            st.next
        )
        .unwrap();
    }
    Ok(out)
}

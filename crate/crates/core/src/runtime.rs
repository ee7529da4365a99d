//! Two-agent grid world with line-of-sight perception, possible-worlds belief
//! tracking and plan execution from generated libraries.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write};

use crate::agentspeak::{ordered_guard, parse_literal, render_guard, Plan};

pub type Cell = (i64, i64);

/// Agent names, indexed as in [`WorldState`].
pub const AGENTS: [&str; 2] = ["BA", "RA"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    pub rows: i64,
    pub cols: i64,
    pub obstacles: BTreeSet<Cell>,
    pub treasure: Cell,
}

impl GridMap {
    pub fn new(rows: i64, cols: i64, obstacles: impl IntoIterator<Item = Cell>, treasure: Cell) -> Result<GridMap, String> {
        let map = GridMap {
            rows,
            cols,
            obstacles: obstacles.into_iter().collect(),
            treasure,
        };
        if rows < 1 || cols < 1 {
            return Err("map needs at least one row and one column".into());
        }
        if let Some(o) = map.obstacles.iter().find(|c| !map.in_bounds(**c)) {
            return Err(format!("obstacle {o:?} is off the map"));
        }
        if !map.in_bounds(treasure) || map.obstacles.contains(&treasure) {
            return Err(format!("treasure {treasure:?} must be on a free cell"));
        }
        Ok(map)
    }

    /// 4 rows by 3 columns, obstacles at (1,1) and (2,1), treasure at (3,2).
    pub fn goldseeker() -> GridMap {
        GridMap::new(4, 3, [(1, 1), (2, 1)], (3, 2)).expect("valid layout")
    }

    pub fn in_bounds(&self, (r, c): Cell) -> bool {
        (0..self.rows).contains(&r) && (0..self.cols).contains(&c)
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.in_bounds(cell) && !self.obstacles.contains(&cell)
    }

    /// Non-obstacle cells in row-major order.
    pub fn free_cells(&self) -> Vec<Cell> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .filter(|c| self.is_free(*c))
            .collect()
    }
}

/// Goldseeker default starts: BA at (1,0), RA at (0,1).
pub const DEFAULT_STARTS: [Cell; 2] = [(1, 0), (0, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Right,
    Left,
    Up,
    Down,
    Mine,
}

impl Action {
    pub const ALL: [Action; 5] = [Action::Right, Action::Left, Action::Up, Action::Down, Action::Mine];

    pub fn name(&self) -> &'static str {
        match self {
            Action::Right => "right",
            Action::Left => "left",
            Action::Up => "up",
            Action::Down => "down",
            Action::Mine => "mine",
        }
    }

    pub fn parse(name: &str) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.name() == name)
    }

    fn delta(&self) -> Cell {
        match self {
            Action::Right => (0, 1),
            Action::Left => (0, -1),
            Action::Up => (-1, 0),
            Action::Down => (1, 0),
            Action::Mine => (0, 0),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldState {
    pub pos: [Cell; 2],
    pub mined: [bool; 2],
    pub treasure_mined: bool,
}

impl WorldState {
    pub fn start(pos: [Cell; 2]) -> WorldState {
        WorldState {
            pos,
            mined: [false; 2],
            treasure_mined: false,
        }
    }
}

impl fmt::Display for WorldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BA=({},{}) RA=({},{}) mined={},{} treasureMined={}",
            self.pos[0].0, self.pos[0].1, self.pos[1].0, self.pos[1].1, self.mined[0], self.mined[1], self.treasure_mined
        )
    }
}

/// Actions the protocol allows: moves always, `mine` until the agent has mined.
pub fn legal_actions(world: &WorldState, agent: usize) -> Vec<Action> {
    Action::ALL
        .into_iter()
        .filter(|a| *a != Action::Mine || !world.mined[agent])
        .collect()
}

/// One synchronous step. `None` leaves an agent idle; blocked moves and repeated
/// mining change nothing.
pub fn step(map: &GridMap, world: &WorldState, actions: [Option<Action>; 2]) -> WorldState {
    let mut next = *world;
    for (i, action) in actions.iter().enumerate() {
        match action {
            Some(Action::Mine) => next.mined[i] = true,
            Some(a) => {
                let (dr, dc) = a.delta();
                let target = (world.pos[i].0 + dr, world.pos[i].1 + dc);
                if map.is_free(target) {
                    next.pos[i] = target;
                }
            }
            None => {}
        }
    }
    let both_mine = actions.iter().all(|a| *a == Some(Action::Mine));
    let fresh = world.mined.iter().all(|m| !m);
    if both_mine && fresh && world.pos.iter().all(|p| *p == map.treasure) {
        next.treasure_mined = true;
    }
    next
}

/// Own cell plus each of the four rays, up to and including the first obstacle.
pub fn line_of_sight(map: &GridMap, pos: Cell) -> BTreeSet<Cell> {
    let mut out = BTreeSet::from([pos]);
    for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
        let mut cell = (pos.0 + dr, pos.1 + dc);
        while map.in_bounds(cell) {
            out.insert(cell);
            if map.obstacles.contains(&cell) {
                break;
            }
            cell = (cell.0 + dr, cell.1 + dc);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Thing {
    Obstacle,
    Treasure,
    Agent(usize),
}

/// What an agent sees, relative to its own cell. Only non-empty cells appear.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Percept {
    pub observer: usize,
    pub cells: BTreeMap<Cell, Vec<Thing>>,
}

pub fn perceive(map: &GridMap, world: &WorldState, observer: usize) -> Percept {
    let me = world.pos[observer];
    let mut cells = BTreeMap::new();
    for cell in line_of_sight(map, me) {
        let mut things = Vec::new();
        if map.obstacles.contains(&cell) {
            things.push(Thing::Obstacle);
        }
        if cell == map.treasure {
            things.push(Thing::Treasure);
        }
        for (other, pos) in world.pos.iter().enumerate() {
            if other != observer && *pos == cell {
                things.push(Thing::Agent(other));
            }
        }
        if !things.is_empty() {
            cells.insert((cell.0 - me.0, cell.1 - me.1), things);
        }
    }
    Percept { observer, cells }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentBelief {
    pub agent: usize,
    pub worlds: BTreeSet<WorldState>,
}

/// Every placement of both agents on free cells, nothing mined.
pub fn initial_belief(map: &GridMap, agent: usize) -> AgentBelief {
    let cells = map.free_cells();
    let worlds = cells
        .iter()
        .flat_map(|a| cells.iter().map(move |b| WorldState::start([*a, *b])))
        .collect();
    AgentBelief { agent, worlds }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("{agent}'s percept is inconsistent with every candidate world")]
    EmptyBelief { agent: String },
    #[error("{agent}'s belief no longer contains the true world")]
    Unsound { agent: String },
    #[error("{agent}: no plan for goal `{goal}` matches `{hull}`")]
    NoPlan { agent: String, goal: String, hull: String },
    #[error("{agent}: {count} plans for goal `{goal}` match `{hull}`")]
    Ambiguous {
        agent: String,
        goal: String,
        hull: String,
        count: usize,
    },
    #[error("{agent}: plan for goal `{goal}` finished without reaching it")]
    PlanExhausted { agent: String, goal: String },
    #[error("{agent}: unknown action `{action}` in plan body")]
    UnknownAction { agent: String, action: String },
    #[error("invalid start: {0}")]
    BadStart(String),
}

/// Progresses every candidate world by `own` and each possible partner action
/// (idling included), then keeps the successors that produce `percept`.
/// `own = None` only filters.
pub fn update_belief(
    belief: &AgentBelief,
    own: Option<Action>,
    percept: &Percept,
    map: &GridMap,
) -> Result<AgentBelief, RuntimeError> {
    let me = belief.agent;
    let other = 1 - me;
    let mut worlds = BTreeSet::new();
    for w in &belief.worlds {
        let candidates: Vec<WorldState> = match own {
            None => vec![*w],
            Some(a) => std::iter::once(None)
                .chain(legal_actions(w, other).into_iter().map(Some))
                .map(|b| {
                    let mut acts = [None; 2];
                    acts[me] = Some(a);
                    acts[other] = b;
                    step(map, w, acts)
                })
                .collect(),
        };
        worlds.extend(candidates.into_iter().filter(|c| perceive(map, c, me) == *percept));
    }
    if worlds.is_empty() {
        return Err(RuntimeError::EmptyBelief {
            agent: AGENTS[me].to_string(),
        });
    }
    Ok(AgentBelief { agent: me, worlds })
}

/// Per-variable value sets, keyed by lowercased model variable name.
pub type Hull = BTreeMap<String, BTreeSet<i64>>;

const BOOLEAN_VARS: [&str; 1] = ["treasuremined"];

/// Values each environment variable takes across the candidate worlds.
pub fn project_hull(belief: &AgentBelief) -> Hull {
    let mut hull = Hull::new();
    for w in &belief.worlds {
        for (i, name) in AGENTS.iter().enumerate() {
            let n = name.to_lowercase();
            hull.entry(format!("row{n}")).or_default().insert(w.pos[i].0);
            hull.entry(format!("column{n}")).or_default().insert(w.pos[i].1);
        }
        hull.entry("treasuremined".into()).or_default().insert(w.treasure_mined as i64);
    }
    hull
}

/// The hull as guard atoms: known values first, then possible ones.
pub fn render_hull(hull: &Hull) -> String {
    let vars = hull
        .iter()
        .map(|(var, values)| {
            let boolean = BOOLEAN_VARS.contains(&var.as_str());
            let rendered = values
                .iter()
                .map(|v| if boolean { (*v != 0).to_string() } else { v.to_string() })
                .collect();
            (var.clone(), rendered)
        })
        .collect();
    render_guard(&ordered_guard(&[], &vars))
}

/// A plan library indexed for guard matching.
#[derive(Debug, Clone, Default)]
pub struct PlanLibrary {
    plans: Vec<Plan>,
    vocabulary: Vec<String>,
    /// Per plan: one value bitmask per vocabulary entry.
    masks: Vec<Vec<u64>>,
}

fn value_bit(value: i64) -> u64 {
    if (0..64).contains(&value) {
        1 << value
    } else {
        0
    }
}

impl PlanLibrary {
    pub fn new(plans: Vec<Plan>) -> Result<PlanLibrary, String> {
        let vocabulary: Vec<String> = plans
            .iter()
            .flat_map(|p| p.guard.iter().map(|a| a.var().to_string()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut masks = Vec::with_capacity(plans.len());
        for p in &plans {
            let mut m = vec![0u64; vocabulary.len()];
            for atom in &p.guard {
                let v = parse_literal(atom.value())
                    .filter(|v| (0..64).contains(v))
                    .ok_or_else(|| format!("unsupported guard value `{}`", atom.value()))?;
                let k = vocabulary.binary_search_by(|x| x.as_str().cmp(atom.var())).expect("in vocabulary");
                m[k] |= value_bit(v);
            }
            masks.push(m);
        }
        Ok(PlanLibrary {
            plans,
            vocabulary,
            masks,
        })
    }

    pub fn plans(&self) -> &[Plan] {
        &self.plans
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }

    /// Indices of the plans for `goal` whose guard describes exactly `hull`.
    pub fn matches(&self, hull: &Hull, goal: &str) -> Vec<usize> {
        let key: Vec<u64> = self
            .vocabulary
            .iter()
            .map(|v| hull.get(v).map_or(0, |vals| vals.iter().fold(0, |m, x| m | value_bit(*x))))
            .collect();
        (0..self.plans.len())
            .filter(|i| self.plans[*i].goal == goal && self.masks[*i] == key)
            .collect()
    }
}

/// The single plan for `goal` matching `hull`.
pub fn select_plan<'a>(library: &'a PlanLibrary, hull: &Hull, goal: &str, agent: usize) -> Result<&'a Plan, RuntimeError> {
    let found = library.matches(hull, goal);
    match found.as_slice() {
        [one] => Ok(&library.plans[*one]),
        [] => Err(RuntimeError::NoPlan {
            agent: AGENTS[agent].to_string(),
            goal: goal.to_string(),
            hull: render_hull(hull),
        }),
        many => Err(RuntimeError::Ambiguous {
            agent: AGENTS[agent].to_string(),
            goal: goal.to_string(),
            hull: render_hull(hull),
            count: many.len(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Closed,
    /// Scripted actions per agent; once a script runs out the agent follows its plan
    /// if it has a library and idles otherwise.
    Replay([Vec<Action>; 2]),
}

#[derive(Debug, Clone)]
pub struct EpisodeConfig {
    pub map: GridMap,
    pub starts: [Cell; 2],
    pub libraries: [Option<PlanLibrary>; 2],
    pub goal: String,
    pub mode: Mode,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentStep {
    pub hull: Hull,
    pub reselected: bool,
    /// Goal and the body still to run, before this step's action.
    pub plan: Option<(String, Vec<String>)>,
    pub action: Option<Action>,
    pub belief_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub world: WorldState,
    pub agents: [AgentStep; 2],
    pub next: WorldState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Treasure mined by the joint action of this step (1-based).
    Mined(usize),
    StepLimit,
    Failed(RuntimeError),
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
}

struct Intention {
    goal: String,
    remaining: VecDeque<String>,
    successor: Option<String>,
}

struct AgentState {
    belief: AgentBelief,
    last_hull: Option<Hull>,
    goal: String,
    intention: Option<Intention>,
    last_action: Option<Action>,
    started: bool,
}

fn adopt(plan: &Plan) -> Intention {
    Intention {
        goal: plan.goal.clone(),
        remaining: plan.body.iter().cloned().collect(),
        successor: plan.successor.clone(),
    }
}

/// Runs one episode. Per step both agents perceive, update their beliefs, drop
/// their intention and select a new plan if their hull changed, then act together.
pub fn run_episode(config: &EpisodeConfig) -> Trace {
    let mut trace = Trace {
        steps: Vec::new(),
        outcome: Outcome::StepLimit,
    };
    let map = &config.map;
    for (i, s) in config.starts.iter().enumerate() {
        if !map.is_free(*s) {
            trace.outcome = Outcome::Failed(RuntimeError::BadStart(format!(
                "{} at {s:?} is not on a free cell",
                AGENTS[i]
            )));
            return trace;
        }
    }
    let mut world = WorldState::start(config.starts);
    let mut agents: Vec<AgentState> = (0..2)
        .map(|i| AgentState {
            belief: initial_belief(map, i),
            last_hull: None,
            goal: config.goal.clone(),
            intention: None,
            last_action: None,
            started: false,
        })
        .collect();
    let steps = match &config.mode {
        Mode::Closed => config.max_steps,
        Mode::Replay(scripts) => scripts.iter().map(Vec::len).max().unwrap_or(0),
    };

    for k in 0..steps {
        let mut records = Vec::new();
        for (i, st) in agents.iter_mut().enumerate() {
            match agent_turn(config, k, i, st, &world) {
                Ok(r) => records.push(r),
                Err(e) => {
                    trace.outcome = Outcome::Failed(e);
                    return trace;
                }
            }
        }
        let actions = [records[0].action, records[1].action];
        let next = step(map, &world, actions);
        for (st, a) in agents.iter_mut().zip(actions) {
            st.last_action = a;
        }
        let agents_rec: [AgentStep; 2] = records.try_into().expect("two agents");
        trace.steps.push(StepRecord {
            step: k + 1,
            world,
            agents: agents_rec,
            next,
        });
        world = next;
        if world.treasure_mined {
            trace.outcome = Outcome::Mined(k + 1);
            return trace;
        }
    }
    trace
}

fn agent_turn(config: &EpisodeConfig, k: usize, i: usize, st: &mut AgentState, world: &WorldState) -> Result<AgentStep, RuntimeError> {
    let map = &config.map;
    let name = AGENTS[i].to_string();
    let percept = perceive(map, world, i);
    let own = if st.started { Some(st.last_action) } else { None };
    st.started = true;
    st.belief = match own {
        None => update_belief(&st.belief, None, &percept, map)?,
        Some(a) => update_belief_idle_aware(&st.belief, a, &percept, map)?,
    };
    if !st.belief.worlds.contains(world) {
        return Err(RuntimeError::Unsound { agent: name });
    }
    let hull = project_hull(&st.belief);
    let library = config.libraries[i].as_ref();
    let mut reselected = false;
    if let Some(lib) = library {
        if st.last_hull.as_ref() != Some(&hull) || st.intention.is_none() {
            st.intention = Some(adopt(select_plan(lib, &hull, &st.goal, i)?));
            reselected = true;
        }
    }
    st.last_hull = Some(hull.clone());

    let scripted = match &config.mode {
        Mode::Replay(scripts) => scripts[i].get(k).copied(),
        Mode::Closed => None,
    };
    let plan_view = st
        .intention
        .as_ref()
        .map(|it| (it.goal.clone(), it.remaining.iter().cloned().collect()));
    let action = match (scripted, library) {
        (Some(a), _) => Some(a),
        (None, None) => None,
        (None, Some(lib)) => {
            // Follow successor goals until some plan has an action left.
            loop {
                let it = st.intention.as_mut().expect("plan selected above");
                if let Some(next) = it.remaining.pop_front() {
                    break Some(Action::parse(&next).ok_or_else(|| RuntimeError::UnknownAction {
                        agent: name.clone(),
                        action: next.clone(),
                    })?);
                }
                match it.successor.clone() {
                    Some(g) => {
                        st.goal = g;
                        st.intention = Some(adopt(select_plan(lib, &hull, &st.goal, i)?));
                    }
                    None => {
                        return Err(RuntimeError::PlanExhausted {
                            agent: name,
                            goal: it.goal.clone(),
                        })
                    }
                }
            }
        }
    };
    Ok(AgentStep {
        hull,
        reselected,
        plan: plan_view,
        action,
        belief_size: st.belief.worlds.len(),
    })
}

/// Progression for an agent whose own last action may have been idle.
fn update_belief_idle_aware(belief: &AgentBelief, own: Option<Action>, percept: &Percept, map: &GridMap) -> Result<AgentBelief, RuntimeError> {
    match own {
        Some(a) => update_belief(belief, Some(a), percept, map),
        None => {
            // Idle own step: the partner may still have moved.
            let me = belief.agent;
            let mut worlds = BTreeSet::new();
            for w in &belief.worlds {
                for b in std::iter::once(None).chain(legal_actions(w, 1 - me).into_iter().map(Some)) {
                    let mut acts = [None; 2];
                    acts[1 - me] = b;
                    let c = step(map, w, acts);
                    if perceive(map, &c, me) == *percept {
                        worlds.insert(c);
                    }
                }
            }
            if worlds.is_empty() {
                return Err(RuntimeError::EmptyBelief {
                    agent: AGENTS[me].to_string(),
                });
            }
            Ok(AgentBelief { agent: me, worlds })
        }
    }
}

/// Text form: one block per step with world, hull, plan and act rows.
pub fn format_trace(trace: &Trace) -> String {
    let mut out = String::new();
    for s in &trace.steps {
        writeln!(out, "step {}", s.step).unwrap();
        writeln!(out, "  world: {}", s.world).unwrap();
        for (i, a) in s.agents.iter().enumerate() {
            let name = AGENTS[i];
            writeln!(out, "  {name} hull: {}", render_hull(&a.hull)).unwrap();
            let plan = match &a.plan {
                Some((goal, body)) => {
                    let mark = if a.reselected { " (new)" } else { "" };
                    format!("{goal} <- {}{mark}", if body.is_empty() { "-".to_string() } else { body.join("; ") })
                }
                None => "none".to_string(),
            };
            writeln!(out, "  {name} plan: {plan}").unwrap();
            let act = a.action.map_or("idle".to_string(), |x| x.to_string());
            writeln!(out, "  {name} act: {act}").unwrap();
        }
    }
    if let Some(last) = trace.steps.last() {
        writeln!(out, "final: {}", last.next).unwrap();
    }
    let outcome = match &trace.outcome {
        Outcome::Mined(k) => format!("treasure mined at step {k}"),
        Outcome::StepLimit => format!("stopped after {} steps", trace.steps.len()),
        Outcome::Failed(e) => format!("failed: {e}"),
    };
    writeln!(out, "outcome: {outcome}").unwrap();
    out
}

/// Parses `[RA]` / `[BA]` sections with one action per line. Blank lines and
/// `#` comments are skipped.
pub fn parse_script(text: &str) -> Result<[Vec<Action>; 2], String> {
    let mut scripts: [Vec<Action>; 2] = [Vec::new(), Vec::new()];
    let mut current: Option<usize> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(
                AGENTS
                    .iter()
                    .position(|a| *a == name.trim())
                    .ok_or_else(|| format!("line {}: unknown agent `{name}`", n + 1))?,
            );
            continue;
        }
        let agent = current.ok_or_else(|| format!("line {}: action before any [agent] section", n + 1))?;
        let action = Action::parse(line).ok_or_else(|| format!("line {}: unknown action `{line}`", n + 1))?;
        scripts[agent].push(action);
    }
    Ok(scripts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sight_from_top_middle_stops_at_obstacle() {
        let map = GridMap::goldseeker();
        let seen = line_of_sight(&map, (0, 1));
        assert_eq!(seen, BTreeSet::from([(0, 0), (0, 1), (0, 2), (1, 1)]));
    }

    #[test]
    fn sight_from_top_right_covers_row_and_column() {
        let map = GridMap::goldseeker();
        let seen = line_of_sight(&map, (0, 2));
        let expected: BTreeSet<Cell> = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (3, 2)].into();
        assert_eq!(seen, expected);
    }

    #[test]
    fn single_cell_map() {
        let map = GridMap::new(1, 1, [], (0, 0)).unwrap();
        assert_eq!(line_of_sight(&map, (0, 0)), BTreeSet::from([(0, 0)]));
    }

    #[test]
    fn blocked_moves_are_identity() {
        let map = GridMap::goldseeker();
        let w = WorldState::start([(1, 0), (0, 1)]);
        let n = step(&map, &w, [Some(Action::Right), Some(Action::Down)]);
        assert_eq!(n.pos, [(1, 0), (0, 1)]);
        let n = step(&map, &w, [Some(Action::Left), Some(Action::Up)]);
        assert_eq!(n.pos, [(1, 0), (0, 1)]);
    }

    #[test]
    fn joint_mining() {
        let map = GridMap::goldseeker();
        let w = WorldState::start([(3, 2), (3, 2)]);
        assert!(step(&map, &w, [Some(Action::Mine), Some(Action::Mine)]).treasure_mined);
        let solo = step(&map, &w, [Some(Action::Mine), Some(Action::Right)]);
        assert!(!solo.treasure_mined && solo.mined[0]);
        assert!(!legal_actions(&solo, 0).contains(&Action::Mine));
    }

    #[test]
    fn start_percepts_leave_two_positions() {
        let map = GridMap::goldseeker();
        let w = WorldState::start(DEFAULT_STARTS);
        let b = update_belief(&initial_belief(&map, 0), None, &perceive(&map, &w, 0), &map).unwrap();
        let own: BTreeSet<Cell> = b.worlds.iter().map(|w| w.pos[0]).collect();
        assert_eq!(own, BTreeSet::from([(1, 0), (2, 0)]));
    }

    #[test]
    fn script_parsing() {
        let s = parse_script("[RA]\nright\n\n[BA]\ndown # first\n").unwrap();
        assert_eq!(s[1], vec![Action::Right]);
        assert_eq!(s[0], vec![Action::Down]);
        assert!(parse_script("down\n").is_err());
        assert!(parse_script("[XX]\n").is_err());
        assert!(parse_script("[BA]\njump\n").is_err());
    }

    #[test]
    fn library_rejects_ambiguity() {
        use crate::agentspeak::GuardAtom;
        let p = Plan {
            goal: "g".into(),
            guard: vec![GuardAtom::Known {
                var: "rowba".into(),
                value: "1".into(),
            }],
            body: vec!["up".into()],
            successor: None,
        };
        let lib = PlanLibrary::new(vec![p.clone(), p]).unwrap();
        let hull: Hull = [("rowba".to_string(), BTreeSet::from([1]))].into();
        assert!(matches!(select_plan(&lib, &hull, "g", 0), Err(RuntimeError::Ambiguous { count: 2, .. })));
        let other: Hull = [("rowba".to_string(), BTreeSet::from([2]))].into();
        assert!(matches!(select_plan(&lib, &other, "g", 0), Err(RuntimeError::NoPlan { .. })));
    }
}

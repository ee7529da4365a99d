use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use clap::Parser;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use atlbdi_cli::{config, run, Cli, Io};
use atlbdi_core::agentspeak::{emit, load, GuardAtom, Plan};
use atlbdi_core::atl::{self, Objective, StrategyMap};
use atlbdi_core::cgm::{build_cgm, Cgm, ExplicitModel, StateSet};
use atlbdi_core::fixtures;
use atlbdi_core::forge::{belief_count, enumerate_beliefs, generate_plans, Forge};
use atlbdi_core::ispl::{parse_model, Domain, Formula};
use atlbdi_core::runtime::{
    run_episode, step, Action, EpisodeConfig, GridMap, Hull, Mode, Outcome, PlanLibrary, WorldState, DEFAULT_STARTS,
};

struct Libraries {
    ba_text: String,
    ra_text: String,
    ba: Vec<Plan>,
    ra: Vec<Plan>,
    genplans_time: Duration,
    genplans_stdout: String,
}

fn libraries() -> &'static Libraries {
    static LIBS: OnceLock<Libraries> = OnceLock::new();
    LIBS.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let model = dir.path().join("goldseeker.ispl");
        let ba_cfg = dir.path().join("ba.cfg");
        let ra_cfg = dir.path().join("ra.cfg");
        fs::write(&model, fixtures::GOLDSEEKER_MODEL).unwrap();
        fs::write(&ba_cfg, fixtures::GOLDSEEKER_BA_CONFIG).unwrap();
        fs::write(&ra_cfg, fixtures::GOLDSEEKER_RA_CONFIG).unwrap();
        let out = dir.path().join("plans");
        let started = Instant::now();
        let (code, stdout, stderr) = cli(&[
            "genplans",
            "--model",
            path(&model),
            "--config",
            path(&ba_cfg),
            "--out",
            path(&out),
        ]);
        let genplans_time = started.elapsed();
        assert_eq!(code, 0, "{stderr}");
        let (code, _, stderr) = cli(&["genplans", "--model", path(&model), "--config", path(&ra_cfg), "--out", path(&out)]);
        assert_eq!(code, 0, "{stderr}");
        let ba_text = fs::read_to_string(out.join("BA.asl")).unwrap();
        let ra_text = fs::read_to_string(out.join("RA.asl")).unwrap();
        Libraries {
            ba: load(&ba_text).unwrap(),
            ra: load(&ra_text).unwrap(),
            ba_text,
            ra_text,
            genplans_time,
            genplans_stdout: stdout,
        }
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("atlbdi").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut input = io::empty();
    let code = run(
        cli,
        Io {
            out: &mut out,
            err: &mut err,
            input: &mut input,
        },
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn goldseeker_cgm() -> Cgm {
    let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
    build_cgm(&spec, &fixtures::goldseeker_initials()).unwrap()
}

// 1

fn plan_count() -> Result<String, String> {
    let libs = libraries();
    if libs.ba.len() != 11025 {
        return Err(format!("{} plans", libs.ba.len()));
    }
    if !libs.genplans_stdout.contains("11025 plans") {
        return Err(format!("summary: {}", libs.genplans_stdout));
    }
    if libs.genplans_time > Duration::from_secs(300) {
        return Err(format!("took {:?}", libs.genplans_time));
    }
    Ok(format!("11025 plans in {:.2?}", libs.genplans_time))
}

// 2

fn belief_count_identity() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(2);
    for trial in 0..50 {
        let n = rng.gen_range(1..=4);
        let free: Vec<(usize, Domain)> = (0..n)
            .map(|i| {
                let l: i64 = rng.gen_range(1..=4);
                let d = if l == 2 && rng.gen_bool(0.5) {
                    Domain::Boolean
                } else {
                    Domain::Range { lo: 0, hi: l - 1 }
                };
                (i, d)
            })
            .collect();
        let sizes: Vec<usize> = free.iter().map(|(_, d)| d.size()).collect();
        let expected: u128 = sizes.iter().map(|l| (1u128 << l) - 1).product();
        let beliefs = enumerate_beliefs(&free);
        if beliefs.len() as u128 != expected || belief_count(&sizes) != expected {
            return Err(format!("trial {trial}: sizes {sizes:?}, got {}, want {expected}", beliefs.len()));
        }
    }
    Ok("50 profiles".into())
}

// 3

fn two_state_fixtures() -> Result<String, String> {
    let spec = parse_model(fixtures::TWO_STATE_MODEL).map_err(|e| e.to_string())?;
    let cgm = build_cgm(&spec, &BTreeMap::new()).map_err(|e| e.to_string())?;
    let p = cgm.eval_proposition("p").unwrap().clone();
    let s_p = p.first().ok_or("no p state")?;
    let ag1 = cgm.agent_index("Ag1").unwrap();
    let at = StateSet::from_states(cgm.num_states(), [s_p]);

    let next = atl::check(&cgm, &spec.formulas[0], &at);
    let strategy = next.strategy.as_ref().ok_or("no X strategy")?;
    let b = cgm.action_index(ag1, "b").unwrap();
    if !next.holds || strategy.agent_action(s_p, ag1) != Some(b) {
        return Err(format!("X: holds {}, strategy {:?}", next.holds, strategy.choice));
    }

    let always = atl::check(&cgm, &spec.formulas[1], &at);
    let strategy = always.strategy.as_ref().ok_or("no G strategy")?;
    let a = cgm.action_index(ag1, "a").unwrap();
    if !always.holds || strategy.choice.is_empty() || strategy.choice.values().any(|m| m != &vec![a]) {
        return Err(format!("G: holds {}, strategy {:?}", always.holds, strategy.choice));
    }
    Ok("X witness b, G constant a".into())
}

// 4

struct RandomModel {
    cgm: Cgm,
    n: usize,
    actions: [usize; 2],
    enabled: Vec<Vec<u64>>,
    successors: Vec<Vec<usize>>,
    props: BTreeMap<String, Vec<bool>>,
}

const COALITIONS: [&str; 4] = ["none", "one", "two", "both"];

fn random_model(rng: &mut StdRng, max_states: usize) -> RandomModel {
    let n = rng.gen_range(1..=max_states);
    let actions = [rng.gen_range(1..=3), rng.gen_range(1..=3)];
    let enabled: Vec<Vec<u64>> = actions
        .iter()
        .map(|&k| (0..n).map(|_| rng.gen_range(1..(1u64 << k))).collect())
        .collect();
    let joints = actions[0] * actions[1];
    let successors: Vec<Vec<usize>> = (0..n).map(|_| (0..joints).map(|_| rng.gen_range(0..n)).collect()).collect();
    let mut props = BTreeMap::new();
    for name in ["p", "q"] {
        props.insert(name.to_string(), (0..n).map(|_| rng.gen_bool(0.4)).collect::<Vec<bool>>());
    }
    let names = |k: usize| (0..k).map(|i| format!("a{i}")).collect::<Vec<_>>();
    let cgm = Cgm::explicit(ExplicitModel {
        agents: vec![("Ag1".into(), names(actions[0])), ("Ag2".into(), names(actions[1]))],
        num_states: n,
        enabled: enabled.clone(),
        successors: successors.clone(),
        propositions: props
            .iter()
            .map(|(p, v)| (p.clone(), (0..n).filter(|s| v[*s]).collect()))
            .collect(),
        groups: vec![
            ("none".into(), vec![]),
            ("one".into(), vec!["Ag1".into()]),
            ("two".into(), vec!["Ag2".into()]),
            ("both".into(), vec!["Ag1".into(), "Ag2".into()]),
        ],
    })
    .unwrap();
    RandomModel {
        cgm,
        n,
        actions,
        enabled,
        successors,
        props,
    }
}

fn random_formula(rng: &mut StdRng, depth: usize) -> Formula {
    let choice = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..9) };
    let coalition = COALITIONS[rng.gen_range(0..4)];
    match choice {
        0 => Formula::atom("p"),
        1 => Formula::atom("q"),
        2 => Formula::not(Formula::atom(if rng.gen_bool(0.5) { "p" } else { "q" })),
        3 => Formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        4 => Formula::not(random_formula(rng, depth - 1)),
        5 => Formula::Next(coalition.into(), Box::new(random_formula(rng, depth - 1))),
        6 => Formula::Eventually(coalition.into(), Box::new(random_formula(rng, depth - 1))),
        7 => Formula::Always(coalition.into(), Box::new(random_formula(rng, depth - 1))),
        _ => Formula::Until(
            coalition.into(),
            Box::new(random_formula(rng, depth - 1)),
            Box::new(random_formula(rng, depth - 1)),
        ),
    }
}

/// Brute-force solver: enumerate every memoryless coalition strategy and evaluate
/// each objective on the resulting one-sided game tree by bounded unrolling.
struct Oracle<'a> {
    m: &'a RandomModel,
}

impl Oracle<'_> {
    fn members(&self, coalition: &str) -> Vec<usize> {
        match coalition {
            "none" => vec![],
            "one" => vec![0],
            "two" => vec![1],
            _ => vec![0, 1],
        }
    }

    fn enabled(&self, agent: usize, s: usize) -> Vec<usize> {
        (0..self.m.actions[agent]).filter(|a| self.m.enabled[agent][s] >> a & 1 == 1).collect()
    }

    fn outcomes(&self, s: usize, fixed: &[Option<usize>; 2]) -> Vec<usize> {
        let mut out = Vec::new();
        for a in self.enabled(0, s) {
            for b in self.enabled(1, s) {
                if fixed[0].is_some_and(|x| x != a) || fixed[1].is_some_and(|x| x != b) {
                    continue;
                }
                out.push(self.m.successors[s][a * self.m.actions[1] + b]);
            }
        }
        out
    }

    /// Whether every play from each state satisfies the objective when the
    /// successor relation is `succ`.
    fn holds_all(&self, succ: &[Vec<usize>], kind: &Kind, a: &[bool], b: &[bool]) -> Vec<bool> {
        let n = self.m.n;
        match kind {
            Kind::Next => (0..n).map(|s| succ[s].iter().all(|t| b[*t])).collect(),
            Kind::Until => {
                let mut win: Vec<bool> = b.to_vec();
                for _ in 0..=n {
                    win = (0..n).map(|s| b[s] || (a[s] && succ[s].iter().all(|t| win[*t]))).collect();
                }
                win
            }
            Kind::Always => {
                let mut safe: Vec<bool> = b.to_vec();
                for _ in 0..=n {
                    safe = (0..n).map(|s| b[s] && succ[s].iter().all(|t| safe[*t])).collect();
                }
                safe
            }
        }
    }

    fn strategic(&self, coalition: &str, kind: Kind, a: &[bool], b: &[bool]) -> Vec<bool> {
        let n = self.m.n;
        let members = self.members(coalition);
        let per_state: Vec<Vec<[Option<usize>; 2]>> = (0..n)
            .map(|s| {
                let mut moves = vec![[None, None]];
                for &ag in &members {
                    moves = moves
                        .into_iter()
                        .flat_map(|m| {
                            self.enabled(ag, s).into_iter().map(move |x| {
                                let mut m = m;
                                m[ag] = Some(x);
                                m
                            })
                        })
                        .collect();
                }
                moves
            })
            .collect();
        let total: usize = per_state.iter().map(|m| m.len()).product();
        let mut result = vec![false; n];
        for mut code in 0..total {
            let succ: Vec<Vec<usize>> = (0..n)
                .map(|s| {
                    let k = code % per_state[s].len();
                    code /= per_state[s].len();
                    self.outcomes(s, &per_state[s][k])
                })
                .collect();
            for (s, w) in self.holds_all(&succ, &kind, a, b).into_iter().enumerate() {
                result[s] |= w;
            }
        }
        result
    }

    fn eval(&self, f: &Formula) -> Vec<bool> {
        let n = self.m.n;
        match f {
            Formula::Atom(p) => self.m.props[p].clone(),
            Formula::Not(g) => self.eval(g).into_iter().map(|x| !x).collect(),
            Formula::And(l, r) => self.eval(l).iter().zip(self.eval(r)).map(|(x, y)| *x && y).collect(),
            Formula::Or(l, r) => self.eval(l).iter().zip(self.eval(r)).map(|(x, y)| *x || y).collect(),
            Formula::Next(c, g) => self.strategic(c, Kind::Next, &vec![true; n], &self.eval(g)),
            Formula::Eventually(c, g) => self.strategic(c, Kind::Until, &vec![true; n], &self.eval(g)),
            Formula::Always(c, g) => self.strategic(c, Kind::Always, &vec![true; n], &self.eval(g)),
            Formula::Until(c, l, r) => self.strategic(c, Kind::Until, &self.eval(l), &self.eval(r)),
        }
    }
}

enum Kind {
    Next,
    Until,
    Always,
}

fn oracle_equivalence() -> Result<String, String> {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let mut checked = 0;
    for model_no in 0..200 {
        let m = random_model(&mut rng, 6);
        let oracle = Oracle { m: &m };
        for _ in 0..8 {
            let inner = random_formula(&mut rng, 1);
            let op = rng.gen_range(0..4);
            let c = COALITIONS[rng.gen_range(0..4)].to_string();
            let f = match op {
                0 => Formula::Next(c, Box::new(inner)),
                1 => Formula::Eventually(c, Box::new(inner)),
                2 => Formula::Always(c, Box::new(inner)),
                _ => Formula::Until(c, Box::new(inner), Box::new(random_formula(&mut rng, 1))),
            };
            let want = oracle.eval(&f);
            let got = atl::satisfying_states(&m.cgm, &f);
            for (s, w) in want.iter().enumerate() {
                if got.contains(s) != *w {
                    return Err(format!("model {model_no}, {f}, state {s}: checker {}, oracle {w}", got.contains(s)));
                }
            }
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{checked} formulas on 200 models in {elapsed:.2?}"))
}

// 5

fn strategy_moves(cgm: &Cgm, strategy: &StrategyMap, s: usize) -> Option<Vec<usize>> {
    let choice = strategy.action(s)?;
    let mut out = Vec::new();
    for j in 0..cgm.num_joint() {
        let joint = cgm.joint_from_index(j);
        if strategy.coalition.iter().zip(choice).all(|(a, x)| joint.0[*a] == *x) {
            if let Some(t) = cgm.successor_index(s, j) {
                out.push(t);
            }
        }
    }
    (!out.is_empty()).then_some(out)
}

fn verify_strategy(cgm: &Cgm, strategy: &StrategyMap, sat: &StateSet) -> Result<(), String> {
    let n = cgm.num_states();
    for start in sat.iter() {
        let mut frontier: BTreeSet<usize> = [start].into();
        let rounds = match strategy.objective {
            Objective::Next => 1,
            Objective::Reach => n,
            Objective::Safety => n + 1,
        };
        for round in 0..=rounds {
            if strategy.objective == Objective::Reach {
                frontier.retain(|s| !strategy.goal.contains(*s));
            }
            if strategy.objective == Objective::Safety {
                if let Some(s) = frontier.iter().find(|s| !strategy.goal.contains(**s)) {
                    return Err(format!("safety strategy from s{start} leaves the invariant at s{s}"));
                }
            }
            if round == rounds || frontier.is_empty() {
                break;
            }
            let mut next = BTreeSet::new();
            for &s in &frontier {
                let moves = strategy_moves(cgm, strategy, s)
                    .ok_or_else(|| format!("strategy from s{start} has no move at s{s}"))?;
                next.extend(moves);
            }
            if strategy.objective == Objective::Next {
                if let Some(s) = next.iter().find(|s| !strategy.goal.contains(**s)) {
                    return Err(format!("next strategy from s{start} reaches s{s}"));
                }
                frontier.clear();
                break;
            }
            frontier = next;
        }
        if strategy.objective == Objective::Reach && !frontier.is_empty() {
            return Err(format!("reach strategy from s{start} misses the goal within {n} steps"));
        }
    }
    Ok(())
}

fn strategy_soundness() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(5);
    let mut count = 0;
    for model_no in 0..300 {
        let m = random_model(&mut rng, 40);
        let inner = random_formula(&mut rng, 1);
        let c = COALITIONS[rng.gen_range(0..4)].to_string();
        let f = match rng.gen_range(0..3) {
            0 => Formula::Eventually(c, Box::new(inner)),
            1 => Formula::Always(c, Box::new(inner)),
            _ => Formula::Until(c, Box::new(inner), Box::new(random_formula(&mut rng, 1))),
        };
        let (sat, strategy) = atl::synthesize(&m.cgm, &f);
        if let Some(strategy) = strategy {
            verify_strategy(&m.cgm, &strategy, &sat).map_err(|e| format!("model {model_no}, {f}: {e}"))?;
            count += 1;
        }
    }
    let cgm = goldseeker_cgm();
    let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
    let (sat, strategy) = atl::synthesize(&cgm, &spec.formulas[0]);
    let strategy = strategy.ok_or("no Goldseeker strategy")?;
    verify_strategy(&cgm, &strategy, &sat).map_err(|e| format!("Goldseeker: {e}"))?;
    Ok(format!("{} strategies verified", count + 1))
}

// 6

fn random_hulls() -> Result<String, String> {
    let libs = libraries();
    let library = PlanLibrary::new(libs.ba.clone())?;
    let domains = [("rowba", 4), ("columnba", 3), ("rowra", 4), ("columnra", 3)];
    let mut rng = StdRng::seed_from_u64(6);
    for i in 0..10_000 {
        let mut hull = Hull::new();
        hull.insert("treasuremined".into(), [0].into());
        for (name, size) in domains {
            let mask: u32 = rng.gen_range(1..(1 << size));
            hull.insert(name.into(), (0..size).filter(|v| mask >> v & 1 == 1).map(i64::from).collect());
        }
        let found = library.matches(&hull, "gettreasure");
        if found.len() != 1 {
            return Err(format!("hull #{i} {hull:?} matches {} plans", found.len()));
        }
    }
    Ok("10000 hulls, one plan each".into())
}

// 7

fn replay_golden() -> Result<String, String> {
    let libs = libraries();
    let script = atlbdi_core::runtime::parse_script(fixtures::REPLAY_SCRIPT)?;
    let trace = run_episode(&EpisodeConfig {
        map: GridMap::goldseeker(),
        starts: DEFAULT_STARTS,
        libraries: [
            Some(PlanLibrary::new(libs.ba.clone())?),
            Some(PlanLibrary::new(libs.ra.clone())?),
        ],
        goal: "gettreasure".into(),
        mode: Mode::Replay(script),
        max_steps: 100,
    });
    if trace.steps.len() < 4 {
        return Err(format!("only {} steps", trace.steps.len()));
    }
    let set = |v: &[i64]| v.iter().copied().collect::<BTreeSet<i64>>();
    let hull = |k: usize, agent: usize, var: &str| trace.steps[k].agents[agent].hull[var].clone();
    if hull(0, 0, "rowba") != set(&[1, 2]) || hull(0, 0, "columnba") != set(&[0]) {
        return Err("perception 1: BA is not unsure between (1,0) and (2,0)".into());
    }
    if hull(1, 0, "rowba") != set(&[2]) || hull(1, 0, "columnba") != set(&[0]) {
        return Err("perception 2: BA does not know it is at (2,0)".into());
    }
    for (k, rec) in trace.steps.iter().enumerate().take(4) {
        let (r, c) = rec.world.pos[1];
        if hull(k, 1, "rowra") != set(&[r]) || hull(k, 1, "columnra") != set(&[c]) {
            return Err(format!("perception {}: RA is not certain of ({r},{c})", k + 1));
        }
    }
    if trace.steps[1].world.pos[1] != (0, 2) {
        return Err(format!("RA at {:?} after step 1", trace.steps[1].world.pos[1]));
    }
    if hull(2, 0, "rowra").contains(&3) || hull(2, 0, "columnra").contains(&0) {
        return Err("perception 3: BA keeps row 3 or column 0 for RA".into());
    }
    let rec = &trace.steps[3];
    if rec.agents[1].action != Some(Action::Right) || rec.next.pos[1] != rec.world.pos[1] {
        return Err(format!("perception 4: RA plays {:?} from {:?} to {:?}", rec.agents[1].action, rec.world.pos[1], rec.next.pos[1]));
    }
    Ok("all four perceptions".into())
}

// 8

fn closed_loop() -> Result<String, String> {
    let libs = libraries();
    let mut config = EpisodeConfig {
        map: GridMap::goldseeker(),
        starts: DEFAULT_STARTS,
        libraries: [
            Some(PlanLibrary::new(libs.ba.clone())?),
            Some(PlanLibrary::new(libs.ra.clone())?),
        ],
        goal: "gettreasure".into(),
        mode: Mode::Closed,
        max_steps: 100,
    };
    let outcome = run_episode(&config).outcome;
    let Outcome::Mined(steps) = outcome else {
        return Err(format!("fixture starts: {outcome:?}"));
    };
    let cells = config.map.free_cells();
    let (mut ok, mut total) = (0, 0);
    for a in &cells {
        for b in cells.iter().filter(|b| *b != a) {
            config.starts = [*a, *b];
            total += 1;
            if matches!(run_episode(&config).outcome, Outcome::Mined(_)) {
                ok += 1;
            }
        }
    }
    Ok(format!("fixture starts mined at step {steps}; {ok}/{total} start pairs succeed"))
}

// 9

fn emitter_fidelity() -> Result<String, String> {
    let libs = libraries();
    let known = |v: &str, x: &str| GuardAtom::Known {
        var: v.into(),
        value: x.into(),
    };
    let poss = |v: &str, x: &str| GuardAtom::Possible {
        var: v.into(),
        value: x.into(),
    };
    let expected = vec![
        known("treasuremined", "false"),
        known("columnba", "0"),
        known("rowba", "2"),
        poss("columnra", "1"),
        poss("columnra", "2"),
        poss("rowra", "0"),
        poss("rowra", "1"),
        poss("rowra", "2"),
        poss("rowra", "3"),
    ];
    let plan = libs
        .ba
        .iter()
        .find(|p| {
            let mut a = p.guard.clone();
            let mut b = expected.clone();
            a.sort();
            b.sort();
            a == b
        })
        .ok_or("no plan with the sample guard")?;
    if plan.guard != expected {
        return Err(format!("guard order {:?}", plan.guard));
    }
    let map = GridMap::goldseeker();
    for ra in map.free_cells().into_iter().filter(|c| c.1 >= 1) {
        let mut world = WorldState::start([(2, 0), ra]);
        for name in &plan.body {
            let action = Action::parse(name).ok_or(format!("unknown action {name}"))?;
            let mine = action == Action::Mine;
            world = step(&map, &world, [Some(action), mine.then_some(Action::Mine)]);
        }
        if world.pos[0] != map.treasure || !world.mined[0] {
            return Err(format!("body {:?} leaves BA at {:?} with RA at {ra:?}", plan.body, world.pos[0]));
        }
    }
    let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
    let cfg = config::parse_config(fixtures::GOLDSEEKER_BA_CONFIG).unwrap();
    let (forge_cfg, goals) = config::resolve(&cfg, &spec).unwrap();
    let again = emit(&generate_plans(&spec, &goals, &forge_cfg).unwrap().agentspeak_plans()).unwrap();
    if again != libs.ba_text {
        return Err("second generation differs".into());
    }
    let forge = Forge::new(&spec, &goals, &forge_cfg).unwrap();
    if forge.free_vars().len() != 4 {
        return Err(format!("{} free variables", forge.free_vars().len()));
    }
    Ok(format!("body {}", plan.body.join("; ")))
}

// 10

fn round_trip() -> Result<String, String> {
    let libs = libraries();
    for (plans, text) in [(&libs.ba, &libs.ba_text), (&libs.ra, &libs.ra_text)] {
        let emitted = emit(plans).map_err(|e| e.to_string())?;
        if &emitted != text {
            return Err("emit(load(text)) differs from text".into());
        }
        let reloaded = load(&emitted).map_err(|e| e.to_string())?;
        if &reloaded != plans {
            return Err("load(emit(plans)) differs from plans".into());
        }
    }
    Ok(format!("{} + {} plans", libs.ba.len(), libs.ra.len()))
}

type Criterion = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("plan count", plan_count),
        ("belief-count identity", belief_count_identity),
        ("two-state fixtures", two_state_fixtures),
        ("oracle equivalence", oracle_equivalence),
        ("strategy soundness", strategy_soundness),
        ("mutual exclusivity", random_hulls),
        ("replay golden", replay_golden),
        ("closed-loop success", closed_loop),
        ("emitter fidelity", emitter_fidelity),
        ("round trip", round_trip),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

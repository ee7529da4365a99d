use std::sync::OnceLock;

use atlbdi_core::agentspeak::Plan;
use atlbdi_core::fixtures;
use atlbdi_core::forge::{generate_plans, ForgeConfig, GoalSpec};
use atlbdi_core::ispl::{parse_model, VarRef};
use atlbdi_core::runtime::{
    format_trace, initial_belief, legal_actions, line_of_sight, parse_script, perceive, project_hull, render_hull,
    run_episode, step, update_belief, Action, EpisodeConfig, GridMap, Mode, Outcome, PlanLibrary, RuntimeError, Thing,
    WorldState, DEFAULT_STARTS,
};
use proptest::prelude::*;

fn library(agent: &str) -> Vec<Plan> {
    let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
    let cfg = ForgeConfig {
        agent: agent.into(),
        ignore_uniform: true,
        fixed: [(
            VarRef {
                owner: "Environment".into(),
                name: "treasureMined".into(),
            },
            0,
        )]
        .into(),
        initials: fixtures::goldseeker_initials(),
        horizon: None,
    };
    let goals = [GoalSpec {
        name: "gettreasure".into(),
        formula: spec.formulas[0].clone(),
        successor: None,
    }];
    generate_plans(&spec, &goals, &cfg).unwrap().agentspeak_plans()
}

fn libraries() -> &'static [Vec<Plan>; 2] {
    static LIBS: OnceLock<[Vec<Plan>; 2]> = OnceLock::new();
    LIBS.get_or_init(|| [library("BA"), library("RA")])
}

fn config(mode: Mode) -> EpisodeConfig {
    let [ba, ra] = libraries();
    EpisodeConfig {
        map: GridMap::goldseeker(),
        starts: DEFAULT_STARTS,
        libraries: [
            Some(PlanLibrary::new(ba.clone()).unwrap()),
            Some(PlanLibrary::new(ra.clone()).unwrap()),
        ],
        goal: "gettreasure".into(),
        mode,
        max_steps: 100,
    }
}

#[test]
fn sight_is_cut_by_obstacles() {
    let map = GridMap::goldseeker();
    let seen = line_of_sight(&map, (0, 1));
    assert!(seen.contains(&(1, 1)));
    assert!(!seen.contains(&(2, 1)));
    assert!(seen.contains(&(0, 0)) && seen.contains(&(0, 2)));
    assert_eq!(line_of_sight(&map, (3, 0)).len(), 6);
}

#[test]
fn percepts_are_relative() {
    let map = GridMap::goldseeker();
    let world = WorldState::start([(3, 0), (3, 2)]);
    let p = perceive(&map, &world, 0);
    assert_eq!(p.cells[&(0, 2)], [Thing::Treasure, Thing::Agent(1)]);
    assert_eq!(p.cells.len(), 1);
    let world = WorldState::start([(2, 0), (0, 0)]);
    let p = perceive(&map, &world, 0);
    assert_eq!(p.cells[&(0, 1)], [Thing::Obstacle]);
    assert_eq!(p.cells[&(-2, 0)], [Thing::Agent(1)]);
    assert_eq!(p.cells.len(), 2);
}

#[test]
fn replay_trace_text() {
    let script = parse_script(fixtures::REPLAY_SCRIPT).unwrap();
    let trace = run_episode(&config(Mode::Replay(script)));
    let text = format_trace(&trace);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step 1");
    assert_eq!(lines[1], "  world: BA=(1,0) RA=(0,1) mined=false,false treasureMined=false");
    assert_eq!(
        lines[2],
        "  BA hull: columnba(0) & treasuremined(false) & poss(columnra(1)) & poss(columnra(2)) & poss(rowba(1)) & poss(rowba(2)) & poss(rowra(0)) & poss(rowra(1)) & poss(rowra(2)) & poss(rowra(3))"
    );
    assert_eq!(lines[4], "  BA act: down");
    assert_eq!(lines[7], "  RA act: right");
    assert!(text.contains("\nstep 2\n  world: BA=(2,0) RA=(0,2)"));
    assert!(text.contains(
        "  RA hull: columnra(2) & rowra(0) & treasuremined(false) & poss(columnba(0)) & poss(columnba(1)) & poss(rowba(1)) & poss(rowba(2)) & poss(rowba(3))"
    ));
    assert_eq!(trace.steps.len(), 4);
    assert!(text.ends_with("outcome: stopped after 4 steps\n"), "{text}");
}

#[test]
fn closed_loop_is_deterministic() {
    let a = format_trace(&run_episode(&config(Mode::Closed)));
    let b = format_trace(&run_episode(&config(Mode::Closed)));
    assert_eq!(a, b);
    assert!(a.ends_with("outcome: treasure mined at step 8\n"), "{a}");
}

#[test]
fn step_limit_is_reported() {
    let mut cfg = config(Mode::Closed);
    cfg.max_steps = 2;
    let trace = run_episode(&cfg);
    assert_eq!(trace.outcome, Outcome::StepLimit);
    assert_eq!(trace.steps.len(), 2);
}

#[test]
fn missing_plan_fails() {
    let mut cfg = config(Mode::Closed);
    let one = libraries()[0][..1].to_vec();
    cfg.libraries[0] = Some(PlanLibrary::new(one).unwrap());
    let trace = run_episode(&cfg);
    assert!(matches!(trace.outcome, Outcome::Failed(RuntimeError::NoPlan { .. })), "{:?}", trace.outcome);
}

#[test]
fn obstacle_start_is_rejected() {
    let mut cfg = config(Mode::Closed);
    cfg.starts = [(1, 1), (0, 0)];
    let trace = run_episode(&cfg);
    assert!(matches!(trace.outcome, Outcome::Failed(RuntimeError::BadStart(_))));
}

#[test]
fn script_errors() {
    assert!(parse_script("down\n").is_err());
    assert!(parse_script("[XA]\n").is_err());
    assert!(parse_script("[BA]\njump\n").unwrap_err().contains("line 2"));
    let [ba, ra] = parse_script("# c\n[BA]\nmine\n\n[RA]\nup # x\n").unwrap();
    assert_eq!((ba, ra), (vec![Action::Mine], vec![Action::Up]));
}

fn legal_or_up(world: &WorldState, agent: usize, i: usize) -> Action {
    let a = Action::ALL[i];
    if legal_actions(world, agent).contains(&a) {
        a
    } else {
        Action::Up
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beliefs_stay_sound(
        a in 0..10usize,
        b in 0..10usize,
        moves in prop::collection::vec((0..5usize, 0..5usize), 0..8),
    ) {
        let map = GridMap::goldseeker();
        let cells = map.free_cells();
        prop_assume!(a != b);
        let mut world = WorldState::start([cells[a], cells[b]]);
        let mut beliefs = [0, 1].map(|i| {
            update_belief(&initial_belief(&map, i), None, &perceive(&map, &world, i), &map).unwrap()
        });
        for (x, y) in moves {
            let acts = [legal_or_up(&world, 0, x), legal_or_up(&world, 1, y)];
            world = step(&map, &world, acts.map(Some));
            for i in 0..2 {
                beliefs[i] = update_belief(&beliefs[i], Some(acts[i]), &perceive(&map, &world, i), &map).unwrap();
                prop_assert!(beliefs[i].worlds.contains(&world));
                let hull = project_hull(&beliefs[i]);
                let key = ["rowba", "rowra"][i];
                prop_assert!(hull[key].contains(&world.pos[i].0));
                prop_assert!(!render_hull(&hull).is_empty());
            }
        }
    }
}

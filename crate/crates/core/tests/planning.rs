use std::collections::BTreeMap;

use atlbdi_core::agentspeak::{emit, load, render_guard};
use atlbdi_core::fixtures;
use atlbdi_core::forge::{enumerate_beliefs, generate_plans, Forge, ForgeConfig, GoalSpec, Provenance};
use atlbdi_core::ispl::{parse_formula, parse_model, Domain, ModelSpec, VarRef};

const DOOR: &str = "\
Agent Environment
    Vars:
        x : 0..2;
        at : boolean;
    end Vars
    Evolution:
        at = true if A.Action = push and x = 0;
        at = true if A.Action = pull and x = 1;
    end Evolution
end Agent

Agent A
    Actions = {push, pull};
end Agent

Evaluation
    done if Environment.at = true;
    never if Environment.at = true and Environment.at = false;
end Evaluation

Groups
    g = {A};
end Groups

Formulae
    <g> F done;
    <g> F never;
end Formulae
";

fn door() -> ModelSpec {
    parse_model(DOOR).unwrap()
}

fn door_config(ignore_uniform: bool) -> ForgeConfig {
    ForgeConfig {
        agent: "A".into(),
        ignore_uniform,
        fixed: [(
            VarRef {
                owner: "Environment".into(),
                name: "at".into(),
            },
            0,
        )]
        .into(),
        initials: BTreeMap::new(),
        horizon: None,
    }
}

fn goal(spec: &ModelSpec, i: usize, name: &str) -> GoalSpec {
    GoalSpec {
        name: name.into(),
        formula: spec.formulas[i].clone(),
        successor: None,
    }
}

#[test]
fn door_plans_by_belief() {
    let spec = door();
    let out = generate_plans(&spec, &[goal(&spec, 0, "open")], &door_config(true)).unwrap();
    let table: Vec<(String, String, Provenance)> = out
        .plans
        .iter()
        .map(|p| (render_guard(&p.plan.guard), p.plan.body.join(";"), p.provenance.clone()))
        .collect();
    let row = |g: &str, b: &str, p: Provenance| (g.to_string(), b.to_string(), p);
    assert_eq!(
        table,
        [
            row("at(false) & x(0)", "push", Provenance::NonUniform),
            row("at(false) & x(1)", "pull", Provenance::NonUniform),
            row("at(false) & poss(x(0)) & poss(x(1))", "push", Provenance::NonUniform),
            row("at(false) & poss(x(0)) & poss(x(2))", "push", Provenance::Prev(vec![(0, 0)])),
            row("at(false) & poss(x(1)) & poss(x(2))", "pull", Provenance::Prev(vec![(0, 1)])),
            row("at(false) & poss(x(0)) & poss(x(1)) & poss(x(2))", "push", Provenance::Prev(vec![(0, 0)])),
        ]
    );
    assert_eq!(out.reports[0].unachievable, ["at(false) & x(2)"]);
    assert_eq!(out.reports[0].iterations, 7);
    assert!(out.report_text().starts_with("unachievable open: at(false) & x(2)\n"), "{}", out.report_text());
}

#[test]
fn door_uniform_search() {
    let spec = door();
    let out = generate_plans(&spec, &[goal(&spec, 0, "open")], &door_config(false)).unwrap();
    let provenance: Vec<&Provenance> = out.plans.iter().map(|p| &p.provenance).collect();
    assert_eq!(provenance[0], &Provenance::Uniform);
    assert_eq!(provenance[1], &Provenance::Uniform);
    assert!(matches!(provenance[2], Provenance::NonUniform));
}

#[test]
fn unsatisfiable_goal_has_no_plans() {
    let spec = door();
    let out = generate_plans(&spec, &[goal(&spec, 1, "impossible")], &door_config(true)).unwrap();
    assert!(out.plans.is_empty());
    assert_eq!(out.reports[0].unachievable.len(), 7);
    assert_eq!(out.reports[0].summary().split(',').nth(1).unwrap().trim(), "7 unachievable");
}

#[test]
fn goals_run_in_order_with_successors() {
    let spec = door();
    let mut first = goal(&spec, 0, "open");
    first.successor = Some("rest".into());
    let out = generate_plans(&spec, &[first, goal(&spec, 1, "rest")], &door_config(true)).unwrap();
    assert_eq!(out.reports.len(), 2);
    assert!(out.plans.iter().all(|p| p.plan.goal == "open" && p.plan.successor.as_deref() == Some("rest")));
    let text = emit(&out.agentspeak_plans()).unwrap();
    assert!(text.contains("!rest."), "{text}");
    assert_eq!(load(&text).unwrap(), out.agentspeak_plans());
}

#[test]
fn unknown_agent_is_rejected() {
    let spec = door();
    let mut cfg = door_config(true);
    cfg.agent = "B".into();
    assert!(generate_plans(&spec, &[goal(&spec, 0, "open")], &cfg).is_err());
}

#[test]
fn beliefs_come_in_tiers() {
    let free = [
        (0, Domain::Range { lo: 0, hi: 2 }),
        (1, Domain::Boolean),
        (2, Domain::Range { lo: 5, hi: 6 }),
    ];
    let beliefs = enumerate_beliefs(&free);
    assert_eq!(beliefs.len(), 7 * 3 * 3);
    let known: Vec<usize> = beliefs.iter().map(|b| b.known.len()).collect();
    assert!(known.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(beliefs[0].known, [(0, 0), (1, 0), (2, 5)].into());
    assert_eq!(beliefs.last().unwrap().possible.len(), 3);
    let mut sorted = beliefs.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), beliefs.len());
    assert!(beliefs.iter().all(|b| b.possible.values().all(|s| s.len() >= 2)));
}

#[test]
fn goldseeker_forge_layout() {
    let spec = parse_model(fixtures::GOLDSEEKER_MODEL).unwrap();
    let cfg = ForgeConfig {
        agent: "BA".into(),
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
        formula: parse_formula("<g1> F(BATreasure and RATreasure and !BAMined and !RAMined and (<g1> X(treasureTaken)))", &spec)
            .unwrap(),
        successor: None,
    }];
    assert_eq!(goals[0].formula, spec.formulas[0]);
    let forge = Forge::new(&spec, &goals, &cfg).unwrap();
    assert_eq!(forge.free_vars().len(), 4);
    let beliefs = forge.beliefs();
    assert_eq!(beliefs.len(), 15 * 7 * 15 * 7);
    let first = &beliefs[0];
    assert_eq!(
        render_guard(&forge.guard(first)),
        "treasuremined(false) & columnba(0) & columnra(0) & rowba(0) & rowra(0)"
    );
    let (body, provenance) = forge.plan_for(0, first).unwrap().unwrap();
    assert_eq!(provenance, Provenance::NonUniform);
    assert_eq!(body.last().map(String::as_str), Some("mine"));
}

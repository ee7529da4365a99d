//! Browser bindings for the Goldseeker demo page. Every export returns a JSON string.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use atlbdi_core::agentspeak::{emit_plan, Plan};
use atlbdi_core::atl;
use atlbdi_core::cgm::build_cgm;
use atlbdi_core::fixtures;
use atlbdi_core::forge::{generate_plans, ForgeConfig, GoalSpec};
use atlbdi_core::ispl::{parse_formula, parse_model, VarRef};
use atlbdi_core::runtime::{format_trace, run_episode, EpisodeConfig, GridMap, Hull, Mode, Outcome, PlanLibrary, AGENTS};

thread_local! {
    static LIBRARIES: OnceCell<[PlanLibrary; 2]> = const { OnceCell::new() };
}

fn build_library(agent: &str) -> PlanLibrary {
    let spec = parse_model(fixtures::GOLDSEEKER_MODEL).expect("fixture parses");
    let config = ForgeConfig {
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
    let plans: Vec<Plan> = generate_plans(&spec, &goals, &config).expect("fixture generates").agentspeak_plans();
    PlanLibrary::new(plans).expect("generated plans are consistent")
}

fn with_libraries<T>(f: impl FnOnce(&[PlanLibrary; 2]) -> T) -> T {
    LIBRARIES.with(|cell| f(cell.get_or_init(|| [build_library("BA"), build_library("RA")])))
}

fn error(message: impl ToString) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// Checks `formula` against the model text from every state; the Goldseeker
/// model is used when `model` is empty.
#[wasm_bindgen]
pub fn check_formula(model: &str, formula: &str) -> String {
    let text = if model.trim().is_empty() { fixtures::GOLDSEEKER_MODEL } else { model };
    let spec = match parse_model(text) {
        Ok(s) => s,
        Err(e) => return error(e.render("model")),
    };
    let f = match parse_formula(formula, &spec) {
        Ok(f) => f,
        Err(e) => return error(format!("formula:{e}")),
    };
    let initials: BTreeMap<VarRef, i64> = spec
        .variables()
        .into_iter()
        .filter(|q| !q.is_environment())
        .map(|q| (q.var, q.domain.lo()))
        .collect();
    let cgm = match build_cgm(&spec, &initials) {
        Ok(c) => c,
        Err(e) => return error(e),
    };
    let (sat, strategy) = atl::synthesize(&cgm, &f);
    let witness = match (strategy, sat.first()) {
        (Some(s), Some(start)) => atl::witness_trace(&cgm, &s, start, 20).unwrap_or_else(|e| e.to_string()),
        _ => String::new(),
    };
    let sample: Vec<String> = sat.iter().take(12).map(|s| cgm.state_label(s)).collect();
    json!({
        "formula": f.to_string(),
        "states": cgm.num_states(),
        "satisfying": sat.len(),
        "sample": sample,
        "witness": witness,
    })
    .to_string()
}

/// Runs the closed loop from the given start cells with both generated libraries.
#[wasm_bindgen]
pub fn simulate_goldseeker(ba_row: i32, ba_col: i32, ra_row: i32, ra_col: i32) -> String {
    let map = GridMap::goldseeker();
    with_libraries(|libs| {
        let config = EpisodeConfig {
            map: map.clone(),
            starts: [(ba_row as i64, ba_col as i64), (ra_row as i64, ra_col as i64)],
            libraries: [Some(libs[0].clone()), Some(libs[1].clone())],
            goal: "gettreasure".into(),
            mode: Mode::Closed,
            max_steps: 100,
        };
        let trace = run_episode(&config);
        let mut frames: Vec<Value> = trace
            .steps
            .iter()
            .map(|s| {
                json!({
                    "ba": [s.world.pos[0].0, s.world.pos[0].1],
                    "ra": [s.world.pos[1].0, s.world.pos[1].1],
                    "actions": s.agents.iter().map(|a| a.action.map_or("idle".to_string(), |x| x.to_string())).collect::<Vec<_>>(),
                })
            })
            .collect();
        if let Some(last) = trace.steps.last() {
            frames.push(json!({
                "ba": [last.next.pos[0].0, last.next.pos[0].1],
                "ra": [last.next.pos[1].0, last.next.pos[1].1],
                "actions": [],
            }));
        }
        let outcome = match &trace.outcome {
            Outcome::Mined(k) => format!("treasure mined at step {k}"),
            Outcome::StepLimit => "step limit reached".into(),
            Outcome::Failed(e) => format!("failed: {e}"),
        };
        json!({
            "rows": map.rows,
            "cols": map.cols,
            "obstacles": map.obstacles.iter().map(|c| [c.0, c.1]).collect::<Vec<_>>(),
            "treasure": [map.treasure.0, map.treasure.1],
            "frames": frames,
            "outcome": outcome,
            "trace": format_trace(&trace),
        })
        .to_string()
    })
}

/// Selects the plan for `agent` (`BA` or `RA`) whose guard matches `hull`, a JSON
/// object from variable name to the list of values considered possible.
#[wasm_bindgen]
pub fn plan_for_hull(agent: &str, hull: &str) -> String {
    let Some(slot) = AGENTS.iter().position(|a| *a == agent) else {
        return error(format!("unknown agent `{agent}`"));
    };
    let parsed: BTreeMap<String, Vec<Value>> = match serde_json::from_str(hull) {
        Ok(h) => h,
        Err(e) => return error(format!("hull: {e}")),
    };
    let mut hull = Hull::new();
    for (var, values) in parsed {
        let set: Option<BTreeSet<i64>> = values
            .iter()
            .map(|v| v.as_i64().or_else(|| v.as_bool().map(i64::from)))
            .collect();
        match set {
            Some(s) if !s.is_empty() => {
                hull.insert(var.to_lowercase(), s);
            }
            _ => return error(format!("`{var}` needs a non-empty list of integers or booleans")),
        }
    }
    hull.entry("treasuremined".into()).or_insert_with(|| [0].into());
    with_libraries(|libs| {
        let lib = &libs[slot];
        let found = lib.matches(&hull, "gettreasure");
        let plans: Vec<String> = found
            .iter()
            .filter_map(|i| emit_plan(&lib.plans()[*i]).ok())
            .collect();
        json!({ "library": lib.len(), "matches": found.len(), "plans": plans }).to_string()
    })
}

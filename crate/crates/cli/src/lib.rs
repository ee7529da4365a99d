//! `atlbdi` command-line driver.

pub mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use atlbdi_core::agentspeak::{emit, load, Plan};
use atlbdi_core::atl;
use atlbdi_core::cgm::{build_cgm, StateSet};
use atlbdi_core::forge::generate_plans;
use atlbdi_core::ispl::{parse_formula, parse_model, Formula, ModelSpec};
use atlbdi_core::runtime::{self, EpisodeConfig, GridMap, Mode, Outcome, PlanLibrary, AGENTS, DEFAULT_STARTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_GENERATION: i32 = 2;
pub const EXIT_SIMULATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "atlbdi", version, about = "ATL strategy synthesis and AgentSpeak plan generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Closed,
    Replay,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a model file.
    Parse {
        #[arg(long)]
        model: PathBuf,
    },
    /// Check one formula from a set of initial states.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// Formula text, or the index of a formula in the model.
        #[arg(long)]
        formula: String,
        /// Initial values as `var=value` or `var=v1,v2`; unlisted environment
        /// variables range over their domain.
        #[arg(long, num_args = 1..)]
        init: Vec<String>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Generate one plan library per configuration.
    Genplans {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, required_unless_present = "interactive")]
        config: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Ask for the configuration on standard input.
        #[arg(long)]
        interactive: bool,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Run the Goldseeker world with plan libraries.
    Simulate {
        /// Plan libraries as `AGENT=path`.
        #[arg(long, num_args = 1..)]
        plans: Vec<String>,
        #[arg(long, value_enum, default_value = "closed")]
        mode: SimMode,
        #[arg(long)]
        script: Option<PathBuf>,
        /// Start cells as `AGENT=row,col`.
        #[arg(long, num_args = 1..)]
        starts: Vec<String>,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        /// Goal adopted at the start; defaults to the first goal in the libraries.
        #[arg(long)]
        goal: Option<String>,
        /// Also run every pair of distinct free start cells and print the success count.
        #[arg(long)]
        all_starts: bool,
    },
}

/// Output streams for a command.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    pub input: &'a mut dyn BufRead,
}

struct Failure(i32, String);

type CmdResult = Result<(), Failure>;

fn fail<T>(code: i32, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(code, msg.into()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).or_else(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ModelSpec, Failure> {
    let text = read(path)?;
    parse_model(&text).or_else(|e| fail(EXIT_VALIDATION, e.render(&path.display().to_string())))
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli, io: Io) -> i32 {
    let result = match cli.command {
        Command::Parse { model } => cmd_parse(&model, io.out),
        Command::Check {
            model,
            formula,
            init,
            horizon,
        } => cmd_check(&model, &formula, &init, horizon, io.out),
        Command::Genplans {
            model,
            config,
            out,
            interactive,
            horizon,
        } => cmd_genplans(&model, &config, &out, interactive, horizon, io.input, io.out),
        Command::Simulate {
            plans,
            mode,
            script,
            starts,
            max_steps,
            goal,
            all_starts,
        } => cmd_simulate(&plans, mode, script.as_deref(), &starts, max_steps, goal, all_starts, io.out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            if !msg.is_empty() {
                let _ = writeln!(io.err, "{}", msg.trim_end());
            }
            code
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .or_else(|e| fail(EXIT_VALIDATION, format!("cannot write output: {e}")))
}

fn cmd_parse(model: &Path, out: &mut dyn Write) -> CmdResult {
    let spec = load_model(model)?;
    let summary = format!(
        "{}, {}, {}, {}, {}\n",
        plural(spec.environment_vars.len(), "environment var"),
        plural(spec.agents.len(), "agent"),
        plural(spec.groups.len(), "group"),
        plural(spec.propositions.len(), "proposition"),
        plural(spec.formulas.len(), "formula"),
    );
    write_out(out, &summary)
}

fn formula_arg(spec: &ModelSpec, text: &str) -> Result<Formula, Failure> {
    if let Ok(i) = text.trim().parse::<usize>() {
        return spec
            .formulas
            .get(i)
            .cloned()
            .ok_or_else(|| Failure(EXIT_VALIDATION, format!("the model has no formula {i}")));
    }
    parse_formula(text, spec).or_else(|e| fail(EXIT_VALIDATION, format!("formula:{e}")))
}

fn cmd_check(model: &Path, formula: &str, init: &[String], horizon: Option<usize>, out: &mut dyn Write) -> CmdResult {
    let spec = load_model(model)?;
    let f = formula_arg(&spec, formula)?;
    let vars = spec.variables();
    let mut sets: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    for item in init {
        let (name, values) = item
            .split_once('=')
            .ok_or_else(|| Failure(EXIT_VALIDATION, format!("expected `var=value` in `{item}`")))?;
        let name = name.trim();
        let hits: Vec<usize> = vars
            .iter()
            .enumerate()
            .filter(|(_, q)| q.var.to_string() == name || q.var.name == name)
            .map(|(i, _)| i)
            .collect();
        let idx = match hits.as_slice() {
            [one] => *one,
            [] => return fail(EXIT_VALIDATION, format!("undeclared variable `{name}`")),
            _ => return fail(EXIT_VALIDATION, format!("`{name}` is ambiguous; qualify it as Owner.{name}")),
        };
        let domain = vars[idx].domain;
        let parsed = values
            .split(',')
            .map(|v| atlbdi_core::agentspeak::parse_literal(v.trim()).filter(|x| domain.contains(*x)))
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| Failure(EXIT_VALIDATION, format!("invalid value for `{name}` in `{item}`")))?;
        sets.insert(idx, parsed);
    }
    let initials = vars
        .iter()
        .enumerate()
        .filter(|(_, q)| !q.is_environment())
        .map(|(i, q)| {
            let v = sets.get(&i).map_or(q.domain.lo(), |vals| vals[0]);
            (q.var.clone(), v)
        })
        .collect();
    let cgm = build_cgm(&spec, &initials).or_else(|e| fail(EXIT_VALIDATION, e.to_string()))?;
    let mut initial = StateSet::empty(cgm.num_states());
    for s in 0..cgm.num_states() {
        let vals = cgm.decode(s);
        let ok = vars.iter().enumerate().all(|(i, q)| match sets.get(&i) {
            Some(allowed) => allowed.contains(&vals[i]),
            None => q.is_environment() || cgm.initial_locals().get(&i) == Some(&vals[i]),
        });
        if ok {
            initial.insert(s);
        }
    }
    let result = atl::check(&cgm, &f, &initial);
    if !result.holds {
        write_out(out, &format!("FALSE: {f}\n"))?;
        return fail(EXIT_GENERATION, "");
    }
    let mut text = format!("TRUE: {f}\n");
    if let (Some(strategy), Some(start)) = (&result.strategy, initial.first()) {
        text.push_str(&format!("witness from s{start} ({}):\n", cgm.state_label(start)));
        let trace = atl::witness_trace(&cgm, strategy, start, horizon.unwrap_or(cgm.num_states()))
            .or_else(|e| fail(EXIT_GENERATION, e.to_string()))?;
        text.push_str(&trace);
    }
    write_out(out, &text)
}

fn cmd_genplans(
    model: &Path,
    configs: &[PathBuf],
    out_dir: &Path,
    interactive: bool,
    horizon: Option<usize>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> CmdResult {
    let spec = load_model(model)?;
    let mut runs = Vec::new();
    for path in configs {
        let text = read(path)?;
        let cfg = config::parse_config(&text).or_else(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
        runs.push(cfg);
    }
    if interactive {
        let cfg = config::prompt_config(&spec, input, out).or_else(|e| fail(EXIT_VALIDATION, e.to_string()))?;
        writeln!(out).ok();
        runs.push(cfg);
    }
    let mut resolved = Vec::new();
    for cfg in &runs {
        let (mut forge_cfg, goals) = config::resolve(cfg, &spec).or_else(|e| fail(EXIT_VALIDATION, e.to_string()))?;
        if horizon.is_some() {
            forge_cfg.horizon = horizon;
        }
        resolved.push((forge_cfg, goals));
    }
    fs::create_dir_all(out_dir).or_else(|e| fail(EXIT_VALIDATION, format!("{}: {e}", out_dir.display())))?;
    for (forge_cfg, goals) in resolved {
        let output = generate_plans(&spec, &goals, &forge_cfg).or_else(|e| fail(EXIT_GENERATION, e.to_string()))?;
        let text = emit(&output.agentspeak_plans()).or_else(|e| fail(EXIT_GENERATION, e.to_string()))?;
        let asl = out_dir.join(format!("{}.asl", forge_cfg.agent));
        let report = out_dir.join(format!("{}.report", forge_cfg.agent));
        fs::write(&asl, text).or_else(|e| fail(EXIT_GENERATION, format!("{}: {e}", asl.display())))?;
        fs::write(&report, output.report_text()).or_else(|e| fail(EXIT_GENERATION, format!("{}: {e}", report.display())))?;
        let mut lines = format!("{}: {} plans -> {}\n", forge_cfg.agent, output.plans.len(), asl.display());
        for r in &output.reports {
            lines.push_str(&r.summary());
            lines.push('\n');
        }
        write_out(out, &lines)?;
    }
    Ok(())
}

fn agent_slot(name: &str) -> Result<usize, Failure> {
    AGENTS
        .iter()
        .position(|a| *a == name)
        .ok_or_else(|| Failure(EXIT_VALIDATION, format!("unknown agent `{name}`; expected BA or RA")))
}

fn parse_starts(items: &[String], map: &GridMap) -> Result<[runtime::Cell; 2], Failure> {
    let mut starts = DEFAULT_STARTS;
    for item in items {
        let bad = || Failure(EXIT_VALIDATION, format!("expected `AGENT=row,col` in `{item}`"));
        let (name, cell) = item.split_once('=').ok_or_else(bad)?;
        let (r, c) = cell.split_once(',').ok_or_else(bad)?;
        let cell = (r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?);
        if !map.is_free(cell) {
            return fail(EXIT_VALIDATION, format!("start {cell:?} for {name} is not a free cell"));
        }
        starts[agent_slot(name.trim())?] = cell;
    }
    Ok(starts)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    plans: &[String],
    mode: SimMode,
    script: Option<&Path>,
    starts: &[String],
    max_steps: usize,
    goal: Option<String>,
    all_starts: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let map = GridMap::goldseeker();
    let mut libraries: [Option<PlanLibrary>; 2] = [None, None];
    let mut first_goal = None;
    for item in plans {
        let (name, path) = item
            .split_once('=')
            .ok_or_else(|| Failure(EXIT_VALIDATION, format!("expected `AGENT=path` in `{item}`")))?;
        let slot = agent_slot(name.trim())?;
        let path = Path::new(path.trim());
        let parsed: Vec<Plan> = load(&read(path)?).or_else(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
        if first_goal.is_none() {
            first_goal = parsed.first().map(|p| p.goal.clone());
        }
        libraries[slot] = Some(PlanLibrary::new(parsed).or_else(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?);
    }
    let mode = match mode {
        SimMode::Closed => Mode::Closed,
        SimMode::Replay => {
            let path = script.ok_or_else(|| Failure(EXIT_VALIDATION, "replay mode needs --script".into()))?;
            Mode::Replay(runtime::parse_script(&read(path)?).or_else(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?)
        }
    };
    let closed = mode == Mode::Closed;
    let mut config = EpisodeConfig {
        starts: parse_starts(starts, &map)?,
        map: map.clone(),
        libraries,
        goal: goal.or(first_goal).unwrap_or_else(|| "gettreasure".into()),
        mode,
        max_steps,
    };
    let trace = runtime::run_episode(&config);
    write_out(out, &runtime::format_trace(&trace))?;
    if all_starts && closed {
        let cells = map.free_cells();
        let (mut ok, mut total) = (0, 0);
        for a in &cells {
            for b in cells.iter().filter(|b| *b != a) {
                config.starts = [*a, *b];
                total += 1;
                if matches!(runtime::run_episode(&config).outcome, Outcome::Mined(_)) {
                    ok += 1;
                }
            }
        }
        write_out(out, &format!("all starts: {ok}/{total} reached the treasure\n"))?;
    }
    match (&trace.outcome, closed) {
        (Outcome::Mined(_), _) => Ok(()),
        (Outcome::Failed(e), _) => fail(EXIT_SIMULATION, e.to_string()),
        (Outcome::StepLimit, true) => fail(EXIT_SIMULATION, format!("treasure not mined within {max_steps} steps")),
        (Outcome::StepLimit, false) => Ok(()),
    }
}

//! `nlgame`: command-line front end for the nonlocal-games workbench.
//!
//! Exit codes: 0 success, 1 input error, 2 solver non-convergence.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use nonlocal_games::bell::{chsh_functional, mermin_functional, BellFunctional};
use nonlocal_games::catalog::{
    chsh_game, coloring_game, coloring_proviso, ghz_game, hardy_optimize, hardy_sixteenth,
    magic_square_game, GraphSpec, HARDY_CEILING,
};
use nonlocal_games::classical::{classical_value, local_membership, ns_solve, MembershipResult};
use nonlocal_games::formats::{functional_to_json, load_behavior, load_functional, load_game, load_graph, load_strategy};
use nonlocal_games::npa::{build_problem, solve_problem, Basis, NpaOptions};
use nonlocal_games::quantum::{
    chsh_strategy, ghz_strategy, magic_square_strategy, random_strategy, seesaw_refine,
    strategy_behavior, winning_probability, QuantumStrategy, SeesawOptions,
};
use nonlocal_games::solvers::{dual_infeasibility, duality_gap, primal_residual, SdpOptions};
use nonlocal_games::{Behavior, DeterministicStrategy, Error, Game, Scenario};
use serde_json::{json, Value};

use report::{fixed, render_table, short, short_up, to_json, Computation, GameId, Report, SingleReport};

const NPA_LEVEL_ENV: &str = "NLGAME_NPA_LEVEL";
const BUILTIN_GAMES: [&str; 4] = ["chsh", "ghz", "magic_square", "coloring"];

#[derive(Parser, Debug)]
#[command(name = "nlgame", version, about = "Values and bounds for nonlocal games")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Builtin game name (chsh, ghz, magic_square, coloring) or a game JSON path.
    #[arg(long, global = true)]
    game: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    game_file: Option<PathBuf>,
    /// Graph JSON for the coloring game.
    #[arg(long, global = true, value_name = "FILE")]
    graph: Option<PathBuf>,
    #[arg(long, global = true)]
    colors: Option<usize>,
    #[arg(long, global = true, value_name = "FILE")]
    strategy: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    behavior: Option<PathBuf>,
    /// Functional JSON path, or `chsh` / `mermin`.
    #[arg(long, global = true)]
    functional: Option<String>,
    /// Defaults to $NLGAME_NPA_LEVEL, then 1.
    #[arg(long, global = true, visible_alias = "level")]
    npa_level: Option<usize>,
    /// projector or dichotomic.
    #[arg(long, global = true, default_value = "projector")]
    basis: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// SDP stopping tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    #[arg(long, global = true)]
    table: bool,
    /// Refine the strategy by see-saw before evaluating.
    #[arg(long, global = true)]
    seesaw: bool,
    /// Write the NPA moment problem to this file.
    #[arg(long, global = true, value_name = "FILE")]
    dump: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 50)]
    restarts: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classical, no-signaling or NPA value of a game.
    Value {
        #[command(subcommand)]
        kind: ValueKind,
    },
    /// Evaluate an explicit strategy.
    Eval {
        #[command(subcommand)]
        kind: EvalKind,
    },
    /// Bell functionals.
    Bell {
        #[command(subcommand)]
        kind: BellKind,
    },
    /// Decide local-polytope membership of a behavior.
    Membership,
    /// Builtin games.
    Catalog {
        #[command(subcommand)]
        kind: CatalogKind,
    },
    /// Combined reports.
    Report {
        #[command(subcommand)]
        kind: ReportKind,
    },
    /// Hardy configuration check and optimizer.
    Hardy {
        #[command(subcommand)]
        kind: HardyKind,
    },
}

#[derive(Subcommand, Debug)]
enum ValueKind {
    Classical,
    Ns,
    Npa,
}

#[derive(Subcommand, Debug)]
enum EvalKind {
    Quantum,
}

#[derive(Subcommand, Debug)]
enum BellKind {
    Eval,
}

#[derive(Subcommand, Debug)]
enum CatalogKind {
    List,
}

#[derive(Subcommand, Debug)]
enum ReportKind {
    All,
}

#[derive(Subcommand, Debug)]
enum HardyKind {
    Check,
    Optimize,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Solver(_)) => 2,
            _ => 1,
        };
        Self { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CmdResult = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    let o = &cli.opts;
    match &cli.cmd {
        Cmd::Value { kind: ValueKind::Classical } => single(o, false, classical(&game(o)?)?),
        Cmd::Value { kind: ValueKind::Ns } => single(o, false, no_signaling(&game(o)?)?),
        Cmd::Value { kind: ValueKind::Npa } => {
            let g = game(o)?;
            let c = npa(o, &g)?;
            single_with(o, &g, c)
        }
        Cmd::Eval { kind: EvalKind::Quantum } => {
            let g = game(o)?;
            let c = quantum(o, &g)?;
            single_with(o, &g, c)
        }
        Cmd::Bell { kind: BellKind::Eval } => bell_eval(o),
        Cmd::Membership => membership(o),
        Cmd::Catalog { kind: CatalogKind::List } => catalog_list(o),
        Cmd::Report { kind: ReportKind::All } => report_all(o),
        Cmd::Hardy { kind: HardyKind::Check } => hardy_check_cmd(o),
        Cmd::Hardy { kind: HardyKind::Optimize } => hardy_optimize_cmd(o),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn game(o: &Opts) -> std::result::Result<Game, Failure> {
    match (&o.game, &o.game_file) {
        (Some(_), Some(_)) => Err(anyhow!("give either --game or --game-file, not both").into()),
        (None, None) => Err(anyhow!("no game given (use --game or --game-file)").into()),
        (None, Some(path)) => Ok(load_game(&read(path)?).with_context(|| format!("loading {}", path.display()))?),
        (Some(name), None) => match name.as_str() {
            "chsh" => Ok(chsh_game()),
            "ghz" => Ok(ghz_game()),
            "magic_square" => Ok(magic_square_game()),
            "coloring" => {
                let path = o.graph.as_ref().ok_or_else(|| anyhow!("--game coloring needs --graph"))?;
                let colors = o.colors.ok_or_else(|| anyhow!("--game coloring needs --colors"))?;
                let graph = load_graph(&read(path)?)?;
                Ok(coloring_game(&graph, colors, None)?)
            }
            other if Path::new(other).is_file() => {
                Ok(load_game(&read(Path::new(other))?).with_context(|| format!("loading {other}"))?)
            }
            other => Err(anyhow!("unknown game {other:?} (builtins: {})", BUILTIN_GAMES.join(", ")).into()),
        },
    }
}

fn same_game(a: &Game, b: &Game) -> bool {
    a.scenario() == b.scenario() && a.weights() == b.weights() && a.win_table() == b.win_table()
}

/// The canonical strategy when `g` is one of the builtin games that has one.
fn canonical_strategy(g: &Game) -> Option<QuantumStrategy> {
    if same_game(g, &chsh_game()) {
        Some(chsh_strategy())
    } else if same_game(g, &ghz_game()) {
        Some(ghz_strategy())
    } else if same_game(g, &magic_square_game()) {
        Some(magic_square_strategy())
    } else {
        None
    }
}

fn output_json(o: &Opts, table_default: bool) -> bool {
    if o.json {
        true
    } else if o.table {
        false
    } else {
        !table_default
    }
}

fn single(o: &Opts, table_default: bool, (g, c): (GameId, Computation)) -> CmdResult {
    let r = SingleReport {
        game: Some(g),
        computation: c,
    };
    if output_json(o, table_default) {
        Ok(to_json(&r))
    } else {
        let c = &r.computation;
        let v = c.value.clone().unwrap_or_else(|| short(c.value_float));
        Ok(render_table(&[(c.kind.clone(), c.method.clone(), v)]))
    }
}

fn single_with(o: &Opts, g: &Game, c: Computation) -> CmdResult {
    single(o, false, (GameId::of(g), c))
}

fn answer_map(sc: &Scenario, d: &DeterministicStrategy) -> Value {
    let parties: Vec<Value> = sc
        .parties()
        .iter()
        .enumerate()
        .map(|(p, party)| {
            let m: BTreeMap<String, String> = party
                .questions()
                .iter()
                .enumerate()
                .map(|(x, q)| (q.clone(), party.answers()[d.answer(p, x)].clone()))
                .collect();
            json!(m)
        })
        .collect();
    json!({ "responses": parties })
}

fn classical(g: &Game) -> std::result::Result<(GameId, Computation), Failure> {
    let cv = classical_value(g)?;
    let c = Computation::new("classical", "enumeration", cv.value_f64(), 0.0)
        .exact(cv.value.to_string())
        .witness(answer_map(g.scenario(), &cv.witness));
    Ok((GameId::of(g), c))
}

fn no_signaling(g: &Game) -> std::result::Result<(GameId, Computation), Failure> {
    let ns = ns_solve(g)?;
    let c = Computation::new("no_signaling", "lp", ns.value, 1e-9)
        .residual("primal", primal_residual(&ns.program, &ns.lp.primal))
        .residual("dual_infeasibility", dual_infeasibility(&ns.program, &ns.lp.dual))
        .residual("duality_gap", duality_gap(&ns.program, &ns.lp))
        .details(json!({ "iterations": ns.lp.iterations }));
    Ok((GameId::of(g), c))
}

fn npa_level(o: &Opts) -> anyhow::Result<usize> {
    if let Some(k) = o.npa_level {
        return Ok(k);
    }
    match std::env::var(NPA_LEVEL_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("{NPA_LEVEL_ENV}={v:?} is not a level")),
        Err(_) => Ok(1),
    }
}

fn npa(o: &Opts, g: &Game) -> std::result::Result<Computation, Failure> {
    let level = npa_level(o)?;
    let basis: Basis = o.basis.parse()?;
    let mut sdp = SdpOptions::default();
    if let Some(t) = o.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(anyhow!("--tol must be positive").into());
        }
        sdp.tol = t;
    }
    let opts = NpaOptions {
        basis,
        sdp,
        ..Default::default()
    };
    let problem = build_problem(g, level, &opts)?;
    if let Some(path) = &o.dump {
        std::fs::write(path, problem.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    let r = solve_problem(problem, &opts.sdp)?.ensure_converged()?;
    let basis_name = match basis {
        Basis::Projector => "projector",
        Basis::Dichotomic => "dichotomic",
    };
    Ok(Computation::new("npa", "sdp", r.bound, sdp.tol)
        .residual("primal", r.solution.primal_residual)
        .residual("dual", r.solution.dual_residual)
        .residual("min_eigenvalue", r.solution.min_eigenvalue)
        .details(json!({
            "level": level,
            "basis": basis_name,
            "moment_matrix_size": r.problem.size,
            "sdp_value": fixed(r.value),
            "margin": fixed(r.margin),
            "iterations": r.solution.iterations,
        })))
}

fn seesaw_start(o: &Opts, g: &Game) -> anyhow::Result<QuantumStrategy> {
    let dims: Vec<usize> = g
        .scenario()
        .parties()
        .iter()
        .map(|p| p.num_answers().max(2))
        .collect();
    Ok(random_strategy(g.scenario(), &dims, o.seed)?)
}

fn quantum(o: &Opts, g: &Game) -> std::result::Result<Computation, Failure> {
    let (start, given) = match &o.strategy {
        Some(path) => (load_strategy(&read(path)?).with_context(|| format!("loading {}", path.display()))?, true),
        None => match canonical_strategy(g) {
            Some(s) => (s, true),
            None => (seesaw_start(o, g)?, false),
        },
    };
    if o.seesaw || !given {
        let r = seesaw_refine(g, &start, &SeesawOptions::default())?;
        return Ok(Computation::new("explicit_quantum", "seesaw", r.value, 1e-10).details(json!({
            "seed": o.seed,
            "initial_value": fixed(r.initial_value),
            "rounds": r.iterations,
            "converged": r.converged,
        })));
    }
    let v = winning_probability(g, &start)?;
    let b = strategy_behavior(&start, g.scenario())?;
    Ok(Computation::new("explicit_quantum", "born-rule", v, 1e-12)
        .details(json!({ "behavior": behavior_value(&b) })))
}

fn behavior_value(b: &Behavior) -> Value {
    let v: Value = serde_json::from_str(&nonlocal_games::formats::behavior_to_json(b)).expect("own output");
    round_floats(v)
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json!(fixed(n.as_f64().expect("f64"))),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn functional(o: &Opts, scenario: Option<&Scenario>) -> anyhow::Result<BellFunctional> {
    let name = o.functional.as_deref().ok_or_else(|| anyhow!("--functional is required"))?;
    match name {
        "chsh" => Ok(chsh_functional()),
        "mermin" => Ok(mermin_functional()),
        path => {
            let sc = scenario.ok_or_else(|| anyhow!("a functional file needs --game for its scenario"))?;
            Ok(load_functional(&read(Path::new(path))?, sc)?)
        }
    }
}

/// Behavior from --behavior, else Born rule on --strategy, else the canonical strategy.
fn behavior(o: &Opts, scenario: &Scenario, g: Option<&Game>) -> anyhow::Result<Behavior> {
    if let Some(path) = &o.behavior {
        return Ok(load_behavior(&read(path)?, scenario).with_context(|| format!("loading {}", path.display()))?);
    }
    let s = match &o.strategy {
        Some(path) => load_strategy(&read(path)?)?,
        None => g
            .and_then(canonical_strategy)
            .ok_or_else(|| anyhow!("give --behavior or --strategy"))?,
    };
    Ok(strategy_behavior(&s, scenario)?)
}

fn bell_eval(o: &Opts) -> CmdResult {
    let g = if o.game.is_some() || o.game_file.is_some() {
        Some(game(o)?)
    } else {
        None
    };
    let mut f = functional(o, g.as_ref().map(|g| g.scenario()))?;
    let sc = f.scenario().clone();
    if let Some(g) = &g {
        sc.ensure_same(g.scenario())?;
        if let Ok(h) = f.clone().with_game_relation(g) {
            f = h;
        }
    }
    let b = behavior(o, &sc, g.as_ref())?;
    let value = f.eval(&b)?;
    let (local, witness) = f.local_bound()?;
    let mut details = json!({ "local_bound": fixed(local) });
    if let Some(form) = f.correlator() {
        details["correlator"] = json!({
            "constant": fixed(form.constant),
            "beta": form.beta.iter().map(|&x| fixed(x)).collect::<Vec<_>>(),
        });
    }
    if let Some(m) = f.affine_to_game() {
        details["game_value"] = json!(fixed(m.apply(value)));
        details["affine_to_game"] = json!({ "offset": fixed(m.offset), "scale": fixed(m.scale) });
    }
    let c = Computation::new("bell", "direct", value, 1e-12)
        .witness(answer_map(&sc, &witness))
        .details(details);
    let r = SingleReport {
        game: g.as_ref().map(GameId::of),
        computation: c,
    };
    if output_json(o, false) {
        Ok(to_json(&r))
    } else {
        Ok(render_table(&[
            ("bell value".into(), "direct".into(), short(value)),
            ("local bound".into(), "enumeration".into(), short(local)),
        ]))
    }
}

fn membership(o: &Opts) -> CmdResult {
    let g = game(o)?;
    let sc = g.scenario().clone();
    let b = behavior(o, &sc, Some(&g))?;
    let out = match local_membership(&b, &sc)? {
        MembershipResult::InLocal(model) => json!({
            "game": GameId::of(&g),
            "result": "in_local",
            "method": "lp",
            "model": model
                .components()
                .iter()
                .map(|(w, d)| json!({ "weight": fixed(*w), "strategy": answer_map(&sc, d) }))
                .collect::<Vec<_>>(),
        }),
        MembershipResult::Separated {
            functional,
            local_bound,
            behavior_value,
        } => {
            let f: Value = serde_json::from_str(&functional_to_json(&functional)).expect("own output");
            json!({
                "game": GameId::of(&g),
                "result": "separated",
                "method": "lp",
                "local_bound": fixed(local_bound),
                "behavior_value": fixed(behavior_value),
                "functional": round_floats(f),
            })
        }
    };
    if output_json(o, false) {
        Ok(to_json(&out))
    } else {
        let mut rows = vec![("membership".to_string(), "lp".to_string(), out["result"].as_str().unwrap_or("").to_string())];
        if out["result"] == "separated" {
            rows.push(("local bound".into(), "enumeration".into(), short(out["local_bound"].as_f64().unwrap_or(0.0))));
            rows.push(("behavior value".into(), "direct".into(), short(out["behavior_value"].as_f64().unwrap_or(0.0))));
        }
        Ok(render_table(&rows))
    }
}

fn catalog_list(o: &Opts) -> CmdResult {
    let entries = [
        ("chsh", chsh_game(), "two players, XOR of answers must equal AND of questions"),
        ("ghz", ghz_game(), "three players, promise on even question parity"),
        ("magic_square", magic_square_game(), "row/column parity assignment on a 3x3 grid"),
    ];
    let mut list = Vec::new();
    for (name, g, about) in &entries {
        let sc = g.scenario();
        list.push(json!({
            "name": name,
            "parties": sc.num_parties(),
            "questions": sc.parties().iter().map(|p| p.num_questions()).collect::<Vec<_>>(),
            "answers": sc.parties().iter().map(|p| p.num_answers()).collect::<Vec<_>>(),
            "sha256": GameId::of(g).sha256,
            "description": about,
        }));
    }
    list.push(json!({
        "name": "coloring",
        "description": "graph coloring game; needs --graph and --colors",
    }));
    if output_json(o, true) {
        return Ok(to_json(&list));
    }
    let mut out = String::new();
    for e in &list {
        out.push_str(&format!(
            "{:<13} {}\n",
            e["name"].as_str().unwrap_or(""),
            e["description"].as_str().unwrap_or("")
        ));
    }
    Ok(out)
}

fn report_all(o: &Opts) -> CmdResult {
    let g = game(o)?;
    let id = GameId::of(&g);
    let (_, cl) = classical(&g)?;
    let qu = quantum(o, &g)?;
    let np = npa(o, &g)?;
    let (_, ns) = no_signaling(&g)?;
    let mut flags = BTreeMap::new();
    let q_perfect = qu.value_float >= 1.0 - 1e-9;
    flags.insert("pseudo_telepathy".to_string(), cl.value_float < 1.0 && q_perfect);
    if o.game.as_deref() == Some("coloring") {
        if let Some(path) = &o.graph {
            let graph: GraphSpec = load_graph(&read(path)?)?;
            flags.insert("coloring_proviso".to_string(), coloring_proviso(&graph, &g));
        }
    }
    let level = np.details.as_ref().and_then(|d| d["level"].as_u64()).unwrap_or(1);
    let rows = vec![
        (
            "classical".to_string(),
            cl.method.clone(),
            format!("{} ({})", short(cl.value_float), cl.value.clone().unwrap_or_default()),
        ),
        ("explicit quantum".to_string(), qu.method.clone(), short(qu.value_float)),
        // Displayed upper bounds round upward; no game value exceeds 1.
        (format!("NPA level {level}"), np.method.clone(), short_up(np.value_float.min(1.0))),
        ("no-signaling".to_string(), ns.method.clone(), short(ns.value_float)),
    ];
    let report = Report {
        game: id.clone(),
        computations: vec![cl, qu, np, ns],
        flags,
    };
    if output_json(o, true) {
        return Ok(to_json(&report));
    }
    let mut out = format!("game {} (sha256 {})\n", id.name, &id.sha256[..16]);
    out.push_str(&render_table(&rows));
    for (k, v) in &report.flags {
        out.push_str(&format!("{k}: {v}\n"));
    }
    Ok(out)
}

fn hardy_check_cmd(o: &Opts) -> CmdResult {
    let c = hardy_sixteenth().check()?;
    let out = json!({
        "configuration": "sixteenth",
        "constraints": c.constraints.iter().map(|&x| fixed(x)).collect::<Vec<_>>(),
        "target": fixed(c.target),
    });
    if output_json(o, false) {
        Ok(to_json(&out))
    } else {
        Ok(render_table(&[
            ("max constraint".into(), "born-rule".into(), format!("{:.1e}", c.max_violation())),
            ("target".into(), "born-rule".into(), short(c.target)),
        ]))
    }
}

fn hardy_optimize_cmd(o: &Opts) -> CmdResult {
    let r = hardy_optimize(o.seed, o.restarts)?;
    let out = json!({
        "seed": o.seed,
        "restarts": o.restarts,
        "accepted": r.accepted,
        "probability": fixed(r.probability),
        "ceiling": fixed(HARDY_CEILING),
        "max_constraint": fixed(r.check.max_violation()),
    });
    if output_json(o, false) {
        Ok(to_json(&out))
    } else {
        Ok(render_table(&[
            ("hardy probability".into(), "penalty search".into(), short(r.probability)),
            ("ceiling".into(), "closed form".into(), short(HARDY_CEILING)),
        ]))
    }
}

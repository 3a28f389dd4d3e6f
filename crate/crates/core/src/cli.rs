//! Command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit code
//! with everything that should go to stdout and stderr, so the binary is a thin
//! wrapper and the commands are testable in-process.
//!
//! Exit codes: 0 success or affirmative answer, 1 well-formed negative answer,
//! 2 input or topology error. Reports end with a single `json: {...}` line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    balancing_exists, bipartite_safe_necessary, bipartite_safe_sufficient, check_clique_defense,
    check_group_balance, dp_cover_with, ProtectorateSummand,
};
use crate::constructors::{
    balancing_equilibrium, bipartite_safe_equilibrium, sole_survivor_equilibrium, ConstructionError,
};
use crate::equilibrium::{is_nash, DeviationOutcome};
use crate::model::{validate_allocation, AllocationMatrix, Environment, StateVector};
use crate::oracle::{find_equilibria, survival_possibility, GridSpec, DEFAULT_BOUND};
use crate::power::Power;
use crate::preference::DeviationRule;
use crate::scenario::ScenarioFile;

#[derive(Debug, Parser)]
#[command(name = "pag", version, about = "Power allocation game analysis")]
struct Cli {
    /// How a deviation must compare to count as profitable.
    #[arg(long, global = true, default_value = "refined")]
    rule: DeviationRule,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check environment and allocation invariants.
    Validate { file: PathBuf },
    /// Print support, threat and state of every country.
    Evaluate { file: PathBuf },
    /// Check whether the allocation is a Nash equilibrium.
    Verify { file: PathBuf },
    /// Build an equilibrium and print it as a scenario file.
    Construct {
        file: PathBuf,
        #[arg(long)]
        kind: Kind,
        /// Country that should survive or be safe.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Report structural survival conditions.
    Analyze {
        file: PathBuf,
        /// Comma-separated country names to test as a group.
        #[arg(long, value_delimiter = ',')]
        group: Vec<String>,
        /// Use the owner's power in place of each weak friend's in the
        /// protectorate inequality.
        #[arg(long)]
        owner_summand: bool,
    },
    /// Enumerate grid equilibria.
    Search {
        file: PathBuf,
        /// Grid step, an integer or `a/b`.
        #[arg(long)]
        step: Power,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u128,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Balancing,
    SoleSurvivor,
    BipartiteSafe,
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, text: String, data: Value) -> Self {
        let mut stdout = text;
        let _ = writeln!(stdout, "json: {data}");
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let rule = cli.rule;
    let result = match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Evaluate { file } => evaluate(&file),
        Command::Verify { file } => verify(&file, rule),
        Command::Construct {
            file,
            kind,
            target,
            seed,
        } => construct(&file, kind, target.as_deref(), seed, rule),
        Command::Analyze {
            file,
            group,
            owner_summand,
        } => analyze(&file, &group, owner_summand),
        Command::Search { file, step, bound } => search(&file, step, bound, rule),
    };
    result.unwrap_or_else(Outcome::error)
}

fn read_scenario(path: &PathBuf) -> Result<ScenarioFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ScenarioFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &PathBuf) -> Result<(Environment, Option<AllocationMatrix>), String> {
    read_scenario(path)?
        .load()
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn load_with_allocation(path: &PathBuf) -> Result<(Environment, AllocationMatrix), String> {
    match load(path)? {
        (env, Some(u)) => Ok((env, u)),
        (_, None) => Err(format!("{}: scenario has no allocation", path.display())),
    }
}

fn label(env: &Environment, i: usize) -> String {
    format!("{} [{}]", env.name(i), i)
}

fn states_json(states: &StateVector) -> Value {
    json!(states.iter().map(|s| s.as_str()).collect::<Vec<_>>())
}

fn powers_json(row: &[Power]) -> Value {
    serde_json::to_value(row).expect("powers serialize")
}

fn validate(path: &PathBuf) -> Result<Outcome, String> {
    let file = read_scenario(path)?;
    let env = file
        .environment()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let u = file
        .raw_allocation(&env)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut text = format!("environment: ok ({} countries)\n", env.n());
    let Some(u) = u else {
        text.push_str("allocation: none\n");
        return Ok(Outcome::report(
            0,
            text,
            json!({"valid": true, "allocation": false}),
        ));
    };
    match validate_allocation(&env, &u) {
        Ok(()) => {
            text.push_str("allocation: ok\n");
            Ok(Outcome::report(
                0,
                text,
                json!({"valid": true, "allocation": true}),
            ))
        }
        Err(errors) => {
            text.push_str("allocation: invalid\n");
            for e in &errors {
                let _ = writeln!(text, "  {e}");
            }
            let messages: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
            let mut out = Outcome::report(
                2,
                text,
                json!({"valid": false, "allocation": true, "errors": messages}),
            );
            out.stderr = format!("error: {}: invalid allocation\n", path.display());
            Ok(out)
        }
    }
}

fn evaluate(path: &PathBuf) -> Result<Outcome, String> {
    let (env, u) = load_with_allocation(path)?;
    let eval = env.evaluate(&u);
    let mut text = String::new();
    let mut rows = Vec::new();
    for i in 0..env.n() {
        let _ = writeln!(
            text,
            "{:<12} support {:>8}  threat {:>8}  {}",
            label(&env, i),
            eval.support[i].to_string(),
            eval.threat[i].to_string(),
            eval.states.get(i)
        );
        rows.push(json!({
            "index": i,
            "name": env.name(i),
            "support": eval.support[i],
            "threat": eval.threat[i],
            "state": eval.states.get(i).as_str(),
        }));
    }
    let _ = writeln!(text, "states {}", eval.states);
    Ok(Outcome::report(
        0,
        text,
        json!({"countries": rows, "states": states_json(&eval.states)}),
    ))
}

fn verify(path: &PathBuf, rule: DeviationRule) -> Result<Outcome, String> {
    let (env, u) = load_with_allocation(path)?;
    let report = is_nash(&env, &u, rule);
    let yes = report.is_equilibrium();
    let mut text = format!(
        "Nash equilibrium: {}; states {}\n",
        if yes { "yes" } else { "no" },
        report.states
    );
    let mut certificates = Vec::new();
    for c in &report.certificates {
        match &c.outcome {
            DeviationOutcome::NoProfitableDeviation => {
                let _ = writeln!(
                    text,
                    "  {}: no profitable deviation",
                    label(&env, c.country)
                );
                certificates.push(
                    json!({"index": c.country, "name": env.name(c.country), "profitable": false}),
                );
            }
            DeviationOutcome::Profitable(d) => {
                let row: Vec<String> = d.row.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(
                    text,
                    "  {}: profitable deviation to row [{}] reaching {}",
                    label(&env, c.country),
                    row.join(", "),
                    d.states
                );
                certificates.push(json!({
                    "index": c.country,
                    "name": env.name(c.country),
                    "profitable": true,
                    "row": powers_json(&d.row),
                    "states": states_json(&d.states),
                }));
            }
        }
    }
    Ok(Outcome::report(
        if yes { 0 } else { 1 },
        text,
        json!({
            "equilibrium": yes,
            "rule": rule.as_str(),
            "states": states_json(&report.states),
            "certificates": certificates,
        }),
    ))
}

fn construct(
    path: &PathBuf,
    kind: Kind,
    target: Option<&str>,
    seed: u64,
    rule: DeviationRule,
) -> Result<Outcome, String> {
    let (env, _) = load(path)?;
    let target_index = || -> Result<usize, String> {
        let name = target.ok_or("this construction needs --target")?;
        env.index_of(name)
            .ok_or_else(|| format!("unknown country `{name}`"))
    };
    let built = match kind {
        Kind::Balancing => balancing_equilibrium(&env, rule),
        Kind::SoleSurvivor => sole_survivor_equilibrium(&env, target_index()?, rule),
        Kind::BipartiteSafe => bipartite_safe_equilibrium(&env, target_index()?, seed, rule),
    };
    match built {
        Ok(u) => {
            let mut stdout = ScenarioFile::from_environment(&env, Some(&u)).emit();
            stdout.push('\n');
            Ok(Outcome {
                code: 0,
                stdout,
                stderr: format!("constructed; states {}\n", env.state_vector(&u)),
            })
        }
        Err(ConstructionError::Topology(e)) => Err(e.to_string()),
        Err(e) => Ok(Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("{e}\n"),
        }),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze(path: &PathBuf, group: &[String], owner_summand: bool) -> Result<Outcome, String> {
    let (env, _) = load(path)?;
    let mut text = String::new();
    let mut data = serde_json::Map::new();
    let mut code = 0;

    if !group.is_empty() {
        let members: Vec<usize> = group
            .iter()
            .map(|name| {
                env.index_of(name)
                    .ok_or_else(|| format!("unknown country `{name}`"))
            })
            .collect::<Result<_, _>>()?;
        let balance = check_group_balance(&env, &members);
        let clique = check_clique_defense(&env, &members);
        let _ = writeln!(text, "group {}:", group.join(","));
        let _ = writeln!(
            text,
            "  no internal adversaries, each covers its adversaries: {}",
            yes_no(balance)
        );
        let _ = writeln!(
            text,
            "  friendly clique covering joint adversaries: {}",
            yes_no(clique)
        );
        data.insert(
            "group".into(),
            json!({"members": group, "balance": balance, "clique": clique}),
        );
        if !balance && !clique {
            code = 1;
        }
    }

    match balancing_exists(&env) {
        Ok(b) => {
            let _ = writeln!(text, "balancing equilibrium exists: {}", yes_no(b));
            data.insert("balancing".into(), json!(b));
        }
        Err(e) => {
            let _ = writeln!(text, "balancing equilibrium: not applicable ({e})");
            data.insert("balancing".into(), Value::Null);
        }
    }

    let mut bipartite = Vec::new();
    for i in 0..env.n() {
        match (
            bipartite_safe_necessary(&env, i),
            bipartite_safe_sufficient(&env, i),
        ) {
            (Ok(nec), Ok(suf)) => {
                let _ = writeln!(
                    text,
                    "{}: safe-equilibrium necessary condition {}, sufficient condition {}",
                    label(&env, i),
                    yes_no(nec),
                    yes_no(suf)
                );
                bipartite.push(json!({"name": env.name(i), "necessary": nec, "sufficient": suf}));
            }
            (Err(e), _) | (_, Err(e)) => {
                if i == 0 {
                    let _ = writeln!(text, "bipartite safety conditions: not applicable ({e})");
                }
                break;
            }
        }
    }
    data.insert(
        "bipartite".into(),
        if bipartite.is_empty() {
            Value::Null
        } else {
            json!(bipartite)
        },
    );

    let summand = if owner_summand {
        ProtectorateSummand::OwnerPower
    } else {
        ProtectorateSummand::FriendPower
    };
    let cover = dp_cover_with(&env, summand);
    let names = |set: &std::collections::BTreeSet<usize>| {
        set.iter()
            .map(|&k| env.name(k).to_string())
            .collect::<Vec<_>>()
    };
    for d in &cover.dominations {
        let _ = writeln!(
            text,
            "domination of {}: {{{}}}",
            env.name(d.owner),
            names(&d.members).join(", ")
        );
    }
    for p in &cover.protectorates {
        let _ = writeln!(
            text,
            "protectorate of {}: {{{}}}",
            env.name(p.owner),
            names(&p.members).join(", ")
        );
    }
    let verdicts: Vec<String> = (0..env.n())
        .map(|i| format!("{} {}", env.name(i), cover.verdicts[i].as_str()))
        .collect();
    let _ = writeln!(
        text,
        "cover {}; verdicts: {}",
        if cover.spans {
            "spans"
        } else {
            "does not span"
        },
        verdicts.join(", ")
    );
    data.insert(
        "cover".into(),
        json!({
            "spans": cover.spans,
            "dominations": cover.dominations.iter().map(|d| json!({"owner": env.name(d.owner), "members": names(&d.members)})).collect::<Vec<_>>(),
            "protectorates": cover.protectorates.iter().map(|p| json!({"owner": env.name(p.owner), "members": names(&p.members)})).collect::<Vec<_>>(),
            "verdicts": cover.verdicts.iter().map(|v| v.as_str()).collect::<Vec<_>>(),
        }),
    );
    Ok(Outcome::report(code, text, Value::Object(data)))
}

fn search(
    path: &PathBuf,
    step: Power,
    bound: u128,
    rule: DeviationRule,
) -> Result<Outcome, String> {
    let (env, _) = load(path)?;
    let atlas = find_equilibria(&env, &GridSpec::with_bound(step, bound), rule)
        .map_err(|e| e.to_string())?;
    let mut text = format!(
        "grid step {step}: {} candidates, {} equilibria in {} classes\n",
        atlas.candidates,
        atlas.equilibrium_count(),
        atlas.classes.len()
    );
    for c in &atlas.classes {
        let _ = writeln!(text, "  {} x{}", c.states, c.count);
    }
    let mut survival = Vec::new();
    if !atlas.is_empty() {
        for i in 0..env.n() {
            let s = survival_possibility(&atlas, i).map_err(|e| e.to_string())?;
            let _ = writeln!(text, "{}: survives {:?}", label(&env, i), s);
            survival.push(json!({"name": env.name(i), "possibility": s}));
        }
    }
    text.push_str("note: only grid matrices are enumerated; a class missing here may still exist off the grid\n");
    let classes: Vec<Value> = atlas
        .classes
        .iter()
        .map(|c| json!({"states": states_json(&c.states), "count": c.count}))
        .collect();
    Ok(Outcome::report(
        if atlas.is_empty() { 1 } else { 0 },
        text,
        json!({
            "step": step,
            "rule": rule.as_str(),
            "candidates": atlas.candidates.to_string(),
            "equilibria": atlas.equilibrium_count(),
            "classes": classes,
            "survival": survival,
        }),
    ))
}

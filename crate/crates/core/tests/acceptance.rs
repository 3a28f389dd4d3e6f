//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` fail for reasons documented in the README;
//! they still print FAIL but do not fail the run.

mod common;

use std::time::{Duration, Instant};

use common::{json_line, pag, scenario_path};
use pag::analysis::{balancing_exists, bipartite_safe_sufficient, dp_cover, CoverVerdict};
use pag::constructors::{
    balancing_equilibrium, bipartite_safe_equilibrium, sole_survivor_equilibrium, ConstructionError,
};
use pag::fixtures::*;
use pag::oracle::{find_equilibria, grid_rows, GridSpec};
use pag::preference::{improvement_verdict, Verdict};
use pag::{
    best_deviation, is_nash, validate_allocation, DeviationRule, Power, StateVector, SurvivalState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use SurvivalState::*;

const RULE: DeviationRule = DeviationRule::Refined;
const KNOWN_RED: [&str; 3] = ["AC5", "AC6", "AC7"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn states(v: &[SurvivalState]) -> StateVector {
    StateVector(v.to_vec())
}

fn arg(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let path = scenario_path("ac1", &env1(), Some(&env1_equilibrium()));
    let eval = pag(&["evaluate", arg(&path)]);
    let verify = pag(&["verify", arg(&path)]);
    let elapsed = start.elapsed();
    let got = json_line(&eval.stdout)["states"].clone();
    let want = serde_json::json!([
        "safe",
        "precarious",
        "unsafe",
        "unsafe",
        "precarious",
        "safe"
    ]);
    outcome(
        eval.code == 0 && got == want && verify.code == 0 && elapsed < Duration::from_secs(1),
        format!("states {got}, verify exit {}, {elapsed:.2?}", verify.code),
    )
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let env = env2();
    let expected = [
        (env2_alloc_i(), states(&[Safe, Unsafe, Unsafe])),
        (env2_alloc_ii(), states(&[Unsafe, Safe, Unsafe])),
        (env2_alloc_iii(), states(&[Unsafe, Unsafe, Safe])),
    ];
    let mut ok = true;
    for (u, want) in &expected {
        let report = is_nash(&env, u, RULE);
        ok &= report.is_equilibrium() && &report.states == want;
    }
    let atlas = find_equilibria(&env, &GridSpec::new(Power::ONE), RULE).unwrap();
    let found = expected
        .iter()
        .filter(|(_, want)| atlas.classes.iter().any(|c| &c.states == want))
        .count();
    let elapsed = start.elapsed();
    outcome(
        ok && found == 3 && elapsed < Duration::from_secs(60),
        format!(
            "reference allocations verified: {ok}; {found}/3 classes among {} found; {elapsed:.2?}",
            atlas.classes.len()
        ),
    )
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut built, mut refused, mut wrong) = (0, 0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(2..=5);
        let env = common::complete_adversarial(&mut rng, n, 12);
        let expected = balancing_exists(&env).unwrap();
        match balancing_equilibrium(&env, RULE) {
            Ok(u) => {
                built += 1;
                let report = is_nash(&env, &u, RULE);
                let all_precarious = report.states.iter().all(|s| s == Precarious);
                if !expected || !report.is_equilibrium() || !all_precarious {
                    wrong += 1;
                }
            }
            Err(ConstructionError::InfeasiblePower { .. }) => {
                refused += 1;
                if expected {
                    wrong += 1;
                }
            }
            Err(_) => wrong += 1,
        }
    }
    outcome(
        wrong == 0,
        format!("{built} built, {refused} refused, {wrong} mismatches"),
    )
}

fn ac4() -> Outcome {
    let env = env2();
    let mut good = 0;
    for target in 0..3 {
        if let Ok(u) = sole_survivor_equilibrium(&env, target, RULE) {
            let report = is_nash(&env, &u, RULE);
            let shape =
                (0..3).all(|k| report.states.get(k) == if k == target { Safe } else { Unsafe });
            if validate_allocation(&env, &u).is_ok() && report.is_equilibrium() && shape {
                good += 1;
            }
        }
    }
    outcome(
        good == 3,
        format!("{good}/3 sole-survivor equilibria verified"),
    )
}

fn ac5() -> Outcome {
    let start = Instant::now();
    let env = env3();
    let sufficient = [
        bipartite_safe_sufficient(&env, 0).unwrap(),
        bipartite_safe_sufficient(&env, 1).unwrap(),
    ];
    let atlas = find_equilibria(&env, &GridSpec::new(Power::ONE), RULE).unwrap();
    let safe: Vec<_> = atlas
        .classes
        .iter()
        .filter(|c| c.states.get(0) == Safe || c.states.get(1) == Safe)
        .collect();
    let elapsed = start.elapsed();
    let example = safe
        .first()
        .map(|c| {
            format!(
                "; e.g. {} via [{}]",
                c.states,
                c.members[0].to_string().trim().replace('\n', " / ")
            )
        })
        .unwrap_or_default();
    outcome(
        sufficient == [false, false] && safe.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "sufficient conditions {sufficient:?}; {} of {} classes have v1 or v2 safe{example}; {elapsed:.2?}",
            safe.len(),
            atlas.classes.len()
        ),
    )
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut instances, mut built, mut bad) = (0, 0, 0);
    // failures split by whether the unit grid holds an equilibrium with i safe
    let (mut no_safe_equilibrium, mut missed, mut unclassified) = (0, 0, 0);
    while instances < 50 {
        let n = rng.gen_range(2..=5);
        let env = common::random_bipartite(&mut rng, n, 8, 0.6);
        let i = rng.gen_range(0..n);
        if env.adversaries(i).is_empty() || bipartite_safe_sufficient(&env, i) != Ok(true) {
            continue;
        }
        instances += 1;
        match bipartite_safe_equilibrium(&env, i, 0, RULE) {
            Ok(u) => {
                let report = is_nash(&env, &u, RULE);
                if report.is_equilibrium() && report.states.get(i) == Safe {
                    built += 1;
                } else {
                    bad += 1;
                }
            }
            Err(_) => {
                match find_equilibria(&env, &GridSpec::with_bound(Power::ONE, 2_000_000), RULE) {
                    Ok(atlas) if atlas.classes.iter().any(|c| c.states.get(i) == Safe) => {
                        missed += 1
                    }
                    Ok(_) => no_safe_equilibrium += 1,
                    Err(_) => unclassified += 1,
                }
            }
        }
    }
    let failed = no_safe_equilibrium + missed + unclassified;
    outcome(
        failed == 0 && bad == 0,
        format!(
            "{built}/{instances} constructed; {failed} failed ({no_safe_equilibrium} with no grid equilibrium keeping i safe, \
             {missed} where the grid has one, {unclassified} too large to search); {bad} invalid"
        ),
    )
}

fn ac7() -> Outcome {
    use pag::analysis::{check_clique_defense, check_group_balance};
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut instances, mut balance_violations, mut clique_violations) = (0, 0, 0);
    let mut example = String::new();
    while instances < 50 {
        let n = rng.gen_range(2..=4);
        let env = common::random_env(&mut rng, n, 6, 0.35, 0.35);
        let groups: Vec<(Vec<usize>, bool, bool)> = (1u32..1 << n)
            .map(|mask| (0..n).filter(|&k| mask >> k & 1 == 1).collect::<Vec<_>>())
            .map(|g| {
                let b = check_group_balance(&env, &g);
                let c = check_clique_defense(&env, &g);
                (g, b, c)
            })
            .filter(|(_, b, c)| *b || *c)
            .collect();
        if groups.is_empty() {
            continue;
        }
        let Ok(atlas) = find_equilibria(&env, &GridSpec::with_bound(Power::ONE, 2_000_000), RULE)
        else {
            continue;
        };
        instances += 1;
        for (g, b, c) in &groups {
            for class in &atlas.classes {
                if g.iter().all(|&k| class.states.get(k).survives()) {
                    continue;
                }
                if *b {
                    balance_violations += 1;
                } else if *c {
                    clique_violations += 1;
                }
                if example.is_empty() {
                    example = format!(
                        "; e.g. powers {:?} group {g:?} states {}",
                        env.powers()
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>(),
                        class.states
                    );
                }
            }
        }
    }
    outcome(
        balance_violations + clique_violations == 0,
        format!(
            "{instances} instances; violations: {balance_violations} balanced-group, {clique_violations} clique-only{example}"
        ),
    )
}

fn ac8() -> Outcome {
    let env = env4();
    let cover = dp_cover(&env);
    use CoverVerdict::*;
    let verdicts_ok =
        cover.spans && cover.verdicts == [NotSurvives, Survives, NotSurvives, Survives];
    let atlas = find_equilibria(&env, &GridSpec::new(Power::ONE), RULE).unwrap();
    let classes: Vec<String> = atlas.classes.iter().map(|c| c.states.to_string()).collect();
    let unique = atlas.classes.len() == 1
        && atlas.classes[0].states == states(&[Unsafe, Safe, Unsafe, Safe]);
    outcome(
        verdicts_ok && unique,
        format!(
            "cover spans: {}, verdicts {:?}; classes {classes:?}",
            cover.spans, cover.verdicts
        ),
    )
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let quarter = Power::new(1, 4);
    let (mut grid_found, mut misses) = (0, 0);
    for _ in 0..500 {
        let n = rng.gen_range(1..=3);
        let env = common::random_env(&mut rng, n, 5, 0.3, 0.5);
        let u = common::random_allocation(&mut rng, &env, 2);
        let i = rng.gen_range(0..n);
        let before = env.state_vector(&u);
        let profitable_on_grid = grid_rows(&env, i, quarter).unwrap().into_iter().any(|row| {
            let mut v = u.clone();
            v.set_row(i, &row);
            improvement_verdict(&env, i, &before, &env.state_vector(&v), RULE)
                == Verdict::StrictImprovement
        });
        if profitable_on_grid {
            grid_found += 1;
            if !best_deviation(&env, &u, i, RULE).is_profitable() {
                misses += 1;
            }
        }
    }
    outcome(
        misses == 0,
        format!("{grid_found} grid deviations, {misses} missed"),
    )
}

fn ac10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut broken = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=7);
        let env = common::random_env(&mut rng, n, 20, 0.3, 0.4);
        let denom = rng.gen_range(1..=6);
        let u = common::random_allocation(&mut rng, &env, denom);
        let total: Power = env.evaluate(&u).support.iter().copied().sum();
        if validate_allocation(&env, &u).is_err() || total != env.total_power() {
            broken += 1;
        }
    }
    outcome(
        broken == 0,
        format!("{broken} of 1000 allocations break conservation"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
    ];
    let mut unexpected = Vec::new();
    for (name, check) in criteria {
        let result = check();
        let known = KNOWN_RED.contains(&name);
        let verdict = match (result.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{name} {verdict}: {}", result.detail);
        if !result.pass && !known {
            unexpected.push(name);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}

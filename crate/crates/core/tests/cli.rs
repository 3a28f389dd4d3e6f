mod common;

use common::{json_line, pag, scenario_path};
use pag::fixtures::*;
use pag::scenario::ScenarioFile;
use pag::{is_nash, AllocationMatrix, DeviationRule, Environment};

fn arg(path: &std::path::Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn evaluate_prints_states() {
    let path = scenario_path("eval", &env1(), Some(&env1_equilibrium()));
    let out = pag(&["evaluate", arg(&path)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out
        .stdout
        .contains("states [safe, precarious, unsafe, unsafe, precarious, safe]"));
    let data = json_line(&out.stdout);
    assert_eq!(data["countries"][0]["support"], 19);
    assert_eq!(data["states"][4], "precarious");
}

#[test]
fn verify_reports_equilibrium_and_deviations() {
    let path = scenario_path("verify", &env1(), Some(&env1_equilibrium()));
    let out = pag(&["verify", arg(&path)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("Nash equilibrium: yes"));

    let path = scenario_path(
        "verify",
        &env2(),
        Some(&AllocationMatrix::reserve_only(&env2())),
    );
    let out = pag(&["verify", arg(&path)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("Nash equilibrium: no"));
    let data = json_line(&out.stdout);
    assert_eq!(data["equilibrium"], false);
    assert!(data["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["profitable"] == true));
}

#[test]
fn validate_flags_bad_allocations() {
    let path = scenario_path("validate", &env2(), None);
    let out = pag(&["validate", arg(&path)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("allocation: none"));

    let text = r#"{"countries":[{"name":"a","power":2},{"name":"b","power":2}],
        "adversaries":[["a","b"]],"allocation":{"a":[1,0],"b":[0,2]}}"#;
    let path = std::env::temp_dir().join(format!("pag-cli-bad-{}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    let out = pag(&["validate", arg(&path)]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.contains("allocation: invalid"));
    assert_eq!(json_line(&out.stdout)["valid"], false);
}

#[test]
fn input_errors_exit_with_two() {
    let out = pag(&["evaluate", "/nonexistent/scenario.json"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with("error:"));

    let path = std::env::temp_dir().join(format!("pag-cli-float-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"countries":[{"name":"a","power":0.5}]}"#).unwrap();
    assert_eq!(pag(&["validate", arg(&path)]).code, 2);

    let path = scenario_path("noalloc", &env2(), None);
    assert_eq!(pag(&["verify", arg(&path)]).code, 2);
    assert_eq!(pag(&["frobnicate"]).code, 2);
}

#[test]
fn construct_emits_verifiable_scenarios() {
    let path = scenario_path("construct", &env2(), None);
    for kind in [
        vec!["--kind", "balancing"],
        vec!["--kind", "sole-survivor", "--target", "v1"],
    ] {
        let mut args = vec!["construct", arg(&path)];
        args.extend(kind);
        let out = pag(&args);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let (env, u) = ScenarioFile::parse(&out.stdout).unwrap().load().unwrap();
        assert!(is_nash(&env, &u.unwrap(), DeviationRule::Refined).is_equilibrium());
    }

    let out = pag(&["construct", arg(&path), "--kind", "balancing"]);
    let (_, u) = ScenarioFile::parse(&out.stdout).unwrap().load().unwrap();
    let u = u.unwrap();
    for (a, b, x) in [(0, 1, 5), (0, 2, 3), (1, 2, 1)] {
        assert_eq!(u.get(a, b), pag::Power::from_int(x));
        assert_eq!(u.get(b, a), pag::Power::from_int(x));
    }
    let built = std::env::temp_dir().join(format!("pag-cli-built-{}.json", std::process::id()));
    std::fs::write(&built, &out.stdout).unwrap();
    assert_eq!(pag(&["verify", arg(&built)]).code, 0);

    let star = Environment::from_parts(&[10, 3, 4], &[], &[(0, 1), (0, 2)]).unwrap();
    let path = scenario_path("construct", &star, None);
    let out = pag(&[
        "construct",
        arg(&path),
        "--kind",
        "bipartite-safe",
        "--target",
        "v1",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.contains("states [safe"));

    // wrong topology
    let path = scenario_path("construct", &env1(), None);
    assert_eq!(
        pag(&["construct", arg(&path), "--kind", "balancing"]).code,
        2
    );

    // an unreachable target
    let env = Environment::from_parts(&[1, 5], &[], &[(0, 1)]).unwrap();
    let path = scenario_path("construct", &env, None);
    let out = pag(&[
        "construct",
        arg(&path),
        "--kind",
        "bipartite-safe",
        "--target",
        "v1",
    ]);
    assert_eq!(out.code, 1);
}

#[test]
fn analyze_reports_cover_and_groups() {
    let path = scenario_path("analyze", &env4(), None);
    let out = pag(&["analyze", arg(&path)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains(
        "cover spans; verdicts: v1 NotSurvives, v2 Survives, v3 NotSurvives, v4 Survives"
    ));

    let path = scenario_path("analyze", &env1(), None);
    let out = pag(&["analyze", arg(&path), "--group", "v1,v6"]);
    assert_eq!(out.code, 0);
    assert_eq!(json_line(&out.stdout)["group"]["balance"], true);
    let out = pag(&["analyze", arg(&path), "--group", "v2,v5"]);
    assert_eq!(out.code, 1);
}

#[test]
fn search_lists_classes() {
    let path = scenario_path("search", &env4(), None);
    let out = pag(&["search", arg(&path), "--step", "1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let data = json_line(&out.stdout);
    assert_eq!(data["classes"].as_array().unwrap().len(), 1);
    assert_eq!(data["classes"][0]["states"][1], "safe");

    let path = scenario_path("search", &env2(), None);
    let out = pag(&["search", arg(&path), "--step", "1", "--bound", "10"]);
    assert_eq!(out.code, 2);
    let out = pag(&["search", arg(&path), "--step", "3/2"]);
    assert_eq!(out.code, 2);
}

#[test]
fn rule_flag_changes_the_verdict() {
    let env = Environment::from_parts(&[2, 6], &[], &[(0, 1)]).unwrap();
    let u = AllocationMatrix::from_entries(2, &[(0, 1, 2), (1, 0, 2), (1, 1, 4)]);
    let path = scenario_path("rule", &env, Some(&u));
    assert_eq!(
        pag(&["verify", arg(&path), "--rule", "categorical"]).code,
        0
    );
    assert_eq!(pag(&["--rule", "refined", "verify", arg(&path)]).code, 1);
}

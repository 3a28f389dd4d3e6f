#![allow(dead_code)]

use pag::model::{AllocationMatrix, Environment};
use pag::Power;
use rand::Rng;

/// Random environment with `n` countries, integer powers in `0..=max_power`,
/// and each pair friendly, adversarial or unrelated with the given odds.
pub fn random_env<R: Rng>(
    rng: &mut R,
    n: usize,
    max_power: i64,
    friend: f64,
    adversary: f64,
) -> Environment {
    let powers: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_power)).collect();
    let mut friends = Vec::new();
    let mut adversaries = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let x: f64 = rng.gen();
            if x < friend {
                friends.push((a, b));
            } else if x < friend + adversary {
                adversaries.push((a, b));
            }
        }
    }
    Environment::from_parts(&powers, &friends, &adversaries).unwrap()
}

pub fn complete_adversarial<R: Rng>(rng: &mut R, n: usize, max_power: i64) -> Environment {
    let powers: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_power)).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    Environment::from_parts(&powers, &[], &pairs).unwrap()
}

/// Bipartite adversary graph without friends; each cross pair is adversarial with probability `density`.
pub fn random_bipartite<R: Rng>(
    rng: &mut R,
    n: usize,
    max_power: i64,
    density: f64,
) -> Environment {
    let side: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let powers: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_power)).collect();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if side[a] != side[b] && rng.gen_bool(density) {
                pairs.push((a, b));
            }
        }
    }
    Environment::from_parts(&powers, &[], &pairs).unwrap()
}

/// Columns a country may allocate to.
pub fn slots(env: &Environment, i: usize) -> Vec<usize> {
    let mut s: Vec<usize> = std::iter::once(i)
        .chain(env.friends(i).iter().copied())
        .chain(env.adversaries(i).iter().copied())
        .collect();
    s.sort_unstable();
    s
}

/// Random admissible row splitting `p_i` into multiples of `1/denom`.
pub fn random_row<R: Rng>(rng: &mut R, env: &Environment, i: usize, denom: i64) -> Vec<Power> {
    let cols = slots(env, i);
    let p = env.power(i);
    let units = (p * Power::from_int(denom)).numer() as i64;
    let mut cuts: Vec<i64> = (0..cols.len() - 1)
        .map(|_| rng.gen_range(0..=units))
        .collect();
    cuts.push(0);
    cuts.push(units);
    cuts.sort_unstable();
    let mut row = vec![Power::ZERO; env.n()];
    for (k, &c) in cols.iter().enumerate() {
        row[c] = Power::new(cuts[k + 1] - cuts[k], denom);
    }
    row
}

pub fn random_allocation<R: Rng>(rng: &mut R, env: &Environment, denom: i64) -> AllocationMatrix {
    let mut u = AllocationMatrix::zeros(env.n());
    for i in 0..env.n() {
        let row = random_row(rng, env, i, denom);
        u.set_row(i, &row);
    }
    u
}

/// Writes `env` (and `u`) as a scenario file in a fresh temporary path.
pub fn scenario_path(
    tag: &str,
    env: &Environment,
    u: Option<&AllocationMatrix>,
) -> std::path::PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("pag-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!(
        "{tag}-{}.json",
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(
        &path,
        pag::scenario::ScenarioFile::from_environment(env, u).emit(),
    )
    .unwrap();
    path
}

pub fn pag(args: &[&str]) -> pag::cli::Outcome {
    pag::cli::run(std::iter::once("pag").chain(args.iter().copied()))
}

/// The payload of the trailing `json:` line.
pub fn json_line(stdout: &str) -> serde_json::Value {
    let line = stdout
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("json: "))
        .expect("json line");
    serde_json::from_str(line).unwrap()
}

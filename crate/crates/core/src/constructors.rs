//! Explicit equilibria for complete and bipartite adversary graphs.
//!
//! Every constructor re-verifies its output with [`is_nash`] before returning
//! it; a construction that does not verify is an error, never a result.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{balancing_exists, bipartite_safe_sufficient, TopologyError};
use crate::equilibrium::is_nash;
use crate::model::{validate_allocation, AllocationMatrix, Environment, SurvivalState};
use crate::power::Power;
use crate::preference::DeviationRule;

/// Randomized orderings tried after the lexicographic one.
pub const ORDERING_RETRIES: usize = 64;

/// Improving moves applied to one candidate before giving up on it.
pub const REPAIR_STEPS: usize = 40;

/// Largest denominator tolerated while repairing; keeps arithmetic far from overflow.
const REPAIR_DENOMINATOR_CAP: i128 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("country {country} has power {power}, more than all others combined ({others})")]
    InfeasiblePower {
        country: usize,
        power: Power,
        others: Power,
    },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("sufficient condition not met: {0}")]
    ConditionNotMet(String),
    #[error("construction failed after {attempts} attempt(s): {reason}")]
    ConstructionFailed { attempts: usize, reason: String },
}

/// Symmetric matrix with zero diagonal whose row sums are `powers`.
///
/// Lay the powers out as consecutive arcs on a circle of circumference `S` and
/// pair every point with its antipode; `w_ij` is the length of arc `i` whose
/// antipodes land in arc `j`. The pairing is an involution, so `w` is
/// symmetric, and no arc meets its own antipodes unless it is longer than
/// `S/2`, which is exactly the infeasible case.
pub fn symmetric_row_sum_matrix(powers: &[Power]) -> Result<Vec<Vec<Power>>, ConstructionError> {
    let n = powers.len();
    if n < 2 {
        return Err(ConstructionError::PreconditionViolated(
            "at least two countries are required".into(),
        ));
    }
    let total: Power = powers.iter().sum();
    for (i, &p) in powers.iter().enumerate() {
        if p.is_negative() {
            return Err(ConstructionError::PreconditionViolated(format!(
                "negative power {p} at index {i}"
            )));
        }
        if p + p > total {
            return Err(ConstructionError::InfeasiblePower {
                country: i,
                power: p,
                others: total - p,
            });
        }
    }
    let mut w = vec![vec![Power::ZERO; n]; n];
    if total.is_zero() {
        return Ok(w);
    }
    let half = total / Power::from_int(2);
    let mut starts = Vec::with_capacity(n);
    let mut acc = Power::ZERO;
    for &p in powers {
        starts.push(acc);
        acc += p;
    }
    let overlap =
        |a0: Power, a1: Power, b0: Power, b1: Power| (a1.min(b1) - a0.max(b0)).clamp_nonnegative();
    for i in 0..n {
        let (a, b) = (starts[i] + half, starts[i] + powers[i] + half);
        // The shifted arc may wrap past S once.
        let pieces = if b <= total {
            vec![(a, b)]
        } else if a >= total {
            vec![(a - total, b - total)]
        } else {
            vec![(a, total), (Power::ZERO, b - total)]
        };
        for j in 0..n {
            if i == j {
                continue;
            }
            w[i][j] = pieces
                .iter()
                .map(|&(lo, hi)| overlap(lo, hi, starts[j], starts[j] + powers[j]))
                .sum();
        }
    }
    Ok(w)
}

fn verify(env: &Environment, u: &AllocationMatrix, rule: DeviationRule) -> Result<(), String> {
    if let Err(errors) = validate_allocation(env, u) {
        return Err(format!("invalid allocation: {errors:?}"));
    }
    let report = is_nash(env, u, rule);
    let outcome = match report.profitable().next() {
        None => Ok(()),
        Some(d) => Err(format!(
            "country {} has a profitable deviation to {:?}",
            env.name(d.country),
            d.row
        )),
    };
    outcome
}

fn failed(attempts: usize, reason: String) -> ConstructionError {
    ConstructionError::ConstructionFailed { attempts, reason }
}

/// All power on adversary edges, symmetric per edge; everyone precarious.
pub fn balancing_equilibrium(
    env: &Environment,
    rule: DeviationRule,
) -> Result<AllocationMatrix, ConstructionError> {
    balancing_exists(env)?;
    let w = symmetric_row_sum_matrix(env.powers())?;
    let u = AllocationMatrix::from_rows(w).expect("square");
    verify(env, &u, rule).map_err(|r| failed(1, r))?;
    Ok(u)
}

/// An equilibrium of a complete adversary graph in which `target` is the only
/// survivor, and safe.
///
/// Without `target`, either one country `j` outweighs the rest or the rest
/// can balance. In the first case `j` overwhelms each other country by an
/// equal share of its surplus, they all put their power on `j`, and `target`
/// tips `j` over with half of what it has left after covering the surplus.
/// In the second case the rest balance and `target` spreads its power evenly
/// over them.
pub fn sole_survivor_equilibrium(
    env: &Environment,
    target: usize,
    rule: DeviationRule,
) -> Result<AllocationMatrix, ConstructionError> {
    balancing_exists(env)?;
    let n = env.n();
    if target >= n {
        return Err(ConstructionError::PreconditionViolated(format!(
            "no country with index {target}"
        )));
    }
    let total = env.total_power();
    for i in 0..n {
        let p = env.power(i);
        if p + p >= total {
            return Err(ConstructionError::PreconditionViolated(format!(
                "{} has power {p}, not less than the {} held by all others",
                env.name(i),
                total - p
            )));
        }
    }
    let p0 = env.power(target);
    if !p0.is_positive() {
        return Err(ConstructionError::PreconditionViolated(format!(
            "{} has no power and cannot be safe",
            env.name(target)
        )));
    }

    let rest: Vec<usize> = (0..n).filter(|&k| k != target).collect();
    let rest_total = total - p0;
    let dominant = rest
        .iter()
        .copied()
        .find(|&j| env.power(j) + env.power(j) > rest_total);
    let mut u = AllocationMatrix::zeros(n);

    match dominant {
        Some(j) => {
            let surplus = env.power(j) + env.power(j) - rest_total;
            let share = surplus / Power::from_int(rest.len() as i64 - 1);
            for &k in rest.iter().filter(|&&k| k != j) {
                u.set(j, k, env.power(k) + share);
                u.set(k, j, env.power(k));
            }
            let eta = (p0 - surplus) / Power::from_int(2);
            u.set(target, j, surplus + eta);
            u.set(target, target, p0 - surplus - eta);
        }
        None => {
            let powers: Vec<Power> = rest.iter().map(|&k| env.power(k)).collect();
            let w = symmetric_row_sum_matrix(&powers)?;
            for (a, &i) in rest.iter().enumerate() {
                for (b, &j) in rest.iter().enumerate() {
                    u.set(i, j, w[a][b]);
                }
            }
            let share = p0 / Power::from_int(rest.len() as i64);
            for &k in &rest {
                u.set(target, k, share);
            }
        }
    }

    let states = env.state_vector(&u);
    let expected = (0..n).all(|k| {
        states.get(k)
            == if k == target {
                SurvivalState::Safe
            } else {
                SurvivalState::Unsafe
            }
    });
    if !expected {
        return Err(failed(1, format!("unexpected states {states}")));
    }
    verify(env, &u, rule).map_err(|r| failed(1, r))?;
    Ok(u)
}

/// The pair order and residual trace of one annihilation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOrdering {
    pub pairs: Vec<(usize, usize)>,
    /// `trace[k]` is the residual vector after `k` steps; `trace[0]` is `p`.
    pub trace: Vec<Vec<Power>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annihilation {
    /// Symmetric allocations on the processed pairs; residuals are not placed.
    pub matrix: AllocationMatrix,
    pub residuals: Vec<Power>,
    pub ordering: PairOrdering,
}

/// Adversarial pairs not touching `excluded`, in lexicographic order.
pub fn default_ordering(env: &Environment, excluded: usize) -> Vec<(usize, usize)> {
    env.adversary_pairs()
        .filter(|&(a, b)| a != excluded && b != excluded)
        .collect()
}

/// Walks `pairs` in order, letting each pair cancel the smaller of their
/// remaining powers against each other.
pub fn pairwise_annihilation(
    env: &Environment,
    excluded: usize,
    pairs: &[(usize, usize)],
) -> Annihilation {
    let n = env.n();
    let mut z: Vec<Power> = env.powers().to_vec();
    let mut u = AllocationMatrix::zeros(n);
    let mut trace = vec![z.clone()];
    for &(j, h) in pairs {
        debug_assert!(j != excluded && h != excluded);
        let m = z[j].min(z[h]);
        u.set(j, h, u.get(j, h) + m);
        u.set(h, j, u.get(h, j) + m);
        z[j] -= m;
        z[h] -= m;
        trace.push(z.clone());
    }
    Annihilation {
        matrix: u,
        residuals: z,
        ordering: PairOrdering {
            pairs: pairs.to_vec(),
            trace,
        },
    }
}

/// Completes an annihilation into a full allocation with `i` attacking.
///
/// `i` covers every adversary's residual and splits what is left equally on
/// top. A residual-holding country spends its residual evenly on those of its
/// adversaries that would otherwise be left precarious, and keeps it in
/// reserve if there are none.
fn complete_safe_allocation(env: &Environment, i: usize, run: &Annihilation) -> AllocationMatrix {
    let n = env.n();
    let z = &run.residuals;
    let mut u = run.matrix.clone();

    let targets = env.adversaries(i);
    if targets.is_empty() {
        u.set(i, i, env.power(i));
    } else {
        let covered: Power = targets.iter().map(|&j| z[j]).sum();
        let epsilon = (env.power(i) - covered) / Power::from_int(targets.len() as i64);
        for &j in targets {
            u.set(i, j, z[j] + epsilon);
        }
    }

    let attacked = |k: usize| targets.contains(&k);
    for k in (0..n).filter(|&k| k != i) {
        if !z[k].is_positive() {
            continue;
        }
        // Adversaries with no residual balance their pairs exactly.
        let open: Vec<usize> = env
            .adversaries(k)
            .iter()
            .copied()
            .filter(|&j| j != i && !attacked(j) && z[j].is_zero())
            .collect();
        if open.is_empty() {
            u.set(k, k, z[k]);
        } else {
            let share = z[k] / Power::from_int(open.len() as i64);
            for j in open {
                u.set(k, j, u.get(k, j) + share);
            }
        }
    }
    u
}

/// Applies profitable deviations round-robin until none is left.
///
/// Returns the equilibrium reached, or `None` after [`REPAIR_STEPS`] moves or
/// once entries get unwieldy.
pub fn repair(
    env: &Environment,
    mut u: AllocationMatrix,
    rule: DeviationRule,
) -> Option<AllocationMatrix> {
    let n = env.n();
    let mut start = 0;
    for _ in 0..REPAIR_STEPS {
        let report = is_nash(env, &u, rule);
        let mover =
            (0..n)
                .map(|k| (start + k) % n)
                .find_map(|k| match &report.certificates[k].outcome {
                    crate::equilibrium::DeviationOutcome::Profitable(d) => Some(d.clone()),
                    crate::equilibrium::DeviationOutcome::NoProfitableDeviation => None,
                });
        let Some(d) = mover else {
            return Some(u);
        };
        if d.row.iter().any(|x| x.denom() > REPAIR_DENOMINATOR_CAP) {
            return None;
        }
        u.set_row(d.country, &d.row);
        start = d.country + 1;
    }
    is_nash(env, &u, rule).is_equilibrium().then_some(u)
}

/// An equilibrium of a bipartite adversary graph without friends in which
/// `i` is safe.
///
/// Each candidate comes from annihilating the pairs not involving `i` and
/// letting `i` cover its adversaries' residuals. A candidate that is not an
/// equilibrium with `i` safe goes through [`repair`]. Tries the lexicographic
/// pair order first, then up to [`ORDERING_RETRIES`] shuffles drawn from
/// `seed`.
pub fn bipartite_safe_equilibrium(
    env: &Environment,
    i: usize,
    seed: u64,
    rule: DeviationRule,
) -> Result<AllocationMatrix, ConstructionError> {
    if i >= env.n() {
        return Err(ConstructionError::PreconditionViolated(format!(
            "no country with index {i}"
        )));
    }
    if !bipartite_safe_sufficient(env, i)? {
        return Err(ConstructionError::ConditionNotMet(format!(
            "{} cannot be guaranteed a safe equilibrium",
            env.name(i)
        )));
    }
    let mut order = default_ordering(env, i);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for attempt in 0..=ORDERING_RETRIES {
        if attempt > 0 {
            if order.len() < 2 {
                break;
            }
            order.shuffle(&mut rng);
        }
        let run = pairwise_annihilation(env, i, &order);
        let u = complete_safe_allocation(env, i, &run);
        match verify(env, &u, rule) {
            Ok(()) if env.state(&u, i) == SurvivalState::Safe => return Ok(u),
            Ok(()) => last = format!("{} is {}", env.name(i), env.state(&u, i)),
            Err(reason) => last = reason,
        }
        if let Some(v) = repair(env, u, rule) {
            if env.state(&v, i) == SurvivalState::Safe {
                return Ok(v);
            }
            last = format!("repair ended with {} {}", env.name(i), env.state(&v, i));
        }
    }
    let attempts = if order.len() < 2 {
        1
    } else {
        ORDERING_RETRIES + 1
    };
    Err(failed(attempts, last))
}

//! Nash verification by exact best-deviation feasibility.
//!
//! When country `i` rewrites its row, only the states of `i`, its friends and
//! its adversaries can change, and each of them depends on a single linear
//! quantity of the new row:
//!
//! * friend `j` survives iff `v_ij >= g_j` and is safe iff `v_ij > g_j`;
//! * adversary `j` is not safe iff `v_ij >= h_j` and unsafe iff `v_ij > h_j`;
//! * `i` survives iff its friend spending `Σ_{j∈F_i} v_ij <= c` and is safe iff
//!   it is `< c`, with `c = p_i + s_ext - t_ext`.
//!
//! Whether a set of minimum standings is reachable is therefore a question
//! about sums of lower bounds, decided in closed form. Improvements are
//! monotone in the targets, so it suffices to test the current standings with
//! one entry raised by one level, plus the self-survival jump.

use serde::Serialize;

use crate::model::{AllocationMatrix, Environment, Evaluation, StateVector};
use crate::power::Power;
use crate::preference::{
    improvement_verdict, max_standing, relevant_countries, standing, DeviationRule,
    RelevantCategoryProfile, Verdict,
};

/// Country `i`'s re-allocation problem with everybody else's rows fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationProblem {
    pub country: usize,
    pub budget: Power,
    /// Σ_{j∈F_i} u_ji
    pub external_support: Power,
    /// Σ_{j∈A_i} u_ji
    pub external_threat: Power,
    /// `(j, g_j)`: allocation from `i` at which friend `j` is exactly precarious.
    pub friend_gaps: Vec<(usize, Power)>,
    /// `(j, h_j)`: allocation from `i` at which adversary `j` is exactly precarious.
    pub adversary_gaps: Vec<(usize, Power)>,
}

impl DeviationProblem {
    pub fn new(env: &Environment, u: &AllocationMatrix, i: usize) -> Self {
        Self::with_evaluation(env, u, &env.evaluate(u), i)
    }

    pub fn with_evaluation(
        env: &Environment,
        u: &AllocationMatrix,
        eval: &Evaluation,
        i: usize,
    ) -> Self {
        let friend_gaps = env
            .friends(i)
            .iter()
            .map(|&j| (j, eval.threat[j] - (eval.support[j] - u.get(i, j))))
            .collect();
        let adversary_gaps = env
            .adversaries(i)
            .iter()
            .map(|&j| (j, eval.support[j] - (eval.threat[j] - u.get(i, j))))
            .collect();
        DeviationProblem {
            country: i,
            budget: env.power(i),
            external_support: env.friends(i).iter().map(|&j| u.get(j, i)).sum(),
            external_threat: env.adversaries(i).iter().map(|&j| u.get(j, i)).sum(),
            friend_gaps,
            adversary_gaps,
        }
    }

    /// Largest friend spending that keeps `i` surviving.
    pub fn self_capacity(&self) -> Power {
        self.budget + self.external_support - self.external_threat
    }

    /// Number of relevant countries: self, friends, adversaries.
    pub fn width(&self) -> usize {
        1 + self.friend_gaps.len() + self.adversary_gaps.len()
    }

    /// A row for country `i` reaching at least `target` standings, if any exists.
    ///
    /// `target` is ordered like [`relevant_countries`] and uses the ordinal
    /// scale of [`standing`]: 0 no requirement, 1 surviving (friends, self) or
    /// not safe (adversaries), 2 safe (friends, self) or unsafe (adversaries).
    pub fn reach(&self, target: &[u8], n: usize) -> Option<Vec<Power>> {
        assert_eq!(target.len(), self.width(), "target width");
        let own = target[0];
        let friend_req = &target[1..1 + self.friend_gaps.len()];
        let adversary_req = &target[1 + self.friend_gaps.len()..];

        // (country, lower bound, strict)
        let bound = |gap: Power, level: u8| -> Option<(Power, bool)> {
            match level {
                0 => None,
                1 => Some((gap.clamp_nonnegative(), false)),
                _ => Some((gap.clamp_nonnegative(), !gap.is_negative())),
            }
        };
        let friends: Vec<(usize, Power, bool)> = self
            .friend_gaps
            .iter()
            .zip(friend_req)
            .filter_map(|(&(j, g), &lvl)| bound(g, lvl).map(|(lb, s)| (j, lb, s)))
            .collect();
        let adversaries: Vec<(usize, Power, bool)> = self
            .adversary_gaps
            .iter()
            .zip(adversary_req)
            .filter_map(|(&(j, h), &lvl)| bound(h, lvl).map(|(lb, s)| (j, lb, s)))
            .collect();

        let friend_floor: Power = friends.iter().map(|f| f.1).sum();
        let total_floor: Power = friend_floor + adversaries.iter().map(|a| a.1).sum::<Power>();
        let strict_friends = friends.iter().filter(|f| f.2).count();
        let strict_all = strict_friends + adversaries.iter().filter(|a| a.2).count();

        let total_slack = self.budget - total_floor;
        if total_slack.is_negative() || (strict_all > 0 && total_slack.is_zero()) {
            return None;
        }
        let mut epsilon = if strict_all > 0 {
            total_slack / Power::from_int(strict_all as i64 + 1)
        } else {
            Power::ZERO
        };
        if own > 0 {
            let self_slack = self.self_capacity() - friend_floor;
            let strict_self = own >= 2 || strict_friends > 0;
            if self_slack.is_negative() || (strict_self && self_slack.is_zero()) {
                return None;
            }
            if strict_friends > 0 {
                let share = self_slack / Power::from_int(strict_friends as i64 + 1);
                epsilon = epsilon.min(share);
            }
        }

        let mut row = vec![Power::ZERO; n];
        for &(j, lb, strict) in friends.iter().chain(&adversaries) {
            row[j] = if strict { lb + epsilon } else { lb };
        }
        let spent: Power = row.iter().sum();
        row[self.country] = self.budget - spent;
        Some(row)
    }
}

/// A profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfitableDeviation {
    pub country: usize,
    /// The deviating country's new row.
    pub row: Vec<Power>,
    /// Full state vector after the deviation.
    pub states: StateVector,
    pub profile: RelevantCategoryProfile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DeviationOutcome {
    NoProfitableDeviation,
    Profitable(ProfitableDeviation),
}

impl DeviationOutcome {
    pub fn is_profitable(&self) -> bool {
        matches!(self, DeviationOutcome::Profitable(_))
    }
}

fn current_standings(
    env: &Environment,
    i: usize,
    states: &StateVector,
    rule: DeviationRule,
) -> Vec<u8> {
    relevant_countries(env, i)
        .into_iter()
        .map(|(j, role)| standing(role, states.get(j), rule))
        .collect()
}

/// Finds a profitable target for `i`, returning the reaching row.
fn improving_row(
    env: &Environment,
    problem: &DeviationProblem,
    states: &StateVector,
    rule: DeviationRule,
) -> Option<Vec<Power>> {
    let i = problem.country;
    let n = env.n();
    let roles = relevant_countries(env, i);
    let current = current_standings(env, i, states, rule);
    let top: Vec<u8> = roles
        .iter()
        .map(|&(_, role)| max_standing(role, rule))
        .collect();

    let mut found: Option<Vec<u8>> = None;
    if current[0] == 0 {
        let mut jump = vec![0; current.len()];
        jump[0] = 1;
        if problem.reach(&jump, n).is_some() {
            found = Some(jump);
        }
    }
    if found.is_none() {
        for k in 0..current.len() {
            if current[k] < top[k] {
                let mut target = current.clone();
                target[k] += 1;
                if problem.reach(&target, n).is_some() {
                    found = Some(target);
                    break;
                }
            }
        }
    }

    // Raise further where possible so the witness is as strong as a greedy pass allows.
    let mut target = found?;
    loop {
        let mut raised = false;
        for k in 0..target.len() {
            if target[k] < top[k] {
                target[k] += 1;
                if problem.reach(&target, n).is_some() {
                    raised = true;
                } else {
                    target[k] -= 1;
                }
            }
        }
        if !raised {
            break;
        }
    }
    problem.reach(&target, n)
}

/// Best response search for one country under `rule`.
pub fn best_deviation(
    env: &Environment,
    u: &AllocationMatrix,
    i: usize,
    rule: DeviationRule,
) -> DeviationOutcome {
    let eval = env.evaluate(u);
    best_deviation_with(env, u, &eval, i, rule)
}

pub fn best_deviation_with(
    env: &Environment,
    u: &AllocationMatrix,
    eval: &Evaluation,
    i: usize,
    rule: DeviationRule,
) -> DeviationOutcome {
    let problem = DeviationProblem::with_evaluation(env, u, eval, i);
    let Some(row) = improving_row(env, &problem, &eval.states, rule) else {
        return DeviationOutcome::NoProfitableDeviation;
    };
    let mut deviated = u.clone();
    deviated.set_row(i, &row);
    let states = env.state_vector(&deviated);
    assert_eq!(
        improvement_verdict(env, i, &eval.states, &states, rule),
        Verdict::StrictImprovement,
        "deviation witness for country {i} is not an improvement"
    );
    DeviationOutcome::Profitable(ProfitableDeviation {
        country: i,
        profile: RelevantCategoryProfile::new(env, i, &states),
        row,
        states,
    })
}

/// Per-country outcome of the equilibrium check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountryCertificate {
    pub country: usize,
    pub outcome: DeviationOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NashReport {
    pub rule: DeviationRule,
    pub states: StateVector,
    pub certificates: Vec<CountryCertificate>,
}

impl NashReport {
    pub fn is_equilibrium(&self) -> bool {
        self.certificates.iter().all(|c| !c.outcome.is_profitable())
    }

    pub fn profitable(&self) -> impl Iterator<Item = &ProfitableDeviation> {
        self.certificates.iter().filter_map(|c| match &c.outcome {
            DeviationOutcome::Profitable(d) => Some(d),
            DeviationOutcome::NoProfitableDeviation => None,
        })
    }
}

/// Checks every country; certificates are in ascending country order.
pub fn is_nash(env: &Environment, u: &AllocationMatrix, rule: DeviationRule) -> NashReport {
    let eval = env.evaluate(u);
    let certificates = (0..env.n())
        .map(|i| CountryCertificate {
            country: i,
            outcome: best_deviation_with(env, u, &eval, i, rule),
        })
        .collect();
    NashReport {
        rule,
        states: eval.states,
        certificates,
    }
}

/// Short-circuiting equilibrium test without certificates.
pub fn is_equilibrium(env: &Environment, u: &AllocationMatrix, rule: DeviationRule) -> bool {
    let eval = env.evaluate(u);
    (0..env.n()).all(|i| {
        let problem = DeviationProblem::with_evaluation(env, u, &eval, i);
        improving_row(env, &problem, &eval.states, rule).is_none()
    })
}

/// Two equilibria are in the same class iff their state vectors agree.
pub fn same_equilibrium_class(
    env: &Environment,
    u: &AllocationMatrix,
    v: &AllocationMatrix,
) -> bool {
    env.state_vector(u) == env.state_vector(v)
}

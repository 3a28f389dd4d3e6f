//! Preferences over outcomes.
//!
//! A country cares about itself and its friends surviving and about its
//! adversaries not being safe. [`weakly_prefers`], [`indifferent`] and
//! [`strongly_prefers`] are the two preference axioms verbatim. Because they
//! only induce a partial order, deciding whether a unilateral deviation is
//! *profitable* needs one more rule; that choice lives in
//! [`improvement_verdict`] and nowhere else.

use serde::{Deserialize, Serialize};

use crate::model::{Environment, StateVector, SurvivalState};

/// How country `j` relates to the country `i` whose preferences are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Own,
    Friend,
    Adversary,
}

/// Decision rule for profitable deviations.
///
/// Both rules accept a jump from unsafe to surviving for the deviator itself
/// regardless of anything else, and otherwise require a Pareto improvement
/// over the deviator's relevant countries. They differ in what counts as an
/// improvement for one country:
///
/// * `Categorical` only sees the two preference groups: surviving vs not for
///   itself and friends, safe vs not safe for adversaries. Moving an adversary
///   from precarious to unsafe changes nothing.
/// * `Refined` keeps those groups for itself and friends but also ranks an
///   adversary's survival: safe < precarious < unsafe. Pushing a precarious
///   adversary to unsafe is an improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviationRule {
    #[default]
    Refined,
    Categorical,
}

impl DeviationRule {
    pub const ALL: [DeviationRule; 2] = [DeviationRule::Refined, DeviationRule::Categorical];

    pub fn as_str(self) -> &'static str {
        match self {
            DeviationRule::Refined => "refined",
            DeviationRule::Categorical => "categorical",
        }
    }
}

impl std::str::FromStr for DeviationRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "refined" => Ok(DeviationRule::Refined),
            "categorical" => Ok(DeviationRule::Categorical),
            other => Err(format!("unknown deviation rule `{other}`")),
        }
    }
}

/// Standing of a country in `state` from the evaluator's point of view;
/// larger is better for the evaluator.
///
/// The scale is shared by both rules: 0 is the unfavourable group, 1 is
/// surviving (self, friends) or not safe (adversaries), and 2 is reached only by
/// an unsafe adversary under [`DeviationRule::Refined`].
pub fn standing(role: Role, state: SurvivalState, rule: DeviationRule) -> u8 {
    use SurvivalState::*;
    match (role, state) {
        (Role::Own | Role::Friend, Unsafe) => 0,
        (Role::Own | Role::Friend, _) => 1,
        (Role::Adversary, Safe) => 0,
        (Role::Adversary, Precarious) => 1,
        (Role::Adversary, Unsafe) => match rule {
            DeviationRule::Refined => 2,
            DeviationRule::Categorical => 1,
        },
    }
}

pub fn max_standing(role: Role, rule: DeviationRule) -> u8 {
    match (role, rule) {
        (Role::Adversary, DeviationRule::Refined) => 2,
        _ => 1,
    }
}

/// `{i} ∪ F_i ∪ A_i` with roles: self first, then friends, then adversaries.
pub fn relevant_countries(env: &Environment, i: usize) -> Vec<(usize, Role)> {
    std::iter::once((i, Role::Own))
        .chain(env.friends(i).iter().map(|&j| (j, Role::Friend)))
        .chain(env.adversaries(i).iter().map(|&j| (j, Role::Adversary)))
        .collect()
}

/// Binary preference group of one relevant country.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CategoryEntry {
    pub country: usize,
    pub role: Role,
    /// Surviving for self and friends; not safe for adversaries.
    pub favourable: bool,
}

/// The relevant set of `i` collapsed to the two groups of each axiom condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelevantCategoryProfile {
    pub entries: Vec<CategoryEntry>,
}

impl RelevantCategoryProfile {
    pub fn new(env: &Environment, i: usize, states: &StateVector) -> Self {
        let entries = relevant_countries(env, i)
            .into_iter()
            .map(|(country, role)| CategoryEntry {
                country,
                role,
                favourable: standing(role, states.get(country), DeviationRule::Categorical) == 1,
            })
            .collect();
        RelevantCategoryProfile { entries }
    }
}

/// Whether `i` weakly prefers the outcome `v` over `u`.
pub fn weakly_prefers(env: &Environment, i: usize, u: &StateVector, v: &StateVector) -> bool {
    let own_side = std::iter::once(&i).chain(env.friends(i));
    let own_ok = own_side
        .into_iter()
        .all(|&j| v.get(j).survives() || u.get(j) == SurvivalState::Unsafe);
    let adversary_ok = env
        .adversaries(i)
        .iter()
        .all(|&j| v.get(j) != SurvivalState::Safe || u.get(j) == SurvivalState::Safe);
    own_ok && adversary_ok
}

/// Whether `i` is indifferent between `u` and `v`: identical states on its relevant set.
pub fn indifferent(env: &Environment, i: usize, u: &StateVector, v: &StateVector) -> bool {
    relevant_countries(env, i)
        .iter()
        .all(|&(j, _)| u.get(j) == v.get(j))
}

/// Whether `i` strongly prefers `v` over `u` by the priority of self-survival.
pub fn strongly_prefers(i: usize, u: &StateVector, v: &StateVector) -> bool {
    v.get(i).survives() && u.get(i) == SurvivalState::Unsafe
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    StrictImprovement,
    NoImprovement,
}

/// Whether moving from `u` to `v` is a strict improvement for `i`.
///
/// Strict iff `i` strongly prefers `v`, or it weakly prefers `v` and the
/// standings of its relevant countries under `rule` are all at least as good
/// with one strictly better.
pub fn improvement_verdict(
    env: &Environment,
    i: usize,
    u: &StateVector,
    v: &StateVector,
    rule: DeviationRule,
) -> Verdict {
    if strongly_prefers(i, u, v) {
        return Verdict::StrictImprovement;
    }
    if !weakly_prefers(env, i, u, v) {
        return Verdict::NoImprovement;
    }
    let mut strictly_better = false;
    for (j, role) in relevant_countries(env, i) {
        let before = standing(role, u.get(j), rule);
        let after = standing(role, v.get(j), rule);
        if after < before {
            return Verdict::NoImprovement;
        }
        strictly_better |= after > before;
    }
    if strictly_better {
        Verdict::StrictImprovement
    } else {
        Verdict::NoImprovement
    }
}

//! Structural survival conditions.
//!
//! Group balance, clique defense, the balancing-equilibrium criterion, the
//! bipartite safety conditions, and the domination-protectorate cover with its
//! per-country survival prediction.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::model::Environment;
use crate::power::Power;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("every pair of countries must be adversaries")]
    NotCompleteAdversarial,
    #[error("the environment must not contain friendships")]
    HasFriends,
    #[error("the adversary graph is not bipartite (odd cycle through {0})")]
    NotBipartite(String),
    #[error("at least two countries are required")]
    TooFewCountries,
}

fn power_sum<'a>(env: &Environment, set: impl IntoIterator<Item = &'a usize>) -> Power {
    set.into_iter().map(|&j| env.power(j)).sum()
}

/// A set of mutually non-adversarial countries, each at least as strong as
/// all its adversaries combined. Every member survives in every equilibrium.
pub fn check_group_balance(env: &Environment, group: &[usize]) -> bool {
    let members: BTreeSet<usize> = group.iter().copied().collect();
    members.iter().all(|&i| {
        let adv = env.adversaries(i);
        adv.iter().all(|j| !members.contains(j)) && env.power(i) >= power_sum(env, adv)
    })
}

/// Union of the adversaries of every member.
pub fn group_adversaries(env: &Environment, group: &[usize]) -> BTreeSet<usize> {
    group
        .iter()
        .flat_map(|&i| env.adversaries(i).iter().copied())
        .collect()
}

/// A clique of friends whose joint power covers the union of their adversaries.
pub fn check_clique_defense(env: &Environment, group: &[usize]) -> bool {
    let members: BTreeSet<usize> = group.iter().copied().collect();
    let clique = members.iter().all(|&i| {
        members
            .iter()
            .all(|&j| i == j || env.friends(i).contains(&j))
    });
    clique && power_sum(env, &members) >= power_sum(env, &group_adversaries(env, group))
}

fn require_complete_adversarial(env: &Environment) -> Result<(), TopologyError> {
    if env.n() < 2 {
        return Err(TopologyError::TooFewCountries);
    }
    if env.has_friends() {
        return Err(TopologyError::HasFriends);
    }
    if !env.is_complete_adversarial() {
        return Err(TopologyError::NotCompleteAdversarial);
    }
    Ok(())
}

/// Whether a balancing equilibrium exists: no country outweighs all others.
pub fn balancing_exists(env: &Environment) -> Result<bool, TopologyError> {
    require_complete_adversarial(env)?;
    let total = env.total_power();
    Ok((0..env.n()).all(|i| env.power(i) + env.power(i) <= total))
}

/// Two-coloring of the adversary graph, each component starting at its
/// smallest index with color 0.
pub fn two_coloring(env: &Environment) -> Result<Vec<u8>, TopologyError> {
    let mut color: Vec<Option<u8>> = vec![None; env.n()];
    for start in 0..env.n() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let c = color[i].unwrap();
            for &j in env.adversaries(i) {
                match color[j] {
                    None => {
                        color[j] = Some(1 - c);
                        queue.push_back(j);
                    }
                    Some(cj) if cj == c => {
                        return Err(TopologyError::NotBipartite(env.name(j).to_string()))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(color.into_iter().map(Option::unwrap).collect())
}

fn require_bipartite(env: &Environment) -> Result<(), TopologyError> {
    if env.has_friends() {
        return Err(TopologyError::HasFriends);
    }
    two_coloring(env).map(|_| ())
}

/// Necessary condition for `i` to be safe in some equilibrium of a bipartite
/// game: none of its adversaries outweighs that adversary's own adversaries.
pub fn bipartite_safe_necessary(env: &Environment, i: usize) -> Result<bool, TopologyError> {
    require_bipartite(env)?;
    Ok(env
        .adversaries(i)
        .iter()
        .all(|&j| env.power(j) <= power_sum(env, env.adversaries(j))))
}

/// `∪_{j∈A_i} A_j`, which contains `i` itself whenever `A_i` is non-empty.
pub fn second_adversaries(env: &Environment, i: usize) -> BTreeSet<usize> {
    env.adversaries(i)
        .iter()
        .flat_map(|&j| env.adversaries(j).iter().copied())
        .collect()
}

/// Sufficient condition for an equilibrium in which `i` is safe.
///
/// Besides the necessary condition, the adversaries of `i` must be strictly
/// weaker than their own adversaries combined. A country without power can
/// never be safe, so `p_i > 0` is also required; with no adversaries that is
/// the whole condition.
pub fn bipartite_safe_sufficient(env: &Environment, i: usize) -> Result<bool, TopologyError> {
    if !bipartite_safe_necessary(env, i)? {
        return Ok(false);
    }
    let adversaries = power_sum(env, env.adversaries(i));
    let beyond = power_sum(env, &second_adversaries(env, i));
    Ok(env.power(i).is_positive() && (env.adversaries(i).is_empty() || adversaries < beyond))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Domination {
    pub owner: usize,
    /// `{i} ∪ A_i ∪ ⋃_{j∈A_i} F_j`
    pub members: BTreeSet<usize>,
}

/// Friends of the adversaries of `i`.
fn adversary_friends(env: &Environment, i: usize) -> BTreeSet<usize> {
    env.adversaries(i)
        .iter()
        .flat_map(|&j| env.friends(j).iter().copied())
        .collect()
}

/// Present when `i` alone outweighs its adversaries and their friends.
pub fn domination(env: &Environment, i: usize) -> Option<Domination> {
    let allies = adversary_friends(env, i);
    let needed = power_sum(env, env.adversaries(i)) + power_sum(env, &allies);
    if env.power(i) < needed {
        return None;
    }
    let mut members: BTreeSet<usize> = allies;
    members.insert(i);
    members.extend(env.adversaries(i).iter().copied());
    Some(Domination { owner: i, members })
}

/// Which power the weak-friend sum adds up in the protectorate inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ProtectorateSummand {
    /// `p_i + Σ_{j∈Ξ_i} p_j`
    #[default]
    FriendPower,
    /// `p_i + |Ξ_i| p_i`, the formula as printed.
    OwnerPower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Protectorate {
    pub owner: usize,
    /// Ξ_i: friends weaker than their own adversaries combined.
    pub weak_friends: BTreeSet<usize>,
    /// Θ_i: adversaries of the weak friends.
    pub threats: BTreeSet<usize>,
    /// `{i} ∪ F_i`
    pub members: BTreeSet<usize>,
}

pub fn protectorate(env: &Environment, i: usize) -> Option<Protectorate> {
    protectorate_with(env, i, ProtectorateSummand::default())
}

pub fn protectorate_with(
    env: &Environment,
    i: usize,
    summand: ProtectorateSummand,
) -> Option<Protectorate> {
    let weak_friends: BTreeSet<usize> = env
        .friends(i)
        .iter()
        .copied()
        .filter(|&j| env.power(j) < power_sum(env, env.adversaries(j)))
        .collect();
    let threats: BTreeSet<usize> = weak_friends
        .iter()
        .flat_map(|&j| env.adversaries(j).iter().copied())
        .collect();
    let backing = match summand {
        ProtectorateSummand::FriendPower => power_sum(env, &weak_friends),
        ProtectorateSummand::OwnerPower => env.power(i).times(weak_friends.len() as u64),
    };
    let opposing: BTreeSet<usize> = env
        .adversaries(i)
        .iter()
        .copied()
        .chain(threats.iter().copied())
        .collect();
    if env.power(i) + backing < power_sum(env, &opposing) {
        return None;
    }
    let members = std::iter::once(i)
        .chain(env.friends(i).iter().copied())
        .collect();
    Some(Protectorate {
        owner: i,
        weak_friends,
        threats,
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverVerdict {
    Survives,
    NotSurvives,
    /// Claimed to survive by one structure and to perish by an adversary's domination.
    Conflict,
    Undetermined,
}

impl CoverVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverVerdict::Survives => "Survives",
            CoverVerdict::NotSurvives => "NotSurvives",
            CoverVerdict::Conflict => "Conflict",
            CoverVerdict::Undetermined => "Undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub dominations: Vec<Domination>,
    pub protectorates: Vec<Protectorate>,
    pub covered: BTreeSet<usize>,
    pub spans: bool,
    pub verdicts: Vec<CoverVerdict>,
}

pub fn dp_cover(env: &Environment) -> CoverReport {
    dp_cover_with(env, ProtectorateSummand::default())
}

/// Dominations, protectorates and the survival prediction they imply.
///
/// When the cover spans, each country gets one verdict:
///
/// * it survives if it owns a domination or sits in a protectorate;
/// * it perishes if it is an adversary of some dominator;
/// * being a friend of a dominated adversary also points to perishing, but
///   yields to a survival claim;
/// * a survival claim against an adversary-of-dominator claim is a `Conflict`.
///
/// A non-spanning cover predicts nothing.
pub fn dp_cover_with(env: &Environment, summand: ProtectorateSummand) -> CoverReport {
    let n = env.n();
    let dominations: Vec<Domination> = (0..n).filter_map(|i| domination(env, i)).collect();
    let protectorates: Vec<Protectorate> = (0..n)
        .filter_map(|i| protectorate_with(env, i, summand))
        .collect();
    let covered: BTreeSet<usize> = dominations
        .iter()
        .flat_map(|d| d.members.iter().copied())
        .chain(protectorates.iter().flat_map(|p| p.members.iter().copied()))
        .collect();
    let spans = covered.len() == n;

    let verdicts = (0..n)
        .map(|i| {
            if !spans {
                return CoverVerdict::Undetermined;
            }
            let survives = dominations.iter().any(|d| d.owner == i)
                || protectorates.iter().any(|p| p.members.contains(&i));
            let crushed = dominations
                .iter()
                .any(|d| env.adversaries(d.owner).contains(&i));
            let outflanked = dominations
                .iter()
                .any(|d| d.owner != i && d.members.contains(&i));
            match (survives, crushed, outflanked) {
                (true, true, _) => CoverVerdict::Conflict,
                (true, false, _) => CoverVerdict::Survives,
                (false, true, _) | (false, false, true) => CoverVerdict::NotSurvives,
                (false, false, false) => CoverVerdict::Undetermined,
            }
        })
        .collect();

    CoverReport {
        dominations,
        protectorates,
        covered,
        spans,
        verdicts,
    }
}

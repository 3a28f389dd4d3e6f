//! Environments, allocation matrices and the support/threat/state semantics.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::power::Power;

/// Relation of country `i` towards a distinct country `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Null,
    Friend,
    Adversary,
}

/// Unchecked description of an environment, indices are 0-based.
#[derive(Debug, Clone, Default)]
pub struct EnvironmentSpec {
    pub names: Vec<String>,
    pub powers: Vec<Power>,
    pub friends: Vec<(usize, usize)>,
    pub adversaries: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvironmentError {
    #[error("{names} names given for {powers} powers")]
    LengthMismatch { names: usize, powers: usize },
    #[error("duplicate country name `{0}`")]
    DuplicateName(String),
    #[error("negative power {power} for country {country}")]
    NegativePower { country: usize, power: Power },
    #[error("self-pair at country {0}")]
    SelfPair(usize),
    #[error("pair ({0}, {1}) references a country outside the environment")]
    UnknownCountry(usize, usize),
    #[error("conflicting relation: pair ({0}, {1}) is both friendly and adversarial")]
    ConflictingRelation(usize, usize),
}

/// A checked environment: countries, total powers and symmetric relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    names: Vec<String>,
    powers: Vec<Power>,
    friends: Vec<Vec<usize>>,
    adversaries: Vec<Vec<usize>>,
    friend_pairs: BTreeSet<(usize, usize)>,
    adversary_pairs: BTreeSet<(usize, usize)>,
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Checks a raw description and builds the environment, collecting every error.
pub fn validate_environment(spec: EnvironmentSpec) -> Result<Environment, Vec<EnvironmentError>> {
    let mut errors = Vec::new();
    let n = spec.powers.len();
    if spec.names.len() != n {
        errors.push(EnvironmentError::LengthMismatch {
            names: spec.names.len(),
            powers: n,
        });
        return Err(errors);
    }

    let mut seen = HashSet::new();
    for name in &spec.names {
        if !seen.insert(name.as_str()) {
            errors.push(EnvironmentError::DuplicateName(name.clone()));
        }
    }
    for (country, power) in spec.powers.iter().enumerate() {
        if power.is_negative() {
            errors.push(EnvironmentError::NegativePower {
                country,
                power: *power,
            });
        }
    }

    let mut collect = |pairs: &[(usize, usize)]| -> BTreeSet<(usize, usize)> {
        let mut set = BTreeSet::new();
        for &(a, b) in pairs {
            if a >= n || b >= n {
                errors.push(EnvironmentError::UnknownCountry(a, b));
            } else if a == b {
                errors.push(EnvironmentError::SelfPair(a));
            } else {
                set.insert(ordered(a, b));
            }
        }
        set
    };
    let friend_pairs = collect(&spec.friends);
    let adversary_pairs = collect(&spec.adversaries);
    for &(a, b) in friend_pairs.intersection(&adversary_pairs) {
        errors.push(EnvironmentError::ConflictingRelation(a, b));
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    let mut friends = vec![Vec::new(); n];
    for &(a, b) in &friend_pairs {
        friends[a].push(b);
        friends[b].push(a);
    }
    let mut adversaries = vec![Vec::new(); n];
    for &(a, b) in &adversary_pairs {
        adversaries[a].push(b);
        adversaries[b].push(a);
    }
    for list in friends.iter_mut().chain(adversaries.iter_mut()) {
        list.sort_unstable();
    }

    Ok(Environment {
        names: spec.names,
        powers: spec.powers,
        friends,
        adversaries,
        friend_pairs,
        adversary_pairs,
    })
}

impl Environment {
    /// Builds an environment named `v1..vn` from integer powers and 0-based pairs.
    pub fn from_parts(
        powers: &[i64],
        friends: &[(usize, usize)],
        adversaries: &[(usize, usize)],
    ) -> Result<Self, Vec<EnvironmentError>> {
        validate_environment(EnvironmentSpec {
            names: (1..=powers.len()).map(|k| format!("v{k}")).collect(),
            powers: powers.iter().map(|&p| Power::from_int(p)).collect(),
            friends: friends.to_vec(),
            adversaries: adversaries.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.powers.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn power(&self, i: usize) -> Power {
        self.powers[i]
    }

    pub fn powers(&self) -> &[Power] {
        &self.powers
    }

    pub fn total_power(&self) -> Power {
        self.powers.iter().sum()
    }

    /// F_i, ascending.
    pub fn friends(&self, i: usize) -> &[usize] {
        &self.friends[i]
    }

    /// A_i, ascending.
    pub fn adversaries(&self, i: usize) -> &[usize] {
        &self.adversaries[i]
    }

    /// Friendly pairs `(a, b)` with `a < b`, in canonical order.
    pub fn friend_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.friend_pairs.iter().copied()
    }

    /// Adversarial pairs `(a, b)` with `a < b`, in canonical order.
    pub fn adversary_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adversary_pairs.iter().copied()
    }

    pub fn relation(&self, i: usize, j: usize) -> Relation {
        let key = ordered(i, j);
        if self.friend_pairs.contains(&key) {
            Relation::Friend
        } else if self.adversary_pairs.contains(&key) {
            Relation::Adversary
        } else {
            Relation::Null
        }
    }

    /// Whether `u[i][j]` may be nonzero: reserve or a friend/adversary edge.
    pub fn admits(&self, i: usize, j: usize) -> bool {
        i == j || self.relation(i, j) != Relation::Null
    }

    pub fn has_friends(&self) -> bool {
        !self.friend_pairs.is_empty()
    }

    /// Every pair of countries is adversarial and nobody has friends.
    pub fn is_complete_adversarial(&self) -> bool {
        let n = self.n();
        !self.has_friends() && self.adversary_pairs.len() == n * n.saturating_sub(1) / 2
    }

    /// Relabels countries: country `i` of `self` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Environment {
        let n = self.n();
        let mut names = vec![String::new(); n];
        let mut powers = vec![Power::ZERO; n];
        for i in 0..n {
            names[perm[i]] = self.names[i].clone();
            powers[perm[i]] = self.powers[i];
        }
        validate_environment(EnvironmentSpec {
            names,
            powers,
            friends: self
                .friend_pairs()
                .map(|(a, b)| (perm[a], perm[b]))
                .collect(),
            adversaries: self
                .adversary_pairs()
                .map(|(a, b)| (perm[a], perm[b]))
                .collect(),
        })
        .expect("relabeling preserves validity")
    }

    /// σ_i(U): reserve, plus support from friends, plus own offense.
    pub fn support(&self, u: &AllocationMatrix, i: usize) -> Power {
        u.get(i, i)
            + self.friends[i].iter().map(|&j| u.get(j, i)).sum::<Power>()
            + self.adversaries[i]
                .iter()
                .map(|&j| u.get(i, j))
                .sum::<Power>()
    }

    /// τ_i(U): total offense of adversaries directed at `i`.
    pub fn threat(&self, u: &AllocationMatrix, i: usize) -> Power {
        self.adversaries[i].iter().map(|&j| u.get(j, i)).sum()
    }

    pub fn state(&self, u: &AllocationMatrix, i: usize) -> SurvivalState {
        SurvivalState::compare(self.support(u, i), self.threat(u, i))
    }

    pub fn state_vector(&self, u: &AllocationMatrix) -> StateVector {
        StateVector((0..self.n()).map(|i| self.state(u, i)).collect())
    }

    pub fn evaluate(&self, u: &AllocationMatrix) -> Evaluation {
        let support: Vec<Power> = (0..self.n()).map(|i| self.support(u, i)).collect();
        let threat: Vec<Power> = (0..self.n()).map(|i| self.threat(u, i)).collect();
        let states = StateVector(
            support
                .iter()
                .zip(&threat)
                .map(|(&s, &t)| SurvivalState::compare(s, t))
                .collect(),
        );
        Evaluation {
            support,
            threat,
            states,
        }
    }
}

/// Support, threat and state of every country under one allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub support: Vec<Power>,
    pub threat: Vec<Power>,
    pub states: StateVector,
}

/// An n×n matrix of power; row `i` is country `i`'s strategy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AllocationMatrix {
    n: usize,
    entries: Vec<Power>,
}

impl AllocationMatrix {
    pub fn zeros(n: usize) -> Self {
        AllocationMatrix {
            n,
            entries: vec![Power::ZERO; n * n],
        }
    }

    /// Every country holds its whole power in reserve.
    pub fn reserve_only(env: &Environment) -> Self {
        let mut u = Self::zeros(env.n());
        for i in 0..env.n() {
            u.set(i, i, env.power(i));
        }
        u
    }

    /// Builds from rows; `None` unless the rows form a square matrix.
    pub fn from_rows(rows: Vec<Vec<Power>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(AllocationMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer entries given as `(row, col, value)` triples, 0-based.
    pub fn from_entries(n: usize, entries: &[(usize, usize, i64)]) -> Self {
        let mut u = Self::zeros(n);
        for &(i, j, v) in entries {
            u.set(i, j, Power::from_int(v));
        }
        u
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Power {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Power) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Power] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn set_row(&mut self, i: usize, row: &[Power]) {
        assert_eq!(row.len(), self.n, "row length");
        self.entries[i * self.n..(i + 1) * self.n].copy_from_slice(row);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Power]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn row_sum(&self, i: usize) -> Power {
        self.row(i).iter().sum()
    }

    /// Country `i` relabeled as `perm[i]` in both rows and columns.
    pub fn permuted(&self, perm: &[usize]) -> AllocationMatrix {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }
}

impl fmt::Display for AllocationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocationError {
    #[error("matrix is {actual}x{actual} but the environment has {expected} countries")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry {
        row: usize,
        col: usize,
        value: Power,
    },
    #[error("row {country} sums to {actual}, expected {expected} (deficit {deficit})")]
    RowSumMismatch {
        country: usize,
        expected: Power,
        actual: Power,
        deficit: Power,
    },
    #[error("nonzero entry {value} at ({row}, {col}) between countries with no relation")]
    NullRelationEntry {
        row: usize,
        col: usize,
        value: Power,
    },
}

/// Ok iff every entry is non-negative, rows exhaust powers, and null-relation
/// cells are zero.
pub fn validate_allocation(
    env: &Environment,
    u: &AllocationMatrix,
) -> Result<(), Vec<AllocationError>> {
    if u.n() != env.n() {
        return Err(vec![AllocationError::DimensionMismatch {
            expected: env.n(),
            actual: u.n(),
        }]);
    }
    let mut errors = Vec::new();
    for i in 0..env.n() {
        for j in 0..env.n() {
            let value = u.get(i, j);
            if value.is_negative() {
                errors.push(AllocationError::NegativeEntry {
                    row: i,
                    col: j,
                    value,
                });
            } else if !value.is_zero() && !env.admits(i, j) {
                errors.push(AllocationError::NullRelationEntry {
                    row: i,
                    col: j,
                    value,
                });
            }
        }
        let actual = u.row_sum(i);
        if actual != env.power(i) {
            errors.push(AllocationError::RowSumMismatch {
                country: i,
                expected: env.power(i),
                actual,
                deficit: env.power(i) - actual,
            });
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurvivalState {
    Safe,
    Precarious,
    Unsafe,
}

impl SurvivalState {
    pub fn compare(support: Power, threat: Power) -> Self {
        match support.cmp(&threat) {
            std::cmp::Ordering::Greater => SurvivalState::Safe,
            std::cmp::Ordering::Equal => SurvivalState::Precarious,
            std::cmp::Ordering::Less => SurvivalState::Unsafe,
        }
    }

    /// Safe or precarious.
    pub fn survives(self) -> bool {
        self != SurvivalState::Unsafe
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SurvivalState::Safe => "safe",
            SurvivalState::Precarious => "precarious",
            SurvivalState::Unsafe => "unsafe",
        }
    }
}

impl fmt::Display for SurvivalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// x(U): one state per country.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector(pub Vec<SurvivalState>);

impl StateVector {
    pub fn get(&self, i: usize) -> SurvivalState {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = SurvivalState> + '_ {
        self.0.iter().copied()
    }
}

impl From<Vec<SurvivalState>> for StateVector {
    fn from(v: Vec<SurvivalState>) -> Self {
        StateVector(v)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|s| s.as_str()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

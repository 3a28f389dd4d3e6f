//! JSON scenario files.
//!
//! ```json
//! {
//!   "countries": [{"name": "v1", "power": 8}, {"name": "v2", "power": "13/2"}],
//!   "friends": [],
//!   "adversaries": [["v1", "v2"]],
//!   "allocation": {"v1": [0, 8], "v2": ["13/2", 0]}
//! }
//! ```
//!
//! Powers are integers or `"numerator/denominator"` strings; JSON floats are
//! rejected. Allocation rows are keyed by country name and list one entry per
//! country in declaration order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_allocation, validate_environment, AllocationError, AllocationMatrix, Environment,
    EnvironmentError, EnvironmentSpec,
};
use crate::power::Power;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountryEntry {
    pub name: String,
    pub power: Power,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub countries: Vec<CountryEntry>,
    #[serde(default)]
    pub friends: Vec<[String; 2]>,
    #[serde(default)]
    pub adversaries: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation: Option<BTreeMap<String, Vec<Power>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("malformed scenario: {0}")]
    Syntax(String),
    #[error("unknown country `{0}`")]
    UnknownCountry(String),
    #[error("invalid environment: {}", join(.0))]
    Environment(Vec<EnvironmentError>),
    #[error("allocation row for `{name}` has {actual} entries, expected {expected}")]
    RowLength {
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error("allocation has no row for `{0}`")]
    MissingRow(String),
    #[error("invalid allocation: {}", join(.0))]
    Allocation(Vec<AllocationError>),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_environment(env: &Environment, allocation: Option<&AllocationMatrix>) -> Self {
        let name_pair = |(a, b): (usize, usize)| [env.name(a).to_string(), env.name(b).to_string()];
        ScenarioFile {
            countries: (0..env.n())
                .map(|i| CountryEntry {
                    name: env.name(i).to_string(),
                    power: env.power(i),
                })
                .collect(),
            friends: env.friend_pairs().map(name_pair).collect(),
            adversaries: env.adversary_pairs().map(name_pair).collect(),
            allocation: allocation.map(|u| {
                (0..env.n())
                    .map(|i| (env.name(i).to_string(), u.row(i).to_vec()))
                    .collect()
            }),
        }
    }

    pub fn environment(&self) -> Result<Environment, ScenarioError> {
        let names: Vec<String> = self.countries.iter().map(|c| c.name.clone()).collect();
        let index = |name: &str| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| ScenarioError::UnknownCountry(name.to_string()))
        };
        let pairs = |list: &[[String; 2]]| -> Result<Vec<(usize, usize)>, ScenarioError> {
            list.iter()
                .map(|[a, b]| Ok((index(a)?, index(b)?)))
                .collect()
        };
        let spec = EnvironmentSpec {
            names: names.clone(),
            powers: self.countries.iter().map(|c| c.power).collect(),
            friends: pairs(&self.friends)?,
            adversaries: pairs(&self.adversaries)?,
        };
        validate_environment(spec).map_err(ScenarioError::Environment)
    }

    /// The allocation as a matrix, without checking the game's invariants.
    pub fn raw_allocation(
        &self,
        env: &Environment,
    ) -> Result<Option<AllocationMatrix>, ScenarioError> {
        let Some(rows) = &self.allocation else {
            return Ok(None);
        };
        for name in rows.keys() {
            if env.index_of(name).is_none() {
                return Err(ScenarioError::UnknownCountry(name.clone()));
            }
        }
        let n = env.n();
        let mut u = AllocationMatrix::zeros(n);
        for i in 0..n {
            let name = env.name(i);
            let row = rows
                .get(name)
                .ok_or_else(|| ScenarioError::MissingRow(name.to_string()))?;
            if row.len() != n {
                return Err(ScenarioError::RowLength {
                    name: name.to_string(),
                    expected: n,
                    actual: row.len(),
                });
            }
            u.set_row(i, row);
        }
        Ok(Some(u))
    }

    /// Environment and, if present, a validated allocation.
    pub fn load(&self) -> Result<(Environment, Option<AllocationMatrix>), ScenarioError> {
        let env = self.environment()?;
        let u = self.raw_allocation(&env)?;
        if let Some(u) = &u {
            validate_allocation(&env, u).map_err(ScenarioError::Allocation)?;
        }
        Ok((env, u))
    }
}

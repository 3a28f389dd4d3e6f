//! Brute-force equilibrium enumeration on a power grid.
//!
//! Every admissible matrix whose entries are multiples of the grid step is
//! generated and checked with the exact continuous verifier, so everything in
//! an atlas really is an equilibrium. What the grid can miss are equilibria
//! that need finer entries: absence from an atlas is evidence, not proof.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::equilibrium::is_equilibrium;
use crate::model::{AllocationMatrix, Environment, StateVector};
use crate::power::Power;
use crate::preference::DeviationRule;

pub const DEFAULT_BOUND: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid step must be positive, got {0}")]
    NonPositiveStep(Power),
    #[error("grid step {step} does not divide the power {power} of country {country}")]
    StepDoesNotDivide {
        country: usize,
        power: Power,
        step: Power,
    },
    #[error("enumeration too large: {count} candidate matrices exceeds the bound of {bound}")]
    EnumerationTooLarge { count: u128, bound: u128 },
    #[error("atlas holds no equilibria")]
    EmptyAtlas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub step: Power,
    pub bound: u128,
}

impl GridSpec {
    pub fn new(step: Power) -> Self {
        GridSpec {
            step,
            bound: DEFAULT_BOUND,
        }
    }

    pub fn with_bound(step: Power, bound: u128) -> Self {
        GridSpec { step, bound }
    }

    /// Units of `step` in each country's power.
    fn units(&self, env: &Environment) -> Result<Vec<u64>, OracleError> {
        if !self.step.is_positive() {
            return Err(OracleError::NonPositiveStep(self.step));
        }
        (0..env.n())
            .map(|i| {
                env.power(i)
                    .multiple_of(self.step)
                    .ok_or(OracleError::StepDoesNotDivide {
                        country: i,
                        power: env.power(i),
                        step: self.step,
                    })
            })
            .collect()
    }
}

/// Columns country `i` may allocate to: itself, friends and adversaries.
fn slots(env: &Environment, i: usize) -> Vec<usize> {
    let mut s: Vec<usize> = std::iter::once(i)
        .chain(env.friends(i).iter().copied())
        .chain(env.adversaries(i).iter().copied())
        .collect();
    s.sort_unstable();
    s
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = acc.saturating_mul(n - t) / (t + 1);
    }
    acc
}

/// Number of grid matrices, saturating.
pub fn enumeration_count(env: &Environment, grid: &GridSpec) -> Result<u128, OracleError> {
    let units = grid.units(env)?;
    Ok((0..env.n()).fold(1u128, |acc, i| {
        let k = slots(env, i).len() as u128;
        acc.saturating_mul(binomial(units[i] as u128 + k - 1, k - 1))
    }))
}

fn compositions(total: u64, parts: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Every admissible row of country `i` on the grid, in lexicographic order.
pub fn grid_rows(env: &Environment, i: usize, step: Power) -> Result<Vec<Vec<Power>>, OracleError> {
    let units = GridSpec::new(step).units(env)?;
    let cols = slots(env, i);
    let mut parts = Vec::new();
    compositions(units[i], cols.len(), &mut Vec::new(), &mut parts);
    let rows = parts
        .into_iter()
        .map(|c| {
            let mut row = vec![Power::ZERO; env.n()];
            for (&col, &k) in cols.iter().zip(&c) {
                row[col] = step.times(k);
            }
            row
        })
        .collect::<Vec<_>>();
    // Lexicographic by value across full rows.
    let mut rows = rows;
    rows.sort();
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumClass {
    pub states: StateVector,
    #[serde(skip)]
    pub members: Vec<AllocationMatrix>,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurvivalPossibility {
    AlwaysOnGrid,
    SometimesOnGrid,
    NeverOnGrid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumAtlas {
    pub rule: DeviationRule,
    pub step: Power,
    pub candidates: u128,
    /// Sorted by state vector.
    pub classes: Vec<EquilibriumClass>,
}

impl EquilibriumAtlas {
    pub fn equilibria(&self) -> impl Iterator<Item = &AllocationMatrix> {
        self.classes.iter().flat_map(|c| c.members.iter())
    }

    pub fn equilibrium_count(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    pub fn class_states(&self) -> Vec<&StateVector> {
        self.classes.iter().map(|c| &c.states).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Enumerates the grid and keeps every matrix that passes the exact check.
pub fn find_equilibria(
    env: &Environment,
    grid: &GridSpec,
    rule: DeviationRule,
) -> Result<EquilibriumAtlas, OracleError> {
    let count = enumeration_count(env, grid)?;
    if count > grid.bound {
        return Err(OracleError::EnumerationTooLarge {
            count,
            bound: grid.bound,
        });
    }
    let n = env.n();
    let rows: Vec<Vec<Vec<Power>>> = (0..n)
        .map(|i| grid_rows(env, i, grid.step))
        .collect::<Result<_, _>>()?;

    let mut found: Vec<AllocationMatrix> = if n == 0 {
        Vec::new()
    } else {
        rows[0]
            .par_iter()
            .flat_map_iter(|first| {
                let mut local = Vec::new();
                let mut u = AllocationMatrix::zeros(n);
                u.set_row(0, first);
                let mut idx = vec![0usize; n];
                for i in 1..n {
                    u.set_row(i, &rows[i][0]);
                }
                loop {
                    if is_equilibrium(env, &u, rule) {
                        local.push(u.clone());
                    }
                    // odometer over countries 1..n, last country fastest
                    let mut k = n - 1;
                    loop {
                        if k == 0 {
                            return local;
                        }
                        idx[k] += 1;
                        if idx[k] < rows[k].len() {
                            u.set_row(k, &rows[k][idx[k]]);
                            break;
                        }
                        idx[k] = 0;
                        u.set_row(k, &rows[k][0]);
                        k -= 1;
                    }
                }
            })
            .collect()
    };
    found.sort();

    let mut grouped: BTreeMap<StateVector, Vec<AllocationMatrix>> = BTreeMap::new();
    for u in found {
        grouped.entry(env.state_vector(&u)).or_default().push(u);
    }
    let classes = grouped
        .into_iter()
        .map(|(states, members)| EquilibriumClass {
            states,
            count: members.len(),
            members,
        })
        .collect();
    Ok(EquilibriumAtlas {
        rule,
        step: grid.step,
        candidates: count,
        classes,
    })
}

/// Whether country `i` survives in all, some or none of the atlas classes.
pub fn survival_possibility(
    atlas: &EquilibriumAtlas,
    i: usize,
) -> Result<SurvivalPossibility, OracleError> {
    if atlas.is_empty() {
        return Err(OracleError::EmptyAtlas);
    }
    let surviving = atlas
        .classes
        .iter()
        .filter(|c| c.states.get(i).survives())
        .count();
    Ok(if surviving == atlas.classes.len() {
        SurvivalPossibility::AlwaysOnGrid
    } else if surviving == 0 {
        SurvivalPossibility::NeverOnGrid
    } else {
        SurvivalPossibility::SometimesOnGrid
    })
}

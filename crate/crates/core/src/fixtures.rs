//! Four small reference environments and known equilibria.
//!
//! Countries are named `v1..vn`; indices are 0-based, so `v1` is index 0.

use crate::model::{AllocationMatrix, Environment};

/// Two-sided conflict where friends are tied up by their own adversaries.
pub fn env1() -> Environment {
    Environment::from_parts(
        &[19, 3, 6, 15, 3, 9],
        &[(1, 2), (3, 4)],
        &[(0, 3), (1, 4), (2, 5)],
    )
    .expect("fixture is valid")
}

/// An equilibrium of [`env1`] with two precarious countries.
pub fn env1_equilibrium() -> AllocationMatrix {
    AllocationMatrix::from_entries(
        6,
        &[
            (0, 3, 19),
            (3, 0, 15),
            (1, 4, 3),
            (4, 1, 3),
            (2, 5, 6),
            (5, 2, 9),
        ],
    )
}

/// Complete adversarial triangle with powers 8, 6, 4.
pub fn env2() -> Environment {
    Environment::from_parts(&[8, 6, 4], &[], &[(0, 1), (0, 2), (1, 2)]).expect("fixture is valid")
}

/// Sole survivor v1.
pub fn env2_alloc_i() -> AllocationMatrix {
    AllocationMatrix::from_entries(
        3,
        &[
            (0, 0, 2),
            (0, 1, 4),
            (0, 2, 2),
            (1, 0, 2),
            (1, 2, 4),
            (2, 1, 4),
        ],
    )
}

/// Sole survivor v2.
pub fn env2_alloc_ii() -> AllocationMatrix {
    AllocationMatrix::from_entries(3, &[(0, 1, 4), (0, 2, 4), (1, 0, 5), (1, 2, 1), (2, 0, 4)])
}

/// Sole survivor v3.
pub fn env2_alloc_iii() -> AllocationMatrix {
    AllocationMatrix::from_entries(3, &[(0, 1, 6), (0, 2, 2), (1, 0, 6), (2, 0, 3), (2, 1, 1)])
}

/// Bipartite environment: v1, v2 each adversarial to v3 and v4.
pub fn env3() -> Environment {
    Environment::from_parts(&[4, 5, 6, 5], &[], &[(0, 2), (0, 3), (1, 2), (1, 3)])
        .expect("fixture is valid")
}

/// An equilibrium of [`env3`] found by grid search, with v1 safe.
pub fn env3_equilibrium() -> AllocationMatrix {
    AllocationMatrix::from_entries(
        4,
        &[
            (0, 3, 4),
            (1, 3, 5),
            (2, 1, 3),
            (2, 2, 3),
            (3, 1, 3),
            (3, 3, 2),
        ],
    )
}

/// Path v1 - v2 = v3 - v4 (friends v2, v3) with a dominant v4.
pub fn env4() -> Environment {
    Environment::from_parts(&[1, 2, 1, 20], &[(1, 2)], &[(0, 1), (2, 3)]).expect("fixture is valid")
}

/// The equilibrium of [`env4`]; every equilibrium shares its states.
pub fn env4_equilibrium() -> AllocationMatrix {
    AllocationMatrix::from_entries(4, &[(0, 0, 1), (1, 0, 2), (2, 2, 1), (3, 3, 15), (3, 2, 5)])
}

//! The built-in finite systems used across tests, suites, and the CLI.

use crate::system::FiniteSystem;

/// Names of all built-in finite systems, in catalog order.
pub const FINITE_SYSTEM_NAMES: [&str; 4] = ["z2-swap", "z3-rotation", "s3-natural", "dihedral-4"];

/// C2 swapping two points.
pub fn z2_swap() -> FiniteSystem {
    FiniteSystem::from_permutations(vec![vec![0, 1], vec![1, 0]], 2).expect("valid builtin")
}

/// C3 rotating three points.
pub fn z3_rotation() -> FiniteSystem {
    let perms = (0..3)
        .map(|k| (0..3).map(|x| (x + k) % 3).collect())
        .collect();
    FiniteSystem::from_permutations(perms, 3).expect("valid builtin")
}

/// S3 acting naturally on three points (all six permutations, lexicographic).
pub fn s3_natural() -> FiniteSystem {
    let perms = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    FiniteSystem::from_permutations(perms, 3).expect("valid builtin")
}

/// D4 (order 8) acting on the four corners of a square: rotations
/// `x ↦ x+k` and reflections `x ↦ k-x`, mod 4.
pub fn dihedral_4() -> FiniteSystem {
    let mut perms: Vec<Vec<usize>> = (0..4)
        .map(|k| (0..4).map(|x| (x + k) % 4).collect())
        .collect();
    perms.extend((0..4).map(|k: usize| (0..4).map(|x| (k + 4 - x) % 4).collect::<Vec<_>>()));
    FiniteSystem::from_permutations(perms, 4).expect("valid builtin")
}

/// Look up a finite built-in by catalog name.
pub fn finite_by_name(name: &str) -> Option<FiniteSystem> {
    match name {
        "z2-swap" => Some(z2_swap()),
        "z3-rotation" => Some(z3_rotation()),
        "s3-natural" => Some(s3_natural()),
        "dihedral-4" => Some(dihedral_4()),
        _ => None,
    }
}

/// All finite built-ins with their names.
pub fn all_finite() -> Vec<(&'static str, FiniteSystem)> {
    FINITE_SYSTEM_NAMES
        .iter()
        .map(|name| (*name, finite_by_name(name).expect("catalog name")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_orders_and_spaces() {
        let cases = [
            (z2_swap(), 2, 2),
            (z3_rotation(), 3, 3),
            (s3_natural(), 6, 3),
            (dihedral_4(), 8, 4),
        ];
        for (sys, order, space) in cases {
            assert_eq!(sys.group().order(), order);
            assert_eq!(sys.space_size(), space);
        }
    }

    #[test]
    fn catalog_resolves_all_names() {
        for name in FINITE_SYSTEM_NAMES {
            assert!(finite_by_name(name).is_some(), "{name} missing");
        }
        assert!(finite_by_name("nope").is_none());
    }
}

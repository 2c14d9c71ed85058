//! Grammar corpus used by the tests, benchmarks and examples.

use crate::grammar::{parse_grammar, Grammar};

/// Wrapping grammar for `aⁿbⁿcⁿdⁿ`, n ≥ 1.
pub const G1: &str = include_str!("../fixtures/g1.json");
/// One left and one right tree over a single-word initial tree: `ℓ* s r*`.
pub const G2: &str = include_str!("../fixtures/g2.json");
/// Cross-serial verb clusters: wrapping trees adjoining at each other's
/// wrapping node.
pub const G3: &str = include_str!("../fixtures/g3.json");
/// Ternary trees, a wrapping node at the root, and a wrapping tree without
/// any wrapping node.
pub const G4: &str = include_str!("../fixtures/g4.json");
/// Substitution, left/right trees at two labels, and a wrapping tree with
/// material in all four halves.
pub const G5: &str = include_str!("../fixtures/g5.json");
/// Two spine nodes admitting wrapping trees.
pub const INVALID_TWO_WRAPPING: &str = include_str!("../fixtures/invalid_two_wrapping.json");
/// A left tree admitting a wrapping tree on its spine.
pub const INVALID_LEFT_WRAPPING: &str = include_str!("../fixtures/invalid_left_wrapping.json");

/// The restriction-valid fixtures, by name.
pub const VALID: [(&str, &str); 5] = [("g1", G1), ("g2", G2), ("g3", G3), ("g4", G4), ("g5", G5)];

pub fn load(text: &str) -> Grammar {
    parse_grammar(text).expect("fixture grammars parse")
}

//! Bundled example rules.

use crate::dsl;
use crate::error::Result;
use crate::rule::FusionRule;

pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub source: &'static str,
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "thue_morse",
        description: "Thue-Morse strings built by concatenating both previous supertiles",
        source: include_str!("../rules/thue_morse.fusion"),
    },
    Example {
        name: "fibonacci",
        description: "Fibonacci substitution A -> AB, B -> A",
        source: include_str!("../rules/fibonacci.fusion"),
    },
    Example {
        name: "fiblike",
        description: "Fibonacci-like rule with a third supertile at levels 3^m - 1",
        source: include_str!("../rules/fiblike.fusion"),
    },
    Example {
        name: "ten_pow_n",
        description: "A_n = (A_{n-1})^(10^n) B_{n-1}: minimal but with several frequency measures",
        source: include_str!("../rules/ten_pow_n.fusion"),
    },
    Example {
        name: "chair",
        description: "Chair tiling with four L-tromino orientations",
        source: include_str!("../rules/chair.fusion"),
    },
    Example {
        name: "fib2d",
        description: "Two-dimensional Fibonacci tiling as a product of two Fibonacci sequences",
        source: include_str!("../rules/fib2d.fusion"),
    },
];

pub const NAMES: [&str; 6] = [
    "thue_morse",
    "fibonacci",
    "fiblike",
    "ten_pow_n",
    "chair",
    "fib2d",
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

/// Parses and validates a bundled rule. Returns `None` for unknown names.
pub fn load(name: &str) -> Option<FusionRule> {
    find(name).map(|e| dsl::parse_rule(e.source).expect("bundled rule is valid"))
}

/// Like [`load`], but surfaces parse errors instead of panicking.
pub fn try_load(name: &str) -> Option<Result<FusionRule>> {
    find(name).map(|e| dsl::parse_rule(e.source))
}

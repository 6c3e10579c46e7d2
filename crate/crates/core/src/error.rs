use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use thiserror::Error;

use crate::dsl::ParseDiagnostic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("negative exponent {0}")]
    NegativeExponent(BigInt),
    #[error("w()/h() refers to undefined label {0}")]
    UnknownDimension(String),
    #[error("value too large to represent: {0}")]
    TooLarge(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    NoPrototiles,
    DuplicatePrototile,
    InvalidVolume,
    InvalidShape,
    EmptyLevel,
    UndefinedLabel,
    InvalidRepeat,
    InvalidOffset,
    Expression,
}

/// A problem found while validating or resolving a rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleDiagnostic {
    pub kind: DiagnosticKind,
    pub level: Option<u64>,
    pub label: Option<String>,
    pub message: String,
}

impl RuleDiagnostic {
    pub(crate) fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        RuleDiagnostic {
            kind,
            level: None,
            label: None,
            message: message.into(),
        }
    }

    pub(crate) fn at(mut self, level: u64) -> Self {
        self.level = Some(level);
        self
    }

    pub(crate) fn label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }
}

impl fmt::Display for RuleDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.level, &self.label) {
            (Some(n), Some(l)) => write!(f, "level {n}, {l}: {}", self.message),
            (Some(n), None) => write!(f, "level {n}: {}", self.message),
            (None, Some(l)) => write!(f, "{l}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{}", join(.0))]
    Parse(Vec<ParseDiagnostic>),
    #[error("{}", join(.0))]
    Rule(Vec<RuleDiagnostic>),
    #[error("invalid level range: {from} > {to}")]
    InvalidRange { from: u64, to: u64 },
    #[error("no supertile {label} at level {level}")]
    UnknownSupertile { level: u64, label: String },
    #[error("expansion needs {needed} cells, budget is {max}")]
    ExpansionTooLarge { needed: BigUint, max: u64 },
    #[error(
        "level {level} supertile {label}: children {first} and {second} overlap at ({}, {})",
        .cell.0, .cell.1
    )]
    Overlap {
        level: u64,
        label: String,
        first: usize,
        second: usize,
        cell: (i64, i64),
    },
    #[error("level {level} supertile {label} is disconnected (component sizes {components:?})")]
    Disconnected {
        level: u64,
        label: String,
        components: Vec<usize>,
    },
    #[error("operation needs a {expected}D rule")]
    Dimension { expected: u8 },
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

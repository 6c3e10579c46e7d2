//! The `.fusion` rule file format.
//!
//! ```text
//! rule      := "rule" IDENT "dim" ("1"|"2") proto+ levelblock+
//! proto     := "prototile" IDENT ["volume" RATIONAL] ["cells" cell+ | "length" INT]
//! cell      := "(" INT "," INT ")"
//! levelblock:= "level" guard ":" def+
//! def       := IDENT "=" placement+ ["if" guard | "otherwise"]
//! placement := IDENT ["^" "(" expr ")"] ["@" "(" expr "," expr ")"]
//! guard     := comparisons of exprs, and/or/not, ispow(INT, expr), default
//! expr      := INT | n | w(IDENT) | h(IDENT) | expr op expr | (expr)
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Whitespace and
//! newlines are insignificant. [`format_rule`] produces the canonical text.

mod format;
mod lexer;
mod parser;

use std::fmt;

use serde::Serialize;

pub use format::{format_expr, format_guard, format_rule};

use crate::error::{DiagnosticKind, Error, Result};
use crate::resolve::{validate_rule, DEFAULT_VALIDATION_DEPTH};
use crate::rule::FusionRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in characters.
    pub column: u32,
    pub offset: usize,
    /// Length of the token in bytes.
    pub len: usize,
}

impl SourceSpan {
    pub fn contains(&self, offset: usize) -> bool {
        offset >= self.offset && offset < self.offset + self.len.max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
    /// Set for diagnostics produced by rule validation rather than syntax.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<DiagnosticKind>,
}

impl ParseDiagnostic {
    pub(crate) fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
            kind: None,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.span.line, self.span.column, self.message
        )
    }
}

/// Parses rule text without running validation.
pub fn parse_unvalidated(text: &str) -> Result<FusionRule> {
    parser::parse(text)
        .map(|(rule, _)| rule)
        .map_err(Error::Parse)
}

/// Parses and validates rule text (levels `1..=64`).
pub fn parse_rule(text: &str) -> Result<FusionRule> {
    parse_rule_with_depth(text, DEFAULT_VALIDATION_DEPTH)
}

pub fn parse_rule_with_depth(text: &str, depth: u64) -> Result<FusionRule> {
    let (rule, spans) = parser::parse(text).map_err(Error::Parse)?;
    let diags = validate_rule(&rule, depth);
    if diags.is_empty() {
        return Ok(rule);
    }
    Err(Error::Parse(
        diags
            .into_iter()
            .map(|d| {
                let span = d
                    .label
                    .as_deref()
                    .and_then(|l| spans.label(l))
                    .unwrap_or(spans.header);
                ParseDiagnostic {
                    severity: Severity::Error,
                    message: d.to_string(),
                    span,
                    kind: Some(d.kind),
                }
            })
            .collect(),
    ))
}

/// What `parse` reports about a valid rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSummary {
    pub name: String,
    pub dimension: u8,
    pub prototiles: Vec<String>,
    pub canonical: String,
}

impl RuleSummary {
    pub fn of(rule: &FusionRule) -> Self {
        RuleSummary {
            name: rule.name.clone(),
            dimension: rule.dimension.as_u8(),
            prototiles: rule.prototile_names(),
            canonical: format_rule(rule),
        }
    }
}

/// Parses raw bytes, reporting invalid UTF-8 as a diagnostic.
pub fn parse_rule_bytes(bytes: &[u8]) -> Result<FusionRule> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_rule(text),
        Err(e) => {
            let offset = e.valid_up_to();
            let prefix = &bytes[..offset];
            let line = prefix.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
            let line_start = prefix
                .iter()
                .rposition(|&b| b == b'\n')
                .map_or(0, |p| p + 1);
            let column = std::str::from_utf8(&prefix[line_start..])
                .map_or(1, |s| s.chars().count() as u32 + 1);
            Err(Error::Parse(vec![ParseDiagnostic::error(
                "invalid UTF-8",
                SourceSpan {
                    line,
                    column,
                    offset,
                    len: e.error_len().unwrap_or(bytes.len() - offset),
                },
            )]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expr::{BinOp, Guard, IntExpr};
    use crate::rule::{Condition, Dimension, Placement};

    fn diags(text: &str) -> Vec<ParseDiagnostic> {
        match parse_rule(text) {
            Err(Error::Parse(d)) => d,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ten_pow_n_definitions() {
        let rule = builtins::load("ten_pow_n").unwrap();
        let pow = IntExpr::bin(BinOp::Pow, IntExpr::lit(10), IntExpr::Level);
        let defs: Vec<_> = rule.definitions().map(|(_, d)| d.clone()).collect();
        assert_eq!(defs.len(), 2);
        assert_eq!(defs[0].label, "A");
        assert_eq!(
            defs[0].body,
            vec![
                Placement {
                    child: "A".into(),
                    repeat: Some(pow.clone()),
                    offset: None
                },
                Placement::new("B")
            ]
        );
        assert_eq!(defs[1].body[0].repeat, Some(pow));
        assert_eq!(defs[1].body[1].child, "A");
    }

    #[test]
    fn fiblike_guards() {
        let rule = builtins::load("fiblike").unwrap();
        let conds: Vec<_> = rule
            .definitions()
            .map(|(_, d)| d.condition.clone())
            .collect();
        let Condition::If(Guard::Or(_, rhs)) = &conds[0] else {
            panic!("{:?}", conds[0])
        };
        assert!(matches!(**rhs, Guard::IsPow(_, IntExpr::Level)));
        assert_eq!(conds[1], Condition::Otherwise);
        assert_eq!(conds[2], Condition::Always);
        let Condition::If(Guard::IsPow(b, IntExpr::Bin(BinOp::Add, _, _))) = &conds[3] else {
            panic!("{:?}", conds[3])
        };
        assert_eq!(b.to_string(), "3");
    }

    #[test]
    fn missing_level_block_is_an_empty_level() {
        let d = diags("rule r dim 1 prototile A");
        assert_eq!(d[0].kind, Some(DiagnosticKind::EmptyLevel));
    }

    #[test]
    fn syntax_errors_point_at_tokens() {
        let text = "rule r dim 1\nprototile A\nlevel default:\n  A = A $ A";
        let d = diags(text);
        assert_eq!(d[0].span.line, 4);
        assert_eq!(d[0].span.column, 9);
        assert_eq!(
            &text[d[0].span.offset..d[0].span.offset + d[0].span.len],
            "$"
        );

        let text = "rule r dim 3 prototile A";
        let d = diags(text);
        assert_eq!(
            &text[d[0].span.offset..d[0].span.offset + d[0].span.len],
            "3"
        );

        let text = "rule r dim 1 prototile A level default: A = A@(1,0)";
        let d = diags(text);
        assert_eq!(
            &text[d[0].span.offset..d[0].span.offset + d[0].span.len],
            "@"
        );
    }

    #[test]
    fn validation_errors_carry_label_spans() {
        let text = "rule r dim 1 prototile A level default:\n  A = A Q";
        let d = diags(text);
        assert_eq!(d[0].kind, Some(DiagnosticKind::UndefinedLabel));
        assert_eq!(d[0].span.line, 2);
    }

    #[test]
    fn reserved_words_are_not_labels() {
        let d = diags("rule r dim 1 prototile n level default: n = n");
        assert!(d[0].message.contains("reserved"));
    }

    #[test]
    fn volumes_and_cells() {
        let rule = parse_rule(
            "rule r dim 2 prototile X volume 3/2 cells (0,0) (-1,0) level default: X = X@(0,0)",
        )
        .unwrap();
        assert_eq!(rule.dimension, Dimension::Two);
        assert_eq!(rule.prototiles[0].volume().to_string(), "3/2");
        assert_eq!(rule.prototiles[0].cells(), vec![(0, 0), (1, 0)]);
        let d = diags("rule r dim 1 prototile X volume 0 level default: X = X");
        assert_eq!(d[0].kind, Some(DiagnosticKind::InvalidVolume));
    }

    #[test]
    fn deep_nesting_is_a_diagnostic() {
        let text = format!(
            "rule r dim 1 prototile A level default: A = A^({}1{})",
            "(".repeat(5000),
            ")".repeat(5000)
        );
        let d = diags(&text);
        assert!(d[0].message.contains("nested"));
    }

    #[test]
    fn invalid_utf8() {
        let Err(Error::Parse(d)) = parse_rule_bytes(b"rule r\n dim \xff") else {
            panic!()
        };
        assert_eq!(d[0].span.line, 2);
        assert_eq!(d[0].span.offset, 12);
    }
}

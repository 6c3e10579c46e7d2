//! Per-level resolution of guarded supertile definitions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{DiagnosticKind, Error, Result, RuleDiagnostic};
use crate::expr::DimTable;
use crate::rule::{Condition, Dimension, FusionRule};

/// Levels checked by [`crate::dsl::parse_rule`].
pub const DEFAULT_VALIDATION_DEPTH: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedPlacement {
    /// Index of the child in the previous level.
    pub child: usize,
    pub child_label: String,
    pub repeat: BigUint,
    /// Evaluated offset (2D only).
    pub offset: Option<(BigInt, BigInt)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSupertile {
    pub label: String,
    /// Empty at level 0, where supertiles are the prototiles themselves.
    pub body: Vec<ResolvedPlacement>,
    /// Number of cells covered (1D: total length).
    pub cells: BigUint,
    pub volume: BigRational,
    pub width: BigUint,
    pub height: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelResolution {
    pub level: u64,
    pub supertiles: Vec<ResolvedSupertile>,
}

impl LevelResolution {
    pub fn labels(&self) -> Vec<String> {
        self.supertiles.iter().map(|s| s.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.supertiles.iter().position(|s| s.label == label)
    }

    pub fn len(&self) -> usize {
        self.supertiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supertiles.is_empty()
    }

    fn dims(&self) -> DimTable {
        self.supertiles
            .iter()
            .map(|s| {
                (
                    s.label.clone(),
                    (
                        BigInt::from(s.width.clone()),
                        BigInt::from(s.height.clone()),
                    ),
                )
            })
            .collect()
    }
}

fn prototile_level(rule: &FusionRule) -> LevelResolution {
    let supertiles = rule
        .prototiles
        .iter()
        .map(|p| {
            let (w, h) = p.extent();
            ResolvedSupertile {
                label: p.name.clone(),
                body: vec![],
                cells: BigUint::from(p.cell_count()),
                volume: p.volume(),
                width: BigUint::from(w),
                height: BigUint::from(h),
            }
        })
        .collect();
    LevelResolution {
        level: 0,
        supertiles,
    }
}

/// Resolves level `n` given the already-resolved level `n - 1`. All problems
/// at this level are reported together.
fn resolve_next(
    rule: &FusionRule,
    prev: &LevelResolution,
    n: u64,
) -> std::result::Result<LevelResolution, Vec<RuleDiagnostic>> {
    let mut diags = Vec::new();
    let dims = prev.dims();
    let index: HashMap<&str, usize> = prev
        .supertiles
        .iter()
        .enumerate()
        .map(|(i, s)| (s.label.as_str(), i))
        .collect();

    let mut chosen = Vec::new();
    for label in rule.label_order() {
        let mut hit = None;
        for (block_guard, def) in rule.definitions().filter(|(_, d)| d.label == label) {
            let active = block_guard.eval(n).and_then(|b| {
                Ok(b && match &def.condition {
                    Condition::Always | Condition::Otherwise => true,
                    Condition::If(g) => g.eval(n)?,
                })
            });
            match active {
                Ok(true) => {
                    hit = Some(def);
                    break;
                }
                Ok(false) => {}
                Err(e) => {
                    diags.push(
                        RuleDiagnostic::new(DiagnosticKind::Expression, format!("guard: {e}"))
                            .at(n)
                            .label(label),
                    );
                    break;
                }
            }
        }
        if let Some(def) = hit {
            chosen.push(def);
        }
    }
    if chosen.is_empty() && diags.is_empty() {
        diags
            .push(RuleDiagnostic::new(DiagnosticKind::EmptyLevel, "no definition is active").at(n));
    }

    let mut supertiles = Vec::with_capacity(chosen.len());
    for def in chosen {
        let diag = |kind, msg: String| RuleDiagnostic::new(kind, msg).at(n).label(&def.label);
        let mut body = Vec::with_capacity(def.body.len());
        let mut cells = BigUint::zero();
        let mut volume = BigRational::zero();
        let mut bounds: Option<(BigInt, BigInt, BigInt, BigInt)> = None;
        let mut length = BigUint::zero();
        for (k, p) in def.body.iter().enumerate() {
            let Some(&child) = index.get(p.child.as_str()) else {
                diags.push(diag(
                    DiagnosticKind::UndefinedLabel,
                    format!("child {} is not defined at level {}", p.child, n - 1),
                ));
                continue;
            };
            let repeat = match &p.repeat {
                None => BigUint::one(),
                Some(e) => match e.eval(n, &dims) {
                    Ok(v) if v.is_positive() => v.to_biguint().expect("positive"),
                    Ok(v) => {
                        diags.push(diag(
                            DiagnosticKind::InvalidRepeat,
                            format!("repeat of {} evaluates to {v}", p.child),
                        ));
                        continue;
                    }
                    Err(e) => {
                        diags.push(diag(DiagnosticKind::Expression, e.to_string()));
                        continue;
                    }
                },
            };
            let c = &prev.supertiles[child];
            let offset = match rule.dimension {
                Dimension::One => {
                    if p.offset.is_some() {
                        diags.push(diag(
                            DiagnosticKind::InvalidOffset,
                            "offsets are only allowed in 2D".into(),
                        ));
                        continue;
                    }
                    length += &repeat * &c.width;
                    None
                }
                Dimension::Two => {
                    if !repeat.is_one() {
                        diags.push(diag(
                            DiagnosticKind::InvalidRepeat,
                            format!("2D placement of {} repeats {repeat} times", p.child),
                        ));
                        continue;
                    }
                    let (x, y) = match &p.offset {
                        Some((ex, ey)) => match (ex.eval(n, &dims), ey.eval(n, &dims)) {
                            (Ok(x), Ok(y)) => (x, y),
                            (Err(e), _) | (_, Err(e)) => {
                                diags.push(diag(DiagnosticKind::Expression, e.to_string()));
                                continue;
                            }
                        },
                        None if k == 0 => (BigInt::zero(), BigInt::zero()),
                        None => {
                            diags.push(diag(
                                DiagnosticKind::InvalidOffset,
                                format!("placement {k} ({}) needs an offset", p.child),
                            ));
                            continue;
                        }
                    };
                    let x1 = &x + BigInt::from(c.width.clone());
                    let y1 = &y + BigInt::from(c.height.clone());
                    bounds = Some(match bounds {
                        None => (x.clone(), y.clone(), x1, y1),
                        Some((a, b, c2, d)) => {
                            (a.min(x.clone()), b.min(y.clone()), c2.max(x1), d.max(y1))
                        }
                    });
                    Some((x, y))
                }
            };
            cells += &repeat * &c.cells;
            volume += BigRational::from_integer(BigInt::from(repeat.clone())) * &c.volume;
            body.push(ResolvedPlacement {
                child,
                child_label: p.child.clone(),
                repeat,
                offset,
            });
        }
        let (width, height) = match (rule.dimension, bounds) {
            (Dimension::One, _) => (length, BigUint::one()),
            (Dimension::Two, Some((x0, y0, x1, y1))) => (
                (x1 - x0).to_biguint().unwrap_or_default(),
                (y1 - y0).to_biguint().unwrap_or_default(),
            ),
            (Dimension::Two, None) => (BigUint::zero(), BigUint::zero()),
        };
        supertiles.push(ResolvedSupertile {
            label: def.label.clone(),
            body,
            cells,
            volume,
            width,
            height,
        });
    }

    if diags.is_empty() {
        Ok(LevelResolution {
            level: n,
            supertiles,
        })
    } else {
        Err(diags)
    }
}

/// Resolves level `n` from scratch. Prefer [`Hierarchy`] for repeated queries.
pub fn resolve_level(rule: &FusionRule, n: u64) -> Result<LevelResolution> {
    Hierarchy::new(rule).level(n).map(|l| (*l).clone())
}

/// Checks prototile invariants and resolves levels `1..=depth`. Returns an
/// empty list for a well-formed rule.
pub fn validate_rule(rule: &FusionRule, depth: u64) -> Vec<RuleDiagnostic> {
    let diags = rule.check_prototiles();
    if !diags.is_empty() {
        return diags;
    }
    match Hierarchy::new(rule).level(depth) {
        Ok(_) => vec![],
        Err(Error::Rule(d)) => d,
        Err(e) => vec![RuleDiagnostic::new(
            DiagnosticKind::Expression,
            e.to_string(),
        )],
    }
}

/// Lazily resolved tower of levels for one rule, with caches shared by the
/// transition and expansion code. Safe to share between threads.
#[derive(Debug)]
pub struct Hierarchy<'r> {
    rule: &'r FusionRule,
    levels: Mutex<Vec<Arc<LevelResolution>>>,
    failure: Mutex<Option<(u64, Vec<RuleDiagnostic>)>>,
    pub(crate) steps: Mutex<HashMap<u64, Arc<crate::transition::TransitionMatrix>>>,
}

impl<'r> Hierarchy<'r> {
    pub fn new(rule: &'r FusionRule) -> Self {
        Hierarchy {
            rule,
            levels: Mutex::new(vec![Arc::new(prototile_level(rule))]),
            failure: Mutex::new(None),
            steps: Mutex::new(HashMap::new()),
        }
    }

    pub fn rule(&self) -> &'r FusionRule {
        self.rule
    }

    pub fn level(&self, n: u64) -> Result<Arc<LevelResolution>> {
        let mut levels = self.levels.lock().expect("level cache poisoned");
        if let Some(l) = levels.get(n as usize) {
            return Ok(l.clone());
        }
        if let Some((at, diags)) = &*self.failure.lock().expect("poisoned") {
            if n >= *at {
                return Err(Error::Rule(diags.clone()));
            }
        }
        while (levels.len() as u64) <= n {
            let k = levels.len() as u64;
            let prev = levels.last().expect("level 0 present").clone();
            match resolve_next(self.rule, &prev, k) {
                Ok(l) => levels.push(Arc::new(l)),
                Err(diags) => {
                    *self.failure.lock().expect("poisoned") = Some((k, diags.clone()));
                    return Err(Error::Rule(diags));
                }
            }
        }
        Ok(levels[n as usize].clone())
    }

    pub fn supertile(&self, n: u64, label: &str) -> Result<(Arc<LevelResolution>, usize)> {
        let level = self.level(n)?;
        let idx = level
            .index_of(label)
            .ok_or_else(|| Error::UnknownSupertile {
                level: n,
                label: label.to_string(),
            })?;
        Ok((level, idx))
    }

    /// Cell count of a supertile, used to size expansions before allocating.
    pub fn cell_count(&self, n: u64, idx: usize) -> Result<BigUint> {
        Ok(self.level(n)?.supertiles[idx].cells.clone())
    }
}

pub(crate) fn to_i64(v: &BigInt) -> Option<i64> {
    v.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn labels(rule: &FusionRule, n: u64) -> Vec<String> {
        resolve_level(rule, n).unwrap().labels()
    }

    fn bodies(rule: &FusionRule, n: u64) -> Vec<(String, Vec<String>)> {
        resolve_level(rule, n)
            .unwrap()
            .supertiles
            .into_iter()
            .map(|s| (s.label, s.body.into_iter().map(|p| p.child_label).collect()))
            .collect()
    }

    fn owned(v: &[(&str, &[&str])]) -> Vec<(String, Vec<String>)> {
        v.iter()
            .map(|(l, b)| (l.to_string(), b.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    #[test]
    fn fiblike_level_one_and_two() {
        let rule = builtins::load("fiblike").unwrap();
        assert_eq!(
            bodies(&rule, 1),
            owned(&[("A", &["T", "B"]), ("B", &["A"])])
        );
        assert_eq!(
            bodies(&rule, 2),
            owned(&[("A", &["A", "B"]), ("B", &["A"]), ("T", &["B", "A"])])
        );
        assert_eq!(
            bodies(&rule, 3),
            owned(&[("A", &["T", "B"]), ("B", &["A"])])
        );
    }

    #[test]
    fn thue_morse_is_level_independent() {
        let rule = builtins::load("thue_morse").unwrap();
        assert_eq!(
            bodies(&rule, 5),
            owned(&[("S1", &["S1", "S2"]), ("S2", &["S2", "S1"])])
        );
    }

    #[test]
    fn level_zero_is_prototiles() {
        let rule = builtins::load("chair").unwrap();
        let l0 = resolve_level(&rule, 0).unwrap();
        assert_eq!(l0.labels(), vec!["SW", "SE", "NW", "NE"]);
        assert!(l0
            .supertiles
            .iter()
            .all(|s| s.body.is_empty() && s.cells == BigUint::from(3u8)));
    }

    #[test]
    fn fiblike_labels_by_hand() {
        // hand-resolved: T exists exactly at levels 3^m - 1
        let rule = builtins::load("fiblike").unwrap();
        for n in 1..=9u64 {
            let expected: Vec<&str> = if n == 2 || n == 8 {
                vec!["A", "B", "T"]
            } else {
                vec!["A", "B"]
            };
            assert_eq!(labels(&rule, n), expected, "level {n}");
        }
        assert!(validate_rule(&rule, 30).is_empty());
    }

    #[test]
    fn resolution_is_deterministic() {
        let rule = builtins::load("fib2d").unwrap();
        assert_eq!(
            resolve_level(&rule, 6).unwrap(),
            resolve_level(&rule, 6).unwrap()
        );
    }

    #[test]
    fn undefined_child_is_reported() {
        let rule = crate::dsl::parse_unvalidated("rule r dim 1 prototile A level default: A = A Q")
            .unwrap();
        let diags = validate_rule(&rule, 1);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::UndefinedLabel);
        assert_eq!(diags[0].level, Some(1));
        assert!(diags[0].message.contains('Q'));
    }

    #[test]
    fn empty_level_is_reported() {
        let rule =
            crate::dsl::parse_unvalidated("rule r dim 1 prototile A level n < 3: A = A").unwrap();
        assert!(validate_rule(&rule, 2).is_empty());
        let diags = validate_rule(&rule, 5);
        assert_eq!(diags[0].kind, DiagnosticKind::EmptyLevel);
        assert_eq!(diags[0].level, Some(3));
        assert!(matches!(resolve_level(&rule, 4), Err(Error::Rule(_))));
    }

    #[test]
    fn label_absent_at_previous_level_is_an_error() {
        let text = "rule r dim 1 prototile A prototile B
            level n == 2: C = A
            level n == 3: A = C
            level n == 4: A = C
            level default: A = A B B = A";
        let rule = crate::dsl::parse_unvalidated(text).unwrap();
        let diags = validate_rule(&rule, 4);
        assert_eq!(diags[0].kind, DiagnosticKind::UndefinedLabel);
        assert_eq!(diags[0].level, Some(4));
    }

    #[test]
    fn builtin_guards_are_total() {
        for name in builtins::NAMES {
            let rule = builtins::load(name).unwrap();
            for (bg, def) in rule.definitions() {
                for n in (1..=1_000_000u64)
                    .step_by(997)
                    .chain([1, 2, 8, 26, 80, 242, 728])
                {
                    bg.eval(n).unwrap();
                    if let Condition::If(g) = &def.condition {
                        g.eval(n).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn dimensions_of_fib2d() {
        let rule = builtins::load("fib2d").unwrap();
        let l3 = resolve_level(&rule, 3).unwrap();
        let dims: Vec<(String, u64, u64)> = l3
            .supertiles
            .iter()
            .map(|s| {
                (
                    s.label.clone(),
                    s.width.to_u64().unwrap(),
                    s.height.to_u64().unwrap(),
                )
            })
            .collect();
        // 1D Fibonacci lengths at level 4 are A: 8, B: 5
        assert_eq!(
            dims,
            vec![
                ("AA".into(), 8, 8),
                ("AB".into(), 8, 5),
                ("BA".into(), 5, 8),
                ("BB".into(), 5, 5)
            ]
        );
    }
}

//! The fusion rule data model.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{DiagnosticKind, RuleDiagnostic};
use crate::expr::{Guard, IntExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn as_u8(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Length in cells of a 1D tile.
    Length(u64),
    /// Polyomino footprint of a 2D tile.
    Cells(Vec<(i64, i64)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Prototile {
    pub name: String,
    /// Declared volume; see [`Prototile::volume`] for the effective one.
    pub volume: Option<BigRational>,
    pub shape: Option<Shape>,
}

impl Prototile {
    pub fn new(name: impl Into<String>) -> Self {
        Prototile {
            name: name.into(),
            volume: None,
            shape: None,
        }
    }

    /// Footprint cells normalized so the minimum x and y are zero. A tile
    /// without a declared shape is a single cell (2D) or a unit interval (1D).
    pub fn cells(&self) -> Vec<(i64, i64)> {
        match &self.shape {
            Some(Shape::Cells(cells)) if !cells.is_empty() => {
                let min_x = cells.iter().map(|c| c.0).min().unwrap_or(0);
                let min_y = cells.iter().map(|c| c.1).min().unwrap_or(0);
                let mut out: Vec<_> = cells.iter().map(|&(x, y)| (x - min_x, y - min_y)).collect();
                out.sort_unstable();
                out
            }
            Some(Shape::Length(len)) => (0..*len as i64).map(|x| (x, 0)).collect(),
            _ => vec![(0, 0)],
        }
    }

    pub fn cell_count(&self) -> u64 {
        match &self.shape {
            Some(Shape::Cells(cells)) => cells.len() as u64,
            Some(Shape::Length(len)) => *len,
            None => 1,
        }
    }

    /// Width and height of the bounding box, in cells.
    pub fn extent(&self) -> (u64, u64) {
        match &self.shape {
            Some(Shape::Length(len)) => (*len, 1),
            Some(Shape::Cells(_)) => {
                let cells = self.cells();
                let w = cells.iter().map(|c| c.0).max().unwrap_or(0) + 1;
                let h = cells.iter().map(|c| c.1).max().unwrap_or(0) + 1;
                (w as u64, h as u64)
            }
            None => (1, 1),
        }
    }

    /// Effective volume: the declared one, else the cell count.
    pub fn volume(&self) -> BigRational {
        self.volume
            .clone()
            .unwrap_or_else(|| BigRational::from_integer(BigInt::from(self.cell_count())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    pub child: String,
    /// Repetition count; absent means 1.
    pub repeat: Option<IntExpr>,
    /// Cell offset of the child's anchor (2D only).
    pub offset: Option<(IntExpr, IntExpr)>,
}

impl Placement {
    pub fn new(child: impl Into<String>) -> Self {
        Placement {
            child: child.into(),
            repeat: None,
            offset: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Always,
    If(Guard),
    /// Fires when no earlier alternative for the same label does.
    Otherwise,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupertileDef {
    pub label: String,
    pub condition: Condition,
    pub body: Vec<Placement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelBlock {
    pub guard: Guard,
    pub defs: Vec<SupertileDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FusionRule {
    pub name: String,
    pub dimension: Dimension,
    pub prototiles: Vec<Prototile>,
    pub blocks: Vec<LevelBlock>,
}

impl FusionRule {
    /// All definitions in declaration order, with their enclosing block guard.
    pub fn definitions(&self) -> impl Iterator<Item = (&Guard, &SupertileDef)> {
        self.blocks
            .iter()
            .flat_map(|b| b.defs.iter().map(move |d| (&b.guard, d)))
    }

    /// Supertile labels in order of first declaration. This is the canonical
    /// index order at every level.
    pub fn label_order(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.definitions()
            .filter_map(|(_, d)| seen.insert(d.label.as_str()).then_some(d.label.as_str()))
            .collect()
    }

    pub fn prototile(&self, name: &str) -> Option<&Prototile> {
        self.prototiles.iter().find(|p| p.name == name)
    }

    pub fn prototile_index(&self, name: &str) -> Option<usize> {
        self.prototiles.iter().position(|p| p.name == name)
    }

    pub fn prototile_names(&self) -> Vec<String> {
        self.prototiles.iter().map(|p| p.name.clone()).collect()
    }

    pub(crate) fn check_prototiles(&self) -> Vec<RuleDiagnostic> {
        let mut out = Vec::new();
        if self.prototiles.is_empty() {
            out.push(RuleDiagnostic::new(
                DiagnosticKind::NoPrototiles,
                "rule declares no prototiles",
            ));
        }
        let mut names = HashSet::new();
        for p in &self.prototiles {
            if !names.insert(p.name.as_str()) {
                out.push(
                    RuleDiagnostic::new(DiagnosticKind::DuplicatePrototile, "duplicate prototile")
                        .label(&p.name),
                );
            }
            if let Some(v) = &p.volume {
                if !v.is_positive() {
                    out.push(
                        RuleDiagnostic::new(
                            DiagnosticKind::InvalidVolume,
                            format!("volume {v} is not positive"),
                        )
                        .label(&p.name),
                    );
                }
            }
            let shape_problem = match (&p.shape, self.dimension) {
                (Some(Shape::Length(0)), _) => Some("length must be positive".to_string()),
                (Some(Shape::Length(_)), Dimension::Two) => {
                    Some("length is only meaningful in 1D".to_string())
                }
                (Some(Shape::Cells(_)), Dimension::One) => {
                    Some("cells are only meaningful in 2D".to_string())
                }
                (Some(Shape::Cells(cells)), Dimension::Two) => polyomino_problem(cells),
                _ => None,
            };
            if let Some(msg) = shape_problem {
                out.push(RuleDiagnostic::new(DiagnosticKind::InvalidShape, msg).label(&p.name));
            }
        }
        out
    }
}

fn polyomino_problem(cells: &[(i64, i64)]) -> Option<String> {
    if cells.is_empty() {
        return Some("shape has no cells".into());
    }
    let set: BTreeSet<_> = cells.iter().copied().collect();
    if set.len() != cells.len() {
        return Some("shape lists a cell twice".into());
    }
    let sizes = components(&set);
    (sizes.len() > 1).then(|| format!("shape is not edge-connected (components {sizes:?})"))
}

/// Sizes of the edge-connected components of a cell set, largest first.
pub(crate) fn components(cells: &BTreeSet<(i64, i64)>) -> Vec<usize> {
    let mut seen = HashSet::new();
    let mut sizes = Vec::new();
    for &start in cells {
        if !seen.insert(start) {
            continue;
        }
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        while let Some((x, y)) = queue.pop_front() {
            size += 1;
            for nb in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                if cells.contains(&nb) && seen.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

impl Default for Condition {
    fn default() -> Self {
        Condition::Always
    }
}

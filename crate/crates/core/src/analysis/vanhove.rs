use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::Result;
use crate::expand::{Expander, ExpansionBudget, Grid};
use crate::json;
use crate::resolve::Hierarchy;
use crate::rule::Dimension;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelBoundary {
    pub level: u64,
    /// The supertile attaining the maximum ratio.
    pub label: String,
    #[serde(serialize_with = "json::rational")]
    pub ratio: BigRational,
    pub ratio_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanHoveReport {
    pub radius: u64,
    #[serde(serialize_with = "json::rational")]
    pub threshold: BigRational,
    pub levels: Vec<LevelBoundary>,
    /// The last (up to three) ratios strictly decrease and the final one is
    /// below `threshold`. A finite-depth diagnostic, not a proof.
    pub consistent: bool,
}

/// Cells of `grid` within grid distance `radius` of an unoccupied cell.
pub fn boundary_cells(grid: &Grid, radius: usize) -> u64 {
    if radius == 0 {
        return 0;
    }
    let (w, h) = (grid.width() + 2 * radius, grid.height() + 2 * radius);
    let inside = |x: usize, y: usize| {
        x >= radius
            && y >= radius
            && x - radius < grid.width()
            && y - radius < grid.height()
            && grid.get(x - radius, y - radius).is_some()
    };
    let mut dist = vec![usize::MAX; w * h];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !inside(x, y) {
                dist[y * w + x] = 0;
                queue.push_back((x, y));
            }
        }
    }
    let mut count = 0;
    while let Some((x, y)) = queue.pop_front() {
        let d = dist[y * w + x];
        if d == radius {
            continue;
        }
        let mut visit = |nx: usize, ny: usize| {
            let i = ny * w + nx;
            if dist[i] == usize::MAX {
                dist[i] = d + 1;
                count += 1;
                queue.push_back((nx, ny));
            }
        };
        if x > 0 {
            visit(x - 1, y);
        }
        if x + 1 < w {
            visit(x + 1, y);
        }
        if y > 0 {
            visit(x, y - 1);
        }
        if y + 1 < h {
            visit(x, y + 1);
        }
    }
    count
}

/// Largest boundary-to-size ratio among supertiles at each level
/// `1..=depth`. In 1D the ratio is `2r / length`; in 2D it is the share of
/// cells within grid distance `r` of the complement, on expanded supertiles.
pub fn van_hove_diagnostic(
    h: &Hierarchy<'_>,
    depth: u64,
    radius: u64,
    threshold: BigRational,
    budget: ExpansionBudget,
) -> Result<VanHoveReport> {
    let expander = Expander::new(h, budget);
    let mut levels = Vec::new();
    for level in 1..=depth {
        let lev = h.level(level)?;
        let mut worst: Option<(BigRational, String)> = None;
        for (idx, st) in lev.supertiles.iter().enumerate() {
            let ratio = match h.rule().dimension {
                Dimension::One => {
                    BigRational::new(BigInt::from(2 * radius), BigInt::from(st.cells.clone()))
                }
                Dimension::Two => {
                    let patch = expander.expand(level, idx)?;
                    let grid = patch.as_grid().expect("2D expansion");
                    BigRational::new(
                        BigInt::from(boundary_cells(grid, radius as usize)),
                        BigInt::from(patch.size()),
                    )
                }
            };
            if worst.as_ref().map_or(true, |(w, _)| ratio > *w) {
                worst = Some((ratio, st.label.clone()));
            }
        }
        let (ratio, label) = worst.expect("levels are nonempty");
        levels.push(LevelBoundary {
            level,
            label,
            ratio_approx: json::approx(&ratio),
            ratio,
        });
    }
    let tail = &levels[levels.len().saturating_sub(3)..];
    let decreasing = tail.windows(2).all(|w| w[1].ratio < w[0].ratio);
    let consistent = decreasing && tail.last().is_some_and(|l| l.ratio < threshold);
    Ok(VanHoveReport {
        radius,
        threshold,
        levels,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expand::CellPatch;
    use std::sync::Arc;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    fn square(n: i64) -> CellPatch {
        let alpha: Arc<[String]> = vec!["X".to_string()].into();
        let cells = (0..n).flat_map(|x| (0..n).map(move |y| ((x, y), 0)));
        CellPatch::from_cells(alpha, cells).unwrap()
    }

    #[test]
    fn boundary_of_squares() {
        assert_eq!(boundary_cells(square(1).as_grid().unwrap(), 1), 1);
        assert_eq!(boundary_cells(square(5).as_grid().unwrap(), 1), 16);
        assert_eq!(boundary_cells(square(5).as_grid().unwrap(), 2), 24);
        assert_eq!(boundary_cells(square(5).as_grid().unwrap(), 0), 0);
    }

    #[test]
    fn boundary_counts_concave_corners_by_grid_distance() {
        // L-shape: the inner corner cell is adjacent to the missing quadrant
        let alpha: Arc<[String]> = vec!["X".to_string()].into();
        let cells = [
            (0, 0),
            (1, 0),
            (2, 0),
            (0, 1),
            (1, 1),
            (2, 1),
            (0, 2),
            (1, 2),
        ];
        let p = CellPatch::from_cells(alpha, cells.iter().map(|&c| (c, 0))).unwrap();
        assert_eq!(boundary_cells(p.as_grid().unwrap(), 1), 7);
    }

    #[test]
    fn fibonacci_ratios_follow_lengths() {
        let r = builtins::load("fibonacci").unwrap();
        let h = Hierarchy::new(&r);
        let rep = van_hove_diagnostic(&h, 10, 1, half(), ExpansionBudget::default()).unwrap();
        // the shortest supertile is B_k, of length F_{k+1}
        let fib = [1u64, 2, 3, 5, 8, 13, 21, 34, 55, 89];
        for (l, f) in rep.levels.iter().zip(fib) {
            assert_eq!(l.ratio, BigRational::new(2.into(), f.into()));
            assert_eq!(l.label, "B");
        }
        assert!(rep.consistent);
    }
}

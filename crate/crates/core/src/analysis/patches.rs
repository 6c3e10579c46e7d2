use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::boundary_cells;
use super::hull::frequency_hull;
use crate::error::{Error, Result};
use crate::expand::{render_text, CellPatch, Expander, ExpansionBudget, SummaryTable};
use crate::json;
use crate::resolve::Hierarchy;
use crate::rule::Dimension;

/// Overlapping occurrences of `word` in the 1D supertile `(level, label)`,
/// computed from child summaries without expanding the supertile.
pub fn word_count(h: &Hierarchy<'_>, word: &[u32], level: u64, label: &str) -> Result<BigUint> {
    let (_, idx) = h.supertile(level, label)?;
    Ok(level_word_counts(h, word, level)?.swap_remove(idx))
}

fn level_word_counts(h: &Hierarchy<'_>, word: &[u32], level: u64) -> Result<Vec<BigUint>> {
    check_word(h, word)?;
    let table = SummaryTable::build(h, word, word.len() - 1, level)?;
    Ok(table.level(level).iter().map(|s| s.count.clone()).collect())
}

fn check_word(h: &Hierarchy<'_>, word: &[u32]) -> Result<()> {
    if word.is_empty() {
        return Err(Error::InvalidPatch("empty word".into()));
    }
    if word
        .iter()
        .any(|&l| l as usize >= h.rule().prototiles.len())
    {
        return Err(Error::InvalidPatch("label outside the alphabet".into()));
    }
    Ok(())
}

/// Translated occurrences of a 2D patch in an expanded supertile.
pub fn patch_count_2d(
    h: &Hierarchy<'_>,
    patch: &CellPatch,
    level: u64,
    label: &str,
    budget: ExpansionBudget,
) -> Result<u64> {
    if h.rule().dimension != Dimension::Two || patch.dimension() != Dimension::Two {
        return Err(Error::Dimension { expected: 2 });
    }
    let grid = Expander::new(h, budget).expand_label(level, label)?;
    Ok(grid.occurrences(patch).len() as u64)
}

/// Smallest level at most `max_level` whose every supertile contains `word`.
pub fn patch_universality(h: &Hierarchy<'_>, word: &[u32], max_level: u64) -> Result<Option<u64>> {
    check_word(h, word)?;
    let table = SummaryTable::build(h, word, word.len() - 1, max_level)?;
    Ok((0..=max_level).find(|&n| table.level(n).iter().all(|s| !s.count.is_zero())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyInterval {
    pub patch: String,
    pub level: u64,
    pub horizon: u64,
    /// Occurrences of the patch inside each level-`n` supertile.
    #[serde(serialize_with = "json::bigs")]
    pub counts: Vec<BigUint>,
    #[serde(serialize_with = "json::rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "json::rational")]
    pub hi: BigRational,
    /// Bound on the per-volume rate of occurrences straddling level-`n`
    /// supertile boundaries, which `lo`/`hi` do not see. Frequencies along
    /// supertiles of level `horizon` lie in `[lo, hi + boundary_slack]`.
    #[serde(serialize_with = "json::rational")]
    pub boundary_slack: BigRational,
    pub lo_approx: f64,
    pub hi_approx: f64,
    pub boundary_slack_approx: f64,
}

impl FrequencyInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo <= *x && *x <= &self.hi + &self.boundary_slack
    }
}

/// Range of `Σ_i count(P, P_n(i)) ρ_i` over the frequency hull at `(n, N)`.
pub fn patch_frequency_estimate(
    h: &Hierarchy<'_>,
    patch: &CellPatch,
    n: u64,
    horizon: u64,
    budget: ExpansionBudget,
) -> Result<FrequencyInterval> {
    let rule = h.rule();
    if patch.dimension() != rule.dimension {
        return Err(Error::Dimension {
            expected: rule.dimension.as_u8(),
        });
    }
    let lev = h.level(n)?;
    let (counts, edge): (Vec<BigUint>, Vec<BigUint>) = match patch.as_word() {
        Some(word) => {
            let reach = BigUint::from(word.len() - 1);
            let counts = level_word_counts(h, word, n)?;
            let edge = lev
                .supertiles
                .iter()
                .map(|st| (&st.cells).min(&reach).clone())
                .collect();
            (counts, edge)
        }
        None => {
            let p = patch.as_grid().expect("2D patch");
            let radius = p.width() + p.height() - 2;
            let ex = Expander::new(h, budget);
            let mut counts = Vec::new();
            let mut edge = Vec::new();
            for idx in 0..lev.len() {
                let st = ex.expand(n, idx)?;
                counts.push(BigUint::from(st.occurrences(patch).len()));
                let grid = st.as_grid().expect("2D expansion");
                edge.push(BigUint::from(boundary_cells(grid, radius)));
            }
            (counts, edge)
        }
    };
    let hull = frequency_hull(h, n, horizon)?;
    let dot = |v: &[BigRational], w: &[BigUint]| -> BigRational {
        v.iter()
            .zip(w)
            .map(|(r, c)| r * BigRational::from_integer(BigInt::from(c.clone())))
            .sum()
    };
    let values: Vec<BigRational> = hull.vertices.iter().map(|v| dot(v, &counts)).collect();
    let lo = values.iter().min().expect("hull has vertices").clone();
    let hi = values.iter().max().expect("hull has vertices").clone();
    let boundary_slack = hull
        .vertices
        .iter()
        .map(|v| dot(v, &edge))
        .max()
        .expect("hull has vertices");
    Ok(FrequencyInterval {
        patch: render_text(patch),
        level: n,
        horizon,
        counts,
        lo_approx: json::approx(&lo),
        hi_approx: json::approx(&hi),
        boundary_slack_approx: json::approx(&boundary_slack),
        lo,
        hi,
        boundary_slack,
    })
}

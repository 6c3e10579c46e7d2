//! Concrete supertiles: strings in 1D, labeled cell grids in 2D.

mod render;
mod strings;

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

pub use render::{char_table, parse_text_grid, render_svg, render_text};
pub use strings::{prefix_suffix, Summary, SummaryTable};

use crate::error::{Error, Result};
use crate::resolve::{to_i64, Hierarchy};
use crate::rule::{components, Dimension, FusionRule};

const EMPTY: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionBudget {
    pub max_cells: u64,
}

impl Default for ExpansionBudget {
    fn default() -> Self {
        ExpansionBudget {
            max_cells: 10_000_000,
        }
    }
}

impl ExpansionBudget {
    pub fn new(max_cells: u64) -> Self {
        ExpansionBudget { max_cells }
    }

    fn check(&self, needed: &BigUint) -> Result<()> {
        if *needed > BigUint::from(self.max_cells) {
            Err(Error::ExpansionTooLarge {
                needed: needed.clone(),
                max: self.max_cells,
            })
        } else {
            Ok(())
        }
    }
}

/// Dense labeled grid. Row `y` starts at `y * width`; empty cells hold `EMPTY`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    width: usize,
    height: usize,
    cells: Vec<u32>,
}

impl Grid {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<u32> {
        let v = self.cells[y * self.width + x];
        (v != EMPTY).then_some(v)
    }

    /// Occupied cells as `((x, y), label)` in row-major order.
    pub fn occupied(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != EMPTY)
            .map(|(i, &v)| ((i % self.width, i / self.width), v))
    }

    fn cell_set(&self) -> BTreeSet<(i64, i64)> {
        self.occupied()
            .map(|((x, y), _)| (x as i64, y as i64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatchBody {
    Word(Vec<u32>),
    Grid(Grid),
}

/// A finite labeled patch. Labels index into `alphabet` (prototile names in
/// declaration order). 2D patches are normalized so the minimum occupied x
/// and y are both zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellPatch {
    alphabet: Arc<[String]>,
    body: PatchBody,
}

impl CellPatch {
    pub fn word(alphabet: Arc<[String]>, labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPatch("empty word".into()));
        }
        if labels.iter().any(|&l| l as usize >= alphabet.len()) {
            return Err(Error::InvalidPatch("label outside the alphabet".into()));
        }
        Ok(CellPatch {
            alphabet,
            body: PatchBody::Word(labels),
        })
    }

    /// Builds a 2D patch, rejecting duplicates and disconnected cell sets.
    pub fn from_cells(
        alphabet: Arc<[String]>,
        cells: impl IntoIterator<Item = ((i64, i64), u32)>,
    ) -> Result<Self> {
        let cells: Vec<_> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(Error::InvalidPatch("empty patch".into()));
        }
        let set: BTreeSet<(i64, i64)> = cells.iter().map(|c| c.0).collect();
        if set.len() != cells.len() {
            return Err(Error::InvalidPatch("a cell appears twice".into()));
        }
        if cells.iter().any(|c| c.1 as usize >= alphabet.len()) {
            return Err(Error::InvalidPatch("label outside the alphabet".into()));
        }
        let sizes = components(&set);
        if sizes.len() > 1 {
            return Err(Error::InvalidPatch(format!(
                "patch is not connected (components {sizes:?})"
            )));
        }
        let min_x = set.iter().map(|c| c.0).min().unwrap_or(0);
        let min_y = set.iter().map(|c| c.1).min().unwrap_or(0);
        let width = (set.iter().map(|c| c.0).max().unwrap_or(0) - min_x + 1) as usize;
        let height = (set.iter().map(|c| c.1).max().unwrap_or(0) - min_y + 1) as usize;
        let mut grid = vec![EMPTY; width * height];
        for ((x, y), l) in cells {
            grid[(y - min_y) as usize * width + (x - min_x) as usize] = l;
        }
        Ok(CellPatch {
            alphabet,
            body: PatchBody::Grid(Grid {
                width,
                height,
                cells: grid,
            }),
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn body(&self) -> &PatchBody {
        &self.body
    }

    pub fn dimension(&self) -> Dimension {
        match self.body {
            PatchBody::Word(_) => Dimension::One,
            PatchBody::Grid(_) => Dimension::Two,
        }
    }

    pub fn as_word(&self) -> Option<&[u32]> {
        match &self.body {
            PatchBody::Word(w) => Some(w),
            PatchBody::Grid(_) => None,
        }
    }

    pub fn as_grid(&self) -> Option<&Grid> {
        match &self.body {
            PatchBody::Grid(g) => Some(g),
            PatchBody::Word(_) => None,
        }
    }

    /// Number of tiles in 1D, occupied cells in 2D.
    pub fn size(&self) -> usize {
        match &self.body {
            PatchBody::Word(w) => w.len(),
            PatchBody::Grid(g) => g.cells.iter().filter(|&&c| c != EMPTY).count(),
        }
    }

    /// Occurrences of each alphabet label, by cell (2D) or by tile (1D).
    pub fn census(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.alphabet.len()];
        match &self.body {
            PatchBody::Word(w) => w.iter().for_each(|&l| out[l as usize] += 1),
            PatchBody::Grid(g) => g.occupied().for_each(|(_, l)| out[l as usize] += 1),
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        match &self.body {
            PatchBody::Word(_) => true,
            PatchBody::Grid(g) => components(&g.cell_set()).len() <= 1,
        }
    }

    /// Label names of a 1D patch.
    pub fn word_labels(&self) -> Option<Vec<&str>> {
        self.as_word().map(|w| {
            w.iter()
                .map(|&l| self.alphabet[l as usize].as_str())
                .collect()
        })
    }

    /// Start positions (1D) or anchor offsets (2D) of every translated
    /// occurrence of `pattern` inside `self`, overlaps included.
    pub fn occurrences(&self, pattern: &CellPatch) -> Vec<(usize, usize)> {
        match (&self.body, &pattern.body) {
            (PatchBody::Word(text), PatchBody::Word(word)) => {
                if word.len() > text.len() {
                    return vec![];
                }
                text.windows(word.len())
                    .enumerate()
                    .filter(|(_, w)| w == word)
                    .map(|(i, _)| (i, 0))
                    .collect()
            }
            (PatchBody::Grid(g), PatchBody::Grid(p)) => grid_occurrences(g, p),
            _ => vec![],
        }
    }
}

#[derive(Serialize)]
struct PatchJson<'a> {
    dimension: u8,
    alphabet: &'a [String],
    size: usize,
    width: usize,
    height: usize,
    census: Vec<u64>,
    text: String,
}

impl Serialize for CellPatch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (width, height) = match &self.body {
            PatchBody::Word(w) => (w.len(), 1),
            PatchBody::Grid(g) => (g.width, g.height),
        };
        PatchJson {
            dimension: self.dimension().as_u8(),
            alphabet: &self.alphabet,
            size: self.size(),
            width,
            height,
            census: self.census(),
            text: render_text(self),
        }
        .serialize(s)
    }
}

fn grid_occurrences(g: &Grid, p: &Grid) -> Vec<(usize, usize)> {
    if p.width > g.width || p.height > g.height {
        return vec![];
    }
    let pattern: Vec<((usize, usize), u32)> = p.occupied().collect();
    let mut out = Vec::new();
    for ay in 0..=g.height - p.height {
        for ax in 0..=g.width - p.width {
            if pattern
                .iter()
                .all(|&((x, y), l)| g.cells[(ay + y) * g.width + ax + x] == l)
            {
                out.push((ax, ay));
            }
        }
    }
    out
}

/// Expands supertiles of one rule, sharing child expansions between calls.
pub struct Expander<'h, 'r> {
    hierarchy: &'h Hierarchy<'r>,
    budget: ExpansionBudget,
    alphabet: Arc<[String]>,
    memo: Mutex<HashMap<(u64, usize), Arc<PatchBody>>>,
}

impl<'h, 'r> Expander<'h, 'r> {
    pub fn new(hierarchy: &'h Hierarchy<'r>, budget: ExpansionBudget) -> Self {
        Expander {
            hierarchy,
            budget,
            alphabet: hierarchy.rule().prototile_names().into(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn alphabet(&self) -> Arc<[String]> {
        self.alphabet.clone()
    }

    pub fn expand(&self, level: u64, idx: usize) -> Result<CellPatch> {
        Ok(CellPatch {
            alphabet: self.alphabet.clone(),
            body: (*self.body(level, idx)?).clone(),
        })
    }

    pub fn expand_label(&self, level: u64, label: &str) -> Result<CellPatch> {
        let (_, idx) = self.hierarchy.supertile(level, label)?;
        self.expand(level, idx)
    }

    fn body(&self, level: u64, idx: usize) -> Result<Arc<PatchBody>> {
        if let Some(b) = self.memo.lock().expect("poisoned").get(&(level, idx)) {
            return Ok(b.clone());
        }
        let lev = self.hierarchy.level(level)?;
        let st = &lev.supertiles[idx];
        self.budget.check(&st.cells)?;
        let rule = self.hierarchy.rule();
        let body = if level == 0 {
            let proto = &rule.prototiles[idx];
            match rule.dimension {
                Dimension::One => PatchBody::Word(vec![idx as u32]),
                Dimension::Two => {
                    let (w, h) = proto.extent();
                    let (w, h) = (w as usize, h as usize);
                    let mut cells = vec![EMPTY; w * h];
                    for (x, y) in proto.cells() {
                        cells[y as usize * w + x as usize] = idx as u32;
                    }
                    PatchBody::Grid(Grid {
                        width: w,
                        height: h,
                        cells,
                    })
                }
            }
        } else {
            match rule.dimension {
                Dimension::One => {
                    let mut word = Vec::with_capacity(st.cells.to_usize().unwrap_or(0));
                    for p in &st.body {
                        let child = self.body(level - 1, p.child)?;
                        let PatchBody::Word(cw) = &*child else {
                            unreachable!("1D rule expands to words")
                        };
                        let times = p.repeat.to_usize().expect("within budget");
                        for _ in 0..times {
                            word.extend_from_slice(cw);
                        }
                    }
                    PatchBody::Word(word)
                }
                Dimension::Two => self.compose_grid(level, idx)?,
            }
        };
        let body = Arc::new(body);
        self.memo
            .lock()
            .expect("poisoned")
            .insert((level, idx), body.clone());
        Ok(body)
    }

    fn compose_grid(&self, level: u64, idx: usize) -> Result<PatchBody> {
        let lev = self.hierarchy.level(level)?;
        let st = &lev.supertiles[idx];
        let area = &st.width * &st.height;
        if area > BigUint::from(self.budget.max_cells.saturating_mul(4)) {
            return Err(Error::ExpansionTooLarge {
                needed: area,
                max: self.budget.max_cells,
            });
        }
        let width = st.width.to_usize().expect("within budget");
        let height = st.height.to_usize().expect("within budget");
        let offsets: Vec<(i64, i64)> = st
            .body
            .iter()
            .map(|p| {
                let (x, y) = p.offset.as_ref().expect("2D placements carry offsets");
                (
                    to_i64(x).expect("within budget"),
                    to_i64(y).expect("within budget"),
                )
            })
            .collect();
        let min_x = offsets.iter().map(|o| o.0).min().unwrap_or(0);
        let min_y = offsets.iter().map(|o| o.1).min().unwrap_or(0);
        let mut cells = vec![EMPTY; width * height];
        let mut owner = vec![u32::MAX; width * height];
        for (k, (p, &(ox, oy))) in st.body.iter().zip(&offsets).enumerate() {
            let child = self.body(level - 1, p.child)?;
            let PatchBody::Grid(cg) = &*child else {
                unreachable!("2D rule expands to grids")
            };
            let (dx, dy) = ((ox - min_x) as usize, (oy - min_y) as usize);
            for ((x, y), l) in cg.occupied() {
                let i = (y + dy) * width + x + dx;
                if cells[i] != EMPTY {
                    return Err(Error::Overlap {
                        level,
                        label: st.label.clone(),
                        first: owner[i] as usize,
                        second: k,
                        cell: ((x + dx) as i64, (y + dy) as i64),
                    });
                }
                cells[i] = l;
                owner[i] = k as u32;
            }
        }
        let grid = Grid {
            width,
            height,
            cells,
        };
        let sizes = components(&grid.cell_set());
        if sizes.len() > 1 {
            return Err(Error::Disconnected {
                level,
                label: st.label.clone(),
                components: sizes,
            });
        }
        Ok(PatchBody::Grid(grid))
    }
}

/// Expands one supertile from scratch.
pub fn expand_supertile(
    rule: &FusionRule,
    level: u64,
    label: &str,
    budget: ExpansionBudget,
) -> Result<CellPatch> {
    let h = Hierarchy::new(rule);
    Expander::new(&h, budget).expand_label(level, label)
}

/// Parses a 1D word. Whitespace-separated names are accepted; without
/// whitespace each character is one prototile name.
pub fn parse_word(rule: &FusionRule, text: &str) -> Result<CellPatch> {
    let tokens: Vec<&str> = if text.trim().contains(char::is_whitespace) {
        text.split_whitespace().collect()
    } else {
        text.trim()
            .char_indices()
            .map(|(i, c)| &text.trim()[i..i + c.len_utf8()])
            .collect()
    };
    let labels = tokens
        .iter()
        .map(|t| {
            rule.prototile_index(t)
                .map(|i| i as u32)
                .ok_or_else(|| Error::InvalidPatch(format!("unknown prototile {t}")))
        })
        .collect::<Result<Vec<_>>>()?;
    CellPatch::word(rule.prototile_names().into(), labels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub level: u64,
    pub label: String,
    /// Start index (1D) or anchor cell (2D) of the first occurrence.
    pub position: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    /// First occurrence found, scanning levels upward.
    pub witness: Option<Witness>,
    /// Highest level searched. Without a witness this is "not found up to
    /// this level", not a proof of inadmissibility.
    pub searched_to: u64,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        self.witness.is_some()
    }
}

/// Searches supertiles at levels `0..=max_level`, in canonical order, for a
/// translated copy of `patch`.
pub fn is_admissible(
    rule: &FusionRule,
    patch: &CellPatch,
    max_level: u64,
    budget: ExpansionBudget,
) -> Result<Admissibility> {
    if patch.dimension() != rule.dimension {
        return Err(Error::Dimension {
            expected: rule.dimension.as_u8(),
        });
    }
    let h = Hierarchy::new(rule);
    let ex = Expander::new(&h, budget);
    for level in 0..=max_level {
        let lev = h.level(level)?;
        for (idx, st) in lev.supertiles.iter().enumerate() {
            if st.cells < BigUint::from(patch.size()) {
                continue;
            }
            let expanded = ex.expand(level, idx)?;
            if let Some(&position) = expanded.occurrences(patch).first() {
                return Ok(Admissibility {
                    witness: Some(Witness {
                        level,
                        label: st.label.clone(),
                        position,
                    }),
                    searched_to: level,
                });
            }
        }
    }
    Ok(Admissibility {
        witness: None,
        searched_to: max_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn word(rule: &str, level: u64, label: &str) -> String {
        let r = builtins::load(rule).unwrap();
        let p = expand_supertile(&r, level, label, ExpansionBudget::default()).unwrap();
        p.word_labels().unwrap().concat()
    }

    #[test]
    fn thue_morse_level_three() {
        assert_eq!(word("thue_morse", 3, "S1"), "ABBABAAB");
        assert_eq!(word("thue_morse", 3, "S2"), "BAABABBA");
    }

    #[test]
    fn fiblike_level_four() {
        assert_eq!(word("fiblike", 4, "A"), "ATBTBTBA");
        assert_eq!(word("fiblike", 4, "B"), "ATBTB");
    }

    #[test]
    fn chair_level_one() {
        let r = builtins::load("chair").unwrap();
        for label in ["SW", "SE", "NW", "NE"] {
            let p = expand_supertile(&r, 1, label, ExpansionBudget::default()).unwrap();
            assert_eq!(p.size(), 12);
            assert_eq!(p.census().iter().sum::<u64>(), 12);
            assert!(p.is_connected());
            let g = p.as_grid().unwrap();
            assert_eq!((g.width(), g.height()), (4, 4));
        }
    }

    #[test]
    fn budget_is_enforced_before_allocation() {
        let r = builtins::load("ten_pow_n").unwrap();
        let err = expand_supertile(&r, 5, "A", ExpansionBudget::new(1_000_000)).unwrap_err();
        assert!(matches!(err, Error::ExpansionTooLarge { .. }));
    }

    #[test]
    fn overlap_is_detected() {
        let r = crate::dsl::parse_rule(
            "rule r dim 2 prototile X cells (0,0) (1,0) level default: X = X@(0,0) X@(w(X)-1,0)",
        )
        .unwrap();
        let err = expand_supertile(&r, 1, "X", ExpansionBudget::default()).unwrap_err();
        assert_eq!(
            err,
            Error::Overlap {
                level: 1,
                label: "X".into(),
                first: 0,
                second: 1,
                cell: (1, 0)
            }
        );
    }

    #[test]
    fn disconnection_is_detected() {
        let r = crate::dsl::parse_rule(
            "rule r dim 2 prototile X level default: X = X@(0,0) X@(0,h(X)+1)",
        )
        .unwrap();
        let err = expand_supertile(&r, 1, "X", ExpansionBudget::default()).unwrap_err();
        assert!(
            matches!(err, Error::Disconnected { ref components, .. } if components == &vec![1, 1])
        );
    }

    #[test]
    fn admissibility_of_aa() {
        let r = builtins::load("thue_morse").unwrap();
        let aa = parse_word(&r, "AA").unwrap();
        let res = is_admissible(&r, &aa, 3, ExpansionBudget::default()).unwrap();
        assert_eq!(
            res.witness,
            Some(Witness {
                level: 2,
                label: "S2".into(),
                position: (1, 0)
            })
        );
        let aaa = parse_word(&r, "AAA").unwrap();
        let res = is_admissible(&r, &aaa, 8, ExpansionBudget::default()).unwrap();
        assert!(!res.is_admissible());
        assert_eq!(res.searched_to, 8);
    }

    #[test]
    fn word_parsing() {
        let r = builtins::load("fib2d").unwrap();
        let w = parse_word(&r, "AA BB").unwrap();
        assert_eq!(w.as_word().unwrap(), &[0, 3]);
        assert!(parse_word(&r, "AA CC").is_err());
    }

    #[test]
    fn patch_invariants() {
        let alpha: Arc<[String]> = vec!["X".to_string()].into();
        assert!(CellPatch::from_cells(alpha.clone(), [((0, 0), 0), ((2, 0), 0)]).is_err());
        assert!(CellPatch::from_cells(alpha.clone(), [((0, 0), 0), ((0, 0), 0)]).is_err());
        let p = CellPatch::from_cells(alpha, [((5, 5), 0), ((5, 6), 0)]).unwrap();
        assert_eq!(p.as_grid().unwrap().get(0, 1), Some(0));
    }
}

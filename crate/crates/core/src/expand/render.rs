use std::fmt::Write;
use std::sync::Arc;

use super::{CellPatch, PatchBody};
use crate::error::{Error, Result};

const FALLBACK_CHARS: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

const PALETTE: &[&str] = &[
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

/// One display character per label. Single-character names are used as-is;
/// otherwise labels map to letters by declaration order.
pub fn char_table(alphabet: &[String]) -> Vec<char> {
    let single = alphabet.iter().all(|n| n.chars().count() == 1 && n != ".");
    if single {
        alphabet.iter().map(|n| n.chars().next().unwrap()).collect()
    } else {
        (0..alphabet.len())
            .map(|i| FALLBACK_CHARS.chars().nth(i).unwrap_or('?'))
            .collect()
    }
}

/// 1D: the label string. 2D: one line per row, top row first, `.` for
/// empty cells.
pub fn render_text(patch: &CellPatch) -> String {
    match &patch.body {
        PatchBody::Word(w) => {
            let names: Vec<&str> = w
                .iter()
                .map(|&l| patch.alphabet[l as usize].as_str())
                .collect();
            if names.iter().all(|n| n.chars().count() == 1) {
                names.concat()
            } else {
                names.join(" ")
            }
        }
        PatchBody::Grid(g) => {
            let chars = char_table(&patch.alphabet);
            let mut out = String::with_capacity((g.width + 1) * g.height);
            for y in (0..g.height).rev() {
                for x in 0..g.width {
                    out.push(g.get(x, y).map_or('.', |l| chars[l as usize]));
                }
                if y > 0 {
                    out.push('\n');
                }
            }
            out
        }
    }
}

/// Reads the 2D text format written by [`render_text`].
pub fn parse_text_grid(alphabet: Arc<[String]>, text: &str) -> Result<CellPatch> {
    let chars = char_table(&alphabet);
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect();
    let mut cells = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let y = (rows.len() - 1 - r) as i64;
        for (x, c) in row.chars().enumerate() {
            if c == '.' {
                continue;
            }
            let label = chars
                .iter()
                .position(|&k| k == c)
                .ok_or_else(|| Error::InvalidPatch(format!("unknown cell character {c:?}")))?;
            cells.push(((x as i64, y), label as u32));
        }
    }
    CellPatch::from_cells(alphabet, cells)
}

/// SVG 1.1 document with one square per cell. 1D patches render as a single
/// row.
pub fn render_svg(patch: &CellPatch, cell_size: u32) -> String {
    let cs = cell_size.max(1) as usize;
    let (width, height, cells): (usize, usize, Vec<((usize, usize), u32)>) = match &patch.body {
        PatchBody::Word(w) => (
            w.len(),
            1,
            w.iter().enumerate().map(|(x, &l)| ((x, 0), l)).collect(),
        ),
        PatchBody::Grid(g) => (g.width, g.height, g.occupied().collect()),
    };
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = width * cs,
        h = height * cs
    )
    .unwrap();
    // top row first, matching the text rendering
    let mut ordered = cells;
    ordered.sort_by_key(|&((x, y), _)| (height - 1 - y, x));
    for ((x, y), l) in ordered {
        writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{cs}\" height=\"{cs}\" fill=\"{}\" stroke=\"black\" stroke-width=\"1\"/>",
            x * cs,
            (height - 1 - y) * cs,
            PALETTE[l as usize % PALETTE.len()]
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::expand::{expand_supertile, ExpansionBudget};

    fn alpha(names: &[&str]) -> Arc<[String]> {
        names
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .into()
    }

    #[test]
    fn word_renders_as_string() {
        let p = CellPatch::word(alpha(&["A", "B"]), vec![0, 1, 1, 0]).unwrap();
        assert_eq!(render_text(&p), "ABBA");
    }

    #[test]
    fn single_cell() {
        let p = CellPatch::from_cells(alpha(&["X"]), [((0, 0), 0)]).unwrap();
        assert_eq!(render_text(&p), "X");
        let svg = render_svg(&p, 10);
        assert_eq!(svg.matches("<rect").count(), 1);
        assert!(svg.contains("width=\"10\" height=\"10\""));
    }

    #[test]
    fn chair_level_one_golden() {
        let r = builtins::load("chair").unwrap();
        let p = expand_supertile(&r, 1, "SW", ExpansionBudget::default()).unwrap();
        let text = render_text(&p);
        assert_eq!(
            text,
            include_str!("../../tests/golden/chair_sw_1.txt").trim_end()
        );
        assert_eq!(text.matches('.').count(), 4);
        let back = parse_text_grid(p.alphabet().to_vec().into(), &text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn fallback_characters() {
        assert_eq!(char_table(&alpha(&["SW", "SE"])), vec!['A', 'B']);
        assert_eq!(char_table(&alpha(&["x", "."])), vec!['A', 'B']);
    }
}

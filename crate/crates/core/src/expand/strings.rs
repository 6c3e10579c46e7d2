//! Occurrence counting in 1D supertiles without expanding them.
//!
//! A [`Summary`] keeps a string's length, its first and last `keep` symbols,
//! and the number of occurrences of a fixed word inside it. Summaries
//! concatenate exactly: an occurrence straddling a junction starts in the
//! left suffix and ends in the right prefix when `keep = |word| - 1`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::resolve::Hierarchy;
use crate::rule::{Dimension, FusionRule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub len: BigUint,
    pub prefix: Vec<u32>,
    pub suffix: Vec<u32>,
    pub count: BigUint,
}

struct Scanner<'w> {
    word: &'w [u32],
    keep: usize,
}

impl Scanner<'_> {
    fn leaf(&self, label: u32) -> Summary {
        let edge = if self.keep > 0 { vec![label] } else { vec![] };
        Summary {
            len: BigUint::one(),
            prefix: edge.clone(),
            suffix: edge,
            count: BigUint::from((self.word == [label]) as u8),
        }
    }

    /// Occurrences in `left ++ right` that start in `left` and end in `right`.
    fn cross(&self, left: &[u32], right: &[u32]) -> u64 {
        let l = self.word.len();
        if l < 2 {
            return 0;
        }
        let joined: Vec<u32> = left.iter().chain(right).copied().collect();
        (0..left.len())
            .filter(|&i| {
                i + l > left.len() && i + l <= joined.len() && joined[i..i + l] == *self.word
            })
            .count() as u64
    }

    fn concat(&self, a: &Summary, b: &Summary) -> Summary {
        let prefix = if a.prefix.len() < self.keep {
            a.prefix
                .iter()
                .chain(&b.prefix)
                .take(self.keep)
                .copied()
                .collect()
        } else {
            a.prefix.clone()
        };
        let suffix = if b.suffix.len() < self.keep {
            let joined: Vec<u32> = a.suffix.iter().chain(&b.suffix).copied().collect();
            joined[joined.len().saturating_sub(self.keep)..].to_vec()
        } else {
            b.suffix.clone()
        };
        Summary {
            len: &a.len + &b.len,
            prefix,
            suffix,
            count: &a.count + &b.count + self.cross(&a.suffix, &b.prefix),
        }
    }

    fn repeat(&self, a: &Summary, times: &BigUint) -> Summary {
        if times.is_one() {
            return a.clone();
        }
        if a.prefix.len() >= self.keep {
            // long enough that every junction sees the same suffix/prefix pair
            let junction = BigUint::from(self.cross(&a.suffix, &a.prefix));
            return Summary {
                len: &a.len * times,
                prefix: a.prefix.clone(),
                suffix: a.suffix.clone(),
                count: &a.count * times + junction * (times - 1u8),
            };
        }
        let mut acc: Option<Summary> = None;
        let mut base = a.clone();
        for bit in 0..times.bits() {
            if times.bit(bit) {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(s) => self.concat(&s, &base),
                });
            }
            if bit + 1 < times.bits() {
                base = self.concat(&base, &base);
            }
        }
        acc.expect("times >= 1")
    }
}

/// Summaries of every supertile at levels `0..=n`, for one word.
pub struct SummaryTable {
    levels: Vec<Vec<Summary>>,
}

impl SummaryTable {
    /// Summaries keeping `keep` edge symbols and counting `word` (which may
    /// be empty, in which case counts are zero).
    pub fn build(h: &Hierarchy<'_>, word: &[u32], keep: usize, up_to: u64) -> Result<Self> {
        if h.rule().dimension != Dimension::One {
            return Err(Error::Dimension { expected: 1 });
        }
        let scanner = Scanner { word, keep };
        let base: Vec<Summary> = (0..h.rule().prototiles.len())
            .map(|i| scanner.leaf(i as u32))
            .collect();
        let mut levels = vec![base];
        for n in 1..=up_to {
            let lev = h.level(n)?;
            let prev = levels.last().expect("level 0");
            let row = lev
                .supertiles
                .iter()
                .map(|st| {
                    st.body
                        .iter()
                        .map(|p| scanner.repeat(&prev[p.child], &p.repeat))
                        .reduce(|a, b| scanner.concat(&a, &b))
                        .unwrap_or_else(|| Summary {
                            len: BigUint::zero(),
                            prefix: vec![],
                            suffix: vec![],
                            count: BigUint::zero(),
                        })
                })
                .collect();
            levels.push(row);
        }
        Ok(SummaryTable { levels })
    }

    pub fn get(&self, level: u64, idx: usize) -> &Summary {
        &self.levels[level as usize][idx]
    }

    pub fn level(&self, level: u64) -> &[Summary] {
        &self.levels[level as usize]
    }
}

/// First and last `min(len, length)` prototile names of a 1D supertile,
/// computed without expanding it.
pub fn prefix_suffix(
    rule: &FusionRule,
    level: u64,
    label: &str,
    len: usize,
) -> Result<(Vec<String>, Vec<String>)> {
    let h = Hierarchy::new(rule);
    let (_, idx) = h.supertile(level, label)?;
    let table = SummaryTable::build(&h, &[], len, level)?;
    let s = table.get(level, idx);
    let names = |v: &[u32]| {
        v.iter()
            .map(|&l| rule.prototiles[l as usize].name.clone())
            .collect()
    };
    Ok((names(&s.prefix), names(&s.suffix)))
}

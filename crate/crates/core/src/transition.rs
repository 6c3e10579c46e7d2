//! Exact transition matrices between supertile levels.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;
use crate::resolve::Hierarchy;
use crate::rule::FusionRule;

/// `entries[i][j]` counts level-`from` supertile `i` inside level-`to`
/// supertile `j`, following the fusion tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    #[serde(rename = "from")]
    pub from_level: u64,
    #[serde(rename = "to")]
    pub to_level: u64,
    #[serde(rename = "rows")]
    pub row_labels: Vec<String>,
    #[serde(rename = "cols")]
    pub col_labels: Vec<String>,
    #[serde(serialize_with = "json::big_rows")]
    pub entries: Vec<Vec<BigUint>>,
}

impl TransitionMatrix {
    pub fn identity(level: u64, labels: Vec<String>) -> Self {
        let k = labels.len();
        let entries = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i == j {
                            BigUint::one()
                        } else {
                            BigUint::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        TransitionMatrix {
            from_level: level,
            to_level: level,
            row_labels: labels.clone(),
            col_labels: labels,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<BigUint> {
        self.entries.iter().map(|row| row[j].clone()).collect()
    }

    /// Product `self · rhs`, composing `from → mid → to`.
    pub fn compose(&self, rhs: &TransitionMatrix) -> TransitionMatrix {
        assert_eq!(self.to_level, rhs.from_level, "levels do not chain");
        assert_eq!(self.cols(), rhs.rows(), "shapes do not chain");
        let entries = (0..self.rows())
            .map(|i| {
                (0..rhs.cols())
                    .map(|j| {
                        let mut acc = BigUint::zero();
                        for k in 0..self.cols() {
                            let a = &self.entries[i][k];
                            if !a.is_zero() {
                                acc += a * &rhs.entries[k][j];
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        TransitionMatrix {
            from_level: self.from_level,
            to_level: rhs.to_level,
            row_labels: self.row_labels.clone(),
            col_labels: rhs.col_labels.clone(),
            entries,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().flatten().all(|x| !x.is_zero())
    }

    /// First zero entry in row-major order.
    pub fn first_zero(&self) -> Option<(usize, usize)> {
        for (i, row) in self.entries.iter().enumerate() {
            if let Some(j) = row.iter().position(Zero::is_zero) {
                return Some((i, j));
            }
        }
        None
    }

    pub fn has_zero_column(&self) -> bool {
        (0..self.cols()).any(|j| self.entries.iter().all(|row| row[j].is_zero()))
    }

    /// Entries as `u64`, for tests and small examples. Panics on overflow.
    pub fn to_u64(&self) -> Vec<Vec<u64>> {
        use num_traits::ToPrimitive;
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_u64().expect("entry fits u64"))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        let width = cells
            .iter()
            .flatten()
            .chain(self.col_labels.iter())
            .map(|s| s.len())
            .max()
            .unwrap_or(1);
        let label_w = self.row_labels.iter().map(|s| s.len()).max().unwrap_or(1);
        writeln!(f, "M[{},{}]", self.from_level, self.to_level)?;
        write!(f, "{:label_w$}", "")?;
        for c in &self.col_labels {
            write!(f, " {c:>width$}")?;
        }
        for (label, row) in self.row_labels.iter().zip(&cells) {
            write!(f, "\n{label:label_w$}")?;
            for x in row {
                write!(f, " {x:>width$}")?;
            }
        }
        Ok(())
    }
}

/// Volumes of the supertiles at one level, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeVector {
    pub level: u64,
    pub labels: Vec<String>,
    #[serde(serialize_with = "json::rationals")]
    pub values: Vec<BigRational>,
}

impl<'r> Hierarchy<'r> {
    /// `M_{k-1,k}`, read directly off the level-`k` bodies. Cached.
    pub fn step_matrix(&self, k: u64) -> Result<Arc<TransitionMatrix>> {
        assert!(k >= 1, "step matrices start at level 1");
        if let Some(m) = self.steps.lock().expect("poisoned").get(&k) {
            return Ok(m.clone());
        }
        let prev = self.level(k - 1)?;
        let cur = self.level(k)?;
        let mut entries = vec![vec![BigUint::zero(); cur.len()]; prev.len()];
        for (j, st) in cur.supertiles.iter().enumerate() {
            for p in &st.body {
                entries[p.child][j] += &p.repeat;
            }
        }
        let m = Arc::new(TransitionMatrix {
            from_level: k - 1,
            to_level: k,
            row_labels: prev.labels(),
            col_labels: cur.labels(),
            entries,
        });
        self.steps.lock().expect("poisoned").insert(k, m.clone());
        Ok(m)
    }

    /// `M_{from,to}` as the ordered product of step matrices.
    pub fn transition_matrix(&self, from: u64, to: u64) -> Result<TransitionMatrix> {
        if to < from {
            return Err(Error::InvalidRange { from, to });
        }
        let mut acc = TransitionMatrix::identity(from, self.level(from)?.labels());
        for k in from + 1..=to {
            acc = acc.compose(&*self.step_matrix(k)?);
        }
        Ok(acc)
    }

    pub fn volumes(&self, n: u64) -> Result<VolumeVector> {
        let level = self.level(n)?;
        Ok(VolumeVector {
            level: n,
            labels: level.labels(),
            values: level.supertiles.iter().map(|s| s.volume.clone()).collect(),
        })
    }
}

pub fn step_matrix(rule: &FusionRule, k: u64) -> Result<TransitionMatrix> {
    Hierarchy::new(rule).step_matrix(k).map(|m| (*m).clone())
}

pub fn transition_matrix(rule: &FusionRule, from: u64, to: u64) -> Result<TransitionMatrix> {
    Hierarchy::new(rule).transition_matrix(from, to)
}

pub fn volumes(rule: &FusionRule, n: u64) -> Result<VolumeVector> {
    Hierarchy::new(rule).volumes(n)
}

/// `Mᵀ · v`: volumes at the top level of `m` from volumes at its bottom level.
pub fn push_volumes(m: &TransitionMatrix, lower: &[BigRational]) -> Vec<BigRational> {
    (0..m.cols())
        .map(|j| {
            (0..m.rows())
                .map(|i| {
                    BigRational::from_integer(BigInt::from(m.entries[i][j].clone())) * &lower[i]
                })
                .fold(BigRational::zero(), |a, b| a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn rule(name: &str) -> FusionRule {
        builtins::load(name).unwrap()
    }

    #[test]
    fn fiblike_step_matrices() {
        let r = rule("fiblike");
        let h = Hierarchy::new(&r);
        assert_eq!(
            h.step_matrix(4).unwrap().to_u64(),
            vec![vec![1, 1], vec![1, 0]]
        );
        assert_eq!(
            h.step_matrix(2).unwrap().to_u64(),
            vec![vec![1, 1, 1], vec![1, 0, 1]]
        );
        assert_eq!(
            h.step_matrix(3).unwrap().to_u64(),
            vec![vec![0, 1], vec![1, 0], vec![1, 0]]
        );
    }

    #[test]
    fn ten_pow_n_step() {
        let m = step_matrix(&rule("ten_pow_n"), 3).unwrap();
        assert_eq!(m.to_u64(), vec![vec![1000, 1], vec![1, 1000]]);
        let m = step_matrix(&rule("ten_pow_n"), 10).unwrap();
        assert_eq!(m.entries[0][0].to_string(), "10000000000");
    }

    #[test]
    fn products() {
        assert_eq!(
            transition_matrix(&rule("fiblike"), 1, 4).unwrap().to_u64(),
            vec![vec![3, 2], vec![2, 1]]
        );
        assert_eq!(
            transition_matrix(&rule("ten_pow_n"), 0, 2)
                .unwrap()
                .to_u64(),
            vec![vec![1001, 110], vec![110, 1001]]
        );
        assert_eq!(
            transition_matrix(&rule("thue_morse"), 0, 3)
                .unwrap()
                .to_u64(),
            vec![vec![4, 4], vec![4, 4]]
        );
    }

    #[test]
    fn empty_product_is_identity() {
        for name in builtins::NAMES {
            let r = rule(name);
            let m = transition_matrix(&r, 3, 3).unwrap();
            let k = m.rows();
            assert_eq!(m, TransitionMatrix::identity(3, m.row_labels.clone()));
            assert_eq!(m.cols(), k);
        }
        assert_eq!(
            transition_matrix(&rule("fibonacci"), 4, 2),
            Err(Error::InvalidRange { from: 4, to: 2 })
        );
    }

    #[test]
    fn volume_vectors() {
        let v = volumes(&rule("fibonacci"), 3).unwrap();
        assert_eq!(
            v.values,
            vec![
                BigRational::from_integer(5.into()),
                BigRational::from_integer(3.into())
            ]
        );
        let v = volumes(&rule("ten_pow_n"), 1).unwrap();
        assert_eq!(v.values, vec![BigRational::from_integer(11.into()); 2]);
        let v = volumes(&rule("chair"), 0).unwrap();
        assert_eq!(v.values, vec![BigRational::from_integer(3.into()); 4]);
    }

    #[test]
    fn no_zero_columns() {
        for name in builtins::NAMES {
            let r = rule(name);
            let h = Hierarchy::new(&r);
            for k in 1..=20 {
                assert!(!h.step_matrix(k).unwrap().has_zero_column(), "{name} {k}");
            }
        }
    }
}

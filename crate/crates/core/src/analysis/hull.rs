use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;
use crate::resolve::Hierarchy;
use crate::transition::TransitionMatrix;

/// Volume-normalized columns of `M_{n,N}`: the feasible set for the level-`n`
/// supertile frequencies seen at horizon `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyHull {
    pub level: u64,
    pub horizon: u64,
    /// Level-`n` labels, the coordinates of each vertex.
    pub labels: Vec<String>,
    /// Level-`N` labels, one per vertex.
    pub vertex_labels: Vec<String>,
    #[serde(serialize_with = "json::rationals")]
    pub volumes: Vec<BigRational>,
    #[serde(serialize_with = "json::rational_rows")]
    pub vertices: Vec<Vec<BigRational>>,
    /// Largest volume-weighted L1 distance between two vertices.
    #[serde(serialize_with = "json::rational")]
    pub diameter: BigRational,
    #[serde(serialize_with = "json::rationals")]
    pub centroid: Vec<BigRational>,
    pub diameter_approx: f64,
    pub centroid_approx: Vec<f64>,
    /// Range of each coordinate over the vertices.
    pub intervals: Vec<CoordinateRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateRange {
    pub label: String,
    #[serde(serialize_with = "json::rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "json::rational")]
    pub hi: BigRational,
    pub lo_approx: f64,
    pub hi_approx: f64,
}

impl FrequencyHull {
    fn from_matrix(m: &TransitionMatrix, lower: Vec<BigRational>, upper: &[BigRational]) -> Self {
        let vertices: Vec<Vec<BigRational>> = (0..m.cols())
            .map(|j| {
                let vol = &upper[j];
                (0..m.rows())
                    .map(|i| BigRational::from_integer(BigInt::from(m.get(i, j).clone())) / vol)
                    .collect()
            })
            .collect();
        let mut diameter = BigRational::zero();
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                let d = weighted_l1(&vertices[a], &vertices[b], &lower);
                if d > diameter {
                    diameter = d;
                }
            }
        }
        let count = BigRational::from_integer(BigInt::from(vertices.len()));
        let centroid: Vec<BigRational> = (0..m.rows())
            .map(|i| vertices.iter().map(|v| &v[i]).sum::<BigRational>() / &count)
            .collect();
        let intervals = (0..m.rows())
            .map(|i| {
                let lo = vertices
                    .iter()
                    .map(|v| &v[i])
                    .min()
                    .expect("hull has vertices");
                let hi = vertices
                    .iter()
                    .map(|v| &v[i])
                    .max()
                    .expect("hull has vertices");
                CoordinateRange {
                    label: m.row_labels[i].clone(),
                    lo_approx: json::approx(lo),
                    hi_approx: json::approx(hi),
                    lo: lo.clone(),
                    hi: hi.clone(),
                }
            })
            .collect();
        FrequencyHull {
            level: m.from_level,
            horizon: m.to_level,
            labels: m.row_labels.clone(),
            vertex_labels: m.col_labels.clone(),
            volumes: lower,
            diameter_approx: json::approx(&diameter),
            centroid_approx: centroid.iter().map(json::approx).collect(),
            intervals,
            vertices,
            diameter,
            centroid,
        }
    }

    /// Range of coordinate `i` over the vertices.
    pub fn interval(&self, i: usize) -> (BigRational, BigRational) {
        let r = &self.intervals[i];
        (r.lo.clone(), r.hi.clone())
    }

    /// Volume-weighted L1 distance between vertices `a` and `b`.
    pub fn distance(&self, a: usize, b: usize) -> BigRational {
        weighted_l1(&self.vertices[a], &self.vertices[b], &self.volumes)
    }
}

fn weighted_l1(u: &[BigRational], v: &[BigRational], w: &[BigRational]) -> BigRational {
    u.iter()
        .zip(v)
        .zip(w)
        .map(|((a, b), w)| (a - b).abs() * w)
        .sum()
}

pub fn frequency_hull(h: &Hierarchy<'_>, n: u64, horizon: u64) -> Result<FrequencyHull> {
    if horizon <= n {
        return Err(Error::InvalidRange {
            from: n,
            to: horizon,
        });
    }
    let m = h.transition_matrix(n, horizon)?;
    Ok(FrequencyHull::from_matrix(
        &m,
        h.volumes(n)?.values,
        &h.volumes(horizon)?.values,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErgodicityOptions {
    /// Final diameter below this reads as unique.
    pub tol: BigRational,
    /// Diameters at or above this across the trailing window read as multiple.
    pub floor: BigRational,
    pub window: usize,
}

impl Default for ErgodicityOptions {
    fn default() -> Self {
        ErgodicityOptions {
            tol: BigRational::new(1.into(), 1_000_000.into()),
            floor: BigRational::new(1.into(), 100.into()),
            window: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Unique,
    Multiple,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unique => "unique",
            Verdict::Multiple => "multiple",
            Verdict::Undecided => "undecided",
        }
    }

    pub fn from_diameters(diameters: &[BigRational], opts: &ErgodicityOptions) -> Verdict {
        let Some(last) = diameters.last() else {
            return Verdict::Undecided;
        };
        if *last < opts.tol {
            return Verdict::Unique;
        }
        let window = opts.window.max(1);
        if diameters.len() >= window
            && diameters[diameters.len() - window..]
                .iter()
                .all(|d| *d >= opts.floor)
        {
            return Verdict::Multiple;
        }
        Verdict::Undecided
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub horizon: u64,
    pub label: String,
    #[serde(serialize_with = "json::rationals")]
    pub vertex: Vec<BigRational>,
    pub vertex_approx: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicityReport {
    pub level: u64,
    pub depth: u64,
    pub horizons: Vec<u64>,
    #[serde(serialize_with = "json::rationals")]
    pub diameters: Vec<BigRational>,
    pub diameters_approx: Vec<f64>,
    pub verdict: Verdict,
    /// The pair of vertices realizing the diameter at each horizon, when the
    /// verdict is multiple.
    pub trajectories: Option<[Vec<TrajectoryPoint>; 2]>,
}

/// Hull diameters for horizons `n+1..=depth` and the resulting verdict. A
/// finite-depth diagnostic, not a proof of (non-)unique ergodicity.
pub fn ergodicity_report(
    h: &Hierarchy<'_>,
    n: u64,
    depth: u64,
    opts: &ErgodicityOptions,
) -> Result<ErgodicityReport> {
    if depth <= n {
        return Err(Error::InvalidRange { from: n, to: depth });
    }
    let lower = h.volumes(n)?.values;
    let mut acc = h.transition_matrix(n, n)?;
    let mut hulls = Vec::new();
    for horizon in n + 1..=depth {
        acc = acc.compose(&*h.step_matrix(horizon)?);
        hulls.push(FrequencyHull::from_matrix(
            &acc,
            lower.clone(),
            &h.volumes(horizon)?.values,
        ));
    }
    let diameters: Vec<BigRational> = hulls.iter().map(|x| x.diameter.clone()).collect();
    let verdict = Verdict::from_diameters(&diameters, opts);
    let trajectories = (verdict == Verdict::Multiple).then(|| {
        let mut pair: [Vec<TrajectoryPoint>; 2] = [Vec::new(), Vec::new()];
        for hull in &hulls {
            let (a, b) = extremal_pair(hull);
            for (slot, j) in pair.iter_mut().zip([a, b]) {
                slot.push(TrajectoryPoint {
                    horizon: hull.horizon,
                    label: hull.vertex_labels[j].clone(),
                    vertex_approx: hull.vertices[j].iter().map(json::approx).collect(),
                    vertex: hull.vertices[j].clone(),
                });
            }
        }
        pair
    });
    Ok(ErgodicityReport {
        level: n,
        depth,
        horizons: hulls.iter().map(|x| x.horizon).collect(),
        diameters_approx: diameters.iter().map(json::approx).collect(),
        diameters,
        verdict,
        trajectories,
    })
}

fn extremal_pair(hull: &FrequencyHull) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_d = BigRational::zero();
    for a in 0..hull.vertices.len() {
        for b in a + 1..hull.vertices.len() {
            let d = hull.distance(a, b);
            if d > best_d {
                best_d = d;
                best = (a, b);
            }
        }
    }
    best
}

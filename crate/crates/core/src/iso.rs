//! Degree-count fingerprints `F_B` and exact isomorphism testing for small
//! graphs.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::graph::LabeledGraph;
use crate::params::ModelParams;
use crate::sequence::{DegreeSequence, MultiSequence};

/// A finite union of integer intervals `[lo, hi]`; `hi = None` is unbounded.
/// Intervals are kept sorted, disjoint and non-adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorelSet {
    intervals: Vec<(u32, Option<u32>)>,
}

impl BorelSet {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn whole_line() -> Self {
        Self::at_least(0)
    }

    pub fn at_least(lo: u32) -> Self {
        Self { intervals: vec![(lo, None)] }
    }

    /// `[lo, hi]`; empty when `hi < lo`.
    pub fn interval(lo: u32, hi: u32) -> Self {
        Self::from_intervals(vec![(lo, Some(hi))])
    }

    pub fn from_intervals(mut raw: Vec<(u32, Option<u32>)>) -> Self {
        raw.retain(|&(lo, hi)| hi.is_none_or(|h| h >= lo));
        raw.sort_by_key(|&(lo, _)| lo);
        let mut merged: Vec<(u32, Option<u32>)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            if let Some(last) = merged.last_mut() {
                let touches = last.1.is_none_or(|h| u64::from(lo) <= u64::from(h) + 1);
                if touches {
                    last.1 = match (last.1, hi) {
                        (None, _) | (_, None) => None,
                        (Some(a), Some(b)) => Some(a.max(b)),
                    };
                    continue;
                }
            }
            merged.push((lo, hi));
        }
        Self { intervals: merged }
    }

    pub fn union(&self, other: &BorelSet) -> Self {
        Self::from_intervals(self.intervals.iter().chain(&other.intervals).copied().collect())
    }

    pub fn intervals(&self) -> &[(u32, Option<u32>)] {
        &self.intervals
    }

    pub fn contains(&self, d: u32) -> bool {
        self.intervals.iter().any(|&(lo, hi)| d >= lo && hi.is_none_or(|h| d <= h))
    }

    /// Lower end of a half-line set `[t, ∞)`.
    pub fn threshold(&self) -> Option<u32> {
        match self.intervals.as_slice() {
            [(lo, None)] => Some(*lo),
            _ => None,
        }
    }
}

/// Anything with a vertex degree list.
pub trait Degrees {
    fn degree_list(&self) -> Vec<u32>;
}

impl Degrees for LabeledGraph {
    fn degree_list(&self) -> Vec<u32> {
        self.degrees()
    }
}

impl Degrees for DegreeSequence {
    fn degree_list(&self) -> Vec<u32> {
        self.entries().to_vec()
    }
}

impl Degrees for [u32] {
    fn degree_list(&self) -> Vec<u32> {
        self.to_vec()
    }
}

/// `F_B`: the number of vertices whose degree lies in `set`.
pub fn degree_count<D: Degrees + ?Sized>(src: &D, set: &BorelSet) -> usize {
    src.degree_list().into_iter().filter(|&d| set.contains(d)).count()
}

pub(crate) fn count_in(degrees: &[u32], set: &BorelSet) -> usize {
    degrees.iter().filter(|&&d| set.contains(d)).count()
}

/// Largest vertex count accepted by [`is_isomorphic`].
pub const ISO_MAX_N: usize = 10;

/// Exact isomorphism test by backtracking over colour-respecting maps.
pub fn is_isomorphic(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<bool> {
    let n = g1.n();
    if n > ISO_MAX_N || g2.n() > ISO_MAX_N {
        return Err(Error::Capacity { what: "isomorphism test".into(), limit: ISO_MAX_N as u64 });
    }
    if n != g2.n() || g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    let rows = |g: &LabeledGraph| -> Vec<u16> {
        (0..n).map(|u| (0..n).filter(|&v| g.has_edge(u, v)).fold(0u16, |m, v| m | 1 << v)).collect()
    };
    let (a1, a2) = (rows(g1), rows(g2));
    let Some((c1, c2)) = refine_colours(&a1, &a2) else {
        return Ok(false);
    };

    // Rare colour classes first; then prefer vertices adjacent to those
    // already placed so inconsistencies surface early.
    let class_size = |c: u32| c1.iter().filter(|&&x| x == c).count();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = 0u16;
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| placed >> v & 1 == 0)
            .min_by_key(|&v| (class_size(c1[v]), std::cmp::Reverse((a1[v] & placed).count_ones()), v))
            .expect("unplaced vertex");
        order.push(next);
        placed |= 1 << next;
    }

    let mut map = vec![usize::MAX; n];
    Ok(extend(0, &order, &c1, &c2, &a1, &a2, &mut map, 0))
}

/// Iterated degree refinement run on both graphs with a shared palette.
/// `None` once the colour histograms differ, which rules out isomorphism.
fn refine_colours(a1: &[u16], a2: &[u16]) -> Option<(Vec<u32>, Vec<u32>)> {
    let n = a1.len();
    let mut c1: Vec<u32> = a1.iter().map(|r| r.count_ones()).collect();
    let mut c2: Vec<u32> = a2.iter().map(|r| r.count_ones()).collect();
    let mut classes = 0;
    loop {
        let (mut h1, mut h2) = (c1.clone(), c2.clone());
        h1.sort_unstable();
        h2.sort_unstable();
        if h1 != h2 {
            return None;
        }
        h1.dedup();
        if h1.len() == classes {
            return Some((c1, c2));
        }
        classes = h1.len();
        let signature = |rows: &[u16], c: &[u32], v: usize| {
            let mut nb: Vec<u32> = (0..n).filter(|&w| rows[v] >> w & 1 == 1).map(|w| c[w]).collect();
            nb.sort_unstable();
            (c[v], nb)
        };
        let s1: Vec<_> = (0..n).map(|v| signature(a1, &c1, v)).collect();
        let s2: Vec<_> = (0..n).map(|v| signature(a2, &c2, v)).collect();
        let mut palette: Vec<_> = s1.iter().chain(&s2).cloned().collect();
        palette.sort_unstable();
        palette.dedup();
        let rank = |s: &(u32, Vec<u32>)| palette.binary_search(s).expect("own signature") as u32;
        c1 = s1.iter().map(rank).collect();
        c2 = s2.iter().map(rank).collect();
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(depth: usize, order: &[usize], c1: &[u32], c2: &[u32], a1: &[u16], a2: &[u16], map: &mut [usize], used: u16) -> bool {
    if depth == order.len() {
        return true;
    }
    let u = order[depth];
    for v in 0..c2.len() {
        if used >> v & 1 == 1 || c2[v] != c1[u] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&w| (a1[u] >> w & 1) == (a2[v] >> map[w] & 1));
        if !consistent {
            continue;
        }
        map[u] = v;
        if extend(depth + 1, order, c1, c2, a1, a2, map, used | 1 << v) {
            return true;
        }
    }
    map[u] = usize::MAX;
    false
}

/// Whether `F_B(g1) = F_B(g2)` for every supplied set.
pub fn iso_invariance_check(g1: &LabeledGraph, g2: &LabeledGraph, sets: &[BorelSet]) -> bool {
    let (d1, d2) = (g1.degrees(), g2.degrees());
    sets.iter().all(|b| count_in(&d1, b) == count_in(&d2, b))
}

/// `[⌊n · min_i p_i⌋, ∞)`.
pub fn fingerprint_threshold_set(params: &ModelParams) -> BorelSet {
    let min_p = params.probs().iter().copied().fold(f64::INFINITY, f64::min);
    BorelSet::at_least((params.n() as f64 * min_p).floor() as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionMode {
    /// Some pair of components shares its `F_B` value.
    AnyPair,
    /// All components share one `F_B` value.
    All,
}

pub(crate) fn counts_collide(counts: &[usize], mode: CollisionMode) -> bool {
    match mode {
        CollisionMode::All => counts.windows(2).all(|w| w[0] == w[1]),
        CollisionMode::AnyPair => {
            let mut sorted = counts.to_vec();
            sorted.sort_unstable();
            sorted.windows(2).any(|w| w[0] == w[1])
        }
    }
}

pub fn collision_event(dvec: &MultiSequence, set: &BorelSet, mode: CollisionMode) -> Result<bool> {
    if dvec.k() < 2 {
        return param_err("collision events need at least two graphs");
    }
    let counts: Vec<usize> = dvec.components().iter().map(|d| degree_count(d, set)).collect();
    Ok(counts_collide(&counts, mode))
}

//! Simple undirected labelled graphs stored as an `N`-bit edge set.

use std::fmt::Write as _;

use crate::error::{param_err, Error, Result};
use crate::sequence::DegreeSequence;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LabeledGraph {
    n: usize,
    bits: Vec<u64>,
}

/// Index of the pair `{u, v}` (u < v) in row-major upper-triangle order.
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

impl LabeledGraph {
    pub fn empty(n: usize) -> Self {
        let pairs = n * n.saturating_sub(1) / 2;
        Self { n, bits: vec![0; pairs.div_ceil(64)] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            let v = (u + 1) % n;
            if u != v && !g.has_edge(u, v) {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 1..n {
            g.add_edge(u - 1, u);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u == v {
                return param_err(format!("self-loop at vertex {u}"));
            }
            if u >= n || v >= n {
                return param_err(format!("edge ({u}, {v}) outside {n} vertices"));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Graph whose edge set is the low `N` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut g = Self::empty(n);
        if let Some(w) = g.bits.first_mut() {
            *w = mask;
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    fn slot(&self, u: usize, v: usize) -> usize {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        pair_index(self.n, a, b)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        let s = self.slot(u, v);
        self.bits[s / 64] |= 1 << (s % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let s = self.slot(u, v);
        self.bits[s / 64] >> (s % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| self.has_edge(u, v))
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for (u, v) in self.edges() {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::new(self.degrees()).expect("graph degrees lie in [0, n-1]")
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return param_err("permutation length differs from vertex count");
        }
        let mut seen = vec![false; self.n];
        for &x in perm {
            if x >= self.n || std::mem::replace(&mut seen[x], true) {
                return param_err("not a permutation");
            }
        }
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        Ok(g)
    }

    /// Vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &LabeledGraph) -> Self {
        let mut g = Self::empty(self.n + other.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + self.n, v + self.n);
        }
        g
    }

    /// One `u v` line per edge, 0-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the edge-list format. Without `n`, the vertex count is one past
    /// the largest label. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::Parse(format!("line {}: expected \"u v\", got {raw:?}", lineno + 1))),
            }
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = n.unwrap_or(inferred);
        Self::from_edges(n, &edges)
    }
}

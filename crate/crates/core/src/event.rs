//! Events over degree sequences and their degree-sum profiles.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{param_err, Error, Result};
use crate::numerics::{ln_choose, ln_even_mass, pairwise_sum};
use crate::sequence::{decode_into, degree_sum, for_each_sequence, sequence_space_size, DegreeSequence, MultiSequence};

type Predicate = Arc<dyn Fn(&[u32]) -> bool + Send + Sync>;

/// A set of degree sequences: a membership predicate, plus the explicit point
/// list when the event was built from one.
#[derive(Clone)]
pub struct SequenceEvent {
    predicate: Predicate,
    points: Option<Vec<DegreeSequence>>,
}

impl SequenceEvent {
    pub fn from_predicate(f: impl Fn(&[u32]) -> bool + Send + Sync + 'static) -> Self {
        Self { predicate: Arc::new(f), points: None }
    }

    pub fn from_points(mut points: Vec<DegreeSequence>) -> Self {
        points.sort();
        points.dedup();
        let set: HashSet<Vec<u32>> = points.iter().map(|d| d.entries().to_vec()).collect();
        Self { predicate: Arc::new(move |e| set.contains(e)), points: Some(points) }
    }

    pub fn empty() -> Self {
        Self::from_points(Vec::new())
    }

    /// All of `E_n`.
    pub fn even_sums() -> Self {
        Self::from_predicate(|e| degree_sum(e) % 2 == 0)
    }

    /// `{d : M(d) = m}`.
    pub fn sum_equals(m: u64) -> Self {
        Self::from_predicate(move |e| degree_sum(e) == m)
    }

    pub fn contains(&self, entries: &[u32]) -> bool {
        (self.predicate)(entries)
    }

    pub fn points(&self) -> Option<&[DegreeSequence]> {
        self.points.as_deref()
    }

    /// The explicit members of the event in `{0..n-1}^n`.
    pub fn members(&self, n: usize) -> Result<Vec<DegreeSequence>> {
        if let Some(points) = &self.points {
            if let Some(bad) = points.iter().find(|d| d.len() != n) {
                return param_err(format!("event point {bad:?} has length {}, expected {n}", bad.len()));
            }
            return Ok(points.clone());
        }
        let mut out = Vec::new();
        for_each_sequence(n, |_, e| {
            if self.contains(e) {
                out.push(DegreeSequence::new(e.to_vec()).expect("enumerated sequence is valid"));
            }
        })?;
        Ok(out)
    }
}

impl fmt::Debug for SequenceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.points {
            Some(p) => write!(f, "SequenceEvent({} points)", p.len()),
            None => write!(f, "SequenceEvent(predicate)"),
        }
    }
}

/// Degree-sum profile of an event over k-tuples.
///
/// For a point `d`, `P_B(d) = w(d) p^M (1-p)^{n(n-1)-M}` with
/// `w(d) = Π_j C(n-1, d_j)`, so an event's B-probability at any `p` depends
/// only on the total weight of its members in each level set. The profile
/// stores those totals, indexed by the vector of degree sums.
#[derive(Clone, Debug, PartialEq)]
pub struct SumProfile {
    n: usize,
    k: usize,
    stride: usize,
    weights: Vec<f64>,
}

/// Largest product space `({0..n-1}^n)^k` a predicate may be enumerated over.
pub const MAX_PRODUCT_SPACE: u64 = 100_000_000;

impl SumProfile {
    fn zeroed(n: usize, k: usize) -> Result<Self> {
        const MAX_CELLS: usize = 10_000_000;
        let stride = n * (n - 1) + 1;
        let cells = stride.checked_pow(k as u32).filter(|&c| c <= MAX_CELLS).ok_or(Error::Capacity {
            what: format!("sum profile for k = {k} at n = {n}"),
            limit: MAX_CELLS as u64,
        })?;
        Ok(Self { n, k, stride, weights: vec![0.0; cells] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn index(&self, sums: &[u64]) -> usize {
        sums.iter().fold(0, |acc, &m| acc * self.stride + m as usize)
    }

    /// `w(d)` as an exact-as-possible float.
    pub fn sequence_weight(entries: &[u32]) -> f64 {
        let top = entries.len() as u64 - 1;
        entries.iter().map(|&d| ln_choose(top, u64::from(d))).sum::<f64>().exp().round()
    }

    pub fn from_event(n: usize, event: &SequenceEvent) -> Result<Self> {
        let mut profile = Self::zeroed(n, 1)?;
        let mut add = |e: &[u32]| {
            profile.weights[degree_sum(e) as usize] += Self::sequence_weight(e);
        };
        match event.points() {
            Some(points) => {
                for d in points {
                    d.check_len(n)?;
                    add(d.entries());
                }
            }
            None => for_each_sequence(n, |_, e| {
                if event.contains(e) {
                    add(e);
                }
            })?,
        }
        Ok(profile)
    }

    pub fn from_multi_points(n: usize, k: usize, points: &[MultiSequence]) -> Result<Self> {
        let mut profile = Self::zeroed(n, k)?;
        let mut seen = HashSet::new();
        for dvec in points {
            if dvec.k() != k || dvec.n() != n {
                return param_err("multi-sequence shape does not match the profile");
            }
            if !seen.insert(dvec.clone()) {
                continue;
            }
            let sums: Vec<u64> = dvec.components().iter().map(DegreeSequence::degree_sum).collect();
            let w: f64 = dvec.components().iter().map(|d| Self::sequence_weight(d.entries())).product();
            let idx = profile.index(&sums);
            profile.weights[idx] += w;
        }
        Ok(profile)
    }

    /// Enumerates `({0..n-1}^n)^k` against a predicate on the k components.
    pub fn from_multi_predicate(n: usize, k: usize, pred: impl Fn(&[&[u32]]) -> bool) -> Result<Self> {
        let single = sequence_space_size(n)?;
        let total = single.checked_pow(k as u32).filter(|&t| t <= MAX_PRODUCT_SPACE).ok_or(Error::Capacity {
            what: format!("enumerating k = {k} products at n = {n}"),
            limit: MAX_PRODUCT_SPACE,
        })?;
        let mut profile = Self::zeroed(n, k)?;
        let mut bufs = vec![vec![0u32; n]; k];
        let singles: Vec<(u64, f64)> = (0..single)
            .map(|c| {
                decode_into(c, &mut bufs[0]);
                (degree_sum(&bufs[0]), Self::sequence_weight(&bufs[0]))
            })
            .collect();
        let mut sums = vec![0u64; k];
        for code in 0..total {
            let mut rest = code;
            let mut w = 1.0;
            for i in (0..k).rev() {
                let c = rest % single;
                rest /= single;
                decode_into(c, &mut bufs[i]);
                sums[i] = singles[c as usize].0;
                w *= singles[c as usize].1;
            }
            let views: Vec<&[u32]> = bufs.iter().map(Vec::as_slice).collect();
            if pred(&views) {
                let idx = profile.index(&sums);
                profile.weights[idx] += w;
            }
        }
        Ok(profile)
    }

    /// Profile of the Cartesian product of single-graph events.
    pub fn product(factors: &[SumProfile]) -> Result<Self> {
        let Some(first) = factors.first() else {
            return param_err("empty product");
        };
        if factors.iter().any(|f| f.k != 1 || f.n != first.n) {
            return param_err("product factors must be single-graph profiles of equal n");
        }
        let mut out = Self::zeroed(first.n, factors.len())?;
        for (idx, slot) in out.weights.iter_mut().enumerate() {
            let mut rest = idx;
            let mut w = 1.0;
            for f in factors.iter().rev() {
                w *= f.weights[rest % out.stride];
                rest /= out.stride;
            }
            *slot = w;
        }
        Ok(out)
    }

    /// Nonzero `(sums, weight)` entries in index order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u64>, f64)> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w != 0.0).map(move |(idx, &w)| {
            let mut sums = vec![0u64; self.k];
            let mut rest = idx;
            for s in sums.iter_mut().rev() {
                *s = (rest % self.stride) as u64;
                rest /= self.stride;
            }
            (sums, w)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0)
    }

    /// `P_B(A)` with edge probabilities `x`.
    pub fn binomial_prob(&self, x: &[f64]) -> f64 {
        self.eval(x, false)
    }

    /// `P_E(A)` with edge probabilities `x`: only even-sum members count,
    /// normalised by `Π_i P_B(E_n)`.
    pub fn even_sum_prob(&self, x: &[f64]) -> f64 {
        self.eval(x, true)
    }

    fn eval(&self, x: &[f64], even_only: bool) -> f64 {
        assert_eq!(x.len(), self.k, "one edge probability per graph");
        let top = (self.stride - 1) as u64;
        let terms: Vec<f64> = self
            .entries()
            .filter(|(sums, _)| !even_only || sums.iter().all(|m| m % 2 == 0))
            .map(|(sums, w)| {
                let ln: f64 = sums.iter().zip(x).map(|(&m, &xi)| ln_sum_kernel(m, top, xi)).sum();
                w * ln.exp()
            })
            .collect();
        let mass = pairwise_sum(&terms);
        if !even_only {
            return mass;
        }
        let pairs = top / 2;
        let ln_norm: f64 = x.iter().map(|&xi| ln_even_mass(xi, pairs)).sum();
        mass * (-ln_norm).exp()
    }
}

/// `ln(x^m (1-x)^{top-m})` with the `0^0 = 1` convention.
pub(crate) fn ln_sum_kernel(m: u64, top: u64, x: f64) -> f64 {
    let a = if m == 0 { 0.0 } else { m as f64 * x.ln() };
    let b = if m == top { 0.0 } else { (top - m) as f64 * (-x).ln_1p() };
    a + b
}

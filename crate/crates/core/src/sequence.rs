//! Degree sequences, k-tuples of them, and dense enumeration of `{0..n-1}^n`.

use std::fmt;

use serde::Serialize;

use crate::error::{param_err, Error, Result};

/// A point of `{0, ..., n-1}^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DegreeSequence(Vec<u32>);

impl DegreeSequence {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return param_err("empty degree sequence");
        }
        if let Some(&bad) = entries.iter().find(|&&d| d as usize >= n) {
            return param_err(format!("degree {bad} outside [0, {}]", n - 1));
        }
        Ok(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree_sum(&self) -> u64 {
        degree_sum(&self.0)
    }

    pub fn is_even_sum(&self) -> bool {
        self.degree_sum() % 2 == 0
    }

    /// Position in the lexicographic enumeration of `{0..n-1}^n`.
    pub fn code(&self) -> u64 {
        let n = self.0.len() as u64;
        self.0.iter().fold(0, |acc, &d| acc * n + u64::from(d))
    }

    pub fn from_code(code: u64, n: usize) -> Self {
        let mut entries = vec![0; n];
        decode_into(code, &mut entries);
        Self(entries)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return param_err(format!("sequence has length {}, expected {n}", self.0.len()));
        }
        Ok(())
    }
}

impl fmt::Debug for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, d) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<u32>> for DegreeSequence {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::new(v)
    }
}

/// A k-tuple of degree sequences of equal length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MultiSequence(Vec<DegreeSequence>);

impl MultiSequence {
    pub fn new(sequences: Vec<DegreeSequence>) -> Result<Self> {
        let Some(first) = sequences.first() else {
            return param_err("empty multi-sequence");
        };
        let n = first.len();
        if sequences.iter().any(|d| d.len() != n) {
            return param_err("component sequences differ in length");
        }
        Ok(Self(sequences))
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn n(&self) -> usize {
        self.0[0].len()
    }

    pub fn components(&self) -> &[DegreeSequence] {
        &self.0
    }

    pub fn all_even(&self) -> bool {
        self.0.iter().all(DegreeSequence::is_even_sum)
    }
}

/// Which centring the second-moment statistic uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Gamma2Variant {
    /// `(n-1)^-2 Σ (d_j - M)^2`, subtracting the full degree sum.
    #[default]
    AsPrinted,
    /// `(n-1)^-2 Σ (d_j - M/n)^2`, subtracting the mean degree.
    MeanCentered,
}

/// Summary statistics of one degree sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SequenceStats {
    pub degree_sum: u64,
    /// `M / 2N`.
    pub lambda: f64,
    pub gamma2: f64,
    pub even_sum: bool,
}

impl SequenceStats {
    pub fn compute(d: &DegreeSequence, variant: Gamma2Variant) -> Self {
        let n = d.len() as f64;
        let m = d.degree_sum();
        let pairs = n * (n - 1.0) / 2.0;
        let centre = match variant {
            Gamma2Variant::AsPrinted => m as f64,
            Gamma2Variant::MeanCentered => m as f64 / n,
        };
        let ss: f64 = d.entries().iter().map(|&x| (f64::from(x) - centre).powi(2)).sum();
        Self {
            degree_sum: m,
            lambda: m as f64 / (2.0 * pairs),
            gamma2: ss / (n - 1.0).powi(2),
            even_sum: m % 2 == 0,
        }
    }
}

pub(crate) fn degree_sum(entries: &[u32]) -> u64 {
    entries.iter().map(|&d| u64::from(d)).sum()
}

/// Writes the digits of `code` in base `entries.len()` into `entries`.
pub(crate) fn decode_into(mut code: u64, entries: &mut [u32]) {
    let n = entries.len() as u64;
    for slot in entries.iter_mut().rev() {
        *slot = (code % n) as u32;
        code /= n;
    }
}

/// Advances `entries` to the lexicographic successor; returns false on wrap.
pub(crate) fn increment(entries: &mut [u32]) -> bool {
    let top = entries.len() as u32 - 1;
    for slot in entries.iter_mut().rev() {
        if *slot < top {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// Largest `{0..n-1}^n` we are willing to walk exhaustively.
pub const MAX_SEQUENCE_SPACE: u64 = 10_000_000;

/// `n^n`, or a capacity error beyond [`MAX_SEQUENCE_SPACE`].
pub fn sequence_space_size(n: usize) -> Result<u64> {
    let size = (n as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if size > MAX_SEQUENCE_SPACE {
        return Err(Error::Capacity {
            what: format!("enumerating {{0..{}}}^{n}", n - 1),
            limit: MAX_SEQUENCE_SPACE,
        });
    }
    Ok(size)
}

/// Calls `f(code, entries)` for every point of `{0..n-1}^n` in lexicographic
/// order.
pub fn for_each_sequence(n: usize, mut f: impl FnMut(u64, &[u32])) -> Result<()> {
    let size = sequence_space_size(n)?;
    let mut entries = vec![0u32; n];
    for code in 0..size {
        f(code, &entries);
        increment(&mut entries);
    }
    Ok(())
}

/// Every point of `{0..n-1}^n` as an owned sequence.
pub fn all_sequences(n: usize) -> Result<Vec<DegreeSequence>> {
    let mut out = Vec::with_capacity(sequence_space_size(n)? as usize);
    for_each_sequence(n, |_, e| out.push(DegreeSequence(e.to_vec())))?;
    Ok(out)
}

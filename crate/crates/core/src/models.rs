//! The binomial (B), even-sum (E) and weighted even-sum (E′) measures on
//! degree sequences, their k-fold products, and the closed-form identities
//! connecting them.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::numerics::{ln_binom_pmf, ln_even_mass, LogProb};
use crate::params::ModelParams;
use crate::sequence::{degree_sum, for_each_sequence, DegreeSequence, Gamma2Variant, MultiSequence, SequenceStats};

/// The five degree-sequence models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    /// Independent `Bin(n-1, p)` entries.
    B,
    /// B conditioned on an even degree sum.
    E,
    /// E reweighted on each level set so that `M/2 ~ Bin(N, p)`.
    #[serde(rename = "Eprime", alias = "E'")]
    EPrime,
    /// E with a truncated-normal random edge probability.
    I,
    /// The degree sequence of `G(n, p)`.
    D,
}

impl Model {
    pub const ALL: [Model; 5] = [Model::B, Model::E, Model::EPrime, Model::I, Model::D];

    pub fn tag(self) -> &'static str {
        match self {
            Model::B => "B",
            Model::E => "E",
            Model::EPrime => "Eprime",
            Model::I => "I",
            Model::D => "D",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" => Ok(Model::B),
            "E" => Ok(Model::E),
            "Eprime" | "E'" | "EPrime" => Ok(Model::EPrime),
            "I" => Ok(Model::I),
            "D" => Ok(Model::D),
            other => Err(Error::Parameter(format!("unknown model tag {other:?} (expected B, E, Eprime, I or D)"))),
        }
    }
}

/// Precomputed single-graph quantities for one edge probability.
#[derive(Clone, Debug)]
pub struct GraphModel {
    n: usize,
    p: f64,
    pairs: u64,
    ln_entry: Vec<f64>,
    ln_even: f64,
}

impl GraphModel {
    pub fn new(params: &ModelParams, i: usize) -> Result<Self> {
        params.check_graph(i)?;
        let n = params.n();
        let p = params.p(i);
        let ln_entry = (0..n as u64).map(|d| ln_binom_pmf(d, n as u64 - 1, p)).collect();
        Ok(Self { n, p, pairs: params.pairs(), ln_entry, ln_even: ln_even_mass(p, params.pairs()) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    /// `ln P_B(E_n) = ln((1 + (q-p)^{2N}) / 2)`.
    pub fn ln_even_mass(&self) -> f64 {
        self.ln_even
    }

    pub(crate) fn ln_binomial_entries(&self, entries: &[u32]) -> f64 {
        entries.iter().map(|&d| self.ln_entry[d as usize]).sum()
    }

    pub(crate) fn ln_even_entries(&self, entries: &[u32]) -> f64 {
        if degree_sum(entries) % 2 == 1 {
            return f64::NEG_INFINITY;
        }
        self.ln_binomial_entries(entries) - self.ln_even
    }

    pub(crate) fn ln_weighted_entries(&self, entries: &[u32]) -> f64 {
        let m = degree_sum(entries);
        if m % 2 == 1 {
            return f64::NEG_INFINITY;
        }
        let level = self.even_level_mass(m);
        assert!(!level.is_zero(), "P_E(S_{m}) vanished for p in (0,1)");
        self.ln_even_entries(entries) + self.half_sum_mass(m).ln() - level.ln()
    }

    pub fn binomial(&self, d: &DegreeSequence) -> Result<LogProb> {
        d.check_len(self.n)?;
        Ok(LogProb::from_ln(self.ln_binomial_entries(d.entries())))
    }

    pub fn even_sum(&self, d: &DegreeSequence) -> Result<LogProb> {
        d.check_len(self.n)?;
        Ok(LogProb::from_ln(self.ln_even_entries(d.entries())))
    }

    pub fn weighted_even_sum(&self, d: &DegreeSequence) -> Result<LogProb> {
        d.check_len(self.n)?;
        Ok(LogProb::from_ln(self.ln_weighted_entries(d.entries())))
    }

    /// `P_B(M = m) = b(m; n(n-1), p)`.
    pub fn sum_mass(&self, m: u64) -> LogProb {
        LogProb::from_ln(ln_binom_pmf(m, 2 * self.pairs, self.p))
    }

    /// `P_E(S_m)`: zero for odd `m`.
    pub fn even_level_mass(&self, m: u64) -> LogProb {
        if m % 2 == 1 {
            return LogProb::ZERO;
        }
        LogProb::from_ln(self.sum_mass(m).ln() - self.ln_even)
    }

    /// `b(m/2; N, p)`, the target mass of `S_m` under E′; zero for odd `m`.
    pub fn half_sum_mass(&self, m: u64) -> LogProb {
        if m % 2 == 1 {
            return LogProb::ZERO;
        }
        LogProb::from_ln(ln_binom_pmf(m / 2, self.pairs, self.p))
    }
}

/// `Σ_j ln b(d_j; n-1, p_i)`.
pub fn binomial_seq_prob(params: &ModelParams, i: usize, d: &DegreeSequence) -> Result<LogProb> {
    GraphModel::new(params, i)?.binomial(d)
}

/// B restricted to even sums: `2 P_B(d) / (1 + (q-p)^{2N})` on `E_n`, zero
/// off it.
pub fn even_sum_prob(params: &ModelParams, i: usize, d: &DegreeSequence) -> Result<LogProb> {
    GraphModel::new(params, i)?.even_sum(d)
}

/// `P_E(d) · b(M/2; N, p) / P_E(S_M)`.
pub fn weighted_even_sum_prob(params: &ModelParams, i: usize, d: &DegreeSequence) -> Result<LogProb> {
    GraphModel::new(params, i)?.weighted_even_sum(d)
}

/// Distribution of the degree sum under B and under E.
#[derive(Clone, Debug)]
pub struct SumDistribution {
    /// `b(m; n(n-1), p)` for `m = 0..=n(n-1)`.
    pub binomial: Vec<LogProb>,
    /// `P_E(S_m)`, zero at odd `m`.
    pub even: Vec<LogProb>,
}

pub fn compute_sum_distribution(params: &ModelParams, i: usize) -> Result<SumDistribution> {
    let gm = GraphModel::new(params, i)?;
    let top = params.max_degree_sum();
    Ok(SumDistribution {
        binomial: (0..=top).map(|m| gm.sum_mass(m)).collect(),
        even: (0..=top).map(|m| gm.even_level_mass(m)).collect(),
    })
}

/// Joint probability of `dvec` under the k-fold product of B, E or E′.
pub fn product_prob(model: Model, params: &ModelParams, dvec: &MultiSequence) -> Result<LogProb> {
    if dvec.k() != params.k() {
        return param_err(format!("multi-sequence has {} components, params have {}", dvec.k(), params.k()));
    }
    let mut ln = 0.0;
    for (i, d) in dvec.components().iter().enumerate() {
        let gm = GraphModel::new(params, i)?;
        let term = match model {
            Model::B => gm.binomial(d)?,
            Model::E => gm.even_sum(d)?,
            Model::EPrime => gm.weighted_even_sum(d)?,
            Model::I | Model::D => {
                return param_err(format!(
                    "product_prob covers B, E and Eprime; model {model} needs the integrated or exact oracle"
                ))
            }
        };
        if term.is_zero() {
            return Ok(LogProb::ZERO);
        }
        ln += term.ln();
    }
    Ok(LogProb::from_ln(ln))
}

/// Largest `n` for which the identity check enumerates `E_n` to obtain the
/// restriction normaliser.
pub const IDENTITY_MAX_N: usize = 6;

/// Both sides of the k-graph even-sum restriction identity over the explicit
/// event `event`.
///
/// The left side is the restriction computed from scratch: `P_B(A ∩ E^k)`
/// divided by `Π_i P_B(E_n)`, with each `P_B(E_n)` summed by enumeration. The
/// right side is the closed form `2^k P_B(A) / Π_i (1 + (q_i - p_i)^{2N})`
/// over the even-sum members of `A`.
pub fn multi_even_sum_identity(params: &ModelParams, event: &[MultiSequence]) -> Result<(LogProb, LogProb)> {
    let n = params.n();
    if n > IDENTITY_MAX_N {
        return Err(Error::Capacity { what: format!("identity check at n = {n}"), limit: IDENTITY_MAX_N as u64 });
    }
    let models = (0..params.k()).map(|i| GraphModel::new(params, i)).collect::<Result<Vec<_>>>()?;
    let mut ln_even_enum = Vec::with_capacity(models.len());
    for gm in &models {
        let mut terms = Vec::new();
        for_each_sequence(n, |_, e| {
            if degree_sum(e) % 2 == 0 {
                terms.push(LogProb::from_ln(gm.ln_binomial_entries(e)));
            }
        })?;
        ln_even_enum.push(LogProb::sum(&terms).ln());
    }

    let mut joint_b = Vec::with_capacity(event.len());
    for dvec in event.iter().filter(|d| d.all_even()) {
        joint_b.push(product_prob(Model::B, params, dvec)?);
    }
    let mass = LogProb::sum(&joint_b);
    if mass.is_zero() {
        return Ok((LogProb::ZERO, LogProb::ZERO));
    }
    let lhs = mass.ln() - ln_even_enum.iter().sum::<f64>();
    let k = params.k() as f64;
    let rhs = k * LN_2 + mass.ln()
        - models.iter().map(|gm| gm.ln_even_mass() + LN_2).sum::<f64>();
    Ok((LogProb::from_ln(lhs), LogProb::from_ln(rhs)))
}

/// Leading-order ratio `P_D(d⃗) / P_E′(d⃗)`:
/// `exp{(k - Σ_i γ2_i² / (λ_i² (1-λ_i)²)) / 4}`.
pub fn dp_ratio_formula(params: &ModelParams, dvec: &MultiSequence, variant: Gamma2Variant) -> Result<f64> {
    if dvec.k() != params.k() {
        return param_err("component count mismatch");
    }
    let mut acc = 0.0;
    for d in dvec.components() {
        d.check_len(params.n())?;
        let s = SequenceStats::compute(d, variant);
        if !s.even_sum {
            return param_err("ratio formula needs even-sum components");
        }
        if s.lambda == 0.0 || s.lambda == 1.0 {
            return Err(Error::Degenerate(format!("lambda = {} makes the ratio formula singular", s.lambda)));
        }
        acc += s.gamma2.powi(2) / (s.lambda * (1.0 - s.lambda)).powi(2);
    }
    Ok((0.25 * (dvec.k() as f64 - acc)).exp())
}

/// Finite-n proxies for one edge probability.
#[derive(Clone, Debug, Serialize)]
pub struct RegimeProxies {
    pub graph: usize,
    pub p: f64,
    /// `p q n² / ln n`; should be large.
    pub pq_n2_over_log_n: f64,
    /// `p q √n`; should be small.
    pub pq_sqrt_n: f64,
    /// `p n / ln n`; should be large.
    pub p_n_over_log_n: f64,
    /// `p √n`; should be small.
    pub p_sqrt_n: f64,
    pub warnings: Vec<String>,
}

/// Advisory report on whether `p(n)` plausibly sits in the regime where the
/// approximation chain and the decay transfer are proved. Asymptotic
/// conditions cannot be decided at a single `n`; each proxy is compared
/// against 1.
#[derive(Clone, Debug, Serialize)]
pub struct AcceptabilityReport {
    pub n: usize,
    pub graphs: Vec<RegimeProxies>,
}

impl AcceptabilityReport {
    pub fn plausible(&self) -> bool {
        self.graphs.iter().all(|g| g.warnings.is_empty())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &str> {
        self.graphs.iter().flat_map(|g| g.warnings.iter().map(String::as_str))
    }
}

pub fn acceptability_check(params: &ModelParams) -> AcceptabilityReport {
    let n = params.n() as f64;
    let ln_n = n.ln();
    let graphs = (0..params.k())
        .map(|i| {
            let (p, q) = (params.p(i), params.q(i));
            let proxies = RegimeProxies {
                graph: i,
                p,
                pq_n2_over_log_n: p * q * n * n / ln_n,
                pq_sqrt_n: p * q * n.sqrt(),
                p_n_over_log_n: p * n / ln_n,
                p_sqrt_n: p * n.sqrt(),
                warnings: Vec::new(),
            };
            let mut w = Vec::new();
            let tag = format!("n={} graph {i} p={p}", params.n());
            if proxies.pq_n2_over_log_n < 1.0 {
                w.push(format!("{tag}: pq·n²/ln n = {:.4} is small; below the acceptable range", proxies.pq_n2_over_log_n));
            }
            if proxies.pq_sqrt_n > 1.0 {
                w.push(format!("{tag}: pq·√n = {:.4} is large; above the acceptable range", proxies.pq_sqrt_n));
            }
            if proxies.p_n_over_log_n < 1.0 {
                w.push(format!("{tag}: p·n/ln n = {:.4} is small; below the decay-transfer range", proxies.p_n_over_log_n));
            }
            if proxies.p_sqrt_n > 1.0 {
                w.push(format!("{tag}: p·√n = {:.4} is large; above the decay-transfer range", proxies.p_sqrt_n));
            }
            RegimeProxies { warnings: w, ..proxies }
        })
        .collect();
    AcceptabilityReport { n: params.n(), graphs }
}

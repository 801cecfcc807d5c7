//! Seeded draws from each model at sizes far beyond enumeration.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Hypergeometric, Normal};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::integrated::{mixing_sigma, truncated_normal_v};
use crate::models::Model;
use crate::params::ModelParams;
use crate::sequence::{DegreeSequence, MultiSequence};

/// Below this edge probability `G(n, p)` is drawn by skipping geometrically
/// over pair slots instead of flipping one coin per pair.
pub const SKIP_THRESHOLD: f64 = 0.1;

/// Smallest truncated-normal acceptance rate the mixed sampler tolerates.
pub const MIN_MIXING_ACCEPTANCE: f64 = 1e-6;

/// Adjacency storage cap for sampled graphs, in pair slots (1 GiB of bits).
pub const MAX_GRAPH_PAIRS: u64 = 1 << 33;

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub seed: u64,
    pub model: Model,
    pub params: ModelParams,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes any number of 64-bit words into one.
pub fn hash_words(words: &[u64]) -> u64 {
    words.iter().fold(0x243f_6a88_85a3_08d3, |h, &w| splitmix(h ^ splitmix(w)))
}

/// The independent generator for one graph of one replicate.
pub fn substream(seed: u64, graph: usize, replicate: u64) -> ChaCha8Rng {
    let a = hash_words(&[seed, graph as u64, replicate]);
    let mut key = [0u8; 32];
    for (j, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&splitmix(a.wrapping_add(j as u64)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Draws `n` entries of `n - 1` trials each conditioned on their total being
/// `m`, one entry at a time. Given the suffix total, each entry is
/// hypergeometric, so the draw does not depend on `p`.
pub fn conditioned_on_sum<R: Rng + ?Sized>(n: usize, m: u64, rng: &mut R) -> DegreeSequence {
    let trials = (n - 1) as u64;
    assert!(m <= n as u64 * trials, "degree sum {m} infeasible for n = {n}");
    let mut left = m;
    let mut entries = Vec::with_capacity(n);
    for j in 0..n {
        let rest = (n - j) as u64;
        let a = if rest == 1 || left == 0 {
            left
        } else {
            Hypergeometric::new(rest * trials, trials, left).expect("valid hypergeometric").sample(rng)
        };
        assert!(a <= trials && left - a <= (rest - 1) * trials, "infeasible conditional draw");
        entries.push(a as u32);
        left -= a;
    }
    DegreeSequence::new(entries).expect("entries below n")
}

/// Precomputed distributions for one graph.
#[derive(Clone, Debug)]
pub struct GraphSampler {
    n: usize,
    p: f64,
    pairs: u64,
    entry: Binomial,
    edges: Binomial,
    mixing: Normal<f64>,
    coin: Bernoulli,
    /// `ln(1 - p)` when skipping.
    skip: Option<f64>,
}

impl GraphSampler {
    pub fn new(params: &ModelParams, i: usize) -> Result<Self> {
        params.check_graph(i)?;
        let (n, p, pairs) = (params.n(), params.p(i), params.pairs());
        let bad = |e: &dyn std::fmt::Display| Error::Parameter(e.to_string());
        Ok(Self {
            n,
            p,
            pairs,
            entry: Binomial::new(n as u64 - 1, p).map_err(|e| bad(&e))?,
            edges: Binomial::new(pairs, p).map_err(|e| bad(&e))?,
            mixing: Normal::new(p, mixing_sigma(params, i)).map_err(|e| bad(&e))?,
            coin: Bernoulli::new(p).map_err(|e| bad(&e))?,
            skip: (p < SKIP_THRESHOLD).then(|| (-p).ln_1p()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn binomial<R: Rng + ?Sized>(&self, rng: &mut R) -> DegreeSequence {
        let entries = (0..self.n).map(|_| self.entry.sample(rng) as u32).collect();
        DegreeSequence::new(entries).expect("binomial entries below n")
    }

    /// Rejection from the binomial model; also returns the number of attempts.
    pub fn even_counted<R: Rng + ?Sized>(&self, rng: &mut R) -> (DegreeSequence, u64) {
        even_with(&self.entry, self.n, rng)
    }

    pub fn even<R: Rng + ?Sized>(&self, rng: &mut R) -> DegreeSequence {
        self.even_counted(rng).0
    }

    pub fn weighted_even<R: Rng + ?Sized>(&self, rng: &mut R) -> DegreeSequence {
        let m = 2 * self.edges.sample(rng);
        conditioned_on_sum(self.n, m, rng)
    }

    /// `p'` from the normal truncated to `[0, 1]`, by rejection.
    pub fn mixing_parameter<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x = self.mixing.sample(rng);
            if (0.0..=1.0).contains(&x) {
                return x;
            }
        }
    }

    pub fn integrated<R: Rng + ?Sized>(&self, rng: &mut R) -> DegreeSequence {
        let x = self.mixing_parameter(rng);
        let entry = Binomial::new(self.n as u64 - 1, x).expect("mixing parameter in [0, 1]");
        even_with(&entry, self.n, rng).0
    }

    /// Visits the edges of one `G(n, p)` draw as `(u, v)` pairs.
    fn for_each_edge<R: Rng + ?Sized>(&self, rng: &mut R, mut f: impl FnMut(usize, usize)) {
        let n = self.n;
        match self.skip {
            Some(ln_q) => {
                // Row u holds pairs (u, u+1..n); walk rows forward as the index grows.
                let (mut u, mut row_start, mut row_len) = (0usize, 0u64, n as u64 - 1);
                let mut idx = 0u64;
                loop {
                    // Failures before the next edge, Geom(p), by inversion.
                    let x: f64 = rng.random();
                    let gap = ((-x).ln_1p() / ln_q).floor();
                    idx = idx.saturating_add(if gap < u64::MAX as f64 { gap as u64 } else { u64::MAX });
                    if idx >= self.pairs {
                        break;
                    }
                    while idx >= row_start + row_len {
                        row_start += row_len;
                        u += 1;
                        row_len -= 1;
                    }
                    f(u, u + 1 + (idx - row_start) as usize);
                    idx += 1;
                }
            }
            None => {
                for u in 0..n {
                    for v in u + 1..n {
                        if self.coin.sample(rng) {
                            f(u, v);
                        }
                    }
                }
            }
        }
    }

    pub fn graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LabeledGraph> {
        if self.pairs > MAX_GRAPH_PAIRS {
            return Err(Error::Capacity { what: format!("adjacency storage for n = {}", self.n), limit: MAX_GRAPH_PAIRS });
        }
        let mut g = LabeledGraph::empty(self.n);
        self.for_each_edge(rng, |u, v| g.add_edge(u, v));
        Ok(g)
    }

    /// The degree sequence of a `G(n, p)` draw without storing the graph.
    /// Consumes the generator exactly as [`GraphSampler::graph`] does.
    pub fn graph_degrees<R: Rng + ?Sized>(&self, rng: &mut R) -> DegreeSequence {
        let mut deg = vec![0u32; self.n];
        self.for_each_edge(rng, |u, v| {
            deg[u] += 1;
            deg[v] += 1;
        });
        DegreeSequence::new(deg).expect("degrees below n")
    }

    pub fn sample<R: Rng + ?Sized>(&self, model: Model, rng: &mut R) -> DegreeSequence {
        match model {
            Model::B => self.binomial(rng),
            Model::E => self.even(rng),
            Model::EPrime => self.weighted_even(rng),
            Model::I => self.integrated(rng),
            Model::D => self.graph_degrees(rng),
        }
    }
}

fn even_with<R: Rng + ?Sized>(entry: &Binomial, n: usize, rng: &mut R) -> (DegreeSequence, u64) {
    let mut buf = vec![0u32; n];
    let mut attempts = 0;
    loop {
        attempts += 1;
        let mut sum = 0u64;
        for x in buf.iter_mut() {
            *x = entry.sample(rng) as u32;
            sum += u64::from(*x);
        }
        if sum % 2 == 0 {
            return (DegreeSequence::new(buf).expect("binomial entries below n"), attempts);
        }
    }
}

/// One replicate: the `k` sequences and, for the graph model, the graphs.
#[derive(Clone, Debug)]
pub struct MultiDraw {
    pub sequences: MultiSequence,
    pub graphs: Option<Vec<LabeledGraph>>,
}

/// A configured sampler addressed by `(graph, replicate)`.
#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    model: Model,
    graphs: Vec<GraphSampler>,
}

impl Sampler {
    pub fn new(cfg: &SamplerConfig) -> Result<Self> {
        let params = &cfg.params;
        if cfg.model == Model::I {
            for i in 0..params.k() {
                let v = truncated_normal_v(params, i)?;
                if v < MIN_MIXING_ACCEPTANCE {
                    return Err(Error::Config(format!(
                        "mixing parameter acceptance {v:e} below {MIN_MIXING_ACCEPTANCE:e} for graph {i}"
                    )));
                }
            }
        }
        let graphs = (0..params.k()).map(|i| GraphSampler::new(params, i)).collect::<Result<_>>()?;
        Ok(Self { seed: cfg.seed, model: cfg.model, graphs })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn graph_sampler(&self, i: usize) -> &GraphSampler {
        &self.graphs[i]
    }

    pub fn sample(&self, i: usize, replicate: u64) -> DegreeSequence {
        self.graphs[i].sample(self.model, &mut substream(self.seed, i, replicate))
    }

    /// The graph model draw with its graph; other models return `None`.
    pub fn sample_graph(&self, i: usize, replicate: u64) -> Result<Option<(LabeledGraph, DegreeSequence)>> {
        if self.model != Model::D {
            return Ok(None);
        }
        let g = self.graphs[i].graph(&mut substream(self.seed, i, replicate))?;
        let d = g.degree_sequence();
        Ok(Some((g, d)))
    }

    pub fn sample_sequences(&self, replicate: u64) -> MultiSequence {
        let seqs = (0..self.graphs.len()).map(|i| self.sample(i, replicate)).collect();
        MultiSequence::new(seqs).expect("components share n")
    }

    pub fn sample_multi(&self, replicate: u64) -> Result<MultiDraw> {
        if self.model != Model::D {
            return Ok(MultiDraw { sequences: self.sample_sequences(replicate), graphs: None });
        }
        let mut seqs = Vec::new();
        let mut graphs = Vec::new();
        for i in 0..self.graphs.len() {
            let (g, d) = self.sample_graph(i, replicate)?.expect("graph model");
            seqs.push(d);
            graphs.push(g);
        }
        Ok(MultiDraw { sequences: MultiSequence::new(seqs)?, graphs: Some(graphs) })
    }
}

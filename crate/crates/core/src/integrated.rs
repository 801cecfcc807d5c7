//! The integrated model: the even-sum model with its edge probability drawn
//! from a normal law of mean `p` and variance `pq/2N`, truncated to `[0, 1]`.

use crate::error::Result;
use crate::event::{ln_sum_kernel, SequenceEvent, SumProfile};
use crate::numerics::{ln_even_mass, normal_pdf, pairwise_sum, q_function, LogProb};
use crate::params::ModelParams;
use crate::quadrature::{adaptive, DEFAULT_MAX_LEVELS, DEFAULT_REL_TOL};
use crate::sequence::degree_sum;

/// Half-width of the integration window in standard deviations; the normal
/// mass beyond it is below 1e-30.
pub const WINDOW_SIGMAS: f64 = 12.0;

/// Standard deviation `√(pq/2N)` of the random edge probability of graph `i`.
pub fn mixing_sigma(params: &ModelParams, i: usize) -> f64 {
    (params.p(i) * params.q(i) / params.max_degree_sum() as f64).sqrt()
}

/// `V_{n,p} = ∫_0^1 φ(x; p, pq/2N) dx = 1 - Q(q/σ) - Q(p/σ)`.
pub fn truncated_normal_v(params: &ModelParams, i: usize) -> Result<f64> {
    params.check_graph(i)?;
    let sigma = mixing_sigma(params, i);
    Ok(1.0 - q_function(params.q(i) / sigma) - q_function(params.p(i) / sigma))
}

fn window(params: &ModelParams, i: usize) -> (f64, f64) {
    let (p, s) = (params.p(i), mixing_sigma(params, i));
    ((p - WINDOW_SIGMAS * s).max(0.0), (p + WINDOW_SIGMAS * s).min(1.0))
}

/// `(1/V) ∫_0^1 φ(x; p, pq/2N) f(x) dx` for a caller-supplied `f`, typically a
/// closed-form `x ↦ P_{E,x}(A)`.
pub fn integrated_mixture(params: &ModelParams, i: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
    let v = truncated_normal_v(params, i)?;
    let (p, var) = (params.p(i), mixing_sigma(params, i).powi(2));
    let (a, b) = window(params, i);
    let q = adaptive(|x| normal_pdf(x, p, var) * f(x), a, b, DEFAULT_REL_TOL, DEFAULT_MAX_LEVELS)?;
    Ok(q.value / v)
}

fn clamp_prob(v: f64) -> LogProb {
    // Overshoot above one is quadrature error.
    LogProb::from_prob(v.clamp(0.0, 1.0))
}

/// `P_I(A)` for graph `i`, integrating the event's even-sum probability
/// against the truncated normal.
pub fn integrated_event_prob(params: &ModelParams, i: usize, event: &SequenceEvent) -> Result<LogProb> {
    params.check_graph(i)?;
    let profile = SumProfile::from_event(params.n(), event)?;
    if profile.is_empty() {
        return Ok(LogProb::ZERO);
    }
    let v = integrated_mixture(params, i, |x| profile.even_sum_prob(&[x]))?;
    Ok(clamp_prob(v))
}

/// Per-level-set integrals of the integrated model.
///
/// For even `m`, `J_i(m) = (1/V) ∫ φ(x) x^m (1-x)^{n(n-1)-m} / P_{B,x}(E_n) dx`,
/// so that `P_I(d) = w(d) J_i(M(d))` and the k-graph integral of any event
/// factors through its [`SumProfile`].
#[derive(Clone, Debug)]
pub struct IntegratedMoments {
    moments: Vec<Vec<f64>>,
}

impl IntegratedMoments {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let top = params.max_degree_sum();
        let pairs = params.pairs();
        let mut moments = Vec::with_capacity(params.k());
        for i in 0..params.k() {
            let mut row = vec![0.0; top as usize + 1];
            for m in (0..=top).step_by(2) {
                row[m as usize] = integrated_mixture(params, i, |x| {
                    (ln_sum_kernel(m, top, x) - ln_even_mass(x, pairs)).exp()
                })?;
            }
            moments.push(row);
        }
        Ok(Self { moments })
    }

    pub fn moment(&self, i: usize, m: u64) -> f64 {
        self.moments[i][m as usize]
    }

    /// `P_I(d)` for graph `i`.
    pub fn point_prob(&self, i: usize, entries: &[u32]) -> LogProb {
        let m = degree_sum(entries);
        if m % 2 == 1 {
            return LogProb::ZERO;
        }
        clamp_prob(SumProfile::sequence_weight(entries) * self.moment(i, m))
    }

    /// `P_I(A)` for a k-graph event given by its profile.
    pub fn profile_prob(&self, profile: &SumProfile) -> LogProb {
        assert_eq!(profile.k(), self.moments.len(), "profile arity");
        let terms: Vec<f64> = profile
            .entries()
            .filter(|(sums, _)| sums.iter().all(|m| m % 2 == 0))
            .map(|(sums, w)| w * sums.iter().enumerate().map(|(i, &m)| self.moment(i, m)).product::<f64>())
            .collect();
        clamp_prob(pairwise_sum(&terms))
    }
}

/// `P_I(A)` over k graphs.
pub fn integrated_profile_prob(params: &ModelParams, profile: &SumProfile) -> Result<LogProb> {
    Ok(IntegratedMoments::new(params)?.profile_prob(profile))
}

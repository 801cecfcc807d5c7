//! Monte Carlo estimation over a plan's grid, slope fits, and the collision
//! bound comparison.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::iso::{is_isomorphic, ISO_MAX_N};
use crate::lab::plan::{EventSpec, ExperimentPlan};
use crate::lab::stats::{fit_power_law, max_binomial_mode, Estimate, PowerLawFit};
use crate::models::{acceptability_check, Model};
use crate::numerics::{binom_upper_tail, ln_binom_pmf, parity_bias, pairwise_sum};
use crate::params::ModelParams;
use crate::samplers::{hash_words, substream, GraphSampler, Sampler, SamplerConfig};

/// One `(model, n)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub model: Model,
    pub n: usize,
    pub event: String,
    #[serde(flatten)]
    pub estimate: Estimate,
    /// Exact probability under the binomial model, where one is known.
    pub closed_form: Option<f64>,
    /// `C(k,2) · max_i max_x b(x; n, α_i)` for collision events.
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelFit {
    pub model: Model,
    pub fit: Option<PowerLawFit>,
}

/// Difference of two fitted slopes with the joint standard error
/// `sqrt(se_a² + se_b²)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeGap {
    pub first: Model,
    pub second: Model,
    pub gap: f64,
    pub joint_se: f64,
}

impl SlopeGap {
    pub fn within(&self, sigmas: f64) -> bool {
        self.gap.abs() <= sigmas * self.joint_se
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub event: String,
    pub k: usize,
    pub cells: Vec<Cell>,
    pub fits: Vec<ModelFit>,
    pub gaps: Vec<SlopeGap>,
    pub warnings: Vec<String>,
    /// Every cell had zero hits, so nothing was fitted.
    pub degenerate: bool,
}

impl DecayReport {
    pub fn fit(&self, model: Model) -> Option<&PowerLawFit> {
        self.fits.iter().find(|f| f.model == model).and_then(|f| f.fit.as_ref())
    }

    pub fn cells_for(&self, model: Model) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.model == model)
    }
}

/// `α_i = P(Bin(n-1, p_i) ∈ [⌊n min p⌋, ∞))` for each graph.
pub fn fingerprint_alphas(params: &ModelParams) -> Vec<f64> {
    let lo = crate::iso::fingerprint_threshold_set(params).threshold().unwrap_or(0);
    (0..params.k()).map(|i| binom_upper_tail(u64::from(lo), params.n() as u64 - 1, params.p(i))).collect()
}

/// Probability of the event under the binomial model, when it has a closed form.
pub fn binomial_closed_form(event: &EventSpec, params: &ModelParams) -> Option<f64> {
    let top = params.max_degree_sum();
    match event {
        EventSpec::SumOdd { graph } => Some(0.5 * (1.0 - parity_bias(params.p(*graph), params.pairs()))),
        EventSpec::SumAtLeast { graph, value } => Some(binom_upper_tail(*value, top, params.p(*graph))),
        EventSpec::SumAtMost { graph, value } => Some(1.0 - binom_upper_tail(value + 1, top, params.p(*graph))),
        EventSpec::Never => Some(0.0),
        EventSpec::FbPairCollision | EventSpec::FbAllCollision => {
            // Under B the counts are independent Bin(n, α_i).
            let n = params.n() as u64;
            let pmfs: Vec<Vec<f64>> =
                fingerprint_alphas(params).iter().map(|&a| (0..=n).map(|j| ln_binom_pmf(j, n, a).exp()).collect()).collect();
            let agree = |idx: &[usize]| pairwise_sum(&(0..=n as usize).map(|j| idx.iter().map(|&i| pmfs[i][j]).product()).collect::<Vec<f64>>());
            let k = params.k();
            let all = agree(&(0..k).collect::<Vec<_>>());
            match (event, k) {
                (EventSpec::FbAllCollision, _) => Some(all),
                (_, 2) => Some(all),
                (_, 3) => {
                    // Inclusion-exclusion: every pairwise intersection is the triple event.
                    let pairs = agree(&[0, 1]) + agree(&[0, 2]) + agree(&[1, 2]);
                    Some(pairs - 2.0 * all)
                }
                _ => None,
            }
        }
    }
}

/// `C(k,2) · max_i max_x b(x; n, α_i)`.
pub fn collision_bound(params: &ModelParams) -> f64 {
    let k = params.k() as f64;
    let worst = fingerprint_alphas(params).iter().map(|&a| max_binomial_mode(params.n() as u64, a)).fold(0.0, f64::max);
    k * (k - 1.0) / 2.0 * worst
}

fn cell_seed(seed: u64, n: usize, model: Model, stream: &str) -> u64 {
    let tag = stream.bytes().chain(model.tag().bytes()).fold(0u64, |h, b| h.wrapping_mul(0x100_0000_01b3) ^ u64::from(b));
    hash_words(&[seed, n as u64, tag])
}

fn estimate_cell(plan: &ExperimentPlan, model: Model, n: usize, event: &EventSpec, exec: Execution) -> Result<(ModelParams, Estimate)> {
    let params = plan.p_rule.params(n, plan.k)?;
    let sampler = Sampler::new(&SamplerConfig { seed: cell_seed(plan.seed, n, model, "cell"), model, params: params.clone() })?;
    let bound = event.bind(&params);
    let hits = exec.count(0..plan.replicates, |r| {
        let draw = sampler.sample_sequences(r);
        let seqs: Vec<&[u32]> = draw.components().iter().map(|d| d.entries()).collect();
        bound.holds(&seqs)
    });
    Ok((params, Estimate::new(hits, plan.replicates)))
}

/// Estimates the plan's event for every model and `n`, then fits
/// `ln p̂` against `ln n` per model.
pub fn run_plan(plan: &ExperimentPlan, exec: Execution) -> Result<DecayReport> {
    plan.validate()?;
    let name = plan.event.name();
    let mut warnings = Vec::new();
    if !plan.allow_out_of_regime {
        for &n in &plan.n_grid {
            let report = acceptability_check(&plan.p_rule.params(n, plan.k)?);
            warnings.extend(report.warnings().map(str::to_string));
        }
    }
    let mut cells = Vec::new();
    for &model in &plan.models {
        for &n in &plan.n_grid {
            let (params, estimate) = estimate_cell(plan, model, n, &plan.event, exec)?;
            cells.push(Cell {
                model,
                n,
                event: name.clone(),
                estimate,
                closed_form: binomial_closed_form(&plan.event, &params),
                bound: plan.event.collision_mode().map(|_| collision_bound(&params)),
            });
        }
    }
    let degenerate = cells.iter().all(|c| c.estimate.hits == 0);
    let fits: Vec<ModelFit> = plan
        .models
        .iter()
        .map(|&model| {
            let pts: Vec<(usize, Estimate)> = cells.iter().filter(|c| c.model == model).map(|c| (c.n, c.estimate)).collect();
            ModelFit { model, fit: if degenerate { None } else { fit_power_law(&pts) } }
        })
        .collect();
    if degenerate {
        warnings.push("all cells have zero hits; no fit".into());
    }
    for f in fits.iter().filter(|f| f.fit.is_none()) {
        if !degenerate {
            warnings.push(format!("model {}: fewer than two cells with enough hits to fit", f.model));
        }
    }
    let mut gaps = Vec::new();
    if let Some(first) = fits.first() {
        for other in &fits[1..] {
            if let (Some(a), Some(b)) = (&first.fit, &other.fit) {
                gaps.push(SlopeGap {
                    first: first.model,
                    second: other.model,
                    gap: a.slope - b.slope,
                    joint_se: (a.slope_se.powi(2) + b.slope_se.powi(2)).sqrt(),
                });
            }
        }
    }
    Ok(DecayReport { event: name, k: plan.k, cells, fits, gaps, warnings, degenerate })
}

/// One row of the collision bound comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub model: Model,
    pub n: usize,
    /// Frequency of some isomorphic pair among sampled `G(n, p_i)`, for small `n`.
    pub isomorphic: Option<Estimate>,
    pub collision: Estimate,
    pub bound: f64,
    pub ratio: f64,
    pub ratio_se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollisionBoundReport {
    pub rows: Vec<BoundRow>,
    /// Per model: the ratio stays within 1 + 4σ at the two largest `n`.
    pub dominated: Vec<(Model, bool)>,
}

/// Frequency with which some pair among `k` sampled graphs is isomorphic.
pub fn isomorphic_pair_frequency(params: &ModelParams, replicates: u64, seed: u64, exec: Execution) -> Result<Estimate> {
    if params.n() > ISO_MAX_N {
        return Err(Error::Capacity { what: "isomorphism sampling".into(), limit: ISO_MAX_N as u64 });
    }
    let samplers = (0..params.k()).map(|i| GraphSampler::new(params, i)).collect::<Result<Vec<_>>>()?;
    let hits = exec.count(0..replicates, |r| {
        let graphs: Vec<_> = samplers.iter().enumerate().map(|(i, s)| s.graph(&mut substream(seed, i, r)).expect("small graph")).collect();
        (0..graphs.len()).any(|a| (a + 1..graphs.len()).any(|b| is_isomorphic(&graphs[a], &graphs[b]).expect("small graph")))
    });
    Ok(Estimate::new(hits, replicates))
}

/// Compares the pairwise `F_B` collision frequency with the all-pairs bound
/// at each `n`, and at `n <= 10` also estimates the probability that some
/// pair of sampled graphs is isomorphic.
pub fn collision_bound_check(plan: &ExperimentPlan, exec: Execution) -> Result<CollisionBoundReport> {
    plan.validate()?;
    if plan.k < 2 {
        return Err(Error::Config("collision bound check needs k >= 2".into()));
    }
    let mut rows = Vec::new();
    for &model in &plan.models {
        for &n in &plan.n_grid {
            let (params, collision) = estimate_cell(plan, model, n, &EventSpec::FbPairCollision, exec)?;
            let isomorphic = if n <= ISO_MAX_N && model == Model::D {
                Some(isomorphic_pair_frequency(&params, plan.replicates, cell_seed(plan.seed, n, model, "iso"), exec)?)
            } else {
                None
            };
            let bound = collision_bound(&params);
            rows.push(BoundRow { model, n, isomorphic, collision, bound, ratio: collision.phat / bound, ratio_se: collision.std_error() / bound });
        }
    }
    let dominated = plan
        .models
        .iter()
        .map(|&m| {
            let mine: Vec<&BoundRow> = rows.iter().filter(|r| r.model == m).collect();
            let ok = mine.iter().rev().take(2).all(|r| r.ratio <= 1.0 + 4.0 * r.ratio_se);
            (m, ok)
        })
        .collect();
    Ok(CollisionBoundReport { rows, dominated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::plan::{Coefficient, PRule};

    fn plan(event: EventSpec, k: usize, models: Vec<Model>, p: PRule) -> ExperimentPlan {
        ExperimentPlan { n_grid: vec![6, 12, 24], p_rule: p, k, event, replicates: 4000, seed: 3, models, allow_out_of_regime: false }
    }

    #[test]
    fn odd_sum_calibration() {
        let p = plan(EventSpec::SumOdd { graph: 0 }, 1, vec![Model::B], PRule::Power { c: Coefficient::Shared(0.3), beta: 1.0 });
        let report = run_plan(&p, Execution::default()).unwrap();
        for c in &report.cells {
            let exact = c.closed_form.unwrap();
            assert!(c.estimate.agrees_with(exact, 4.0), "{c:?}");
        }
        assert!(report.fit(Model::B).unwrap().slope.abs() < 0.2);
    }

    #[test]
    fn even_models_never_odd() {
        let p = plan(EventSpec::SumOdd { graph: 0 }, 1, vec![Model::E, Model::D], PRule::Constant { p: Coefficient::Shared(0.3) });
        let report = run_plan(&p, Execution::default()).unwrap();
        assert!(report.cells.iter().all(|c| c.estimate.hits == 0));
        assert!(report.degenerate);
        assert!(report.fits.iter().all(|f| f.fit.is_none()));
    }

    #[test]
    fn impossible_event_is_degenerate() {
        let p = plan(EventSpec::Never, 2, vec![Model::B], PRule::Constant { p: Coefficient::Shared(0.5) });
        let r = run_plan(&p, Execution::default()).unwrap();
        assert!(r.degenerate && r.gaps.is_empty());
        assert!(r.cells.iter().all(|c| c.estimate.ci_hi == 3.0 / 4000.0));
    }

    #[test]
    fn threshold_calibration() {
        let ev = EventSpec::SumAtLeast { graph: 1, value: 20 };
        let p = plan(ev, 2, vec![Model::B], PRule::Constant { p: Coefficient::PerGraph(vec![0.1, 0.2]) });
        for c in &run_plan(&p, Execution::default()).unwrap().cells {
            assert!(c.estimate.agrees_with(c.closed_form.unwrap(), 4.0), "{c:?}");
        }
    }

    #[test]
    fn collision_closed_forms() {
        // k = 3 any-pair by brute force over the three count pmfs.
        let params = ModelParams::new(5, vec![0.3, 0.5, 0.4]).unwrap();
        let alphas = fingerprint_alphas(&params);
        let pmf = |a: f64| (0..=5).map(|j| ln_binom_pmf(j, 5, a).exp()).collect::<Vec<_>>();
        let (a, b, c) = (pmf(alphas[0]), pmf(alphas[1]), pmf(alphas[2]));
        let mut any = 0.0;
        let mut all = 0.0;
        for x in 0..=5 {
            for y in 0..=5 {
                for z in 0..=5 {
                    let w = a[x] * b[y] * c[z];
                    if x == y || y == z || x == z {
                        any += w;
                    }
                    if x == y && y == z {
                        all += w;
                    }
                }
            }
        }
        assert!((binomial_closed_form(&EventSpec::FbPairCollision, &params).unwrap() - any).abs() < 1e-14);
        assert!((binomial_closed_form(&EventSpec::FbAllCollision, &params).unwrap() - all).abs() < 1e-14);
    }

    #[test]
    fn collision_frequency_matches_closed_form_under_b() {
        let p = plan(EventSpec::FbPairCollision, 3, vec![Model::B], PRule::Constant { p: Coefficient::Shared(0.4) });
        for c in &run_plan(&p, Execution::default()).unwrap().cells {
            assert!(c.estimate.agrees_with(c.closed_form.unwrap(), 4.0), "{c:?}");
            assert!(c.bound.unwrap() > 0.0);
        }
    }

    #[test]
    fn reproducible_across_execution() {
        let p = plan(EventSpec::FbPairCollision, 2, vec![Model::B, Model::D], PRule::Power { c: Coefficient::Shared(1.0), beta: 0.7 });
        let a = run_plan(&p, Execution::Parallel).unwrap();
        let b = run_plan(&p, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.gaps.len(), 1);
        assert!(!a.warnings.is_empty());
        let quiet = ExperimentPlan { allow_out_of_regime: true, ..p };
        assert!(run_plan(&quiet, Execution::default()).unwrap().warnings.is_empty());
    }

    #[test]
    fn bound_check_small_n() {
        let p = ExperimentPlan {
            n_grid: vec![6, 8],
            replicates: 3000,
            ..plan(EventSpec::FbPairCollision, 2, vec![Model::D], PRule::Constant { p: Coefficient::Shared(0.5) })
        };
        let report = collision_bound_check(&p, Execution::default()).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            let iso = row.isomorphic.unwrap();
            assert!(iso.hits > 0);
            // Isomorphic graphs collide, so the collision frequency dominates.
            assert!(row.collision.phat >= iso.phat - 4.0 * row.collision.std_error());
        }
        let single = ExperimentPlan { k: 1, event: EventSpec::Never, ..p };
        assert!(collision_bound_check(&single, Execution::default()).is_err());
    }
}

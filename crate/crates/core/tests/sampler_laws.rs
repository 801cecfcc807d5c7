//! Sampler output laws against exact measures.

use degseq::integrated::integrated_event_prob;
use degseq::lab::{chi_square_gof, Estimate};
use degseq::models::GraphModel;
use degseq::numerics::ln_binom_pmf;
use degseq::oracle::{reference_events, ExactOracle};
use degseq::samplers::{conditioned_on_sum, substream, GraphSampler};
use degseq::sequence::sequence_space_size;
use degseq::{Model, ModelParams, Sampler, SamplerConfig};

const ALPHA: f64 = 1e-3;

fn counts_by_code(n: usize, draws: impl Iterator<Item = u64>) -> Vec<u64> {
    let mut counts = vec![0u64; sequence_space_size(n).unwrap() as usize];
    for code in draws {
        counts[code as usize] += 1;
    }
    counts
}

fn sampler(model: Model, params: ModelParams, seed: u64) -> Sampler {
    Sampler::new(&SamplerConfig { seed, model, params }).unwrap()
}

fn within(sample_mean: f64, target: f64, sd: f64, draws: u64) -> bool {
    (sample_mean - target).abs() <= 4.0 * sd / (draws as f64).sqrt()
}

#[test]
fn every_model_matches_exact_law_small_n() {
    for (n, p) in [(2, 0.3), (3, 0.5), (3, 0.15)] {
        let params = ModelParams::single(n, p).unwrap();
        let mut oracle = ExactOracle::new(&params).unwrap();
        for model in Model::ALL {
            let exact = oracle.distribution(model, 0).unwrap();
            let s = sampler(model, params.clone(), 17);
            let counts = counts_by_code(n, (0..100_000).map(|r| s.sample(0, r).code()));
            let fit = chi_square_gof(&counts, &exact);
            assert!(fit.p_value > ALPHA, "{model} n={n} p={p}: {fit:?}");
        }
    }
}

#[test]
fn conditioned_stage_matches_restricted_binomial() {
    for n in 2..=4usize {
        let gm = GraphModel::new(&ModelParams::single(n, 0.5).unwrap(), 0).unwrap();
        let top = (n * (n - 1)) as u64;
        for m in 0..=top {
            // B restricted to S_m: proportional to the binomial point masses.
            let size = sequence_space_size(n).unwrap();
            let mut exact = vec![0.0; size as usize];
            for (code, slot) in exact.iter_mut().enumerate() {
                let d = degseq::DegreeSequence::from_code(code as u64, n);
                if d.degree_sum() == m {
                    *slot = gm.binomial(&d).unwrap().prob();
                }
            }
            let z: f64 = exact.iter().sum();
            exact.iter_mut().for_each(|x| *x /= z);
            let mut rng = substream(5, n, m);
            let counts = counts_by_code(n, (0..50_000).map(|_| conditioned_on_sum(n, m, &mut rng).code()));
            let fit = chi_square_gof(&counts, &exact);
            assert!(fit.p_value > ALPHA, "n={n} m={m}: {fit:?}");
        }
    }
}

#[test]
fn binomial_moments() {
    let draws = 100_000u64;
    let (n, eps) = (50, 1e-3);
    let s = sampler(Model::B, ModelParams::single(n, eps).unwrap(), 1);
    let mean = (0..draws).map(|r| f64::from(s.sample(0, r).entries()[0])).sum::<f64>() / draws as f64;
    let var = 49.0 * eps * (1.0 - eps);
    assert!(within(mean, 49.0 * eps, var.sqrt(), draws), "{mean}");

    // Entry variance at n = 1000, p = 0.01.
    let (n, p) = (1000usize, 0.01);
    let gs = GraphSampler::new(&ModelParams::single(n, p).unwrap(), 0).unwrap();
    let xs: Vec<f64> = (0..draws).map(|r| f64::from(gs.binomial(&mut substream(2, 0, r)).entries()[0])).collect();
    let m = xs.iter().sum::<f64>() / draws as f64;
    let s2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let sigma2 = (n - 1) as f64 * p * (1.0 - p);
    let excess_kurtosis = (1.0 - 6.0 * p * (1.0 - p)) / sigma2;
    let sd_s2 = sigma2 * (2.0 + excess_kurtosis).sqrt();
    assert!(within(s2, sigma2, sd_s2, draws), "{s2} vs {sigma2}");
}

#[test]
fn even_restriction_at_two_vertices() {
    let params = ModelParams::single(2, 0.5).unwrap();
    let gs = GraphSampler::new(&params, 0).unwrap();
    let draws = 100_000u64;
    let mut ones = 0u64;
    let mut attempts = 0u64;
    for r in 0..draws {
        let (d, a) = gs.even_counted(&mut substream(3, 0, r));
        ones += u64::from(d.entries() == [1, 1]);
        attempts += a;
    }
    assert!(Estimate::new(ones, draws).agrees_with(0.5, 4.0));
    let mean_attempts = attempts as f64 / draws as f64;
    assert!(mean_attempts <= 2.01, "{mean_attempts}");
}

#[test]
fn weighted_even_half_sum_law() {
    let (n, p) = (20usize, 0.1);
    let params = ModelParams::single(n, p).unwrap();
    let pairs = params.pairs();
    let s = sampler(Model::EPrime, params, 4);
    let mut counts = vec![0u64; pairs as usize + 1];
    for r in 0..100_000 {
        counts[(s.sample(0, r).degree_sum() / 2) as usize] += 1;
    }
    let exact: Vec<f64> = (0..=pairs).map(|j| ln_binom_pmf(j, pairs, p).exp()).collect();
    let fit = chi_square_gof(&counts, &exact);
    assert!(fit.p_value > ALPHA, "{fit:?}");
}

#[test]
fn point_masses_at_four_vertices() {
    let params = ModelParams::single(4, 0.3).unwrap();
    let mut oracle = ExactOracle::new(&params).unwrap();
    let draws = 100_000u64;
    for model in [Model::EPrime, Model::D] {
        let exact = oracle.distribution(model, 0).unwrap();
        let s = sampler(model, params.clone(), 8);
        let counts = counts_by_code(4, (0..draws).map(|r| s.sample(0, r).code()));
        for (code, (&c, &p)) in counts.iter().zip(&exact).enumerate() {
            assert!(Estimate::new(c, draws).agrees_with(p, 4.0), "{model} code {code}: {c} vs {p}");
        }
    }
}

#[test]
fn mixing_parameter_mean() {
    let params = ModelParams::single(1000, 0.01).unwrap();
    let gs = GraphSampler::new(&params, 0).unwrap();
    let sigma = degseq::integrated::mixing_sigma(&params, 0);
    let draws = 100_000u64;
    let mean = (0..draws).map(|r| gs.mixing_parameter(&mut substream(6, 0, r))).sum::<f64>() / draws as f64;
    assert!(within(mean, 0.01, sigma, draws), "{mean}");
}

#[test]
fn integrated_event_frequencies() {
    let params = ModelParams::single(4, 0.2).unwrap();
    let s = sampler(Model::I, params.clone(), 9);
    let draws = 100_000u64;
    let samples: Vec<_> = (0..draws).map(|r| s.sample(0, r)).collect();
    assert!(samples.iter().all(|d| d.is_even_sum()));
    for (name, event) in reference_events(&params) {
        let exact = integrated_event_prob(&params, 0, &event).unwrap().prob();
        let hits = samples.iter().filter(|d| event.contains(d.entries())).count() as u64;
        assert!(Estimate::new(hits, draws).agrees_with(exact, 4.0), "{name}: {hits} vs {exact}");
    }
}

#[test]
fn edge_count_mean() {
    let draws = 100_000u64;
    for (n, p) in [(30usize, 0.05), (30, 0.3)] {
        let params = ModelParams::single(n, p).unwrap();
        let pairs = params.pairs() as f64;
        let s = sampler(Model::D, params, 10);
        let mean = (0..draws).map(|r| s.sample(0, r).degree_sum() as f64 / 2.0).sum::<f64>() / draws as f64;
        assert!(within(mean, pairs * p, (pairs * p * (1.0 - p)).sqrt(), draws), "p={p}: {mean}");
    }
}

#[test]
fn two_graph_components() {
    let params = ModelParams::new(3, vec![0.3, 0.6]).unwrap();
    let mut oracle = ExactOracle::new(&params).unwrap();
    let draws = 100_000u64;
    for model in Model::ALL {
        let s = sampler(model, params.clone(), 12);
        let mut counts = [vec![0u64; 27], vec![0u64; 27]];
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for r in 0..draws {
            let draw = s.sample_sequences(r);
            let c = draw.components();
            counts[0][c[0].code() as usize] += 1;
            counts[1][c[1].code() as usize] += 1;
            let (x, y) = (c[0].degree_sum() as f64, c[1].degree_sum() as f64);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        for (i, observed) in counts.iter().enumerate() {
            let fit = chi_square_gof(observed, &oracle.distribution(model, i).unwrap());
            assert!(fit.p_value > ALPHA, "{model} graph {i}: {fit:?}");
        }
        let r = draws as f64;
        let cov = sxy / r - sx / r * sy / r;
        let corr = cov / ((sxx / r - (sx / r).powi(2)) * (syy / r - (sy / r).powi(2))).sqrt();
        assert!(corr.abs() <= 4.0 / r.sqrt(), "{model}: corr {corr}");
    }
}

//! Binomial-proportion intervals and power-law fits.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::numerics::ln_binom_pmf;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Cells with fewer hits than this stay out of slope fits.
pub const MIN_FIT_HITS: u64 = 10;

/// A Monte Carlo frequency with its 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub replicates: u64,
    pub hits: u64,
    pub phat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Estimate {
    /// Wilson score interval; a zero-hit cell gets the one-sided `[0, 3/R]`.
    pub fn new(hits: u64, replicates: u64) -> Self {
        assert!(replicates > 0 && hits <= replicates);
        let r = replicates as f64;
        let phat = hits as f64 / r;
        if hits == 0 {
            return Self { replicates, hits, phat, ci_lo: 0.0, ci_hi: (3.0 / r).min(1.0) };
        }
        let z2 = WILSON_Z * WILSON_Z;
        let denom = 1.0 + z2 / r;
        let centre = (phat + z2 / (2.0 * r)) / denom;
        let half = WILSON_Z / denom * (phat * (1.0 - phat) / r + z2 / (4.0 * r * r)).sqrt();
        // Rounding can push a bound past p̂ at the extremes.
        Self { replicates, hits, phat, ci_lo: (centre - half).clamp(0.0, phat), ci_hi: (centre + half).clamp(phat, 1.0) }
    }

    /// `sqrt(p̂(1 - p̂)/R)`.
    pub fn std_error(&self) -> f64 {
        (self.phat * (1.0 - self.phat) / self.replicates as f64).sqrt()
    }

    /// Whether `value` lies within `sigmas` standard errors, using the
    /// standard error of `value` itself so that zero-hit cells are judged too.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        let value = value.clamp(0.0, 1.0);
        let se = (value * (1.0 - value) / self.replicates as f64).sqrt();
        (self.phat - value).abs() <= sigmas * se.max(f64::MIN_POSITIVE)
    }

    pub fn fittable(&self) -> bool {
        self.hits >= MIN_FIT_HITS && self.hits < self.replicates
    }
}

/// `ln p̂ = intercept + slope · ln n` by weighted least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub intercept_se: f64,
    pub cells: usize,
}

/// Fits the fittable cells; weights are the delta-method inverse variances
/// `R p̂ / (1 - p̂)` of `ln p̂`, treated as known. Needs two distinct `n`.
pub fn fit_power_law(cells: &[(usize, Estimate)]) -> Option<PowerLawFit> {
    let pts: Vec<(f64, f64, f64)> = cells
        .iter()
        .filter(|(_, e)| e.fittable())
        .map(|(n, e)| ((*n as f64).ln(), e.phat.ln(), e.replicates as f64 * e.phat / (1.0 - e.phat)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let xbar = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ybar = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    Some(PowerLawFit {
        slope,
        slope_se: (1.0 / sxx).sqrt(),
        intercept: ybar - slope * xbar,
        intercept_se: (1.0 / sw + xbar * xbar / sxx).sqrt(),
        cells: pts.len(),
    })
}

/// `max_x b(x; n, α)`, evaluated at the mode `⌊(n+1)α⌋` and its lower neighbour.
pub fn max_binomial_mode(n: u64, alpha: f64) -> f64 {
    let mode = (((n + 1) as f64 * alpha).floor() as u64).min(n);
    let at = |x: u64| ln_binom_pmf(x, n, alpha).exp();
    let below = if mode > 0 { at(mode - 1) } else { 0.0 };
    at(mode).max(below)
}

/// Bins with fewer expected counts than this are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` counts against cell probabilities.
/// Cells expecting fewer than five counts are pooled into one; if the pool is
/// still short it joins the smallest remaining cell. Any count in a
/// zero-probability cell gives p-value 0.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let t = total as f64;
    if observed.iter().zip(probs).any(|(&o, &p)| o > 0 && p <= 0.0) {
        return ChiSquare { statistic: f64::INFINITY, dof: 0, p_value: 0.0 };
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * t;
        if e < MIN_EXPECTED {
            pool_o += o as f64;
            pool_e += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pool_e > 0.0 {
        if pool_e >= MIN_EXPECTED || bins.is_empty() {
            bins.push((pool_o, pool_e));
        } else {
            let smallest = (0..bins.len()).min_by(|&a, &b| bins[a].1.total_cmp(&bins[b].1)).unwrap();
            bins[smallest].0 += pool_o;
            bins[smallest].1 += pool_e;
        }
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 { 1.0 } else { ChiSquared::new(dof as f64).expect("positive dof").sf(statistic) };
    ChiSquare { statistic, dof, p_value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        let e = Estimate::new(50, 100);
        assert!((e.ci_lo - 0.403_831_7).abs() < 1e-6 && (e.ci_hi - 0.596_168_3).abs() < 1e-6);
        let e = Estimate::new(1, 10);
        assert!((e.ci_lo - 0.017_875_6).abs() < 1e-6 && (e.ci_hi - 0.404_150_4).abs() < 1e-6);
        let z = Estimate::new(0, 300);
        assert_eq!((z.phat, z.ci_lo, z.ci_hi), (0.0, 0.0, 0.01));
        for r in [20, 20_000] {
            let full = Estimate::new(r, r);
            assert!(full.ci_hi == 1.0 && full.ci_lo < 1.0);
        }
    }

    #[test]
    fn interval_contains_estimate() {
        for r in [1u64, 7, 100, 12345] {
            for h in [0, 1, r / 3, r / 2, r] {
                let e = Estimate::new(h, r);
                assert!(e.ci_lo <= e.phat && e.phat <= e.ci_hi, "{e:?}");
                assert!((0.0..=1.0).contains(&e.ci_lo) && (0.0..=1.0).contains(&e.ci_hi));
            }
        }
    }

    #[test]
    fn exact_power_law_recovered() {
        let cells: Vec<(usize, Estimate)> = [64usize, 128, 256, 512]
            .iter()
            .map(|&n| {
                let r = 1_000_000u64;
                let hits = (r as f64 * 3.0 * (n as f64).powf(-0.5)).round() as u64;
                (n, Estimate::new(hits, r))
            })
            .collect();
        let fit = fit_power_law(&cells).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-3, "{fit:?}");
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-2);
        assert!(fit.slope_se > 0.0 && fit.slope_se < 0.01);
    }

    #[test]
    fn sparse_cells_excluded() {
        let cells = vec![(10, Estimate::new(9, 1000)), (20, Estimate::new(0, 1000)), (40, Estimate::new(50, 1000))];
        assert!(fit_power_law(&cells).is_none());
    }

    #[test]
    fn binomial_mode_values() {
        assert!((max_binomial_mode(1, 0.5) - 0.5).abs() < 1e-15);
        assert!((max_binomial_mode(100, 0.5) - 0.079_589_237_387_178_8).abs() < 1e-12);
        let limit = (2.0 / std::f64::consts::PI).sqrt();
        let scaled = 100.0 * max_binomial_mode(10_000, 0.5);
        assert!((scaled / limit - 1.0).abs() < 0.01);
        // Tiny α: the mode is 0.
        assert!((max_binomial_mode(10, 0.01) - 0.99f64.powi(10)).abs() < 1e-14);
    }

    #[test]
    fn chi_square_reference() {
        // 3 cells, expected 100 each, deviations ±10: statistic 2, two degrees of freedom.
        let r = chi_square_gof(&[110, 90, 100], &[1.0 / 3.0; 3]);
        assert!((r.statistic - 2.0).abs() < 1e-12 && r.dof == 2);
        assert!((r.p_value - (-1.0f64).exp()).abs() < 1e-12);
        let pooled = chi_square_gof(&[500, 497, 1, 2], &[0.5, 0.497, 0.001, 0.002]);
        assert_eq!(pooled.dof, 1);
        assert_eq!(chi_square_gof(&[5, 1], &[1.0, 0.0]).p_value, 0.0);
    }
}

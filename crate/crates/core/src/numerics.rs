//! Log-space probability arithmetic and the handful of special functions the
//! models need.

use std::cmp::Ordering;
use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;
use std::ops::{Div, Mul};

use serde::{Serialize, Serializer};
use libm::erfc;

/// A probability carried as its natural logarithm.
///
/// Probability zero is represented by the explicit sentinel [`LogProb::ZERO`]
/// (negative infinity), so products and quotients stay closed under `+`/`-`
/// on the log scale.
#[derive(Clone, Copy, PartialEq)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "NaN log-probability");
        LogProb(ln)
    }

    pub fn from_prob(p: f64) -> Self {
        debug_assert!(p >= 0.0, "negative probability {p}");
        if p == 0.0 {
            Self::ZERO
        } else {
            LogProb(p.ln())
        }
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Probabilities never exceed one, up to rounding slack.
    pub fn is_valid(self) -> bool {
        !self.0.is_nan() && self.0 <= 1e-12
    }

    /// Log-sum-exp over the values with pairwise reduction of the scaled
    /// terms, so the result depends only on the order of `values`.
    pub fn sum(values: &[LogProb]) -> LogProb {
        let max = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let scaled: Vec<f64> = values.iter().map(|v| (v.0 - max).exp()).collect();
        LogProb(max + pairwise_sum(&scaled).ln())
    }

    /// Relative difference `|a/b - 1|`; two zeros compare equal and a zero
    /// against a positive value is infinitely far.
    pub fn rel_diff(self, other: LogProb) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            _ => (self.0 - other.0).exp_m1().abs(),
        }
    }
}

impl Mul for LogProb {
    type Output = LogProb;
    fn mul(self, rhs: LogProb) -> LogProb {
        LogProb(self.0 + rhs.0)
    }
}

impl Div for LogProb {
    type Output = LogProb;
    fn div(self, rhs: LogProb) -> LogProb {
        assert!(!rhs.is_zero(), "division by a zero probability");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogProb(self.0 - rhs.0)
    }
}

impl PartialOrd for LogProb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Debug for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "LogProb(zero)")
        } else {
            write!(f, "LogProb({} = ln {})", self.0.exp(), self.0)
        }
    }
}

impl Serialize for LogProb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_zero() {
            s.serialize_none()
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// Pairwise (tree) summation: error grows as O(log n) and the reduction
/// order is fixed by the slice order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 16;
    if values.len() <= BASE {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    statrs::function::factorial::ln_binomial(n, k)
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

// Error of Stirling's approximation to ln n!.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        // n! is exact in f64 here.
        let fact: f64 = (1..=n as u64).map(|i| i as f64).product();
        return fact.ln() - (n + 0.5) * n.ln() + n - 0.5 * LN_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

// Deviance term x ln(x/np) + np - x, evaluated without cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `ln b(x; n, p)`, the binomial log-pmf, by Loader's saddle-point
/// expansion. Accurate to a few ulps even for n in the millions.
pub fn ln_binom_pmf(x: u64, n: u64, p: f64) -> f64 {
    if x > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if x == 0 {
        return nf * (-p).ln_1p();
    }
    if x == n {
        return nf * p.ln();
    }
    let q = 1.0 - p;
    let xf = x as f64;
    let lc = stirlerr(nf)
        - stirlerr(xf)
        - stirlerr(nf - xf)
        - bd0(xf, nf * p)
        - bd0(nf - xf, nf * q);
    let lf = LN_2PI + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

/// Upper tail `P(Bin(n, p) >= k)`, summed from the smaller side.
pub fn binom_upper_tail(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let mean = n as f64 * p;
    if (k as f64) > mean {
        let terms: Vec<f64> = (k..=n).map(|x| ln_binom_pmf(x, n, p).exp()).collect();
        pairwise_sum(&terms).min(1.0)
    } else {
        let terms: Vec<f64> = (0..k).map(|x| ln_binom_pmf(x, n, p).exp()).collect();
        (1.0 - pairwise_sum(&terms)).max(0.0)
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Upper-tail probability of the standard normal.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Normal density `φ(x; mean, variance)`.
pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let z = x - mean;
    (-(z * z) / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
}

/// `ln((q - p)^(2N))` with `2N` even, so the sign of `q - p` is irrelevant.
/// Returns negative infinity when the power is an exact zero or sits below
/// `e^-700`.
pub fn ln_parity_bias(p: f64, pairs: u64) -> f64 {
    let base = (1.0 - 2.0 * p).abs();
    if base == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ln = 2.0 * pairs as f64 * base.ln();
    if ln < -700.0 {
        f64::NEG_INFINITY
    } else {
        ln
    }
}

/// `(q - p)^(2N)` in linear space, flushed to zero below `e^-700`.
pub fn parity_bias(p: f64, pairs: u64) -> f64 {
    ln_parity_bias(p, pairs).exp()
}

/// `ln((1 + (q - p)^(2N)) / 2)`, the log-probability of an even degree sum
/// under the binomial model.
pub fn ln_even_mass(p: f64, pairs: u64) -> f64 {
    parity_bias(p, pairs).ln_1p() - LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_pmf(x: u64, n: u64, p: f64) -> f64 {
        // Small n only: C(n, x) is exact in f64.
        let mut c = 1.0f64;
        for i in 0..x {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        c * p.powi(x as i32) * (1.0 - p).powi((n - x) as i32)
    }

    #[test]
    fn loader_matches_direct_pmf() {
        for n in [1u64, 2, 5, 12, 30, 40] {
            for &p in &[0.01, 0.3, 0.5, 0.93] {
                for x in 0..=n {
                    let direct = exact_pmf(x, n, p);
                    let ln = ln_binom_pmf(x, n, p);
                    assert!(
                        (ln.exp() - direct).abs() <= 1e-13 * direct.max(1e-300),
                        "n={n} x={x} p={p}: {} vs {direct}",
                        ln.exp()
                    );
                }
            }
        }
    }

    #[test]
    fn pmf_edges() {
        assert_eq!(ln_binom_pmf(3, 2, 0.4), f64::NEG_INFINITY);
        assert_eq!(ln_binom_pmf(0, 5, 0.0), 0.0);
        assert_eq!(ln_binom_pmf(1, 5, 0.0), f64::NEG_INFINITY);
        assert!((ln_binom_pmf(0, 2, 0.3) - 2.0 * 0.7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn large_n_central_term() {
        // b(n/2; n, 1/2) ~ sqrt(2/(pi n)) (1 - 1/(4n)).
        let n = 1_000_000u64;
        let v = ln_binom_pmf(n / 2, n, 0.5).exp();
        let approx = (2.0 / (PI * n as f64)).sqrt() * (1.0 - 1.0 / (4.0 * n as f64));
        assert!((v / approx - 1.0).abs() < 1e-11);
    }

    #[test]
    fn tails() {
        assert!((binom_upper_tail(1, 2, 0.5) - 0.75).abs() < 1e-15);
        assert!((binom_upper_tail(2, 2, 0.5) - 0.25).abs() < 1e-15);
        assert_eq!(binom_upper_tail(0, 7, 0.1), 1.0);
        assert_eq!(binom_upper_tail(8, 7, 0.1), 0.0);
    }

    #[test]
    fn logprob_sum_and_sentinel() {
        let s = LogProb::sum(&[LogProb::from_prob(0.25), LogProb::from_prob(0.5), LogProb::ZERO]);
        assert!((s.prob() - 0.75).abs() < 1e-15);
        assert!(LogProb::sum(&[]).is_zero());
        assert!(LogProb::sum(&[LogProb::ZERO]).is_zero());
        assert_eq!((LogProb::ZERO * LogProb::ONE), LogProb::ZERO);
        assert_eq!(LogProb::ZERO.rel_diff(LogProb::ZERO), 0.0);
        assert!(LogProb::ZERO.rel_diff(LogProb::ONE).is_infinite());
    }

    #[test]
    fn normal_functions() {
        assert!((std_normal_cdf(1.0) - std_normal_cdf(-1.0) - 0.682_689_492_137_085_9).abs() < 1e-14);
        assert!((q_function(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn parity_bias_cases() {
        assert_eq!(parity_bias(0.5, 3), 0.0);
        assert!((parity_bias(0.3, 1) - 0.16).abs() < 1e-15);
        // q - p negative; even power.
        assert!((parity_bias(0.7, 1) - 0.16).abs() < 1e-15);
        assert_eq!(parity_bias(0.3, 10_000), 0.0);
    }
}

//! Composite and adaptive Gauss–Legendre quadrature on a finite interval.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;

const ORDER: usize = 16;

/// Nodes and weights of the `ORDER`-point rule on `[-1, 1]`.
fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(ORDER);
        (x.try_into().unwrap(), w.try_into().unwrap())
    })
}

/// Gauss–Legendre nodes and weights of the given order on `[-1, 1]`, by
/// Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=order {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            deriv = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / deriv;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// `panels` equal panels of the 16-point rule over `[a, b]`.
pub fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = rule();
    let h = (b - a) / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .map(|j| {
            let lo = a + j as f64 * h;
            let mid = lo + 0.5 * h;
            let s: f64 = nodes.iter().zip(weights).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum();
            0.5 * h * s
        })
        .collect();
    pairwise_sum(&parts)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Halving level reached: the estimate uses `2^levels` panels.
    pub levels: u32,
    /// Relative change between the last two levels.
    pub rel_change: f64,
}

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_LEVELS: u32 = 20;

/// Halves the panel width until two successive composite estimates agree to
/// `rel_tol`, giving up after `max_levels` halvings.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, max_levels: u32) -> Result<Quadrature> {
    if b <= a {
        return Ok(Quadrature { value: 0.0, levels: 0, rel_change: 0.0 });
    }
    let mut prev = composite(&f, a, b, 1);
    let mut change = f64::INFINITY;
    for level in 1..=max_levels {
        let cur = composite(&f, a, b, 1 << level);
        change = if cur == prev { 0.0 } else { (cur - prev).abs() / cur.abs() };
        // Two halvings at least, so a coarse rule cannot agree by accident.
        if level >= 2 && change <= rel_tol {
            return Ok(Quadrature { value: cur, levels: level, rel_change: change });
        }
        prev = cur;
    }
    Err(Error::Quadrature { achieved: change, levels: max_levels })
}

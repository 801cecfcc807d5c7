use serde::Serialize;

use crate::error::{param_err, Result};

/// Vertex count and one edge probability per graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    n: usize,
    p: Vec<f64>,
}

impl ModelParams {
    pub fn new(n: usize, p: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return param_err(format!("vertex count must be at least 2, got {n}"));
        }
        if p.is_empty() {
            return param_err("need at least one edge probability");
        }
        if let Some(bad) = p.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return param_err(format!("edge probability {bad} outside (0, 1)"));
        }
        Ok(Self { n, p })
    }

    pub fn single(n: usize, p: f64) -> Result<Self> {
        Self::new(n, vec![p])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of graphs.
    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn q(&self, i: usize) -> f64 {
        1.0 - self.p[i]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    /// `N = n(n-1)/2`, the number of vertex pairs.
    pub fn pairs(&self) -> u64 {
        let n = self.n as u64;
        n * (n - 1) / 2
    }

    /// `n(n-1)`: the largest possible degree sum.
    pub fn max_degree_sum(&self) -> u64 {
        2 * self.pairs()
    }

    pub(crate) fn check_graph(&self, i: usize) -> Result<()> {
        if i >= self.k() {
            return param_err(format!("graph index {i} out of range for k = {}", self.k()));
        }
        Ok(())
    }

    /// The single-graph parameters of graph `i`.
    pub fn component(&self, i: usize) -> Result<ModelParams> {
        self.check_graph(i)?;
        Ok(Self { n: self.n, p: vec![self.p[i]] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let m = ModelParams::new(5, vec![0.2, 0.9]).unwrap();
        assert_eq!(m.pairs(), 10);
        assert_eq!(m.max_degree_sum(), 20);
        assert_eq!(m.k(), 2);
        assert!((m.q(1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ModelParams::new(1, vec![0.5]).is_err());
        assert!(ModelParams::new(4, vec![]).is_err());
        assert!(ModelParams::new(4, vec![0.0]).is_err());
        assert!(ModelParams::new(4, vec![1.0]).is_err());
        assert!(ModelParams::new(4, vec![f64::NAN]).is_err());
        assert!(ModelParams::single(4, 0.5).unwrap().component(1).is_err());
    }
}

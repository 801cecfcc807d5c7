//! Experiment plans: which models, sizes, edge probabilities and event.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso::{count_in, counts_collide, fingerprint_threshold_set, BorelSet, CollisionMode};
use crate::models::Model;
use crate::params::ModelParams;
use crate::sequence::degree_sum;

/// A per-graph constant, or one shared by all graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Shared(f64),
    PerGraph(Vec<f64>),
}

impl Coefficient {
    fn get(&self, i: usize, k: usize) -> Result<f64> {
        match self {
            Self::Shared(c) => Ok(*c),
            Self::PerGraph(v) if v.len() == k => Ok(v[i]),
            Self::PerGraph(v) => Err(Error::Config(format!("{} per-graph coefficients for k = {k}", v.len()))),
        }
    }
}

/// `n ↦ (p_1, …, p_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "camelCase", deny_unknown_fields)]
pub enum PRule {
    /// `c · n^{-β}`
    Power { c: Coefficient, beta: f64 },
    /// `c · ln n / n`
    LogOverN { c: Coefficient },
    Constant { p: Coefficient },
}

impl PRule {
    pub fn probs(&self, n: usize, k: usize) -> Result<Vec<f64>> {
        let x = n as f64;
        (0..k)
            .map(|i| {
                Ok(match self {
                    Self::Power { c, beta } => c.get(i, k)? * x.powf(-beta),
                    Self::LogOverN { c } => c.get(i, k)? * x.ln() / x,
                    Self::Constant { p } => p.get(i, k)?,
                })
            })
            .collect()
    }

    pub fn params(&self, n: usize, k: usize) -> Result<ModelParams> {
        ModelParams::new(n, self.probs(n, k)?).map_err(|e| Error::Config(format!("p rule at n = {n}: {e}")))
    }
}

/// The event whose probability is tracked across the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum EventSpec {
    /// Two graphs share their count of vertices with degree in `[⌊n min p⌋, ∞)`.
    FbPairCollision,
    /// All graphs share that count.
    FbAllCollision,
    /// The degree sum of one graph is odd.
    SumOdd { graph: usize },
    SumAtLeast { graph: usize, value: u64 },
    SumAtMost { graph: usize, value: u64 },
    Never,
}

impl EventSpec {
    pub fn name(&self) -> String {
        match self {
            Self::FbPairCollision => "fb-pair-collision".into(),
            Self::FbAllCollision => "fb-all-collision".into(),
            Self::SumOdd { graph } => format!("sum-odd[{graph}]"),
            Self::SumAtLeast { graph, value } => format!("sum-at-least-{value}[{graph}]"),
            Self::SumAtMost { graph, value } => format!("sum-at-most-{value}[{graph}]"),
            Self::Never => "never".into(),
        }
    }

    pub fn collision_mode(&self) -> Option<CollisionMode> {
        match self {
            Self::FbPairCollision => Some(CollisionMode::AnyPair),
            Self::FbAllCollision => Some(CollisionMode::All),
            _ => None,
        }
    }

    fn graph(&self) -> Option<usize> {
        match self {
            Self::SumOdd { graph } | Self::SumAtLeast { graph, .. } | Self::SumAtMost { graph, .. } => Some(*graph),
            _ => None,
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.collision_mode().is_some() && k < 2 {
            return Err(Error::Config(format!("{} needs k >= 2", self.name())));
        }
        if let Some(g) = self.graph() {
            if g >= k {
                return Err(Error::Config(format!("{} refers to graph {g} but k = {k}", self.name())));
            }
        }
        Ok(())
    }

    /// The event at one `n`, as a predicate on the `k` degree vectors.
    pub fn bind(&self, params: &ModelParams) -> BoundEvent {
        BoundEvent { spec: self.clone(), set: fingerprint_threshold_set(params) }
    }
}

#[derive(Clone, Debug)]
pub struct BoundEvent {
    spec: EventSpec,
    set: BorelSet,
}

impl BoundEvent {
    pub fn threshold_set(&self) -> &BorelSet {
        &self.set
    }

    pub fn holds(&self, seqs: &[&[u32]]) -> bool {
        match &self.spec {
            EventSpec::FbPairCollision | EventSpec::FbAllCollision => {
                let counts: Vec<usize> = seqs.iter().map(|d| count_in(d, &self.set)).collect();
                counts_collide(&counts, self.spec.collision_mode().unwrap())
            }
            EventSpec::SumOdd { graph } => degree_sum(seqs[*graph]) % 2 == 1,
            EventSpec::SumAtLeast { graph, value } => degree_sum(seqs[*graph]) >= *value,
            EventSpec::SumAtMost { graph, value } => degree_sum(seqs[*graph]) <= *value,
            EventSpec::Never => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentPlan {
    pub n_grid: Vec<usize>,
    pub p_rule: PRule,
    pub k: usize,
    pub event: EventSpec,
    pub replicates: u64,
    pub seed: u64,
    pub models: Vec<Model>,
    /// Suppresses the regime advisories.
    #[serde(default)]
    pub allow_out_of_regime: bool,
}

/// Fewest replicates a plan may ask for.
pub const MIN_REPLICATES: u64 = 100;

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("nGrid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("nGrid must be strictly increasing".into()));
        }
        if self.replicates < MIN_REPLICATES {
            return Err(Error::Config(format!("replicates = {} below {MIN_REPLICATES}", self.replicates)));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models listed".into()));
        }
        let mut seen = self.models.clone();
        seen.sort_by_key(|m| m.tag());
        seen.dedup();
        if seen.len() != self.models.len() {
            return Err(Error::Config("models listed twice".into()));
        }
        self.event.validate(self.k)?;
        for &n in &self.n_grid {
            self.p_rule.params(n, self.k)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = r#"{
        "nGrid": [16, 32],
        "pRule": {"rule": "power", "c": 1.0, "beta": 0.7},
        "k": 2,
        "event": {"kind": "fbPairCollision"},
        "replicates": 200,
        "seed": 5,
        "models": ["B", "D"]
    }"#;

    #[test]
    fn parses_and_validates() {
        let plan = ExperimentPlan::from_json(PLAN).unwrap();
        assert_eq!(plan.n_grid, vec![16, 32]);
        assert_eq!(plan.models, vec![Model::B, Model::D]);
        assert!(!plan.allow_out_of_regime);
        let p = plan.p_rule.probs(32, 2).unwrap();
        assert!((p[0] - 32f64.powf(-0.7)).abs() < 1e-15 && p[0] == p[1]);
    }

    #[test]
    fn rejects_bad_plans() {
        for (from, to) in [
            ("[16, 32]", "[32, 16]"),
            ("\"replicates\": 200", "\"replicates\": 99"),
            ("\"k\": 2", "\"k\": 1"),
            ("\"seed\": 5", "\"seed\": 5, \"extra\": 1"),
            ("\"beta\": 0.7", "\"beta\": 0.7, \"gamma\": 1"),
            ("[\"B\", \"D\"]", "[\"B\", \"B\"]"),
            ("[\"B\", \"D\"]", "[\"X\"]"),
            ("\"c\": 1.0", "\"c\": [1.0, 2.0, 3.0]"),
            ("\"c\": 1.0", "\"c\": 100.0"),
        ] {
            let text = PLAN.replace(from, to);
            assert!(ExperimentPlan::from_json(&text).is_err(), "{to}");
        }
    }

    #[test]
    fn rules() {
        let r = PRule::LogOverN { c: Coefficient::PerGraph(vec![1.0, 2.0]) };
        let p = r.probs(100, 2).unwrap();
        assert!((p[1] - 2.0 * 100f64.ln() / 100.0).abs() < 1e-15);
        let r = PRule::Constant { p: Coefficient::Shared(0.5) };
        assert_eq!(r.probs(7, 3).unwrap(), vec![0.5; 3]);
    }

    #[test]
    fn event_predicates() {
        let params = ModelParams::new(4, vec![0.5, 0.5]).unwrap();
        let fb = EventSpec::FbPairCollision.bind(&params);
        assert_eq!(fb.threshold_set(), &BorelSet::at_least(2));
        assert!(fb.holds(&[&[2, 2, 1, 1], &[3, 1, 3, 1]]));
        assert!(!fb.holds(&[&[2, 2, 1, 1], &[3, 3, 3, 1]]));
        assert!(EventSpec::SumOdd { graph: 1 }.bind(&params).holds(&[&[0; 4], &[1, 0, 0, 0]]));
        assert!(EventSpec::SumAtLeast { graph: 0, value: 4 }.bind(&params).holds(&[&[1; 4], &[0; 4]]));
        assert!(!EventSpec::SumAtMost { graph: 0, value: 3 }.bind(&params).holds(&[&[1; 4], &[0; 4]]));
        assert!(!EventSpec::Never.bind(&params).holds(&[&[1; 4], &[1; 4]]));
        assert!(EventSpec::SumOdd { graph: 2 }.validate(2).is_err());
    }
}

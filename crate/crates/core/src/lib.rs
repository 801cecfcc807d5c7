//! Exact and Monte Carlo machinery for comparing random degree-sequence
//! models with the degree sequence of `G(n, p)`.

pub mod error;
pub mod event;
pub mod exec;
pub mod graph;
pub mod integrated;
pub mod iso;
pub mod lab;
pub mod models;
pub mod numerics;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod samplers;
pub mod sequence;

pub use error::{Error, Result};
pub use exec::{with_threads, Execution};
pub use graph::LabeledGraph;
pub use models::Model;
pub use numerics::LogProb;
pub use params::ModelParams;
pub use sequence::{DegreeSequence, MultiSequence};
pub use lab::{collision_bound_check, run_plan, DecayReport, ExperimentPlan};
pub use oracle::{enumerate_graph_counts, exact_event_prob, verify_identity_suite, GraphCountTable, IdentityReport};
pub use samplers::{Sampler, SamplerConfig};

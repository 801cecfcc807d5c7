//! Experiment engine: event frequencies across an `n` grid, decay fits and
//! the collision bound comparison.

pub mod plan;
pub mod report;
pub mod run;
pub mod stats;

pub use plan::{Coefficient, EventSpec, ExperimentPlan, PRule};
pub use report::{csv_string, summary_json, write_csv};
pub use run::{collision_bound_check, run_plan, CollisionBoundReport, DecayReport};
pub use stats::{chi_square_gof, fit_power_law, max_binomial_mode, ChiSquare, Estimate, PowerLawFit};

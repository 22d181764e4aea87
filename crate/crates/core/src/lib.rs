//! Scenario simulation for a sampling-based path planner, and mutation
//! analysis of the planner's cost-function weights.
//!
//! The pipeline: parse a [`scenario::Scenario`], propagate its objects,
//! run the [`planner`] to get the ego [`path::Path`], then compare the
//! original planner against weight [`mutation`] mutants under the
//! [`oracles`] and summarise the result as weight [`coverage`].

pub mod cli;
pub mod coverage;
pub mod geometry;
pub mod metrics;
pub mod mutation;
pub mod oracles;
pub mod path;
pub mod planner;
pub mod propagate;
pub mod scenario;

pub use coverage::{evaluate_suite, CoverageReport, KillMatrix, TestSuite};
pub use mutation::{canonical_operators, MutationOperator};
pub use oracles::{OracleKind, OracleThresholds};
pub use path::Path;
pub use planner::{plan, PlannerConfig, Weights};
pub use scenario::{parse_scenario, Scenario};

//! Budget-preserving multifidelity Monte Carlo estimation.
//!
//! The pipeline runs pilot statistics ([`ensemble`]), then model selection
//! ([`selection`]), then integer sample allocation under a hard budget
//! ([`allocation`]), then the nested estimator ([`estimator`]). [`experiment`]
//! repeats the estimator against a reference value, and [`benchmarks`] provides
//! the short-column and Burgers model ensembles. [`harness`] drives everything
//! from a TOML configuration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod benchmarks;
pub mod ensemble;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod harness;
pub mod input;
pub mod model;
#[cfg(test)]
mod properties;
pub mod rng;
pub mod selection;

pub use allocation::{
    allocate_mc, allocate_modified, allocate_naive_rounded, brute_force_mip, mse_for_counts, optimal_alpha,
    predict_mse, solve_relaxed, variance_ratio, Method, RelaxedSolution, SamplingPlan,
};
pub use ensemble::{draw_pilot, estimate_statistics, EnsembleStatistics, PilotMatrix};
pub use error::{Error, Result};
pub use estimator::{mc_estimate, mfmc_estimate, Estimate};
pub use experiment::{run_experiment, ExperimentReport, ExperimentSettings};
pub use input::{InputDistribution, LogNormalConvention, RandomInputSpec};
pub use model::{FnModel, Model};
pub use rng::SeedStream;
pub use selection::{select_models, SelectionResult};

//! Repeated-trial comparison of Monte Carlo and multifidelity estimators
//! against an independent reference value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{allocate_mc, allocate_modified, allocate_naive_rounded, Method, SamplingPlan};
use crate::ensemble::EnsembleStatistics;
use crate::error::{Error, Result};
use crate::estimator::mfmc_estimate;
use crate::input::RandomInputSpec;
use crate::model::{evaluate_at, Model};
use crate::rng::SeedStream;

const TAG_REFERENCE: u64 = 0x5245_4600;
const TAG_RUNS: u64 = 0x5255_4e00;
const REFERENCE_CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    /// Absolute budgets, in cost units.
    pub budgets: Vec<f64>,
    pub n_runs: usize,
    pub reference_samples: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
}

/// Result of `n_runs` independent runs of one method at one budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub plan: SamplingPlan,
    pub estimate_mean: f64,
    pub per_run_estimates: Vec<f64>,
    pub empirical_mse: f64,
    pub relative_mse: f64,
    pub reference: f64,
    pub realized_cost_per_run: f64,
    /// Run `j` used [`run_seed`]`(master_seed, method, budget_index, j)`.
    pub master_seed: u64,
}

impl EstimateReport {
    /// Assemble from per-run estimates: `e = (1/N) Σ (y_j − y_ref)²`, `ê = e / y_ref²`.
    pub fn from_runs(plan: SamplingPlan, per_run_estimates: Vec<f64>, reference: f64, master_seed: u64) -> Self {
        let n = per_run_estimates.len() as f64;
        let estimate_mean = per_run_estimates.iter().sum::<f64>() / n;
        let empirical_mse = per_run_estimates.iter().map(|y| (y - reference).powi(2)).sum::<f64>() / n;
        EstimateReport {
            realized_cost_per_run: plan.realized_cost,
            plan,
            estimate_mean,
            per_run_estimates,
            empirical_mse,
            relative_mse: empirical_mse / (reference * reference),
            reference,
            master_seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RowOutcome {
    Complete(EstimateReport),
    Infeasible { reason: String },
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub budget_index: usize,
    pub budget: f64,
    pub method: Method,
    pub outcome: RowOutcome,
}

impl ExperimentRow {
    pub fn report(&self) -> Option<&EstimateReport> {
        match &self.outcome {
            RowOutcome::Complete(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub model_ids: Vec<String>,
    pub costs: Vec<f64>,
    pub reference: f64,
    pub reference_samples: usize,
    pub settings: ExperimentSettings,
    /// Ordered by budget index, then by `settings.methods`.
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn all_complete(&self) -> bool {
        self.rows.iter().all(|r| r.report().is_some())
    }

    pub fn row(&self, budget_index: usize, method: Method) -> Option<&ExperimentRow> {
        self.rows.iter().find(|r| r.budget_index == budget_index && r.method == method)
    }
}

fn method_tag(m: Method) -> u64 {
    match m {
        Method::Mc => 1,
        Method::Modified => 2,
        Method::NaiveRounded => 3,
        Method::Exhaustive => 4,
    }
}

/// Seed of run `j` for `method` at budget `budget_index`.
pub fn run_seed(master_seed: u64, method: Method, budget_index: usize, run: usize) -> u64 {
    SeedStream::new(master_seed)
        .path(&[TAG_RUNS, method_tag(method), budget_index as u64, run as u64])
        .seed()
}

/// Plain Monte Carlo reference `y_ref` from `samples` draws, independent of every run.
///
/// Work is split into fixed-size chunks with their own substreams so the value
/// does not depend on the thread count.
pub fn reference_value(model: &dyn Model, input: &RandomInputSpec, samples: usize, master_seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidInput("reference needs at least one sample".into()));
    }
    let root = SeedStream::new(master_seed).child(TAG_REFERENCE);
    let chunks = samples.div_ceil(REFERENCE_CHUNK);
    let sums: Vec<Result<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = REFERENCE_CHUNK.min(samples - c * REFERENCE_CHUNK);
            let mut rng = root.child(c as u64).rng();
            let mut z = vec![0.0; input.dimension()];
            let mut sum = 0.0;
            for j in 0..len {
                input.sample_into(&mut rng, &mut z);
                sum += evaluate_at(model, &z, c * REFERENCE_CHUNK + j)?;
            }
            Ok(sum)
        })
        .collect();
    let total: f64 = sums.into_iter().collect::<Result<Vec<_>>>()?.into_iter().sum();
    Ok(total / samples as f64)
}

pub fn plan_for(method: Method, stats: &EnsembleStatistics, budget: f64) -> Result<SamplingPlan> {
    match method {
        Method::Mc => allocate_mc(stats, budget),
        Method::Modified => allocate_modified(stats, budget),
        Method::NaiveRounded => allocate_naive_rounded(stats, budget),
        Method::Exhaustive => Err(Error::InvalidInput("the exhaustive oracle is not an experiment method".into())),
    }
}

/// Run `n_runs` independent estimates of one plan, in parallel, deterministically.
pub fn run_plan(
    models: &[&dyn Model],
    plan: &SamplingPlan,
    input: &RandomInputSpec,
    seeds: impl Fn(usize) -> u64 + Sync,
    n_runs: usize,
) -> Result<Vec<f64>> {
    let models = &models[..plan.k()];
    let runs: Vec<Result<f64>> = (0..n_runs)
        .into_par_iter()
        .map(|j| mfmc_estimate(models, plan, input, seeds(j)).map(|e| e.value))
        .collect();
    runs.into_iter().collect()
}

/// Compare methods over a list of budgets.
///
/// `models` and `stats` must describe the same ordered ensemble (the selected
/// models, high-fidelity first). Infeasible budgets become marked rows.
pub fn run_experiment(
    models: &[&dyn Model],
    stats: &EnsembleStatistics,
    input: &RandomInputSpec,
    settings: &ExperimentSettings,
) -> Result<ExperimentReport> {
    stats.validate()?;
    if models.len() != stats.k() {
        return Err(Error::PlanMismatch { plan: stats.k(), models: models.len() });
    }
    if settings.n_runs == 0 {
        return Err(Error::InvalidInput("n_runs must be at least 1".into()));
    }
    let reference = reference_value(models[0], input, settings.reference_samples, settings.seed)?;

    let mut rows = Vec::new();
    for (b, &budget) in settings.budgets.iter().enumerate() {
        for &method in &settings.methods {
            let outcome = match plan_for(method, stats, budget) {
                Err(e) => RowOutcome::Infeasible { reason: e.to_string() },
                Ok(plan) => {
                    let seeds = |j| run_seed(settings.seed, method, b, j);
                    match run_plan(models, &plan, input, seeds, settings.n_runs) {
                        Ok(values) => RowOutcome::Complete(EstimateReport::from_runs(plan, values, reference, settings.seed)),
                        Err(e) => RowOutcome::Failed { reason: e.to_string() },
                    }
                }
            };
            rows.push(ExperimentRow { budget_index: b, budget, method, outcome });
        }
    }
    Ok(ExperimentReport {
        model_ids: stats.ids.clone(),
        costs: stats.costs.clone(),
        reference,
        reference_samples: settings.reference_samples,
        settings: settings.clone(),
        rows,
    })
}

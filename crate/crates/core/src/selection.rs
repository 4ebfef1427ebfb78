//! Exhaustive model selection over subsets that contain the high-fidelity model.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleStatistics;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_MODELS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Original model indices: high-fidelity first, then decreasing ρ².
    pub selected_indices: Vec<usize>,
    pub predicted_variance: f64,
    pub benchmark_budget: f64,
}

impl SelectionResult {
    pub fn selected_ids(&self, stats: &EnsembleStatistics) -> Vec<String> {
        self.selected_indices.iter().map(|&i| stats.ids[i].clone()).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SelectionOptions {
    /// Budget used to scale the predicted variance; defaults to `w₁`.
    pub benchmark_budget: Option<f64>,
    pub max_models: usize,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions { benchmark_budget: None, max_models: DEFAULT_MAX_MODELS }
    }
}

pub fn select_models(stats: &EnsembleStatistics) -> Result<SelectionResult> {
    select_models_with(stats, SelectionOptions::default())
}

/// Whether the ordered candidate satisfies `w_{j−1}/w_j > (ρ²_{j−1} − ρ²_j)/(ρ²_j − ρ²_{j+1})` everywhere.
pub(crate) fn cost_ratio_violation(costs: &[f64], rho_sq_ext: &[f64]) -> Option<usize> {
    (1..costs.len()).find(|&j| {
        // cross-multiplied; the right denominator is positive under strict ordering
        costs[j - 1] * (rho_sq_ext[j] - rho_sq_ext[j + 1]) <= costs[j] * (rho_sq_ext[j - 1] - rho_sq_ext[j])
    })
}

/// Predicted estimator variance of an ordered, admissible candidate at budget `p`.
pub fn predicted_variance(sigma1: f64, costs: &[f64], rho_sq_ext: &[f64], budget: f64) -> f64 {
    let s: f64 = (0..costs.len())
        .map(|j| (costs[j] * (rho_sq_ext[j] - rho_sq_ext[j + 1])).sqrt())
        .sum();
    sigma1 * sigma1 / budget * s * s
}

pub fn select_models_with(stats: &EnsembleStatistics, opts: SelectionOptions) -> Result<SelectionResult> {
    stats.validate()?;
    let k = stats.k();
    if k > opts.max_models {
        return Err(Error::TooManyModels { count: k, cap: opts.max_models });
    }
    let rho_sq: Vec<f64> = stats.rho1.iter().map(|r| r * r).collect();
    for a in 0..k {
        for b in a + 1..k {
            if rho_sq[a] == rho_sq[b] {
                return Err(Error::TiedCorrelations { first: a, second: b });
            }
        }
    }

    let w1 = stats.costs[0];
    let p = opts.benchmark_budget.unwrap_or(w1);
    if !(p > 0.0) {
        return Err(Error::InvalidInput(format!("benchmark budget must be positive, got {p}")));
    }
    let sigma1 = stats.sigma[0];

    // Surrogates sorted once by decreasing ρ²; any subset then inherits the order.
    let mut order: Vec<usize> = (1..k).collect();
    order.sort_by(|&a, &b| rho_sq[b].total_cmp(&rho_sq[a]));

    let mut best = vec![0];
    let mut best_v = sigma1 * sigma1 * w1 / p;
    let mut best_key = (1usize, vec![0usize]);

    let mut candidate = Vec::with_capacity(k);
    let mut costs = Vec::with_capacity(k);
    let mut rho_ext = Vec::with_capacity(k + 1);
    for mask in 0u64..(1u64 << (k - 1)) {
        candidate.clear();
        candidate.push(0);
        candidate.extend(order.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i));
        if rho_sq[0] <= candidate.iter().skip(1).map(|&i| rho_sq[i]).fold(0.0, f64::max) {
            // a surrogate at least as correlated as f¹ itself breaks the strict order
            continue;
        }
        costs.clear();
        costs.extend(candidate.iter().map(|&i| stats.costs[i]));
        rho_ext.clear();
        rho_ext.extend(candidate.iter().map(|&i| rho_sq[i]));
        rho_ext.push(0.0);
        if rho_ext[candidate.len() - 1] <= 0.0 || cost_ratio_violation(&costs, &rho_ext).is_some() {
            continue;
        }
        let v = predicted_variance(sigma1, &costs, &rho_ext, p);
        let mut sorted = candidate.clone();
        sorted.sort_unstable();
        let key = (candidate.len(), sorted);
        if v < best_v || (v == best_v && key < best_key) {
            best_v = v;
            best.clone_from(&candidate);
            best_key = key;
        }
    }
    Ok(SelectionResult { selected_indices: best, predicted_variance: best_v, benchmark_budget: p })
}

//! Sample allocation under a computational budget.
//!
//! The relaxed problem (real-valued evaluation counts) has a closed-form
//! minimizer for every number of leading counts pinned to 1. The modified
//! allocation pins the first count that falls below one, re-solves for the
//! remaining models, and repeats; the result never exceeds the budget. The
//! naive baseline instead rounds sub-unit counts up and may overspend.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleStatistics;
use crate::error::{Error, Result};
use crate::selection::cost_ratio_violation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mc,
    Modified,
    NaiveRounded,
    /// Integer enumeration oracle.
    Exhaustive,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Modified => "modified",
            Method::NaiveRounded => "naive-rounded",
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(Method::Mc),
            "modified" => Ok(Method::Modified),
            "naive-rounded" | "naive" => Ok(Method::NaiveRounded),
            "exhaustive" => Ok(Method::Exhaustive),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }
}

/// Minimizer of the relaxed problem with the first `pivot_index` counts held fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedSolution {
    /// Full-length counts; entries before `pivot_index` are the fixed prefix.
    pub m_real: Vec<f64>,
    /// Control-variate weights for models 2..k.
    pub alpha: Vec<f64>,
    /// `m_j / m_pivot` for `j ≥ pivot_index`; zero on the fixed prefix.
    pub ratios: Vec<f64>,
    pub pivot_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub method: Method,
    pub m: Vec<u64>,
    pub alpha: Vec<f64>,
    pub predicted_mse: f64,
    pub realized_cost: f64,
    pub budget: f64,
}

impl SamplingPlan {
    fn build(method: Method, m: Vec<u64>, alpha: Vec<f64>, budget: f64, stats: &EnsembleStatistics) -> Result<Self> {
        let realized_cost = m.iter().zip(&stats.costs).map(|(&c, w)| c as f64 * w).sum();
        let mut plan = SamplingPlan { method, m, alpha, predicted_mse: f64::NAN, realized_cost, budget };
        plan.predicted_mse = predict_mse(&plan, stats)?;
        Ok(plan)
    }

    pub fn k(&self) -> usize {
        self.m.len()
    }

    /// Realized cost in units of the high-fidelity cost.
    pub fn effective_budget(&self, w1: f64) -> f64 {
        self.realized_cost / w1
    }
}

/// Optimal control-variate weights `α_j = ρ_{1,j} σ₁ / σ_j`, j = 2..k.
pub fn optimal_alpha(stats: &EnsembleStatistics) -> Vec<f64> {
    (1..stats.k()).map(|j| stats.rho1[j] * stats.sigma[0] / stats.sigma[j]).collect()
}

/// Check strict ordering of ρ² (down to the appended zero) and the cost-ratio conditions.
pub fn check_admissible(stats: &EnsembleStatistics) -> Result<()> {
    stats.validate()?;
    let ext = stats.rho_sq_extended();
    if let Some(index) = (1..ext.len()).find(|&i| ext[i - 1] <= ext[i]) {
        return Err(Error::UnorderedCorrelations { index });
    }
    if let Some(index) = cost_ratio_violation(&stats.costs, &ext) {
        return Err(Error::CostRatio { index });
    }
    Ok(())
}

/// Relaxed minimizer with `fixed_prefix_len` leading counts pinned to 1.
pub fn solve_relaxed(stats: &EnsembleStatistics, budget: f64, fixed_prefix_len: usize) -> Result<RelaxedSolution> {
    solve_relaxed_with_prefix(stats, budget, &vec![1.0; fixed_prefix_len])
}

/// Relaxed minimizer with an arbitrary fixed prefix of counts.
///
/// The free block `j ≥ i` (with `i = prefix.len()`) is
/// `r_j = √((w_i/w_j)(ρ²_j − ρ²_{j+1})/(ρ²_i − ρ²_{i+1}))`,
/// `m_i = (p − Σ_{j<i} m_j w_j) / Σ_{j≥i} w_j r_j` and `m_j = m_i r_j`.
pub fn solve_relaxed_with_prefix(stats: &EnsembleStatistics, budget: f64, prefix: &[f64]) -> Result<RelaxedSolution> {
    check_admissible(stats)?;
    let k = stats.k();
    let i = prefix.len();
    if i >= k {
        return Err(Error::InvalidInput(format!("prefix of length {i} leaves no free model among {k}")));
    }
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidInput(format!("budget must be positive, got {budget}")));
    }
    let w = &stats.costs;
    let fixed: f64 = prefix.iter().zip(w).map(|(m, w)| m * w).sum();
    let residual = budget - fixed;
    if !(residual > 0.0) {
        return Err(Error::InsufficientResidualBudget { budget, fixed });
    }

    let ext = stats.rho_sq_extended();
    let gap = |j: usize| ext[j] - ext[j + 1];
    let mut ratios = vec![0.0; k];
    for j in i..k {
        ratios[j] = if j == i { 1.0 } else { (w[i] / w[j] * gap(j) / gap(i)).sqrt() };
    }
    let denom: f64 = (i..k).map(|j| w[j] * ratios[j]).sum();
    let pivot = residual / denom;

    let mut m_real = prefix.to_vec();
    m_real.extend((i..k).map(|j| pivot * ratios[j]));
    Ok(RelaxedSolution { m_real, alpha: optimal_alpha(stats), ratios, pivot_index: i })
}

/// Sequence of relaxed solutions visited by the pinning loop; the last one is final.
pub fn pinning_sequence(stats: &EnsembleStatistics, budget: f64) -> Result<Vec<RelaxedSolution>> {
    let minimum: f64 = stats.costs.iter().sum();
    if !(budget >= minimum) {
        return Err(Error::BudgetInfeasible { budget, minimum });
    }
    let k = stats.k();
    let mut steps = vec![solve_relaxed(stats, budget, 0)?];
    loop {
        let current = steps.last().expect("non-empty");
        // only indices below k−1 are ever pinned
        let Some(i) = (current.pivot_index..k.saturating_sub(1)).find(|&i| current.m_real[i] < 1.0) else {
            break;
        };
        steps.push(solve_relaxed(stats, budget, i + 1)?);
    }
    let last = steps.last().expect("non-empty");
    debug_assert!(last.m_real[k - 1] >= 1.0 - 1e-12, "residual budget always covers the last model");
    Ok(steps)
}

/// Budget-preserving allocation: pin sub-unit counts to 1 one at a time, then floor.
pub fn allocate_modified(stats: &EnsembleStatistics, budget: f64) -> Result<SamplingPlan> {
    let steps = pinning_sequence(stats, budget)?;
    let last = steps.last().expect("non-empty");
    let pinned = last.pivot_index;
    let mut m: Vec<u64> = last
        .m_real
        .iter()
        .enumerate()
        .map(|(j, &v)| if j < pinned { 1 } else { (v.floor() as u64).max(1) })
        .collect();

    // Flooring cannot exceed the budget in exact arithmetic; undo a round-off overshoot
    // by trimming the last count that is strictly above its predecessor.
    let cost = |m: &[u64]| m.iter().zip(&stats.costs).map(|(&c, w)| c as f64 * w).sum::<f64>();
    while cost(&m) > budget {
        let j = (1..m.len())
            .rev()
            .find(|&j| m[j] > m[j - 1])
            .unwrap_or(0);
        if m[j] <= 1 {
            break;
        }
        m[j] -= 1;
    }
    debug_assert!(m.windows(2).all(|p| p[0] <= p[1]));
    SamplingPlan::build(Method::Modified, m, last.alpha.clone(), budget, stats)
}

/// Baseline: floor counts ≥ 1, round counts < 1 up to 1. May exceed the budget.
pub fn allocate_naive_rounded(stats: &EnsembleStatistics, budget: f64) -> Result<SamplingPlan> {
    let relaxed = solve_relaxed(stats, budget, 0)?;
    let m = relaxed
        .m_real
        .iter()
        .map(|&v| if v >= 1.0 { v.floor() as u64 } else { v.ceil() as u64 })
        .collect();
    SamplingPlan::build(Method::NaiveRounded, m, relaxed.alpha, budget, stats)
}

/// Plain Monte Carlo on the high-fidelity model with `n = ⌊p/w₁⌋` samples.
pub fn allocate_mc(stats: &EnsembleStatistics, budget: f64) -> Result<SamplingPlan> {
    stats.validate()?;
    let w1 = stats.costs[0];
    let n = (budget / w1).floor();
    if !(n >= 1.0) {
        return Err(Error::BudgetInfeasible { budget, minimum: w1 });
    }
    let hf = stats.subset(&[0])?;
    SamplingPlan::build(Method::Mc, vec![n as u64], Vec::new(), budget, &hf)
}

/// MSE of the estimator for real-valued counts and arbitrary weights:
/// `σ₁²/m₁ + Σ_{i≥2} (1/m_{i−1} − 1/m_i)(α_i²σ_i² − 2α_iσ_iσ₁ρ_{1,i})`.
pub fn mse_for_counts(m: &[f64], alpha: &[f64], stats: &EnsembleStatistics) -> f64 {
    let s1 = stats.sigma[0];
    let mut e = s1 * s1 / m[0];
    for i in 1..m.len() {
        let a = alpha[i - 1];
        let si = stats.sigma[i];
        e += (1.0 / m[i - 1] - 1.0 / m[i]) * (a * a * si * si - 2.0 * a * si * s1 * stats.rho1[i]);
    }
    e
}

pub fn predict_mse(plan: &SamplingPlan, stats: &EnsembleStatistics) -> Result<f64> {
    let k = plan.m.len();
    if k == 0 || k > stats.k() {
        return Err(Error::PlanMismatch { plan: k, models: stats.k() });
    }
    if plan.alpha.len() + 1 != k {
        return Err(Error::InvalidInput(format!("{} weights for {k} models", plan.alpha.len())));
    }
    if let Some(index) = plan.m.iter().position(|&c| c == 0) {
        return Err(Error::ZeroCount { index });
    }
    let m: Vec<f64> = plan.m.iter().map(|&c| c as f64).collect();
    Ok(mse_for_counts(&m, &plan.alpha, stats))
}

/// `√(e(MFMC)/e(MC))` at equal relaxed budget; below 1 iff multifidelity wins.
pub fn variance_ratio(stats: &EnsembleStatistics) -> Result<f64> {
    check_admissible(stats)?;
    let ext = stats.rho_sq_extended();
    let w1 = stats.costs[0];
    Ok((0..stats.k()).map(|i| (stats.costs[i] / w1 * (ext[i] - ext[i + 1])).sqrt()).sum())
}

/// Exhaustive integer search over `1 ≤ m₁ ≤ … ≤ m_k ≤ cap` with `Σ w m ≤ p`, weights fixed at α*.
///
/// Returns the lexicographically smallest minimizer. Intended for k ≤ 4 and small caps.
pub fn brute_force_mip(stats: &EnsembleStatistics, budget: f64, cap: u64) -> Result<SamplingPlan> {
    stats.validate()?;
    let k = stats.k();
    let alpha = optimal_alpha(stats);
    let mut best: Option<(f64, Vec<u64>)> = None;
    let mut current = Vec::with_capacity(k);

    fn recurse(
        stats: &EnsembleStatistics,
        alpha: &[f64],
        cap: u64,
        remaining: f64,
        current: &mut Vec<u64>,
        best: &mut Option<(f64, Vec<u64>)>,
    ) {
        let k = stats.k();
        let j = current.len();
        if j == k {
            let m: Vec<f64> = current.iter().map(|&c| c as f64).collect();
            let e = mse_for_counts(&m, alpha, stats);
            if best.as_ref().is_none_or(|(b, _)| e < *b) {
                *best = Some((e, current.clone()));
            }
            return;
        }
        let lo = current.last().copied().unwrap_or(1);
        // every later model needs at least `c` evaluations too
        let tail_cost: f64 = stats.costs[j..].iter().sum();
        let mut c = lo;
        while c <= cap && c as f64 * tail_cost <= remaining {
            current.push(c);
            recurse(stats, alpha, cap, remaining - c as f64 * stats.costs[j], current, best);
            current.pop();
            c += 1;
        }
    }

    recurse(stats, &alpha, cap, budget, &mut current, &mut best);
    let (_, m) = best.ok_or(Error::EmptyFeasibleSet)?;
    SamplingPlan::build(Method::Exhaustive, m, alpha, budget, stats)
}

/// Predicted MSE as a function of the count of model `index`, with the models
/// before it pinned at 1 and the models after it re-optimized by the relaxed
/// solution. Covers every integer count that leaves budget for the suffix.
pub fn pinned_count_profile(stats: &EnsembleStatistics, budget: f64, index: usize) -> Result<Vec<(u64, f64)>> {
    check_admissible(stats)?;
    let k = stats.k();
    if index + 1 >= k {
        return Err(Error::InvalidInput(format!("model {index} has no free suffix among {k} models")));
    }
    let w = &stats.costs;
    let fixed: f64 = w[..index].iter().sum();
    let mut prefix = vec![1.0; index + 1];
    let mut out = Vec::new();
    let mut c = 1u64;
    while fixed + c as f64 * w[index] < budget {
        prefix[index] = c as f64;
        let sol = solve_relaxed_with_prefix(stats, budget, &prefix)?;
        out.push((c, mse_for_counts(&sol.m_real, &sol.alpha, stats)));
        c += 1;
    }
    if out.is_empty() {
        return Err(Error::BudgetInfeasible { budget, minimum: fixed + w[index] });
    }
    Ok(out)
}

//! The multifidelity estimator on nested shared samples, and plain Monte Carlo.

use crate::allocation::SamplingPlan;
use crate::error::{Error, Result};
use crate::input::RandomInputSpec;
use crate::model::{evaluate_at, Model};
use crate::rng::SeedStream;

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Nominal cost `Σ w_i m_i` of the evaluations performed.
    pub cost: f64,
    pub evaluations: Vec<u64>,
}

/// `ŷ = ȳ¹_{m₁} + Σ_{i≥2} α_i (ȳⁱ_{m_i} − ȳⁱ_{m_{i−1}})`.
///
/// `m_k` realizations are drawn once; model `i` sees the first `m_i` of them, so
/// each `ȳⁱ_{m_{i−1}}` is a prefix average of the samples behind `ȳⁱ_{m_i}`.
pub fn mfmc_estimate(
    models: &[&dyn Model],
    plan: &SamplingPlan,
    input: &RandomInputSpec,
    seed: u64,
) -> Result<Estimate> {
    let k = plan.m.len();
    if k == 0 || models.len() != k {
        return Err(Error::PlanMismatch { plan: k, models: models.len() });
    }
    if plan.alpha.len() + 1 != k {
        return Err(Error::InvalidInput(format!("{} weights for {k} models", plan.alpha.len())));
    }
    if let Some(index) = plan.m.iter().position(|&c| c == 0) {
        return Err(Error::ZeroCount { index });
    }
    if plan.m.windows(2).any(|p| p[0] > p[1]) {
        return Err(Error::InvalidInput(format!("evaluation counts must be nondecreasing, got {:?}", plan.m)));
    }

    let total = plan.m[k - 1];
    let mut rng = SeedStream::new(seed).rng();
    let mut z = vec![0.0; input.dimension()];
    let mut full = vec![0.0; k];
    // running sum of model i over the first m_{i−1} samples
    let mut prefix = vec![0.0; k];
    for j in 0..total {
        input.sample_into(&mut rng, &mut z);
        for i in 0..k {
            if j >= plan.m[i] {
                continue;
            }
            full[i] += evaluate_at(models[i], &z, j as usize)?;
            if i > 0 && j + 1 == plan.m[i - 1] {
                prefix[i] = full[i];
            }
        }
    }

    let mut value = full[0] / plan.m[0] as f64;
    for i in 1..k {
        let coarse = prefix[i] / plan.m[i - 1] as f64;
        let fine = full[i] / plan.m[i] as f64;
        value += plan.alpha[i - 1] * (fine - coarse);
    }
    let cost = plan.m.iter().zip(models).map(|(&c, m)| c as f64 * m.cost()).sum();
    Ok(Estimate { value, cost, evaluations: plan.m.clone() })
}

/// Mean of `n` i.i.d. evaluations.
pub fn mc_estimate(model: &dyn Model, n: u64, input: &RandomInputSpec, seed: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("Monte Carlo needs at least one sample".into()));
    }
    let mut rng = SeedStream::new(seed).rng();
    let mut z = vec![0.0; input.dimension()];
    let mut sum = 0.0;
    for j in 0..n {
        input.sample_into(&mut rng, &mut z);
        sum += evaluate_at(model, &z, j as usize)?;
    }
    Ok(sum / n as f64)
}

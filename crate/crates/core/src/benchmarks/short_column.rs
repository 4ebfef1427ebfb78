//! Analytic short-column limit-state function and four cheaper surrogates.
//!
//! Inputs: width `z₁ ~ U[5,15]`, depth `z₂ ~ U[15,25]`, yield stress `z₃`
//! log-normal, bending moment `z₄ ~ N(2000, 400²)`, axial force `z₅ ~ N(500, 100²)`.

use crate::error::{Error, Result};
use crate::input::{InputDistribution, LogNormalConvention, RandomInputSpec};
use crate::model::Model;

pub const COSTS: [f64; 5] = [100.0, 50.0, 20.0, 10.0, 5.0];

/// Correlations with `f¹` from a 1000-sample pilot, as published.
pub const PUBLISHED_RHO: [f64; 5] = [1.0, 0.99994645, 0.6980721, 0.92928154, 0.99863737];

#[derive(Clone, Debug)]
pub struct ShortColumnModel {
    index: usize,
    id: String,
    cost: f64,
}

impl ShortColumnModel {
    /// `index` is 1-based, `1..=5`.
    pub fn new(index: usize) -> Result<Self> {
        if !(1..=5).contains(&index) {
            return Err(Error::InvalidInput(format!("short-column model index must be 1..=5, got {index}")));
        }
        Ok(ShortColumnModel { index, id: format!("f{index}"), cost: COSTS[index - 1] })
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

pub fn short_column_eval(model_index: usize, z: &[f64]) -> Result<f64> {
    if z.len() != 5 {
        return Err(Error::InvalidInput(format!("short column takes 5 inputs, got {}", z.len())));
    }
    let [z1, z2, z3, z4, z5] = [z[0], z[1], z[2], z[3], z[4]];
    if z1 == 0.0 || z2 == 0.0 || z3 == 0.0 {
        return Err(Error::InvalidInput("z₁, z₂ and z₃ must be nonzero".into()));
    }
    let bending = z4 / (z1 * z2 * z2 * z3);
    let y = match model_index {
        1 => 1.0 - 4.0 * bending - (z5 / (z1 * z2 * z3)).powi(2),
        2 => 1.0 - 3.8 * bending - (z5 * (1.0 + (z4 - 2000.0) / 4000.0) / (z1 * z2 * z3)).powi(2),
        3 => 1.0 - bending - (z5 * (1.0 + z4) / (z2 * z3)).powi(2),
        4 => 1.0 - bending - (z5 * (1.0 + z4) / (z1 * z2 * z3)).powi(2),
        5 => 1.0 - bending - (z5 / (z1 * z2 * z3)).powi(2),
        other => return Err(Error::InvalidInput(format!("no short-column model {other}"))),
    };
    Ok(y)
}

impl Model for ShortColumnModel {
    fn id(&self) -> &str {
        &self.id
    }
    fn cost(&self) -> f64 {
        self.cost
    }
    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        short_column_eval(self.index, z)
    }
}

pub fn short_column_input(convention: LogNormalConvention) -> RandomInputSpec {
    RandomInputSpec::new(vec![
        InputDistribution::Uniform { low: 5.0, high: 15.0 },
        InputDistribution::Uniform { low: 15.0, high: 25.0 },
        InputDistribution::LogNormal { mean: 5.0, std_dev: 0.5, convention },
        InputDistribution::Normal { mean: 2000.0, std_dev: 400.0 },
        InputDistribution::Normal { mean: 500.0, std_dev: 100.0 },
    ])
    .expect("static parameters are valid")
}

/// All five models, `f¹` first.
pub fn short_column_models() -> Vec<ShortColumnModel> {
    (1..=5).map(|i| ShortColumnModel::new(i).expect("index in range")).collect()
}

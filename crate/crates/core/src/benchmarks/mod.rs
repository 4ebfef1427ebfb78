//! The short-column and inviscid-Burgers model ensembles.

pub mod burgers;
pub mod pod;
pub mod short_column;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleStatistics;
use crate::error::{Error, Result};
use crate::input::{InputDistribution, RandomInputSpec};
use crate::model::Model;
use crate::rng::SeedStream;
use burgers::{burgers_qoi, BurgersConfig};
use pod::{snapshot_matrix, PodBasis, SnapshotBasis};

pub use short_column::{short_column_eval, short_column_input, short_column_models, ShortColumnModel};

/// Burgers model costs in seconds per evaluation, FOM first, then `d = 3, 5, 10, 15`.
pub const BURGERS_PUBLISHED_COSTS: [f64; 5] = [30.5625e-4, 5.5174e-4, 5.8633e-4, 6.3854e-4, 7.4522e-4];

/// Burgers correlations with the FOM from a 100-sample pilot, as published.
pub const BURGERS_PUBLISHED_RHO: [f64; 5] = [1.0, 0.99766585, 0.98343683, 0.99999507, 0.99999882];

pub const BURGERS_ROM_DIMS: [usize; 4] = [3, 5, 10, 15];

pub const BURGERS_Z1_RANGE: (f64, f64) = (0.5, 3.5);
pub const BURGERS_Z2_RANGE: (f64, f64) = (2e-4, 2e-3);

fn published(rho: &[f64], costs: &[f64], sigma: &[f64]) -> Result<EnsembleStatistics> {
    if sigma.len() != rho.len() {
        return Err(Error::InvalidInput(format!("need {} standard deviations, got {}", rho.len(), sigma.len())));
    }
    let ids = (1..=rho.len()).map(|i| format!("f{i}")).collect();
    EnsembleStatistics::new(ids, sigma.to_vec(), rho.to_vec(), costs.to_vec(), 0)
}

/// Published short-column `(ρ, w)` with caller-supplied standard deviations.
pub fn short_column_published_statistics(sigma: &[f64]) -> Result<EnsembleStatistics> {
    published(&short_column::PUBLISHED_RHO, &short_column::COSTS, sigma)
}

/// Published Burgers `(ρ, w)` with caller-supplied standard deviations.
pub fn burgers_published_statistics(sigma: &[f64]) -> Result<EnsembleStatistics> {
    published(&BURGERS_PUBLISHED_RHO, &BURGERS_PUBLISHED_COSTS, sigma)
}

pub fn burgers_input(z2_range: (f64, f64)) -> Result<RandomInputSpec> {
    RandomInputSpec::new(vec![
        InputDistribution::Uniform { low: BURGERS_Z1_RANGE.0, high: BURGERS_Z1_RANGE.1 },
        InputDistribution::Uniform { low: z2_range.0, high: z2_range.1 },
    ])
}

#[derive(Clone, Debug)]
pub struct BurgersFom {
    pub config: BurgersConfig,
    id: String,
    cost: f64,
}

impl BurgersFom {
    pub fn new(config: BurgersConfig, cost: f64) -> Self {
        BurgersFom { config, id: "f1".into(), cost }
    }
}

impl Model for BurgersFom {
    fn id(&self) -> &str {
        &self.id
    }
    fn cost(&self) -> f64 {
        self.cost
    }
    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        burgers_qoi(&self.config, z)
    }
}

#[derive(Clone, Debug)]
pub struct BurgersRom {
    pub basis: Arc<SnapshotBasis>,
    id: String,
    cost: f64,
}

impl BurgersRom {
    pub fn new(id: impl Into<String>, basis: Arc<SnapshotBasis>, cost: f64) -> Self {
        BurgersRom { basis, id: id.into(), cost }
    }
}

impl Model for BurgersRom {
    fn id(&self) -> &str {
        &self.id
    }
    fn cost(&self) -> f64 {
        self.cost
    }
    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        self.basis.rom_qoi(z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BurgersOptions {
    pub config: BurgersConfig,
    pub z2_range: (f64, f64),
    pub training_samples: usize,
    pub rom_dims: Vec<usize>,
    /// FOM cost followed by one cost per ROM.
    pub costs: Vec<f64>,
}

impl Default for BurgersOptions {
    fn default() -> Self {
        BurgersOptions {
            config: BurgersConfig::default(),
            z2_range: BURGERS_Z2_RANGE,
            training_samples: 50,
            rom_dims: BURGERS_ROM_DIMS.to_vec(),
            costs: BURGERS_PUBLISHED_COSTS.to_vec(),
        }
    }
}

/// FOM plus POD-ROM surrogates trained on a shared snapshot set.
#[derive(Clone, Debug)]
pub struct BurgersEnsemble {
    pub fom: BurgersFom,
    pub roms: Vec<BurgersRom>,
    pub input: RandomInputSpec,
    pub pod: PodBasis,
    pub training: Vec<Vec<f64>>,
}

impl BurgersEnsemble {
    pub fn build(options: &BurgersOptions, seed: u64) -> Result<Self> {
        if options.costs.len() != options.rom_dims.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} costs given for {} models",
                options.costs.len(),
                options.rom_dims.len() + 1
            )));
        }
        let input = burgers_input(options.z2_range)?;
        let mut rng = SeedStream::new(seed).rng();
        let training: Vec<Vec<f64>> = (0..options.training_samples).map(|_| input.sample(&mut rng)).collect();
        let snapshots = snapshot_matrix(&options.config, &training)?;
        let pod = PodBasis::from_snapshots(&snapshots)?;
        let roms = options
            .rom_dims
            .iter()
            .zip(&options.costs[1..])
            .enumerate()
            .map(|(i, (&d, &cost))| {
                let basis = SnapshotBasis::new(options.config, &pod, d)?;
                Ok(BurgersRom::new(format!("f{}", i + 2), Arc::new(basis), cost))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BurgersEnsemble { fom: BurgersFom::new(options.config, options.costs[0]), roms, input, pod, training })
    }

    pub fn models(&self) -> Vec<&dyn Model> {
        let mut out: Vec<&dyn Model> = vec![&self.fom];
        out.extend(self.roms.iter().map(|r| r as &dyn Model));
        out
    }

    /// A random point of the parameter domain, for spot checks.
    pub fn sample_parameter<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.input.sample(rng)
    }
}

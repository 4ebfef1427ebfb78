//! Random input vectors with independent coordinates.

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the two parameters of a log-normal coordinate are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogNormalConvention {
    /// `mean` and `std_dev` describe `ln z`.
    #[default]
    UnderlyingNormal,
    /// `mean` and `std_dev` are the moments of `z` itself.
    Moments,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputDistribution {
    Uniform {
        low: f64,
        high: f64,
    },
    Normal {
        mean: f64,
        std_dev: f64,
    },
    LogNormal {
        mean: f64,
        std_dev: f64,
        #[serde(default)]
        convention: LogNormalConvention,
    },
}

impl InputDistribution {
    /// Location and scale of `ln z` for a log-normal coordinate.
    pub fn log_parameters(mean: f64, std_dev: f64, convention: LogNormalConvention) -> (f64, f64) {
        match convention {
            LogNormalConvention::UnderlyingNormal => (mean, std_dev),
            LogNormalConvention::Moments => {
                let var_ln = (1.0 + (std_dev / mean).powi(2)).ln();
                (mean.ln() - 0.5 * var_ln, var_ln.sqrt())
            }
        }
    }

    fn sampler(&self) -> Result<Sampler> {
        let bad = |msg: String| Error::InvalidInput(msg);
        match *self {
            InputDistribution::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(bad(format!("uniform bounds must satisfy a < b, got [{low}, {high}]")));
                }
                Uniform::new(low, high)
                    .map(Sampler::Uniform)
                    .map_err(|e| bad(e.to_string()))
            }
            InputDistribution::Normal { mean, std_dev } => {
                if !(mean.is_finite() && std_dev.is_finite() && std_dev > 0.0) {
                    return Err(bad(format!("normal needs finite mean and std_dev > 0, got ({mean}, {std_dev})")));
                }
                Normal::new(mean, std_dev)
                    .map(Sampler::Normal)
                    .map_err(|e| bad(e.to_string()))
            }
            InputDistribution::LogNormal { mean, std_dev, convention } => {
                if !(mean.is_finite() && std_dev.is_finite() && std_dev > 0.0) {
                    return Err(bad(format!("log-normal needs finite mean and std_dev > 0, got ({mean}, {std_dev})")));
                }
                if convention == LogNormalConvention::Moments && mean <= 0.0 {
                    return Err(bad(format!("log-normal mean must be positive, got {mean}")));
                }
                let (mu, sigma) = Self::log_parameters(mean, std_dev, convention);
                LogNormal::new(mu, sigma)
                    .map(Sampler::LogNormal)
                    .map_err(|e| bad(e.to_string()))
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Sampler {
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
    LogNormal(LogNormal<f64>),
}

impl Sampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::Normal(d) => d.sample(rng),
            Sampler::LogNormal(d) => d.sample(rng),
        }
    }
}

/// Distribution of the random input vector `Z`, one independent law per coordinate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<InputDistribution>", into = "Vec<InputDistribution>")]
pub struct RandomInputSpec {
    coordinates: Vec<InputDistribution>,
    samplers: Vec<Sampler>,
}

impl RandomInputSpec {
    pub fn new(coordinates: Vec<InputDistribution>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(Error::InvalidInput("input dimension must be at least 1".into()));
        }
        let samplers = coordinates
            .iter()
            .map(InputDistribution::sampler)
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomInputSpec { coordinates, samplers })
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[InputDistribution] {
        &self.coordinates
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.samplers.len());
        for (slot, s) in out.iter_mut().zip(&self.samplers) {
            *slot = s.draw(rng);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut z = vec![0.0; self.dimension()];
        self.sample_into(rng, &mut z);
        z
    }
}

impl PartialEq for RandomInputSpec {
    fn eq(&self, other: &Self) -> bool {
        self.coordinates == other.coordinates
    }
}

impl TryFrom<Vec<InputDistribution>> for RandomInputSpec {
    type Error = Error;
    fn try_from(v: Vec<InputDistribution>) -> Result<Self> {
        RandomInputSpec::new(v)
    }
}

impl From<RandomInputSpec> for Vec<InputDistribution> {
    fn from(s: RandomInputSpec) -> Self {
        s.coordinates
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    #[test]
    fn rejects_bad_parameters() {
        assert!(RandomInputSpec::new(vec![]).is_err());
        assert!(RandomInputSpec::new(vec![InputDistribution::Uniform { low: 1.0, high: 1.0 }]).is_err());
        assert!(RandomInputSpec::new(vec![InputDistribution::Normal { mean: 0.0, std_dev: 0.0 }]).is_err());
        assert!(RandomInputSpec::new(vec![InputDistribution::LogNormal {
            mean: 5.0,
            std_dev: -0.5,
            convention: LogNormalConvention::UnderlyingNormal
        }])
        .is_err());
    }

    #[test]
    fn lognormal_conventions_hit_their_moments() {
        let n = 200_000;
        for (conv, expect_mean) in [
            (LogNormalConvention::UnderlyingNormal, (5.0f64 + 0.125).exp()),
            (LogNormalConvention::Moments, 5.0),
        ] {
            let spec = RandomInputSpec::new(vec![InputDistribution::LogNormal {
                mean: 5.0,
                std_dev: 0.5,
                convention: conv,
            }])
            .unwrap();
            let mut rng = SeedStream::new(11).rng();
            let mean = (0..n).map(|_| spec.sample(&mut rng)[0]).sum::<f64>() / n as f64;
            assert!((mean / expect_mean - 1.0).abs() < 0.01, "{conv:?}: {mean} vs {expect_mean}");
        }
    }

    #[test]
    fn serde_round_trip() {
        let spec = RandomInputSpec::new(vec![
            InputDistribution::Uniform { low: 5.0, high: 15.0 },
            InputDistribution::LogNormal { mean: 5.0, std_dev: 0.5, convention: LogNormalConvention::Moments },
        ])
        .unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        let back: RandomInputSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(spec, back);
    }
}

//! The textbook distributions used for priors and simple data models.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, LogNormal, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{AbcError, Result};
use crate::seed::SeedSpec;

/// A parametric law. Normal and log-normal are parameterised by variance,
/// gamma by shape and rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum StandardDist {
    Normal { mean: f64, var: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    LogNormal { mu: f64, var: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Integers `1..=k`, returned as reals.
    DiscreteUniform { k: u64 },
}

/// A validated sampler for one [`StandardDist`].
#[derive(Debug, Clone, Copy)]
pub enum Sampler {
    Normal(Normal<f64>),
    Exponential(Exp<f64>),
    Gamma(Gamma<f64>),
    LogNormal(LogNormal<f64>),
    Uniform(Uniform<f64>),
    DiscreteUniform(Uniform<u64>),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(AbcError::param(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(AbcError::param(format!("{name} must be finite, got {v}")))
    }
}

impl StandardDist {
    pub fn sampler(&self) -> Result<Sampler> {
        let bad = |e: &dyn std::fmt::Display| AbcError::param(format!("{self:?}: {e}"));
        Ok(match *self {
            StandardDist::Normal { mean, var } => {
                finite("normal mean", mean)?;
                positive("normal variance", var)?;
                Sampler::Normal(Normal::new(mean, var.sqrt()).map_err(|e| bad(&e))?)
            }
            StandardDist::Exponential { rate } => {
                positive("exponential rate", rate)?;
                Sampler::Exponential(Exp::new(rate).map_err(|e| bad(&e))?)
            }
            StandardDist::Gamma { shape, rate } => {
                positive("gamma shape", shape)?;
                positive("gamma rate", rate)?;
                Sampler::Gamma(Gamma::new(shape, 1.0 / rate).map_err(|e| bad(&e))?)
            }
            StandardDist::LogNormal { mu, var } => {
                finite("log-normal location", mu)?;
                positive("log-normal variance", var)?;
                Sampler::LogNormal(LogNormal::new(mu, var.sqrt()).map_err(|e| bad(&e))?)
            }
            StandardDist::Uniform { lo, hi } => {
                finite("uniform lower bound", lo)?;
                finite("uniform upper bound", hi)?;
                if lo >= hi {
                    return Err(AbcError::param(format!("uniform bounds must satisfy lo < hi, got [{lo}, {hi}]")));
                }
                Sampler::Uniform(Uniform::new_inclusive(lo, hi).map_err(|e| bad(&e))?)
            }
            StandardDist::DiscreteUniform { k } => {
                if k == 0 {
                    return Err(AbcError::param("discrete uniform needs k >= 1"));
                }
                Sampler::DiscreteUniform(Uniform::new_inclusive(1, k).map_err(|e| bad(&e))?)
            }
        })
    }
}

impl Sampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Exponential(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::LogNormal(d) => d.sample(rng),
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::DiscreteUniform(d) => d.sample(rng) as f64,
        }
    }
}

pub fn sample_standard(dist: &StandardDist, n: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(AbcError::param("sample size must be at least 1"));
    }
    let sampler = dist.sampler()?;
    let mut rng = seed.rng();
    Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
}

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{KernelSpec, SummaryMetric, TiePolicy};
use crate::error::{AbcError, Result};
use crate::seed::StreamRng;

/// Statistical distance between two raw samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Distance {
    Cvm {
        #[serde(default)]
        ties: TiePolicy,
    },
    Wasserstein,
    Mmd {
        #[serde(default)]
        kernel: KernelSpec,
    },
}

/// How a simulated dataset is compared with the observed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbcMethod {
    /// Norm of the difference of summary vectors. With `mad_draws`, the
    /// metric must be Euclidean and each coordinate is divided by its
    /// prior-predictive MAD, estimated from that many draws.
    Summary {
        metric: SummaryMetric,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mad_draws: Option<usize>,
    },
    /// A distance between the raw samples, optionally after taking logs.
    Discrepancy {
        distance: Distance,
        #[serde(default)]
        log: bool,
    },
    /// Toad lag features: per-lag return-count gaps and per-lag distances
    /// between non-return displacements, blended with weight `omega` on the counts.
    Combined {
        omega: f64,
        distance: Distance,
        #[serde(default)]
        log: bool,
    },
}

impl AbcMethod {
    pub fn validate(&self) -> Result<()> {
        match self {
            AbcMethod::Summary { metric, mad_draws } => {
                if let Some(n) = mad_draws {
                    if *metric != SummaryMetric::Euclidean {
                        return Err(AbcError::Config("MAD scaling applies to the Euclidean metric only".into()));
                    }
                    if *n < 100 {
                        return Err(AbcError::Config(format!("MAD estimation needs at least 100 prior draws, got {n}")));
                    }
                }
                Ok(())
            }
            AbcMethod::Discrepancy { distance, .. } => distance_ok(distance),
            AbcMethod::Combined { omega, distance, .. } => {
                if !(0.0..=1.0).contains(omega) {
                    return Err(AbcError::param(format!("omega must lie in [0, 1], got {omega}")));
                }
                if matches!(distance, Distance::Mmd { .. }) {
                    return Err(AbcError::Config("combined lag distances support cvm and wasserstein only".into()));
                }
                distance_ok(distance)
            }
        }
    }

    /// Short label such as `wass-log` or `stat`.
    pub fn label(&self) -> String {
        let base = |d: &Distance| match d {
            Distance::Cvm { .. } => "cvm",
            Distance::Wasserstein => "wass",
            Distance::Mmd { .. } => "mmd",
        };
        match self {
            AbcMethod::Summary { .. } => "stat".into(),
            AbcMethod::Discrepancy { distance, log } | AbcMethod::Combined { distance, log, .. } => {
                if *log {
                    format!("{}-log", base(distance))
                } else {
                    base(distance).into()
                }
            }
        }
    }
}

fn distance_ok(d: &Distance) -> Result<()> {
    match d {
        Distance::Mmd { kernel } => kernel.validate(),
        _ => Ok(()),
    }
}

/// Prior probabilities of the candidate models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPrior(Vec<f64>);

impl ModelPrior {
    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(AbcError::param(format!("model prior must be non-negative and finite: {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(AbcError::param("model prior has no mass"));
        }
        Ok(Self(weights.into_iter().map(|w| w / total).collect()))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn sampler(&self) -> Result<ModelSampler> {
        if self.0.len() == 1 {
            return Ok(ModelSampler::Single);
        }
        WeightedIndex::new(&self.0)
            .map(ModelSampler::Weighted)
            .map_err(|e| AbcError::param(e.to_string()))
    }
}

pub(crate) enum ModelSampler {
    Single,
    Weighted(WeightedIndex<f64>),
}

impl ModelSampler {
    #[inline]
    pub(crate) fn sample(&self, rng: &mut StreamRng) -> usize {
        match self {
            ModelSampler::Single => 0,
            ModelSampler::Weighted(w) => w.sample(rng),
        }
    }
}

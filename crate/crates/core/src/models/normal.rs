//! Point-null test of a normal mean.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_theta, sample_len, DataShape, Dataset, Model, ModelSpec, SummaryMap};
use crate::error::{AbcError, Result};
use crate::seed::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalHypothesis {
    /// `μ = μ̃`.
    Null,
    /// `μ ~ N(μ̃, cσ²)`.
    Alternative,
}

/// Which quantity the gamma prior is placed on when σ is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariancePrior {
    #[default]
    Variance,
    Precision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variance", rename_all = "snake_case")]
pub enum VarianceModel {
    Known { sigma: f64 },
    /// `Ga(shape, rate)` on σ² (or on 1/σ²).
    Unknown { shape: f64, rate: f64, on: VariancePrior },
}

impl VarianceModel {
    pub fn unknown_default() -> Self {
        VarianceModel::Unknown {
            shape: 0.1,
            rate: 0.1,
            on: VariancePrior::Variance,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalMeanModel {
    hypothesis: NormalHypothesis,
    mu_tilde: f64,
    variance: VarianceModel,
    c: f64,
    prior_var: Option<Gamma<f64>>,
    summary: SummaryMap,
}

impl NormalMeanModel {
    pub fn new(hypothesis: NormalHypothesis, mu_tilde: f64, variance: VarianceModel, c: f64) -> Result<Self> {
        if !mu_tilde.is_finite() {
            return Err(AbcError::param("null mean must be finite"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(AbcError::param(format!("prior scale c must be positive, got {c}")));
        }
        let (prior_var, summary) = match variance {
            VarianceModel::Known { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(AbcError::param(format!("sigma must be positive, got {sigma}")));
                }
                (None, SummaryMap::Mean)
            }
            VarianceModel::Unknown { shape, rate, .. } => {
                if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
                    return Err(AbcError::param(format!(
                        "variance prior needs positive shape and rate, got ({shape}, {rate})"
                    )));
                }
                let g = Gamma::new(shape, 1.0 / rate).map_err(|e| AbcError::param(e.to_string()))?;
                (Some(g), SummaryMap::MeanVariance)
            }
        };
        Ok(Self {
            hypothesis,
            mu_tilde,
            variance,
            c,
            prior_var,
            summary,
        })
    }

    pub fn hypothesis(&self) -> NormalHypothesis {
        self.hypothesis
    }

    fn n_params(&self) -> usize {
        let mean = usize::from(self.hypothesis == NormalHypothesis::Alternative);
        let var = usize::from(self.prior_var.is_some());
        mean + var
    }

    /// `(μ, σ²)` from a parameter vector laid out as `[μ?, σ²?]`.
    fn mean_and_var(&self, theta: &[f64]) -> (f64, f64) {
        let mut it = theta.iter().copied();
        let mu = match self.hypothesis {
            NormalHypothesis::Null => self.mu_tilde,
            NormalHypothesis::Alternative => it.next().unwrap_or(self.mu_tilde),
        };
        let var = match self.variance {
            VarianceModel::Known { sigma } => sigma * sigma,
            VarianceModel::Unknown { .. } => it.next().unwrap_or(1.0),
        };
        (mu, var)
    }
}

impl Model for NormalMeanModel {
    fn label(&self) -> String {
        match self.hypothesis {
            NormalHypothesis::Null => "M0".into(),
            NormalHypothesis::Alternative => "M1".into(),
        }
    }

    fn param_names(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        if self.hypothesis == NormalHypothesis::Alternative {
            names.push("mu");
        }
        if self.prior_var.is_some() {
            names.push("sigma2");
        }
        names
    }

    fn sample_prior(&self, rng: &mut StreamRng) -> Vec<f64> {
        let mut theta = Vec::with_capacity(2);
        let var = match (&self.prior_var, self.variance) {
            (Some(g), VarianceModel::Unknown { on, .. }) => loop {
                let draw = g.sample(rng);
                let v = match on {
                    VariancePrior::Variance => draw,
                    VariancePrior::Precision => 1.0 / draw,
                };
                // shape 0.1 occasionally underflows to 0 or overflows 1/x
                if v > 0.0 && v.is_finite() {
                    break v;
                }
            },
            (_, VarianceModel::Known { sigma }) => sigma * sigma,
            _ => unreachable!(),
        };
        if self.hypothesis == NormalHypothesis::Alternative {
            let z: f64 = rng.sample(StandardNormal);
            theta.push(self.mu_tilde + (self.c * var).sqrt() * z);
        }
        if self.prior_var.is_some() {
            theta.push(var);
        }
        theta
    }

    fn simulate(&self, theta: &[f64], shape: &DataShape, rng: &mut StreamRng) -> Result<Dataset> {
        check_theta(theta, self.n_params(), "normal mean model")?;
        let n = sample_len(shape)?;
        let (mu, var) = self.mean_and_var(theta);
        if !(var > 0.0) {
            return Err(AbcError::param(format!("variance must be positive, got {var}")));
        }
        let sd = var.sqrt();
        Ok(Dataset::Sample(
            (0..n)
                .map(|_| mu + sd * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        ))
    }

    fn summary_map(&self) -> &SummaryMap {
        &self.summary
    }
}

/// `(M0, M1)` for testing `μ = μ̃` against `μ ~ N(μ̃, cσ²)`.
pub fn normal_mean_models(mu_tilde: f64, variance: VarianceModel, c: f64) -> Result<[ModelSpec; 2]> {
    Ok([
        ModelSpec::new(1, NormalMeanModel::new(NormalHypothesis::Null, mu_tilde, variance, c)?),
        ModelSpec::new(2, NormalMeanModel::new(NormalHypothesis::Alternative, mu_tilde, variance, c)?),
    ])
}

//! Exponential, log-normal and gamma(2) models with a common sufficient statistic.

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::{Distribution, Exp, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_theta, sample_len, DataShape, Dataset, Model, ModelSpec, SummaryMap};
use crate::error::{AbcError, Result};
use crate::seed::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpFamilyKind {
    /// `y ~ Exp(θ)`, `θ ~ Exp(1)`.
    Exponential,
    /// `y ~ LN(θ, 1)`, `θ ~ N(0, 1)`.
    LogNormal,
    /// `y ~ Ga(2, θ)`, `θ ~ Exp(1)`.
    Gamma2,
}

impl ExpFamilyKind {
    pub const ALL: [ExpFamilyKind; 3] = [ExpFamilyKind::Exponential, ExpFamilyKind::LogNormal, ExpFamilyKind::Gamma2];

    /// The parameter used to generate observed data; each gives `E[y] = 2`.
    pub fn generating_theta(self) -> f64 {
        match self {
            ExpFamilyKind::Exponential => 0.5,
            ExpFamilyKind::LogNormal => LN_2 - 0.5,
            ExpFamilyKind::Gamma2 => 1.0,
        }
    }

    pub fn mean(self, theta: f64) -> f64 {
        match self {
            ExpFamilyKind::Exponential => 1.0 / theta,
            ExpFamilyKind::LogNormal => (theta + 0.5).exp(),
            ExpFamilyKind::Gamma2 => 2.0 / theta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExpFamilyModel {
    kind: ExpFamilyKind,
    summary: SummaryMap,
}

impl ExpFamilyModel {
    pub fn new(kind: ExpFamilyKind) -> Self {
        Self {
            kind,
            summary: SummaryMap::ExpFamily,
        }
    }

    pub fn kind(&self) -> ExpFamilyKind {
        self.kind
    }
}

impl Model for ExpFamilyModel {
    fn label(&self) -> String {
        match self.kind {
            ExpFamilyKind::Exponential => "M1".into(),
            ExpFamilyKind::LogNormal => "M2".into(),
            ExpFamilyKind::Gamma2 => "M3".into(),
        }
    }

    fn param_names(&self) -> Vec<&'static str> {
        vec!["theta"]
    }

    fn sample_prior(&self, rng: &mut StreamRng) -> Vec<f64> {
        let theta = match self.kind {
            ExpFamilyKind::LogNormal => rng.sample(StandardNormal),
            _ => loop {
                let t: f64 = rng.sample(Exp1);
                if t > 0.0 {
                    break t;
                }
            },
        };
        vec![theta]
    }

    fn simulate(&self, theta: &[f64], shape: &DataShape, rng: &mut StreamRng) -> Result<Dataset> {
        check_theta(theta, 1, "exponential-family model")?;
        let n = sample_len(shape)?;
        let t = theta[0];
        let y = match self.kind {
            ExpFamilyKind::Exponential => {
                let d = Exp::new(t).map_err(|e| AbcError::param(format!("rate {t}: {e}")))?;
                (0..n).map(|_| d.sample(rng)).collect()
            }
            ExpFamilyKind::LogNormal => (0..n)
                .map(|_| (t + rng.sample::<f64, _>(StandardNormal)).exp())
                .collect(),
            ExpFamilyKind::Gamma2 => {
                if !(t > 0.0) {
                    return Err(AbcError::param(format!("gamma rate must be positive, got {t}")));
                }
                let d = Gamma::new(2.0, 1.0 / t).map_err(|e| AbcError::param(e.to_string()))?;
                (0..n).map(|_| d.sample(rng)).collect()
            }
        };
        Ok(Dataset::Sample(y))
    }

    fn summary_map(&self) -> &SummaryMap {
        &self.summary
    }
}

/// `(M1, M2, M3)`: exponential, log-normal and gamma(2).
pub fn expo_family_models() -> [ModelSpec; 3] {
    [
        ModelSpec::new(1, ExpFamilyModel::new(ExpFamilyKind::Exponential)),
        ModelSpec::new(2, ExpFamilyModel::new(ExpFamilyKind::LogNormal)),
        ModelSpec::new(3, ExpFamilyModel::new(ExpFamilyKind::Gamma2)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SeedSpec;

    #[test]
    fn generating_parameters_give_mean_two() {
        for (i, spec) in expo_family_models().iter().enumerate() {
            let kind = ExpFamilyKind::ALL[i];
            assert!((kind.mean(kind.generating_theta()) - 2.0).abs() < 1e-14);
            let mut rng = SeedSpec::new(21, i as u64).rng();
            let d = spec
                .model
                .simulate(&[kind.generating_theta()], &DataShape::Sample { n: 100_000 }, &mut rng)
                .unwrap();
            let y = d.as_sample().unwrap();
            let n = y.len() as f64;
            let m = y.iter().sum::<f64>() / n;
            let v = y.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
            assert!((m - 2.0).abs() < 3.0 * (v / n).sqrt(), "{kind:?}: mean {m}");
        }
    }

    #[test]
    fn rate_parameterisation_is_not_scale() {
        let [m1, _, m3] = expo_family_models();
        let mut rng = SeedSpec::new(22, 0).rng();
        for (spec, want) in [(&m1, 0.25), (&m3, 0.5)] {
            let d = spec.model.simulate(&[4.0], &DataShape::Sample { n: 50_000 }, &mut rng).unwrap();
            let y = d.as_sample().unwrap();
            let m = y.iter().sum::<f64>() / y.len() as f64;
            assert!((m - want).abs() < 0.02, "{} mean {m}", spec.label());
        }
    }

    #[test]
    fn priors_stay_in_domain() {
        let models = expo_family_models();
        let mut rng = SeedSpec::new(23, 0).rng();
        for _ in 0..10_000 {
            assert!(models[0].model.sample_prior(&mut rng)[0] > 0.0);
            assert!(models[1].model.sample_prior(&mut rng)[0].is_finite());
            assert!(models[2].model.sample_prior(&mut rng)[0] > 0.0);
        }
    }
}

//! Candidate models: a prior sampler, a forward simulator and a summary map
//! for each, plus the observed-data generators used by the studies.

mod expo;
mod gandk;
mod normal;
pub mod toad;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use expo::{expo_family_models, ExpFamilyKind, ExpFamilyModel};
pub use gandk::{gandk_models, GandKModel};
pub use normal::{normal_mean_models, NormalHypothesis, NormalMeanModel, VarianceModel, VariancePrior};
pub use toad::{LocationMatrix, ToadConfig, ToadModel, ToadModelKind};

use crate::discrepancy::{quantile_sorted, sort_values};
use crate::error::{AbcError, Result};
use crate::seed::StreamRng;

/// A simulated or observed dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    /// An i.i.d. sample of length n.
    Sample(Vec<f64>),
    /// A days × toads location matrix; NaN marks a missing record.
    Locations(LocationMatrix),
}

impl Dataset {
    pub fn shape(&self) -> DataShape {
        match self {
            Dataset::Sample(v) => DataShape::Sample { n: v.len() },
            Dataset::Locations(m) => DataShape::Matrix {
                n_days: m.n_days(),
                n_toads: m.n_toads(),
                mask: m.has_missing().then(|| Arc::new(m.missing_mask())),
            },
        }
    }

    pub fn as_sample(&self) -> Result<&[f64]> {
        match self {
            Dataset::Sample(v) => Ok(v),
            Dataset::Locations(_) => Err(AbcError::shape("expected an i.i.d. sample, found a location matrix")),
        }
    }

    pub fn as_locations(&self) -> Result<&LocationMatrix> {
        match self {
            Dataset::Locations(m) => Ok(m),
            Dataset::Sample(_) => Err(AbcError::shape("expected a location matrix, found an i.i.d. sample")),
        }
    }
}

/// What a simulator must produce to be comparable with the observed data.
#[derive(Debug, Clone, PartialEq)]
pub enum DataShape {
    Sample {
        n: usize,
    },
    Matrix {
        n_days: usize,
        n_toads: usize,
        /// Row-major; `true` where the observed record is missing.
        mask: Option<Arc<Vec<bool>>>,
    },
}

/// Maps a dataset to a fixed-length vector of statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SummaryMap {
    /// `ȳ`.
    Mean,
    /// `(ȳ, Σ(y − ȳ)² / (n − 1))`.
    MeanVariance,
    /// `(Σ y, Σ log y, Σ log² y)`.
    ExpFamily,
    /// Type-7 empirical quantiles at the given levels.
    Quantiles { levels: Vec<f64> },
    /// Log quantile gaps and return counts of toad lag displacements.
    ToadLagStats { lags: Vec<usize>, return_radius: f64 },
}

impl SummaryMap {
    pub fn apply(&self, data: &Dataset) -> Result<Vec<f64>> {
        match self {
            SummaryMap::ToadLagStats { lags, return_radius } => {
                let feats = toad::extract_lag_features(data.as_locations()?, lags, *return_radius)?;
                toad::toad_summary_stats(&feats)
            }
            _ => {
                let y = data.as_sample()?;
                if y.is_empty() {
                    return Err(AbcError::InsufficientSample { needed: 1, got: 0 });
                }
                Ok(self.apply_sample(y))
            }
        }
    }

    /// Sample-based maps only; `y` non-empty.
    pub fn apply_sample(&self, y: &[f64]) -> Vec<f64> {
        let n = y.len() as f64;
        match self {
            SummaryMap::Mean => vec![y.iter().sum::<f64>() / n],
            SummaryMap::MeanVariance => {
                let mean = y.iter().sum::<f64>() / n;
                let ss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
                let var = if y.len() > 1 { ss / (n - 1.0) } else { 0.0 };
                vec![mean, var]
            }
            SummaryMap::ExpFamily => {
                let (mut s, mut sl, mut sl2) = (0.0, 0.0, 0.0);
                for &v in y {
                    let l = v.ln();
                    s += v;
                    sl += l;
                    sl2 += l * l;
                }
                vec![s, sl, sl2]
            }
            SummaryMap::Quantiles { .. } => {
                let mut sorted = y.to_vec();
                sort_values(&mut sorted);
                self.apply_sorted(&sorted)
            }
            SummaryMap::ToadLagStats { .. } => unreachable!("toad statistics need a location matrix"),
        }
    }

    /// As [`apply_sample`](Self::apply_sample) for data already sorted.
    pub fn apply_sorted(&self, sorted: &[f64]) -> Vec<f64> {
        match self {
            SummaryMap::Quantiles { levels } => levels.iter().map(|&p| quantile_sorted(sorted, p)).collect(),
            other => other.apply_sample(sorted),
        }
    }
}

/// A candidate model.
pub trait Model: Send + Sync + fmt::Debug {
    fn label(&self) -> String;

    fn param_names(&self) -> Vec<&'static str>;

    /// One parameter vector from the prior; always inside the simulator's domain.
    fn sample_prior(&self, rng: &mut StreamRng) -> Vec<f64>;

    fn simulate(&self, theta: &[f64], shape: &DataShape, rng: &mut StreamRng) -> Result<Dataset>;

    fn summary_map(&self) -> &SummaryMap;

    fn summarize(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.summary_map().apply(data)
    }
}

/// A model together with its 1-based index in the candidate set.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub id: usize,
    pub model: Arc<dyn Model>,
}

impl ModelSpec {
    pub fn new(id: usize, model: impl Model + 'static) -> Self {
        Self {
            id,
            model: Arc::new(model),
        }
    }

    pub fn label(&self) -> String {
        self.model.label()
    }
}

pub(crate) fn check_theta(theta: &[f64], expected: usize, label: &str) -> Result<()> {
    if theta.len() != expected {
        return Err(AbcError::param(format!(
            "{label} takes {expected} parameters, got {}",
            theta.len()
        )));
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(AbcError::param(format!("{label} parameters must be finite")));
    }
    Ok(())
}

pub(crate) fn sample_len(shape: &DataShape) -> Result<usize> {
    match *shape {
        DataShape::Sample { n } if n > 0 => Ok(n),
        DataShape::Sample { .. } => Err(AbcError::param("sample size must be at least 1")),
        DataShape::Matrix { .. } => Err(AbcError::shape("i.i.d. model asked for a location matrix")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_family_summary_two_points() {
        let e = std::f64::consts::E;
        let s = SummaryMap::ExpFamily.apply(&Dataset::Sample(vec![1.0, e])).unwrap();
        assert!((s[0] - (1.0 + e)).abs() < 1e-15);
        assert!((s[1] - 1.0).abs() < 1e-15);
        assert!((s[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantile_summary_on_ten_points() {
        let y: Vec<f64> = (1..=10).rev().map(f64::from).collect();
        let m = SummaryMap::Quantiles { levels: vec![0.1, 0.9] };
        let s = m.apply(&Dataset::Sample(y)).unwrap();
        // type 7: between the 1st/2nd and 9th/10th order statistics
        assert!((s[0] - 1.9).abs() < 1e-12);
        assert!((s[1] - 9.1).abs() < 1e-12);
    }

    #[test]
    fn mean_variance_summary() {
        let s = SummaryMap::MeanVariance.apply(&Dataset::Sample(vec![1.0, 2.0, 3.0, 6.0])).unwrap();
        assert_eq!(s[0], 3.0);
        assert!((s[1] - 14.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sample_maps_reject_matrices() {
        let m = LocationMatrix::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert!(SummaryMap::Mean.apply(&Dataset::Locations(m)).is_err());
    }
}

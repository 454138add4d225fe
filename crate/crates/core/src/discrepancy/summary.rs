use serde::{Deserialize, Serialize};

use crate::error::{AbcError, Result};

/// Norm applied to the difference of two summary vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum SummaryMetric {
    Euclidean,
    L1,
    /// `sqrt(Σ w_i Δ_i²)`.
    WeightedEuclidean { weights: Vec<f64> },
}

impl SummaryMetric {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if let SummaryMetric::WeightedEuclidean { weights } = self {
            if weights.len() != dim {
                return Err(AbcError::shape(format!(
                    "{} weights for {dim} summary statistics",
                    weights.len()
                )));
            }
            if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                return Err(AbcError::param(format!("summary weights must be positive, got {w}")));
            }
        }
        Ok(())
    }

    /// Unchecked evaluation for hot loops; lengths must already agree.
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            SummaryMetric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            SummaryMetric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            SummaryMetric::WeightedEuclidean { weights } => a
                .iter()
                .zip(b)
                .zip(weights)
                .map(|((x, y), w)| w * (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

pub fn summary_distance(eta_y: &[f64], eta_z: &[f64], metric: &SummaryMetric) -> Result<f64> {
    if eta_y.len() != eta_z.len() {
        return Err(AbcError::shape(format!(
            "summary vectors differ in length: {} vs {}",
            eta_y.len(),
            eta_z.len()
        )));
    }
    metric.validate(eta_y.len())?;
    Ok(metric.eval(eta_y, eta_z))
}

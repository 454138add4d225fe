use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::method::ModelPrior;
use crate::discrepancy::{quantile_sorted, sort_values, SummaryMetric};
use crate::error::{AbcError, Result};
use crate::models::{DataShape, ModelSpec};
use crate::seed::SeedSpec;

/// Smallest MAD used when forming weights.
pub const MAD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadWeights {
    pub mad: Vec<f64>,
    /// `1 / max(MAD, floor)` per statistic.
    pub weights: Vec<f64>,
    pub warnings: Vec<String>,
    /// Prior-predictive draws whose summary could not be formed.
    pub skipped_draws: usize,
}

impl MadWeights {
    /// Euclidean distance on `Δ_i / MAD_i`.
    pub fn metric(&self) -> SummaryMetric {
        SummaryMetric::WeightedEuclidean {
            weights: self.weights.iter().map(|w| w * w).collect(),
        }
    }
}

/// Median absolute deviation from the median (type-7 medians).
pub fn mad(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    sort_values(&mut v);
    let med = quantile_sorted(&v, 0.5);
    let mut dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    sort_values(&mut dev);
    quantile_sorted(&dev, 0.5)
}

/// Per-statistic MAD over `n_prior_draws` prior-predictive simulations,
/// drawing models from `prior`.
pub fn estimate_mad_weights(models: &[ModelSpec], prior: &ModelPrior, shape: &DataShape, n_prior_draws: usize, seed: SeedSpec) -> Result<MadWeights> {
    if n_prior_draws < 100 {
        return Err(AbcError::param(format!("need at least 100 prior draws, got {n_prior_draws}")));
    }
    if models.len() != prior.len() {
        return Err(AbcError::shape("model prior and model list differ in length"));
    }
    let pick = prior.sampler()?;
    let stats: Vec<Option<Vec<f64>>> = (0..n_prior_draws as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.with_stream(i).rng();
            let k = pick.sample(&mut rng);
            let m = &models[k].model;
            let theta = m.sample_prior(&mut rng);
            m.simulate(&theta, shape, &mut rng)
                .and_then(|d| m.summarize(&d))
                .ok()
                .filter(|s| s.iter().all(|v| v.is_finite()))
        })
        .collect();
    let skipped = stats.iter().filter(|s| s.is_none()).count();
    let rows: Vec<Vec<f64>> = stats.into_iter().flatten().collect();
    if rows.len() < 2 {
        return Err(AbcError::InsufficientSample {
            needed: 2,
            got: rows.len(),
        });
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(AbcError::shape("models disagree on the summary dimension"));
    }
    let mut mads = Vec::with_capacity(dim);
    let mut weights = Vec::with_capacity(dim);
    let mut warnings = Vec::new();
    let mut column = vec![0.0; rows.len()];
    for j in 0..dim {
        for (c, r) in column.iter_mut().zip(&rows) {
            *c = r[j];
        }
        let m = mad(&column);
        if m < MAD_FLOOR {
            warnings.push(format!("statistic {j} has prior-predictive MAD {m:e}; weight capped at {:e}", 1.0 / MAD_FLOOR));
        }
        mads.push(m);
        weights.push(1.0 / m.max(MAD_FLOOR));
    }
    Ok(MadWeights {
        mad: mads,
        weights,
        warnings,
        skipped_draws: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mad_small_cases() {
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 100.0]), 1.0);
        assert_eq!(mad(&[5.0; 7]), 0.0);
    }

    #[test]
    fn mad_scales_exactly() {
        let x: Vec<f64> = (0..101).map(|i| ((i * 37) % 101) as f64 * 0.37 + 1.1).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let (a, b) = (mad(&x), mad(&x2));
        assert_eq!(b, 2.0 * a);
        assert_eq!(1.0 / b, 0.5 * (1.0 / a));
    }
}

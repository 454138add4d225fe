//! Lagged displacement features and the quantile summary built from them.

use serde::{Deserialize, Serialize};

use super::LocationMatrix;
use crate::discrepancy::{quantile_sorted, sort_values};
use crate::error::{AbcError, Result};

/// Floor applied to quantile gaps before taking logs.
pub const QUANTILE_GAP_FLOOR: f64 = 1e-12;

/// Quantile levels 0, 0.1, ..., 1.
pub const QUANTILE_LEVELS: usize = 11;

/// Components per lag: 10 log quantile gaps and the return count.
pub const STATS_PER_LAG: usize = QUANTILE_LEVELS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagFeatures {
    pub lag: usize,
    pub return_count: usize,
    /// Displacements beyond the return radius, sorted ascending.
    pub non_returns: Vec<f64>,
}

impl LagFeatures {
    pub fn pairs(&self) -> usize {
        self.return_count + self.non_returns.len()
    }
}

/// Absolute displacements `|y[i + lag, j] - y[i, j]|` across toads and valid
/// day pairs, split at `return_radius`. Pairs with a missing endpoint are dropped.
pub fn extract_lag_features(locations: &LocationMatrix, lags: &[usize], return_radius: f64) -> Result<Vec<LagFeatures>> {
    if !(return_radius > 0.0 && return_radius.is_finite()) {
        return Err(AbcError::param(format!("return radius must be positive, got {return_radius}")));
    }
    let (nd, nt) = (locations.n_days(), locations.n_toads());
    let mut out = Vec::with_capacity(lags.len());
    for &lag in lags {
        if lag == 0 || lag >= nd {
            return Err(AbcError::shape(format!("lag {lag} needs at least {} days, matrix has {nd}", lag + 1)));
        }
        let mut return_count = 0;
        let mut non_returns = Vec::with_capacity((nd - lag) * nt);
        for i in 0..nd - lag {
            let (a, b) = (locations.row(i), locations.row(i + lag));
            for (&x, &y) in a.iter().zip(b) {
                let d = (y - x).abs();
                if d.is_nan() {
                    continue;
                }
                if d <= return_radius {
                    return_count += 1;
                } else {
                    non_returns.push(d);
                }
            }
        }
        if return_count == 0 && non_returns.is_empty() {
            return Err(AbcError::EmptyFeature(format!("every pair at lag {lag} has a missing endpoint")));
        }
        sort_values(&mut non_returns);
        out.push(LagFeatures {
            lag,
            return_count,
            non_returns,
        });
    }
    Ok(out)
}

/// Per lag: logs of the ten gaps between the 0, 0.1, ..., 1 quantiles of the
/// non-return displacements, then the return count.
pub fn toad_summary_stats(features: &[LagFeatures]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(features.len() * STATS_PER_LAG);
    for f in features {
        if f.non_returns.is_empty() {
            return Err(AbcError::EmptyFeature(format!("no non-return displacements at lag {}", f.lag)));
        }
        let q: Vec<f64> = (0..QUANTILE_LEVELS)
            .map(|i| quantile_sorted(&f.non_returns, i as f64 / 10.0))
            .collect();
        out.extend(q.windows(2).map(|w| (w[1] - w[0]).max(QUANTILE_GAP_FLOOR).ln()));
        out.push(f.return_count as f64);
    }
    Ok(out)
}

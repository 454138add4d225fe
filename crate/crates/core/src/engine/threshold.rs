use serde::{Deserialize, Serialize};

use super::run::AbcRun;
use crate::discrepancy::{quantile_sorted, sort_values};
use crate::error::{AbcError, Result};

/// Keep the `⌈qN⌉` draws with the smallest distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub quantile: f64,
}

impl ThresholdPolicy {
    pub fn new(quantile: f64) -> Result<Self> {
        if !(quantile > 0.0 && quantile <= 1.0) {
            return Err(AbcError::Policy(format!("quantile must lie in (0, 1], got {quantile}")));
        }
        Ok(Self { quantile })
    }

    /// `⌈qN⌉`, guarding against `q·N` landing a hair above an integer.
    pub fn n_keep(&self, n_draws: usize) -> Result<usize> {
        Self::new(self.quantile)?;
        let keep = (self.quantile * n_draws as f64 - 1e-9).ceil().max(0.0) as usize;
        if keep < 1 {
            return Err(AbcError::Policy(format!(
                "quantile {} of {n_draws} draws keeps nothing",
                self.quantile
            )));
        }
        Ok(keep.min(n_draws))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorEstimate {
    pub model_probs: Vec<f64>,
    pub counts: Vec<usize>,
    /// Accepted parameter vectors, grouped by model.
    pub accepted: Vec<Vec<Vec<f64>>>,
    /// Largest distance among the accepted draws.
    pub epsilon_realized: f64,
    pub n_accepted: usize,
}

/// Indices of the `keep` smallest distances, ties broken by draw index,
/// returned in ascending (distance, index) order.
pub fn smallest_indices(distances: &[f64], keep: usize) -> Vec<usize> {
    let key = |i: usize| {
        let d = distances[i];
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    };
    let mut idx: Vec<usize> = (0..distances.len()).collect();
    let cmp = |a: &usize, b: &usize| key(*a).total_cmp(&key(*b)).then(a.cmp(b));
    if keep < idx.len() {
        idx.select_nth_unstable_by(keep, cmp);
        idx.truncate(keep);
    }
    idx.sort_unstable_by(cmp);
    idx
}

pub fn apply_threshold(run: &AbcRun, policy: &ThresholdPolicy) -> Result<PosteriorEstimate> {
    let n = run.n_draws();
    let keep = policy.n_keep(n)?;
    let distances = run.distances();
    let chosen = smallest_indices(&distances, keep);
    let k = run.table.n_models();
    let mut counts = vec![0; k];
    let mut accepted = vec![Vec::new(); k];
    for &i in &chosen {
        let m = run.table.model_index[i] as usize;
        counts[m] += 1;
        accepted[m].push(run.table.theta(i).to_vec());
    }
    let epsilon_realized = chosen.last().map(|&i| distances[i]).unwrap_or(f64::NAN);
    Ok(PosteriorEstimate {
        model_probs: counts.iter().map(|&c| c as f64 / keep as f64).collect(),
        counts,
        accepted,
        epsilon_realized,
        n_accepted: keep,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
}

/// Descriptive summaries of model `k`'s accepted parameters, or `None`
/// when it has no accepted draws.
pub fn posterior_param_summary(estimate: &PosteriorEstimate, names: &[String], k: usize) -> Option<Vec<ParamSummary>> {
    let draws = estimate.accepted.get(k)?;
    if draws.is_empty() {
        return None;
    }
    let dim = draws[0].len();
    Some(
        (0..dim)
            .map(|j| {
                let mut col: Vec<f64> = draws.iter().map(|t| t[j]).collect();
                let n = col.len() as f64;
                let mean = col.iter().sum::<f64>() / n;
                let sd = if col.len() > 1 {
                    (col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                sort_values(&mut col);
                let q = |p| quantile_sorted(&col, p);
                ParamSummary {
                    name: names.get(j).cloned().unwrap_or_else(|| format!("theta{j}")),
                    mean,
                    sd,
                    q05: q(0.05),
                    q25: q(0.25),
                    median: q(0.5),
                    q75: q(0.75),
                    q95: q(0.95),
                }
            })
            .collect(),
    )
}

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::mad::{estimate_mad_weights, MadWeights};
use super::method::{AbcMethod, Distance, ModelPrior};
use crate::discrepancy::{
    combine_flat, cvm_general_sorted, cvm_sorted, sort_values, wasserstein1_general_sorted, wasserstein1_sorted,
    MmdObserved, ResolvedKernel, SummaryMetric,
};
use crate::error::{AbcError, Result};
use crate::models::toad::{extract_lag_features, LagFeatures};
use crate::models::{DataShape, Dataset, ModelSpec, SummaryMap};
use crate::seed::SeedSpec;

/// Fresh streams tried after a failed simulation before giving up.
pub const MAX_RETRIES: u32 = 3;

/// Tag of the derived stream used for MAD estimation.
const MAD_STREAM_TAG: u64 = 0x006d_6164;

/// Run-wide knobs that do not change results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Worker threads; `None` uses rayon's global pool.
    pub workers: Option<usize>,
}

/// A draw that needed fresh streams before its simulation succeeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryRecord {
    pub draw: u64,
    pub failed_attempts: u32,
    pub last_error: String,
}

/// Model indices and parameters of every draw, shared by all datasets
/// scored against the same simulations.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawTable {
    pub model_labels: Vec<String>,
    pub param_names: Vec<Vec<String>>,
    /// 0-based.
    pub model_index: Vec<u32>,
    theta_offsets: Vec<usize>,
    theta: Vec<f64>,
    pub retries: Vec<RetryRecord>,
}

impl DrawTable {
    pub fn len(&self) -> usize {
        self.model_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model_index.is_empty()
    }

    pub fn theta(&self, draw: usize) -> &[f64] {
        &self.theta[self.theta_offsets[draw]..self.theta_offsets[draw + 1]]
    }

    pub fn n_models(&self) -> usize {
        self.model_labels.len()
    }

    pub(crate) fn from_parts(
        model_labels: Vec<String>,
        param_names: Vec<Vec<String>>,
        model_index: Vec<u32>,
        thetas: Vec<Vec<f64>>,
        retries: Vec<RetryRecord>,
    ) -> Self {
        let mut theta_offsets = Vec::with_capacity(thetas.len() + 1);
        theta_offsets.push(0);
        let mut theta = Vec::new();
        for t in thetas {
            theta.extend_from_slice(&t);
            theta_offsets.push(theta.len());
        }
        Self {
            model_labels,
            param_names,
            model_index,
            theta_offsets,
            theta,
            retries,
        }
    }
}

/// Everything a run fixed from the data before simulating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResolution {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<ResolvedKernel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mad: Option<MadWeights>,
}

/// The stored draws of one ABC run against one observed dataset.
#[derive(Debug, Clone)]
pub struct AbcRun {
    pub table: Arc<DrawTable>,
    pub method: AbcMethod,
    pub seed: SeedSpec,
    pub config_digest: String,
    pub component_names: Vec<String>,
    /// Row-major `n_draws × component_names.len()`.
    pub components: Vec<f64>,
    /// Whole-run combination, present for combined methods.
    pub combined: Option<Vec<f64>>,
    pub resolution: RunResolution,
}

impl AbcRun {
    pub fn n_draws(&self) -> usize {
        self.table.len()
    }

    pub fn width(&self) -> usize {
        self.component_names.len()
    }

    pub fn components_of(&self, draw: usize) -> &[f64] {
        let w = self.width();
        &self.components[draw * w..(draw + 1) * w]
    }

    /// The distance thresholding acts on.
    pub fn distance(&self, draw: usize) -> f64 {
        match &self.combined {
            Some(c) => c[draw],
            None => self.components[draw * self.width()],
        }
    }

    pub fn distances(&self) -> Vec<f64> {
        (0..self.n_draws()).map(|i| self.distance(i)).collect()
    }
}

/// One ABC run: `n_draws` joint (model, parameter, dataset) simulations
/// scored against `observed`. Nothing is rejected here.
pub fn run_abc(models: &[ModelSpec], prior: &ModelPrior, observed: &Dataset, method: &AbcMethod, n_draws: usize, seed: SeedSpec, options: EngineOptions) -> Result<AbcRun> {
    let mut runs = run_abc_batch(models, prior, std::slice::from_ref(observed), method, n_draws, seed, options)?;
    Ok(runs.pop().expect("one run per dataset"))
}

/// Scores every observed dataset against one shared set of simulations.
/// Datasets must share a shape. A Gaussian MMD bandwidth chosen by the
/// median heuristic is computed once from the pooled observed data.
pub fn run_abc_batch(models: &[ModelSpec], prior: &ModelPrior, observed: &[Dataset], method: &AbcMethod, n_draws: usize, seed: SeedSpec, options: EngineOptions) -> Result<Vec<AbcRun>> {
    method.validate()?;
    if models.is_empty() {
        return Err(AbcError::Config("no candidate models".into()));
    }
    if prior.len() != models.len() {
        return Err(AbcError::Config(format!(
            "model prior has {} entries for {} models",
            prior.len(),
            models.len()
        )));
    }
    if n_draws == 0 {
        return Err(AbcError::param("need at least one draw"));
    }
    if n_draws > u32::MAX as usize {
        return Err(AbcError::param("draw count exceeds 2^32"));
    }
    let first = observed.first().ok_or_else(|| AbcError::Config("no observed datasets".into()))?;
    let shape = first.shape();
    if let Some(d) = observed.iter().find(|d| d.shape() != shape) {
        return Err(AbcError::shape(format!("observed datasets differ in shape: {:?} vs {:?}", d.shape(), shape)));
    }
    if let DataShape::Sample { n: 0 } = shape {
        return Err(AbcError::InsufficientSample { needed: 1, got: 0 });
    }

    let scorer = Scorer::prepare(models, prior, observed, method, &shape, seed)?;
    let pick = prior.sampler()?;

    let draw = |i: u64| -> Result<DrawOutput> {
        let base = seed.with_stream(i);
        let mut last_error = String::new();
        for attempt in 0..=MAX_RETRIES {
            let stream = if attempt == 0 { base } else { base.derive(u64::from(attempt)) };
            let mut rng = stream.rng();
            let k = pick.sample(&mut rng);
            let m = &models[k].model;
            let theta = m.sample_prior(&mut rng);
            let outcome = m.simulate(&theta, &shape, &mut rng).and_then(|z| scorer.score(&z));
            match outcome {
                Ok(distances) => {
                    return Ok(DrawOutput {
                        model: k as u32,
                        theta,
                        distances,
                        retry: (attempt > 0).then(|| RetryRecord {
                            draw: i,
                            failed_attempts: attempt,
                            last_error: last_error.clone(),
                        }),
                    })
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(AbcError::Simulation {
            draw: i,
            attempts: MAX_RETRIES + 1,
            reason: last_error,
        })
    };

    let outputs: Vec<DrawOutput> = match options.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| AbcError::Config(format!("cannot start {w} workers: {e}")))?;
            pool.install(|| (0..n_draws as u64).into_par_iter().map(draw).collect::<Result<_>>())?
        }
        None => (0..n_draws as u64).into_par_iter().map(draw).collect::<Result<_>>()?,
    };

    let n_sets = observed.len();
    let width = scorer.width;
    let mut per_set: Vec<Vec<f64>> = (0..n_sets).map(|_| Vec::with_capacity(n_draws * width)).collect();
    let mut model_index = Vec::with_capacity(n_draws);
    let mut thetas = Vec::with_capacity(n_draws);
    let mut retries = Vec::new();
    for out in outputs {
        model_index.push(out.model);
        thetas.push(out.theta);
        retries.extend(out.retry);
        for (j, chunk) in out.distances.chunks_exact(width).enumerate() {
            per_set[j].extend_from_slice(chunk);
        }
    }
    let table = Arc::new(DrawTable::from_parts(
        models.iter().map(|m| m.label()).collect(),
        models.iter().map(|m| m.model.param_names().into_iter().map(String::from).collect()).collect(),
        model_index,
        thetas,
        retries,
    ));
    let digest = config_digest(models, prior, method, n_draws, seed, &shape);
    per_set
        .into_iter()
        .map(|components| {
            let combined = match method {
                AbcMethod::Combined { omega, .. } => Some(combine_flat(&components, width, *omega)?),
                _ => None,
            };
            Ok(AbcRun {
                table: Arc::clone(&table),
                method: scorer.resolved_method.clone(),
                seed,
                config_digest: digest.clone(),
                component_names: scorer.component_names.clone(),
                components,
                combined,
                resolution: scorer.resolution.clone(),
            })
        })
        .collect()
}

struct DrawOutput {
    model: u32,
    theta: Vec<f64>,
    /// `n_datasets × width`, dataset-major.
    distances: Vec<f64>,
    retry: Option<RetryRecord>,
}

fn config_digest(models: &[ModelSpec], prior: &ModelPrior, method: &AbcMethod, n_draws: usize, seed: SeedSpec, shape: &DataShape) -> String {
    let shape_desc = match shape {
        DataShape::Sample { n } => serde_json::json!({ "n": n }),
        DataShape::Matrix { n_days, n_toads, mask } => serde_json::json!({
            "n_days": n_days,
            "n_toads": n_toads,
            "missing": mask.as_ref().map(|m| m.iter().filter(|&&b| b).count()).unwrap_or(0),
        }),
    };
    let doc = serde_json::json!({
        "models": models.iter().map(|m| format!("{:?}", m.model)).collect::<Vec<_>>(),
        "prior": prior.probs(),
        "method": method,
        "n_draws": n_draws,
        "seed": seed,
        "shape": shape_desc,
    });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}

/// Observed-side state for each dataset plus the per-draw scoring rule.
struct Scorer {
    kind: ScorerKind,
    width: usize,
    component_names: Vec<String>,
    resolved_method: AbcMethod,
    resolution: RunResolution,
}

enum ScorerKind {
    Summary {
        map: SummaryMap,
        metric: SummaryMetric,
        observed: Vec<Vec<f64>>,
    },
    Sample {
        distance: Distance,
        log: bool,
        observed: Vec<Vec<f64>>,
        mmd: Option<(ResolvedKernel, Vec<MmdObserved>)>,
    },
    Lags {
        distance: Distance,
        log: bool,
        lags: Vec<usize>,
        radius: f64,
        /// Per dataset: return counts and transformed non-return samples.
        observed: Vec<(Vec<f64>, Vec<Vec<f64>>)>,
    },
}

fn transform_sorted(values: &[f64], log: bool) -> Result<Vec<f64>> {
    let mut v = if log {
        if let Some(bad) = values.iter().find(|&&x| !(x > 0.0)) {
            return Err(AbcError::param(format!("log transform needs positive data, got {bad}")));
        }
        values.iter().map(|x| x.ln()).collect()
    } else {
        values.to_vec()
    };
    sort_values(&mut v);
    Ok(v)
}

impl Scorer {
    fn prepare(models: &[ModelSpec], prior: &ModelPrior, observed: &[Dataset], method: &AbcMethod, shape: &DataShape, seed: SeedSpec) -> Result<Self> {
        let mut resolution = RunResolution { kernel: None, mad: None };
        let mut resolved_method = method.clone();
        let kind = match method {
            AbcMethod::Summary { metric, mad_draws } => {
                let map = models[0].model.summary_map().clone();
                if let Some(m) = models.iter().find(|m| *m.model.summary_map() != map) {
                    return Err(AbcError::Config(format!(
                        "model {} uses a different summary map from model {}",
                        m.label(),
                        models[0].label()
                    )));
                }
                let obs = observed
                    .iter()
                    .map(|d| map.apply(d))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| e.context("summarising observed data"))?;
                let dim = obs[0].len();
                let metric = match mad_draws {
                    Some(n) => {
                        let w = estimate_mad_weights(models, prior, shape, *n, seed.derive(MAD_STREAM_TAG))?;
                        let metric = w.metric();
                        resolution.mad = Some(w);
                        metric
                    }
                    None => metric.clone(),
                };
                metric.validate(dim)?;
                resolved_method = AbcMethod::Summary {
                    metric: metric.clone(),
                    mad_draws: *mad_draws,
                };
                ScorerKind::Summary {
                    map,
                    metric,
                    observed: obs,
                }
            }
            AbcMethod::Discrepancy { distance, log } => {
                let obs = observed
                    .iter()
                    .map(|d| transform_sorted(d.as_sample()?, *log))
                    .collect::<Result<Vec<_>>>()?;
                let mmd = match distance {
                    Distance::Mmd { kernel } => {
                        if obs[0].len() < 2 {
                            return Err(AbcError::InsufficientSample {
                                needed: 2,
                                got: obs[0].len(),
                            });
                        }
                        let pooled = obs.concat();
                        let k = kernel.resolve(&pooled)?;
                        resolution.kernel = Some(k);
                        Some((k, obs.iter().map(|y| MmdObserved::new(y, k)).collect()))
                    }
                    _ => None,
                };
                ScorerKind::Sample {
                    distance: *distance,
                    log: *log,
                    observed: obs,
                    mmd,
                }
            }
            AbcMethod::Combined { distance, log, .. } => {
                let Some(SummaryMap::ToadLagStats { lags, return_radius }) = models.first().map(|m| m.model.summary_map().clone()) else {
                    return Err(AbcError::Config("combined distances need toad models".into()));
                };
                let obs = observed
                    .iter()
                    .map(|d| {
                        let f = extract_lag_features(d.as_locations()?, &lags, return_radius)?;
                        Ok(lag_parts(&f, *log))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if let Some(lag) = obs.iter().flat_map(|(_, s)| s.iter().zip(&lags)).find(|(s, _)| s.is_empty()).map(|(_, l)| l) {
                    return Err(AbcError::EmptyFeature(format!("observed data has no non-returns at lag {lag}")));
                }
                ScorerKind::Lags {
                    distance: *distance,
                    log: *log,
                    lags,
                    radius: return_radius,
                    observed: obs,
                }
            }
        };
        let component_names = match &kind {
            ScorerKind::Summary { .. } | ScorerKind::Sample { .. } => vec![method.label()],
            ScorerKind::Lags { lags, .. } => lags
                .iter()
                .map(|l| format!("returns_lag{l}"))
                .chain(lags.iter().map(|l| format!("{}_lag{l}", method.label())))
                .collect(),
        };
        Ok(Self {
            width: component_names.len(),
            component_names,
            kind,
            resolved_method,
            resolution,
        })
    }

    /// Distances from one simulated dataset to every observed dataset,
    /// dataset-major. An error means the draw should be retried.
    fn score(&self, z: &Dataset) -> Result<Vec<f64>> {
        match &self.kind {
            ScorerKind::Summary { map, metric, observed } => {
                let eta = match map.apply(z) {
                    Ok(eta) if eta.iter().all(|v| v.is_finite()) => Some(eta),
                    Ok(_) | Err(AbcError::EmptyFeature(_)) => None,
                    Err(e) => return Err(e),
                };
                Ok(observed
                    .iter()
                    .map(|y| match &eta {
                        Some(eta) => metric.eval(y, eta),
                        None => f64::INFINITY,
                    })
                    .collect())
            }
            ScorerKind::Sample {
                distance,
                log,
                observed,
                mmd,
            } => {
                let zs = transform_sorted(z.as_sample()?, *log)?;
                if zs.iter().any(|v| !v.is_finite()) {
                    return Err(AbcError::param("simulated data is not finite"));
                }
                Ok(match (distance, mmd) {
                    (Distance::Wasserstein, _) => observed.iter().map(|y| wasserstein1_sorted(y, &zs)).collect(),
                    (Distance::Cvm { ties }, _) => observed.iter().map(|y| cvm_sorted(y, &zs, *ties)).collect(),
                    (Distance::Mmd { .. }, Some((kernel, obs))) => {
                        let self_term = MmdObserved::simulated_self_term(kernel, &zs);
                        obs.iter().map(|o| o.distance_with_self_term(&zs, self_term)).collect()
                    }
                    (Distance::Mmd { .. }, None) => unreachable!("mmd state prepared with the run"),
                })
            }
            ScorerKind::Lags {
                distance,
                log,
                lags,
                radius,
                observed,
            } => {
                let feats = match extract_lag_features(z.as_locations()?, lags, *radius) {
                    Ok(f) => f,
                    Err(AbcError::EmptyFeature(_)) => {
                        return Ok(vec![f64::INFINITY; observed.len() * 2 * lags.len()]);
                    }
                    Err(e) => return Err(e),
                };
                let (counts, samples) = lag_parts(&feats, *log);
                let mut out = Vec::with_capacity(observed.len() * 2 * lags.len());
                for (y_counts, y_samples) in observed {
                    out.extend(y_counts.iter().zip(&counts).map(|(a, b)| (a - b).abs()));
                    out.extend(y_samples.iter().zip(&samples).map(|(y, z)| {
                        if z.is_empty() {
                            return f64::INFINITY;
                        }
                        match distance {
                            Distance::Wasserstein => wasserstein1_general_sorted(y, z),
                            Distance::Cvm { ties } => cvm_general_sorted(y, z, *ties),
                            Distance::Mmd { .. } => unreachable!("rejected by validation"),
                        }
                    }));
                }
                Ok(out)
            }
        }
    }
}

fn lag_parts(features: &[LagFeatures], log: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
    let counts = features.iter().map(|f| f.return_count as f64).collect();
    let samples = features
        .iter()
        .map(|f| {
            if log {
                // non-returns exceed a positive radius, and ln keeps them sorted
                f.non_returns.iter().map(|v| v.ln()).collect()
            } else {
                f.non_returns.clone()
            }
        })
        .collect();
    (counts, samples)
}
